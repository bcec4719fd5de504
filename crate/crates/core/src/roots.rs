//! Global root isolation for scalar functions: sign bracketing on a grid
//! followed by bisection.

/// `n` intervals, `n + 1` points, geometrically spaced on `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 1, "geometric_grid: need 0 < lo < hi");
    let (a, b) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..=n).map(|i| (a + (b - a) * i as f64 / n as f64).exp()).collect();
    grid[0] = lo;
    grid[n] = hi;
    grid
}

/// A geometric grid on `[lo, hi]` refined around `anchor`, where a known
/// root sits and where nearby roots crowd together close to a bifurcation.
/// Adds `1 ± t` style points at geometric offsets from `1e-10` to `0.5`
/// (relative to the anchor) and never contains the anchor itself.
pub fn anchored_grid(lo: f64, hi: f64, n: usize, anchor: f64) -> Vec<f64> {
    let mut grid = geometric_grid(lo, hi, n);
    for t in geometric_grid(1e-10, 0.5, 1024) {
        for x in [anchor * (1.0 - t), anchor * (1.0 + t)] {
            if x > lo && x < hi {
                grid.push(x);
            }
        }
    }
    grid.retain(|&x| x != anchor);
    grid.sort_by(|a, b| a.total_cmp(b));
    grid.dedup();
    grid
}

/// `n` intervals, `n + 1` points, uniformly spaced on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi > lo && n >= 1);
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Bisects a sign change of `f` on `[a, b]` down to a relative width of
/// `rel_tol`. `fa` must be `f(a)`. Points where `f` is undefined end the
/// search at the current bracket midpoint.
pub fn bisect<F>(f: &F, mut a: f64, mut b: f64, mut fa: f64, rel_tol: f64) -> f64
where
    F: Fn(f64) -> Option<f64>,
{
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a) <= rel_tol * m.abs().max(f64::MIN_POSITIVE) || m == a || m == b {
            return m;
        }
        let Some(fm) = f(m) else { return m };
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Every sign change of `f` between consecutive grid points where `f` is
/// defined, refined by bisection. Exact zeros on grid points are reported
/// once. Returns the sorted roots.
///
/// Roots of even multiplicity and pairs of roots inside one grid cell are
/// invisible to this scan.
pub fn scan_roots<F>(f: F, grid: &[f64], rel_tol: f64) -> Vec<f64>
where
    F: Fn(f64) -> Option<f64>,
{
    let values: Vec<Option<f64>> = grid.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..grid.len() {
        let Some(fi) = values[i] else { continue };
        if fi == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if let Some(Some(fj)) = values.get(i + 1) {
            if *fj != 0.0 && (fi > 0.0) != (*fj > 0.0) {
                roots.push(bisect(&f, grid[i], grid[i + 1], fi, rel_tol));
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e3 * rel_tol * b.abs());
    roots
}
