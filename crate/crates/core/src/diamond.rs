//! The diamond model: translation-invariant laws through the scalar map
//! `η`, the Ising subfamily `f = g, h = 1`, and period-2 laws.

use num_traits::Num;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{build_matrix, FieldVector, ModelParams, TransitionMatrix};
use crate::recursion::fixed_point_residual;
use crate::roots::{anchored_grid, geometric_grid, scan_roots};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiamondParams {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
}

impl DiamondParams {
    pub fn new(alpha: f64, beta: f64, k: usize) -> Result<Self> {
        ModelParams::Diamond { alpha, beta }.validate()?;
        if k == 0 {
            return Err(Error::Positive { name: "k", value: 0.0 });
        }
        Ok(Self { alpha, beta, k })
    }

    pub fn matrix(&self) -> TransitionMatrix {
        build_matrix(&ModelParams::Diamond { alpha: self.alpha, beta: self.beta })
            .expect("validated diamond parameters")
    }

    fn kf(&self) -> f64 {
        self.k as f64
    }

    fn ki(&self) -> i32 {
        self.k as i32
    }
}

/// Settings for the sign-bracketing root scans.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSettings {
    /// Number of grid intervals.
    pub intervals: usize,
    /// Left end of the geometric grid.
    pub lower: f64,
    /// Right end; derived from the boundedness of the scalar map when unset.
    pub upper: Option<f64>,
    /// Relative bisection tolerance.
    pub rel_tol: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self { intervals: 16_384, lower: 1e-9, upper: None, rel_tol: 1e-14 }
    }
}

impl ScanSettings {
    pub(crate) fn check(&self) -> Result<()> {
        if self.intervals < 2 || !(self.lower > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::Grid(format!("bad scan settings {self:?}")));
        }
        Ok(())
    }

    /// Picks the upper end: the user value if it clears `bound`, else
    /// `2 * bound`.
    pub(crate) fn upper_for(&self, bound: f64) -> Result<f64> {
        match self.upper {
            Some(v_max) if v_max < bound => Err(Error::ScanRange { v_max, bound }),
            Some(v_max) => Ok(v_max),
            None => Ok(2.0 * bound.max(1.0)),
        }
    }
}

/// The pieces of the elimination `u(v)`, `w(v)` used by `η`.
struct Elimination {
    q: f64,
    u: f64,
    w: f64,
}

fn eliminate(v: f64, p: &DiamondParams) -> Elimination {
    let vk = v.powi(p.ki());
    let q = p.alpha + (1.0 - p.alpha) * vk;
    let u = (p.beta + (1.0 - p.beta) * vk) / q;
    let w = (p.alpha * v + (p.beta - p.alpha) * u.powi(p.ki()) / q) / p.beta;
    Elimination { q, u, w }
}

/// `η(v)`: the right-hand side of the scalar equation `v = η(v)` obtained
/// by eliminating `u` and `w` from the translation-invariant system.
///
/// Fails with [`Error::EtaDomain`] where the eliminated `w` would be
/// negative.
///
/// ```
/// use cayley_hc::diamond::{eta, DiamondParams};
/// let p = DiamondParams::new(0.3, 0.6, 3).unwrap();
/// assert!((eta(1.0, &p).unwrap() - 1.0).abs() < 1e-12);
/// ```
pub fn eta(v: f64, p: &DiamondParams) -> Result<f64> {
    let e = eliminate(v, p);
    if e.w < 0.0 || !e.w.is_finite() {
        return Err(Error::EtaDomain { v, inner: e.w });
    }
    let k = p.ki();
    Ok(((1.0 - p.beta) * e.u.powi(k) + p.beta * e.w.powi(k)) / e.q)
}

/// `η'(1) = k [2α - (1 + k(β - α))^2 + k(β^2 - α^2)]`.
pub fn eta_prime_at_1(p: &DiamondParams) -> f64 {
    let (a, b, k) = (p.alpha, p.beta, p.kf());
    k * (2.0 * a - (1.0 + k * (b - a)).powi(2) + k * (b * b - a * a))
}

/// `η(+∞) = α^k β^{1-k} / (1 - α)`.
pub fn eta_at_infinity(p: &DiamondParams) -> f64 {
    p.alpha.powi(p.ki()) * p.beta.powi(1 - p.ki()) / (1.0 - p.alpha)
}

/// Sampled supremum of `η` over its domain, including the limit at
/// infinity. Every root of `η(v) = v` lies below it.
pub fn eta_sup_estimate(p: &DiamondParams) -> f64 {
    geometric_grid(1e-9, 1e9, 4096)
        .into_iter()
        .filter_map(|v| eta(v, p).ok())
        .fold(eta_at_infinity(p).max(1.0), f64::max)
}

/// A translation-invariant solution `(f, g, h) = (u^k, v^k, w^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TiSolution {
    pub v: f64,
    pub u: f64,
    pub w: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    /// Largest relative defect in the three `(u, v, w)` equations.
    pub residual: f64,
}

impl TiSolution {
    pub fn field(&self) -> Result<FieldVector> {
        FieldVector::new([self.f, self.g, self.h])
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Defect of `(u, v, w)` in the reduced translation-invariant system.
pub fn ti_system_residual(p: &DiamondParams, u: f64, v: f64, w: f64) -> f64 {
    let k = p.ki();
    let (uk, vk, wk) = (u.powi(k), v.powi(k), w.powi(k));
    let q = p.alpha + (1.0 - p.alpha) * vk;
    let r1 = rel(u, (p.beta + (1.0 - p.beta) * vk) / q);
    let r2 = rel(v, (p.beta * wk + (1.0 - p.beta) * uk) / q);
    let r3 = rel(w, (p.alpha * wk + (1.0 - p.alpha) * uk) / q);
    r1.max(r2).max(r3)
}

/// All roots of `η(v) = v` on the scan range, sorted by `v`.
///
/// `v = 1` is always included: `η(1) = 1` holds identically, and a
/// tangency there has no sign change to bracket.
///
/// ```
/// use cayley_hc::diamond::{ti_diamond_solutions, DiamondParams, ScanSettings};
/// let p = DiamondParams::new(0.5, 0.5, 2).unwrap();
/// let roots = ti_diamond_solutions(&p, &ScanSettings::default()).unwrap();
/// assert_eq!(roots.len(), 1);
/// assert!((roots[0].v - 1.0).abs() < 1e-12);
/// ```
pub fn ti_diamond_solutions(p: &DiamondParams, scan: &ScanSettings) -> Result<Vec<TiSolution>> {
    scan.check()?;
    let v_max = scan.upper_for(eta_sup_estimate(p))?;
    let grid = anchored_grid(scan.lower, v_max, scan.intervals, 1.0);
    let mut vs = scan_roots(|v| eta(v, p).ok().map(|e| e - v), &grid, scan.rel_tol);
    insert_one(&mut vs);
    Ok(vs
        .into_iter()
        .filter_map(|v| {
            let e = eliminate(v, p);
            (e.w > 0.0).then(|| {
                let k = p.ki();
                TiSolution {
                    v,
                    u: e.u,
                    w: e.w,
                    f: e.u.powi(k),
                    g: v.powi(k),
                    h: e.w.powi(k),
                    residual: ti_system_residual(p, e.u, v, e.w),
                }
            })
        })
        .collect())
}

fn insert_one(roots: &mut Vec<f64>) {
    if let Some(r) = roots.iter_mut().find(|r| (**r - 1.0).abs() < 1e-9) {
        *r = 1.0;
    } else {
        roots.push(1.0);
        roots.sort_by(|a, b| a.total_cmp(b));
    }
}

/// Fixed-point residual of a solution under the four-state map.
pub fn ti_map_residual(p: &DiamondParams, s: &TiSolution) -> Result<f64> {
    fixed_point_residual(&p.matrix(), p.k, &s.field()?)
}

// ---------------------------------------------------------------------------
// Ising subfamily

/// `(α, β) = (θ / (θ + 1), 1 / (θ + 1))`, the parameters at which the
/// subfamily coincides with the Ising recursion at `θ = e^{2J/T}`.
pub fn ising_params_from_theta(theta: f64) -> Result<(f64, f64)> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::Positive { name: "theta", value: theta });
    }
    Ok((theta / (theta + 1.0), 1.0 / (theta + 1.0)))
}

/// `φ(z) = (β + (1 - β) z) / (α + (1 - α) z)`.
pub fn ising_phi(z: f64, p: &DiamondParams) -> f64 {
    (p.beta + (1.0 - p.beta) * z) / (p.alpha + (1.0 - p.alpha) * z)
}

/// `g(z) = φ(z)^k`.
pub fn ising_g(z: f64, p: &DiamondParams) -> f64 {
    ising_phi(z, p).powi(p.ki())
}

/// `(β/α)^k` and `((1-β)/(1-α))^k` in increasing order: the range of `g`.
pub fn ising_seeds(p: &DiamondParams) -> (f64, f64) {
    let a = (p.beta / p.alpha).powi(p.ki());
    let b = ((1.0 - p.beta) / (1.0 - p.alpha)).powi(p.ki());
    (a.min(b), a.max(b))
}

fn ising_grid(p: &DiamondParams, scan: &ScanSettings) -> Vec<f64> {
    let (lo, hi) = ising_seeds(p);
    anchored_grid(0.5 * lo.min(1.0), 2.0 * hi.max(1.0), scan.intervals, 1.0)
}

/// Positive roots of `z = g(z)`, found by a direct scan of
/// `k ln φ(z) - ln z`.
pub fn ising_fixed_points(p: &DiamondParams, scan: &ScanSettings) -> Vec<f64> {
    let k = p.kf();
    let mut roots = scan_roots(|z| Some(k * ising_phi(z, p).ln() - z.ln()), &ising_grid(p, scan), scan.rel_tol);
    insert_one(&mut roots);
    roots
}

/// `(A, B)` of the substitution `x = (1 - β) z / β`, which turns the
/// fixed-point equation into `A x = ((1 + x) / (B + x))^k`.
pub fn ising_reduced_params(p: &DiamondParams) -> (f64, f64) {
    let (a, b) = (p.alpha, p.beta);
    let big_a = b * (1.0 - a).powi(p.ki()) / (1.0 - b).powi(p.ki() + 1);
    let big_b = a * (1.0 - b) / (b * (1.0 - a));
    (big_a, big_b)
}

/// Roots of the fixed-point equation through the reduced `(A, B)` form,
/// mapped back to `z`.
pub fn ising_fixed_points_reduced(p: &DiamondParams, scan: &ScanSettings) -> Vec<f64> {
    let (a, b) = ising_reduced_params(p);
    let s = (1.0 - p.beta) / p.beta;
    let k = p.kf();
    let xgrid: Vec<f64> = ising_grid(p, scan).into_iter().map(|z| s * z).collect();
    let mut roots: Vec<f64> = scan_roots(
        |x| Some(k * ((1.0 + x) / (b + x)).ln() - (a * x).ln()),
        &xgrid,
        scan.rel_tol,
    )
    .into_iter()
    .map(|x| x / s)
    .collect();
    insert_one(&mut roots);
    roots
}

/// `ν_1 <= ν_2` for a given `B`, or `None` when the auxiliary quadratic
/// `x^2 + [2 - (B - 1)(k - 1)] x + B = 0` has no positive real roots.
pub fn ising_nu(big_b: f64, k: usize) -> Option<(f64, f64)> {
    let kf = k as f64;
    let q = 2.0 - (big_b - 1.0) * (kf - 1.0);
    let disc = q * q - 4.0 * big_b;
    if disc < 0.0 {
        return None;
    }
    let r = disc.sqrt();
    let (x1, x2) = ((-q - r) / 2.0, (-q + r) / 2.0);
    if x1 <= 0.0 {
        return None;
    }
    let nu = |x: f64| ((1.0 + x) / (big_b + x)).powi(k as i32) / x;
    let (n1, n2) = (nu(x1), nu(x2));
    Some((n1.min(n2), n1.max(n2)))
}

/// `α_c(β) = β (k + 1)^2 / (4 k β + (k - 1)^2)`.
pub fn ising_critical_alpha(beta: f64, k: usize) -> f64 {
    let kf = k as f64;
    beta * (kf + 1.0).powi(2) / (4.0 * kf * beta + (kf - 1.0).powi(2))
}

/// Three roots by the exact `(A, B)` criterion: `k > 1`,
/// `B > ((k + 1)/(k - 1))^2` and `ν_1 < A < ν_2`.
pub fn ising_three_roots_predicted(p: &DiamondParams) -> bool {
    if p.k < 2 {
        return false;
    }
    let (a, b) = ising_reduced_params(p);
    let kf = p.kf();
    if b <= ((kf + 1.0) / (kf - 1.0)).powi(2) {
        return false;
    }
    ising_nu(b, p.k).is_some_and(|(n1, n2)| n1 < a && a < n2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IsingBounds {
    pub lo: f64,
    pub hi: f64,
    /// `α = β`: every solution is identically 1.
    pub trivial: bool,
    pub converged: bool,
    pub iterations: usize,
}

/// Bounds `z^- <= f_x <= z^+` valid for every solution of the Ising
/// subfamily recursion.
///
/// Starting from the range of `g`, the interval is replaced by its image
/// `[min g, max g]` until it stops moving. For `α > β` this is the
/// monotone iteration of each end; for `α < β` (`g` decreasing) the ends
/// trade places each step and the limit brackets any 2-cycle.
pub fn ising_bounds(p: &DiamondParams) -> IsingBounds {
    if p.alpha == p.beta {
        return IsingBounds { lo: 1.0, hi: 1.0, trivial: true, converged: true, iterations: 0 };
    }
    let (mut lo, mut hi) = ising_seeds(p);
    for it in 1..=1_000_000 {
        let (a, b) = (ising_g(lo, p), ising_g(hi, p));
        let (nlo, nhi) = (a.min(b), a.max(b));
        let done = (nlo - lo).abs() <= 1e-15 * lo && (nhi - hi).abs() <= 1e-15 * hi;
        lo = nlo;
        hi = nhi;
        if done {
            return IsingBounds { lo, hi, trivial: false, converged: true, iterations: it };
        }
    }
    IsingBounds { lo, hi, trivial: false, converged: false, iterations: 1_000_000 }
}

// ---------------------------------------------------------------------------
// Period-2 laws

/// Coefficients of `A z^2 + B z + C = 0`, whose roots are the 2-cycle
/// points of `g` when `k = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadraticCoefficients<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

fn small<T: Num + Clone>(n: u8) -> T {
    (0..n).fold(T::zero(), |acc, _| acc + T::one())
}

/// `A`, `B`, `C` in any numeric type (exact in rationals).
pub fn periodic_coefficients<T: Num + Clone>(alpha: T, beta: T) -> QuadraticCoefficients<T> {
    let one = T::one;
    let (a, b) = (alpha, beta);
    let (ma, mb) = (one() - a.clone(), one() - b.clone());
    let sq = |x: T| x.clone() * x;
    let cube = |x: T| x.clone() * x.clone() * x;
    let big_a = sq(a.clone() * ma.clone() + sq(mb.clone()));
    let big_c = sq(sq(a.clone()) + b.clone() * mb.clone());
    let big_b = small::<T>(4) * a.clone() * b.clone() * ma.clone() * mb.clone()
        + small::<T>(2) * b.clone() * cube(mb.clone())
        + sq(a.clone()) * sq(mb.clone())
        + small::<T>(2) * cube(a.clone()) * ma.clone()
        - sq(ma) * sq(b);
    QuadraticCoefficients { a: big_a, b: big_b, c: big_c }
}

/// The two-factor expression printed as the discriminant. It equals
/// `B^2 - A C`, not `B^2 - 4 A C`.
pub fn printed_discriminant<T: Num + Clone>(alpha: T, beta: T) -> T {
    let one = T::one;
    let (a, b) = (alpha, beta);
    let (ma, mb) = (one() - a.clone(), one() - b.clone());
    let sq = |x: T| x.clone() * x;
    let cube = |x: T| x.clone() * x.clone() * x;
    let abab = a.clone() * b.clone() * ma.clone() * mb.clone();
    let tail = sq(ma.clone()) * sq(b.clone());
    let f1 = small::<T>(3) * abab.clone() + b.clone() * cube(mb.clone()) + cube(a.clone()) * ma.clone()
        - tail.clone();
    let f2 = small::<T>(5) * abab
        + small::<T>(3) * b * cube(mb.clone())
        + small::<T>(2) * sq(a.clone()) * sq(mb)
        + small::<T>(3) * cube(a) * ma
        - tail;
    f1 * f2
}

/// `B^2 - 4 A C`, the discriminant of the quadratic.
pub fn periodic_discriminant<T: Num + Clone>(alpha: T, beta: T) -> T {
    let q = periodic_coefficients(alpha, beta);
    q.b.clone() * q.b - small::<T>(4) * q.a * q.c
}

/// Values on the two parity classes of a period-2 law: `z_even` on
/// vertices at even distance from the root, `z_odd` on the others. The
/// swapped assignment is the second measure of the pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeriodicPair {
    pub z_even: f64,
    pub z_odd: f64,
    /// `max(|g(z_even) - z_odd| / z_odd, |g(z_odd) - z_even| / z_even)`.
    pub residual: f64,
}

impl PeriodicPair {
    fn new(z_even: f64, z_odd: f64, p: &DiamondParams) -> Self {
        let r1 = (ising_g(z_even, p) - z_odd).abs() / z_odd;
        let r2 = (ising_g(z_odd, p) - z_even).abs() / z_even;
        Self { z_even, z_odd, residual: r1.max(r2) }
    }

    pub fn swapped(&self) -> Self {
        Self { z_even: self.z_odd, z_odd: self.z_even, residual: self.residual }
    }
}

/// Period-2 laws for `k = 2` from the quadratic. Returns at most one pair
/// (the two roots are swapped by `g`), ordered `z_even < z_odd`.
///
/// ```
/// use cayley_hc::diamond::{periodic_pairs_k2, DiamondParams};
/// let p = DiamondParams::new(0.1, 0.9, 2).unwrap();
/// let pairs = periodic_pairs_k2(&p).unwrap();
/// assert_eq!(pairs.len(), 1);
/// assert!((pairs[0].z_odd - 61.98386676965933).abs() < 1e-9);
/// ```
pub fn periodic_pairs_k2(p: &DiamondParams) -> Result<Vec<PeriodicPair>> {
    if p.k != 2 {
        return Err(Error::Unsupported(format!(
            "the period-2 quadratic is only available for k = 2, got k = {}",
            p.k
        )));
    }
    let q = periodic_coefficients(p.alpha, p.beta);
    let disc = q.b * q.b - 4.0 * q.a * q.c;
    if !(disc > 0.0) || q.a == 0.0 {
        return Ok(Vec::new());
    }
    // Stable pair of roots.
    let t = -0.5 * (q.b + q.b.signum() * disc.sqrt());
    let (r1, r2) = (t / q.a, q.c / t);
    let (lo, hi) = (r1.min(r2), r1.max(r2));
    if !(lo > 0.0) {
        return Ok(Vec::new());
    }
    let pair = PeriodicPair::new(lo, hi, p);
    let distinct = (ising_g(lo, p) - lo).abs() > 1e-9 * lo;
    Ok(if distinct && pair.residual < 1e-9 { vec![pair] } else { Vec::new() })
}

/// Period-2 laws for any `k` by scanning `ln g(g(z)) - ln z` and
/// discarding the fixed points of `g`.
pub fn periodic_scan_general(p: &DiamondParams, scan: &ScanSettings) -> Vec<PeriodicPair> {
    let k = p.kf();
    let lng = |z: f64| k * ising_phi(z, p).ln();
    let roots = scan_roots(|z| Some(lng(lng(z).exp()) - z.ln()), &ising_grid(p, scan), scan.rel_tol);
    let cycle: Vec<f64> = roots.into_iter().filter(|&z| (lng(z) - z.ln()).abs() > 1e-7).collect();
    let mut pairs: Vec<PeriodicPair> = Vec::new();
    for &z in &cycle {
        let image = ising_g(z, p);
        let Some(&partner) = cycle.iter().find(|&&y| (y - image).abs() <= 1e-7 * y) else {
            continue;
        };
        let (lo, hi) = (z.min(partner), z.max(partner));
        if !pairs.iter().any(|q| (q.z_even - lo).abs() <= 1e-7 * lo) {
            pairs.push(PeriodicPair::new(lo, hi, p));
        }
    }
    pairs
}

// ---------------------------------------------------------------------------
// Region classification

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiamondMode {
    TiFull,
    Ising,
    Periodic,
}

impl DiamondMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::TiFull => "ti-full",
            Self::Ising => "ising",
            Self::Periodic => "periodic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionLabel {
    /// Translation-invariant modes: at least three roots. Periodic mode: at
    /// least one 2-cycle.
    Multiple,
    /// One root.
    Unique,
    /// No 2-cycle.
    Empty,
    /// Criterion positive but the scan found too few solutions.
    Unconfirmed,
    /// Two roots (a tangency) or none.
    Degenerate,
}

impl RegionLabel {
    pub fn name(self) -> &'static str {
        match self {
            Self::Multiple => "multiple",
            Self::Unique => "unique",
            Self::Empty => "empty",
            Self::Unconfirmed => "unconfirmed",
            Self::Degenerate => "degenerate",
        }
    }

    /// Label for a translation-invariant count.
    pub fn for_roots(criterion: f64, count: usize) -> Self {
        match count {
            c if c >= 3 => Self::Multiple,
            _ if criterion > 0.0 => Self::Unconfirmed,
            1 => Self::Unique,
            _ => Self::Degenerate,
        }
    }

    /// Label for a period-2 pair count.
    pub fn for_pairs(criterion: f64, pairs: usize) -> Self {
        if pairs >= 1 {
            Self::Multiple
        } else if criterion > 0.0 {
            Self::Unconfirmed
        } else {
            Self::Empty
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Classification {
    /// Positive where the closed-form criterion predicts multiplicity.
    pub criterion: f64,
    /// Roots (translation-invariant modes) or 2-cycles (periodic mode).
    pub count: usize,
    pub label: RegionLabel,
}

/// Classifies a parameter point.
///
/// * `ti-full`: criterion `|η'(1)| - 1`, count of roots of `η(v) = v`.
/// * `ising`: criterion `α - α_c(β)`, count of roots of `z = g(z)`.
/// * `periodic`: criterion `min(B^2 - 4AC, -B)` (`k = 2` only, NaN
///   otherwise), count of 2-cycles of `g`.
pub fn classify_point(p: &DiamondParams, mode: DiamondMode, scan: &ScanSettings) -> Result<Classification> {
    Ok(match mode {
        DiamondMode::TiFull => {
            let criterion = eta_prime_at_1(p).abs() - 1.0;
            let count = ti_diamond_solutions(p, scan)?.len();
            Classification { criterion, count, label: RegionLabel::for_roots(criterion, count) }
        }
        DiamondMode::Ising => {
            let criterion = p.alpha - ising_critical_alpha(p.beta, p.k);
            let count = ising_fixed_points(p, scan).len();
            Classification { criterion, count, label: RegionLabel::for_roots(criterion, count) }
        }
        DiamondMode::Periodic => {
            let (criterion, count) = if p.k == 2 {
                let q = periodic_coefficients(p.alpha, p.beta);
                let disc = periodic_discriminant(p.alpha, p.beta);
                (disc.min(-q.b), periodic_pairs_k2(p)?.len())
            } else {
                (f64::NAN, periodic_scan_general(p, scan).len())
            };
            Classification { criterion, count, label: RegionLabel::for_pairs(criterion, count) }
        }
    })
}
