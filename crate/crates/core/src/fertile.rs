//! Translation-invariant laws for the stick, gun and key graphs.
//!
//! Each system collapses to a scalar fixed-point problem: `v = Y(v)` for
//! the stick, `u = U(u)` for the gun and key (under `α = β`, where the
//! first two components coincide).

use serde::Serialize;

use crate::diamond::ScanSettings;
use crate::error::{Error, Result};
use crate::model::{build_matrix, FieldVector, Model, ModelParams, TransitionMatrix};
use crate::recursion::{fixed_point_residual, multistart_fixed_points, Multistart};
use crate::roots::{anchored_grid, geometric_grid, scan_roots};

/// Smallest `u` scanned for the key graph, where `U` blows up at 0.
pub const KEY_EPSILON: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FertileParams {
    pub graph: Model,
    pub alpha: f64,
    pub beta: f64,
    /// Row-0 weights of the gun and key (`d = 0` for the key); unused by
    /// the stick.
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub k: usize,
}

impl FertileParams {
    pub fn stick(alpha: f64, beta: f64, k: usize) -> Result<Self> {
        Self::checked(Self { graph: Model::Stick, alpha, beta, a: 0.0, b: 0.0, c: 0.0, d: 0.0, k })
    }

    pub fn gun(alpha: f64, beta: f64, a: f64, b: f64, c: f64, d: f64, k: usize) -> Result<Self> {
        Self::checked(Self { graph: Model::Gun, alpha, beta, a, b, c, d, k })
    }

    pub fn key(alpha: f64, beta: f64, a: f64, b: f64, c: f64, k: usize) -> Result<Self> {
        Self::checked(Self { graph: Model::Key, alpha, beta, a, b, c, d: 0.0, k })
    }

    /// Builds from catalog parameters; the diamond is rejected.
    pub fn from_model(params: &ModelParams, k: usize) -> Result<Self> {
        match *params {
            ModelParams::Stick { alpha, beta } => Self::stick(alpha, beta, k),
            ModelParams::Gun { alpha, beta, a, b, c, d } => Self::gun(alpha, beta, a, b, c, d, k),
            ModelParams::Key { alpha, beta, a, b, c } => Self::key(alpha, beta, a, b, c, k),
            ModelParams::Diamond { .. } => {
                Err(Error::Unsupported("the diamond is not a fertile graph".into()))
            }
        }
    }

    fn checked(p: Self) -> Result<Self> {
        p.model_params().validate()?;
        if p.k == 0 {
            return Err(Error::Positive { name: "k", value: 0.0 });
        }
        Ok(p)
    }

    pub fn model_params(&self) -> ModelParams {
        let (alpha, beta, a, b, c, d) = (self.alpha, self.beta, self.a, self.b, self.c, self.d);
        match self.graph {
            Model::Stick => ModelParams::Stick { alpha, beta },
            Model::Gun => ModelParams::Gun { alpha, beta, a, b, c, d },
            Model::Key => ModelParams::Key { alpha, beta, a, b, c },
            Model::Diamond => unreachable!("fertile parameters never hold the diamond"),
        }
    }

    pub fn matrix(&self) -> TransitionMatrix {
        build_matrix(&self.model_params()).expect("validated fertile parameters")
    }

    fn ki(&self) -> i32 {
        self.k as i32
    }

    fn kf(&self) -> f64 {
        self.k as f64
    }
}

/// A translation-invariant law `(f, g, h) = (u^k, v^k, w^k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FertileSolution {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    /// Largest relative defect in the `(u, v, w)` system.
    pub residual: f64,
}

impl FertileSolution {
    fn new(p: &FertileParams, u: f64, v: f64, w: f64, residual: f64) -> Self {
        let k = p.ki();
        Self { u, v, w, f: u.powi(k), g: v.powi(k), h: w.powi(k), residual }
    }

    pub fn field(&self) -> Result<FieldVector> {
        FieldVector::new([self.f, self.g, self.h])
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn require(p: &FertileParams, graphs: &[Model]) -> Result<()> {
    if graphs.contains(&p.graph) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("operation not defined for the {} graph", p.graph)))
    }
}

/// Residual of a solution under the four-state map of its matrix.
pub fn fertile_ti_residual(p: &FertileParams, s: &FertileSolution) -> Result<f64> {
    fixed_point_residual(&p.matrix(), p.k, &s.field()?)
}

// ---------------------------------------------------------------------------
// Stick

fn stick_t(v: f64, p: &FertileParams) -> f64 {
    p.beta + (1.0 - p.beta) * v.powi(p.ki())
}

/// `Y(v) = 1 / (α (β + (1 - β) v^k)^{-k} + 1 - α)`.
///
/// ```
/// use cayley_hc::fertile::{stick_y, FertileParams};
/// let p = FertileParams::stick(0.5, 0.5, 2).unwrap();
/// assert!((stick_y(0.0, &p) - 0.4).abs() < 1e-12);
/// assert!((stick_y(1.0, &p) - 1.0).abs() < 1e-12);
/// ```
pub fn stick_y(v: f64, p: &FertileParams) -> f64 {
    1.0 / (p.alpha * stick_t(v, p).powi(-p.ki()) + 1.0 - p.alpha)
}

/// `Y(0) = β^k / (α + (1 - α) β^k)`.
pub fn stick_y_at_zero(p: &FertileParams) -> f64 {
    let bk = p.beta.powi(p.ki());
    bk / (p.alpha + (1.0 - p.alpha) * bk)
}

/// `Y(+∞) = 1 / (1 - α)`.
pub fn stick_y_at_infinity(p: &FertileParams) -> f64 {
    1.0 / (1.0 - p.alpha)
}

/// `Y'(1) = k^2 α (1 - β)`.
pub fn stick_y_prime_at_1(p: &FertileParams) -> f64 {
    p.kf() * p.kf() * p.alpha * (1.0 - p.beta)
}

/// `k^2 α (1 - β) - 1`; positive values guarantee three laws.
pub fn stick_criterion(p: &FertileParams) -> f64 {
    stick_y_prime_at_1(p) - 1.0
}

/// `u(v) = (v T^{-k})^{1/(k+1)}` and `w(v) = (v T)^{1/(k+1)}`.
pub fn stick_uw(v: f64, p: &FertileParams) -> (f64, f64) {
    let t = stick_t(v, p);
    let e = 1.0 / (p.kf() + 1.0);
    ((v * t.powi(-p.ki())).powf(e), (v * t).powf(e))
}

/// Defect of `(u, v, w)` in the reduced stick system.
pub fn stick_system_residual(p: &FertileParams, u: f64, v: f64, w: f64) -> f64 {
    let k = p.ki();
    let den = p.alpha * u.powi(k) + (1.0 - p.alpha) * w.powi(k);
    rel(u, 1.0 / den)
        .max(rel(v, w.powi(k) / den))
        .max(rel(w, stick_t(v, p) / den))
}

/// All roots of `Y(v) = v`, with `u`, `w` recovered, sorted by `v`.
pub fn stick_solutions(p: &FertileParams, scan: &ScanSettings) -> Result<Vec<FertileSolution>> {
    require(p, &[Model::Stick])?;
    scan.check()?;
    let v_max = scan.upper_for(stick_y_at_infinity(p))?;
    let grid = anchored_grid(scan.lower, v_max, scan.intervals, 1.0);
    let mut vs = scan_roots(|v| Some(stick_y(v, p) - v), &grid, scan.rel_tol);
    pin_one(&mut vs);
    Ok(vs
        .into_iter()
        .map(|v| {
            let (u, w) = stick_uw(v, p);
            FertileSolution::new(p, u, v, w, stick_system_residual(p, u, v, w))
        })
        .collect())
}

fn pin_one(roots: &mut Vec<f64>) {
    if let Some(r) = roots.iter_mut().find(|r| (**r - 1.0).abs() < 1e-9) {
        *r = 1.0;
    } else {
        roots.push(1.0);
        roots.sort_by(|a, b| a.total_cmp(b));
    }
}

// ---------------------------------------------------------------------------
// Gun and key

fn require_symmetric(p: &FertileParams) -> Result<()> {
    require(p, &[Model::Gun, Model::Key])?;
    if p.alpha != p.beta {
        return Err(Error::Unsupported(format!(
            "the scalar reduction needs alpha = beta, got alpha = {}, beta = {}",
            p.alpha, p.beta
        )));
    }
    Ok(())
}

/// `U(u) = T^{k+1} / ([(a + b) T^k + c] u^k + d T^k)` with
/// `T = α + (1 - α) u^k`. Requires `α = β`.
pub fn gun_u(u: f64, p: &FertileParams) -> Result<f64> {
    require_symmetric(p)?;
    let k = p.ki();
    let uk = u.powi(k);
    let t = p.alpha + (1.0 - p.alpha) * uk;
    let tk = t.powi(k);
    let den = ((p.a + p.b) * tk + p.c) * uk + p.d * tk;
    let val = t * tk / den;
    if den > 0.0 && val.is_finite() {
        Ok(val)
    } else {
        Err(Error::UDomain(u))
    }
}

/// `U(0) = α / d`; infinite for the key.
pub fn gun_u_at_zero(p: &FertileParams) -> f64 {
    p.alpha / p.d
}

/// `U(+∞) = (1 - α) / (a + b)`.
pub fn gun_u_at_infinity(p: &FertileParams) -> f64 {
    (1.0 - p.alpha) / (p.a + p.b)
}

/// `U'(1) = k {k c + d - α (k c + 1)}`.
pub fn gun_u_prime_at_1(p: &FertileParams) -> f64 {
    let (k, c) = (p.kf(), p.c);
    k * (k * c + p.d - p.alpha * (k * c + 1.0))
}

/// `k |k c + d - α (k c + 1)| - 1`; the key uses `d = 0`.
pub fn gun_criterion(p: &FertileParams) -> f64 {
    gun_u_prime_at_1(p).abs() - 1.0
}

/// `w(u) = u / (α + (1 - α) u^k)`.
pub fn gun_w(u: f64, p: &FertileParams) -> f64 {
    u / (p.alpha + (1.0 - p.alpha) * u.powi(p.ki()))
}

/// Defect of `(u, v, w)` in the reduced gun (or key) system.
pub fn gun_system_residual(p: &FertileParams, u: f64, v: f64, w: f64) -> f64 {
    let k = p.ki();
    let den = p.a * u.powi(k) + p.b * v.powi(k) + p.c * w.powi(k) + p.d;
    rel(u, (p.alpha + (1.0 - p.alpha) * v.powi(k)) / den)
        .max(rel(v, (p.beta + (1.0 - p.beta) * u.powi(k)) / den))
        .max(rel(w, 1.0 / den))
}

fn gun_lower(p: &FertileParams, scan: &ScanSettings) -> f64 {
    if p.graph == Model::Key {
        scan.lower.max(KEY_EPSILON)
    } else {
        scan.lower
    }
}

/// Sampled supremum of `U` on `[lower, ∞)`.
pub fn gun_u_sup_estimate(p: &FertileParams, lower: f64) -> Result<f64> {
    require_symmetric(p)?;
    Ok(geometric_grid(lower, 1e9, 4096)
        .into_iter()
        .filter_map(|u| gun_u(u, p).ok())
        .fold(gun_u_at_infinity(p).max(1.0), f64::max))
}

/// All roots of `U(u) = u`, with `v = u` and `w = u / T`, sorted by `u`.
///
/// The key graph is scanned on `[max(lower, KEY_EPSILON), ∞)`.
///
/// ```
/// use cayley_hc::diamond::ScanSettings;
/// use cayley_hc::fertile::{gun_solutions, FertileParams};
/// let p = FertileParams::gun(0.05, 0.05, 0.05, 0.05, 0.45, 0.45, 2).unwrap();
/// let roots = gun_solutions(&p, &ScanSettings::default()).unwrap();
/// assert!(roots.len() >= 3);
/// ```
pub fn gun_solutions(p: &FertileParams, scan: &ScanSettings) -> Result<Vec<FertileSolution>> {
    require_symmetric(p)?;
    scan.check()?;
    let lower = gun_lower(p, scan);
    let u_max = scan.upper_for(gun_u_sup_estimate(p, lower)?)?;
    let grid = anchored_grid(lower, u_max, scan.intervals, 1.0);
    let mut us = scan_roots(|u| gun_u(u, p).ok().map(|x| x - u), &grid, scan.rel_tol);
    pin_one(&mut us);
    Ok(us
        .into_iter()
        .map(|u| {
            let w = gun_w(u, p);
            FertileSolution::new(p, u, u, w, gun_system_residual(p, u, u, w))
        })
        .collect())
}

/// Damped Newton multi-start on the full map for gun parameters with
/// `α ≠ β`, where no scalar reduction is available. Experimental: the
/// search is not exhaustive.
pub fn gun_solutions_experimental(p: &FertileParams, opts: &Multistart) -> Result<Vec<FieldVector>> {
    require(p, &[Model::Gun, Model::Key])?;
    Ok(multistart_fixed_points(&p.matrix(), p.k, opts))
}

/// Criterion value and solutions for any fertile graph.
pub fn fertile_criterion(p: &FertileParams) -> f64 {
    match p.graph {
        Model::Stick => stick_criterion(p),
        _ => gun_criterion(p),
    }
}

pub fn fertile_solutions(p: &FertileParams, scan: &ScanSettings) -> Result<Vec<FertileSolution>> {
    match p.graph {
        Model::Stick => stick_solutions(p, scan),
        _ => gun_solutions(p, scan),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-6;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    fn gun(alpha: f64, c: f64, d: f64, k: usize) -> FertileParams {
        let ab = (1.0 - c - d) / 2.0;
        FertileParams::gun(alpha, alpha, ab, ab, c, d, k).unwrap()
    }

    #[test]
    fn stick_rows_reproduce_the_stick_system() {
        // Plugging the stick rows into the generic recursion must give the
        // printed ratios f = 1/D, g = h/D, h = (β + (1-β) g)/D with
        // D = α f + (1 - α) h.
        let p = FertileParams::stick(0.3, 0.6, 1).unwrap();
        let m = p.matrix();
        for z in [[0.5, 2.0, 3.0], [1.7, 0.2, 0.9], [4.0, 4.0, 0.1]] {
            let fz = FieldVector::new(z).unwrap();
            let image = crate::recursion::ti_map(&m, 1, &fz).unwrap().components();
            let den = 0.3 * z[0] + 0.7 * z[2];
            let expect = [1.0 / den, z[2] / den, (0.6 + 0.4 * z[1]) / den];
            for i in 0..3 {
                assert!((image[i] - expect[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gun_rows_reproduce_the_gun_system() {
        let p = FertileParams::gun(0.3, 0.6, 0.1, 0.2, 0.3, 0.4, 1).unwrap();
        let m = p.matrix();
        for z in [[0.5, 2.0, 3.0], [1.7, 0.2, 0.9]] {
            let image = crate::recursion::ti_map(&m, 1, &FieldVector::new(z).unwrap()).unwrap().components();
            let den = 0.1 * z[0] + 0.2 * z[1] + 0.3 * z[2] + 0.4;
            let expect = [(0.3 + 0.7 * z[1]) / den, (0.6 + 0.4 * z[0]) / den, 1.0 / den];
            for i in 0..3 {
                assert!((image[i] - expect[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn stick_y_landmarks() {
        for k in [1, 2, 3, 5] {
            for (a, b) in [(0.2, 0.3), (0.5, 0.5), (0.9, 0.1)] {
                let p = FertileParams::stick(a, b, k).unwrap();
                assert!((stick_y(1.0, &p) - 1.0).abs() < 1e-12);
                assert!((stick_y(0.0, &p) - stick_y_at_zero(&p)).abs() < 1e-12);
                assert!(rel(stick_y(1e12, &p), stick_y_at_infinity(&p)) < 1e-9);
                let fd = central(|v| stick_y(v, &p), 1.0);
                assert!((fd - stick_y_prime_at_1(&p)).abs() < 1e-5);
            }
        }
        let p = FertileParams::stick(0.5, 0.5, 2).unwrap();
        assert!((stick_y_at_zero(&p) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn stick_y_increasing() {
        let p = FertileParams::stick(0.7, 0.2, 3).unwrap();
        let ys: Vec<f64> = geometric_grid(1e-4, 1e4, 500).into_iter().map(|v| stick_y(v, &p)).collect();
        assert!(ys.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn stick_elimination_identities() {
        // For any v, u(v) and w(v) satisfy the ratios of the system:
        // w / u = T(v) and v / u = w^k. The first equation itself,
        // u = 1 / (α u^k + (1 - α) w^k), is equivalent to v = Y(v).
        let p = FertileParams::stick(0.4, 0.3, 3).unwrap();
        for v in [0.01, 0.5, 1.0, 2.0, 9.0] {
            let (u, w) = stick_uw(v, &p);
            assert!(rel(w / u, stick_t(v, &p)) < 1e-13);
            assert!(rel(v / u, w.powi(3)) < 1e-13);
            let den = 0.4 * u.powi(3) + 0.6 * w.powi(3);
            assert!(rel(u * den, v / stick_y(v, &p)) < 1e-13);
        }
    }

    #[test]
    fn stick_multiple_roots() {
        let p = FertileParams::stick(0.9, 0.1, 2).unwrap();
        assert!((stick_criterion(&p) - 2.24).abs() < 1e-12);
        let roots = stick_solutions(&p, &ScanSettings::default()).unwrap();
        assert!(roots.len() >= 3);
        for r in &roots {
            assert!(r.residual < 1e-9, "{r:?}");
            assert!(fertile_ti_residual(&p, r).unwrap() < 1e-9);
        }
        let one = roots.iter().find(|r| r.v == 1.0).unwrap();
        assert_eq!((one.u, one.w), (1.0, 1.0));

        let q = FertileParams::stick(0.1, 0.9, 2).unwrap();
        assert!(stick_criterion(&q) < 0.0);
        assert_eq!(stick_solutions(&q, &ScanSettings::default()).unwrap().len(), 1);
    }

    #[test]
    fn gun_u_landmarks() {
        let p = gun(0.5, 0.25, 0.25, 2);
        assert!((gun_u(1.0, &p).unwrap() - 1.0).abs() < 1e-14);
        assert!((gun_u_at_zero(&p) - 2.0).abs() < 1e-15);
        assert!((gun_u(0.0, &p).unwrap() - 2.0).abs() < 1e-15);
        for k in [2, 3, 5] {
            for (a, c, d) in [(0.05, 0.45, 0.45), (0.5, 0.4, 0.4), (0.8, 0.1, 0.3)] {
                let p = gun(a, c, d, k);
                let fd = central(|u| gun_u(u, &p).unwrap(), 1.0);
                assert!((fd - gun_u_prime_at_1(&p)).abs() < 1e-5);
                assert!((gun_u(1e9, &p).unwrap() - gun_u_at_infinity(&p)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn gun_needs_symmetric_alpha() {
        let p = FertileParams::gun(0.3, 0.6, 0.1, 0.2, 0.3, 0.4, 2).unwrap();
        assert!(matches!(gun_u(1.0, &p), Err(Error::Unsupported(_))));
        assert!(matches!(gun_solutions(&p, &ScanSettings::default()), Err(Error::Unsupported(_))));
        let found = gun_solutions_experimental(&p, &Multistart::default()).unwrap();
        assert!(!found.is_empty());
        for z in &found {
            assert!(fixed_point_residual(&p.matrix(), 2, z).unwrap() < 1e-10);
        }
    }

    #[test]
    fn gun_examples() {
        let p = gun(0.05, 0.45, 0.45, 2);
        assert!((gun_criterion(&p) + 1.0 - 2.51).abs() < 1e-12);
        let roots = gun_solutions(&p, &ScanSettings::default()).unwrap();
        assert!(roots.len() >= 3);
        for r in &roots {
            assert_eq!(r.u, r.v);
            assert!(r.residual < 1e-9);
            assert!(fertile_ti_residual(&p, r).unwrap() < 1e-9);
        }
        let q = gun(0.5, 0.4, 0.4, 2);
        assert!((gun_criterion(&q) + 1.0 - 0.6).abs() < 1e-12);
        let trivial = gun_solutions(&q, &ScanSettings::default()).unwrap();
        assert!(trivial.iter().any(|r| r.u == 1.0 && gun_w(1.0, &q) == 1.0));
    }

    #[test]
    fn gun_negative_branch_is_not_multiple() {
        // U'(1) < -1 makes u = 1 unstable through oscillation; U - u still
        // has a single sign change, so only one translation-invariant law.
        let p = gun(0.95, 0.05, 0.05, 2);
        assert!(gun_u_prime_at_1(&p) < -1.0);
        assert_eq!(gun_solutions(&p, &ScanSettings::default()).unwrap().len(), 1);
    }

    #[test]
    fn key_runs_on_positive_scan_range() {
        let p = FertileParams::key(0.05, 0.05, 0.3, 0.2, 0.5, 2).unwrap();
        assert!(gun_u_at_zero(&p).is_infinite());
        assert!(matches!(gun_u(0.0, &p), Err(Error::UDomain(_))));
        let roots = gun_solutions(&p, &ScanSettings::default()).unwrap();
        assert!(roots.iter().any(|r| r.u == 1.0));
        for r in &roots {
            assert!(fertile_ti_residual(&p, r).unwrap() < 1e-9);
        }
    }

    #[test]
    fn positive_criterion_gives_three_roots() {
        let s = ScanSettings { intervals: 4096, ..Default::default() };
        for i in 0..30 {
            for j in 0..30 {
                let (x, y) = ((i as f64 + 0.5) / 30.0, (j as f64 + 0.5) / 30.0);
                let stick = FertileParams::stick(x, y, 2).unwrap();
                if stick_criterion(&stick) > 0.0 {
                    assert!(stick_solutions(&stick, &s).unwrap().len() >= 3, "{stick:?}");
                }
                let c = 0.9 * y;
                let g = gun(x, c, 0.05, 2);
                if gun_u_prime_at_1(&g) > 1.0 {
                    assert!(gun_solutions(&g, &s).unwrap().len() >= 3, "{g:?}");
                }
                let ab = (1.0 - c) / 2.0;
                let key = FertileParams::key(x, x, ab, ab, c, 2).unwrap();
                if gun_u_prime_at_1(&key) > 1.0 {
                    assert!(gun_solutions(&key, &s).unwrap().len() >= 3, "{key:?}");
                }
            }
        }
    }
}
