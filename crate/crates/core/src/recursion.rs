//! The splitting-measure recursion.
//!
//! For a vertex with successors `y`, the boundary law satisfies
//! `z_i = prod_y f_i(z_y)` where `f_i` is the ratio of the affine forms
//! given by rows `i` and `0` of the transition matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{FieldVector, TransitionMatrix};

#[inline]
pub(crate) fn affine(row: &[f64; 4], z: &[f64; 3]) -> f64 {
    row[0] + row[1] * z[0] + row[2] * z[1] + row[3] * z[2]
}

/// `f_i(z)` on a raw triple. The triple only needs to be nonnegative.
pub(crate) fn ratio_raw(p: &TransitionMatrix, i: usize, z: &[f64; 3]) -> Result<f64> {
    let num = affine(p.row(i), z);
    let den = affine(p.row(0), z);
    let r = num / den;
    if den > 0.0 && r.is_finite() {
        Ok(r)
    } else {
        Err(Error::Singular(*z))
    }
}

/// `f_i(z_1, z_2, z_3)` for `i` in `1..=3`.
pub fn local_ratio(p: &TransitionMatrix, i: usize, z: &FieldVector) -> Result<f64> {
    assert!((1..=3).contains(&i), "local_ratio: state {i} is not in 1..=3");
    ratio_raw(p, i, &z.components())
}

/// One application of the recursion at a vertex whose successors carry the
/// laws `children`. An empty slice gives the trivial law.
pub fn recursion_step(p: &TransitionMatrix, children: &[FieldVector]) -> Result<FieldVector> {
    let mut out = [1.0; 3];
    for child in children {
        for (i, o) in out.iter_mut().enumerate() {
            *o *= local_ratio(p, i + 1, child)?;
        }
    }
    FieldVector::new(out).map_err(|_| Error::Singular(out))
}

/// The translation-invariant map `z_i -> f_i(z)^k`.
pub fn ti_map(p: &TransitionMatrix, k: usize, z: &FieldVector) -> Result<FieldVector> {
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        *o = local_ratio(p, i + 1, z)?.powi(k as i32);
    }
    FieldVector::new(out).map_err(|_| Error::Singular(out))
}

/// `F_i(h) = ln f_i(e^h)`.
pub fn log_ratio(p: &TransitionMatrix, h: &[f64; 3]) -> Result<[f64; 3]> {
    let x = h.map(f64::exp);
    let den = affine(p.row(0), &x);
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let num = affine(p.row(i + 1), &x);
        *o = num.ln() - den.ln();
        if !o.is_finite() {
            return Err(Error::Singular(x));
        }
    }
    Ok(out)
}

/// Analytic partials `dF_i/dh_j = P_ij e^{h_j} / N_i - P_0j e^{h_j} / D`,
/// indexed `[i-1][j-1]`.
pub fn log_jacobian(p: &TransitionMatrix, h: &[f64; 3]) -> [[f64; 3]; 3] {
    let x = h.map(f64::exp);
    let den = affine(p.row(0), &x);
    std::array::from_fn(|i| {
        let row = p.row(i + 1);
        let num = affine(row, &x);
        std::array::from_fn(|j| x[j] * (row[j + 1] / num - p.get(0, j + 1) / den))
    })
}

/// Largest `|ln ti_map(z)_i - ln z_i|`.
pub fn fixed_point_residual(p: &TransitionMatrix, k: usize, z: &FieldVector) -> Result<f64> {
    let image = ti_map(p, k, z)?;
    let r = image
        .ln()
        .iter()
        .zip(z.ln())
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(r)
}

/// Outcome of plain fixed-point iteration of [`ti_map`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Iteration {
    pub z: FieldVector,
    pub steps: usize,
    pub converged: bool,
}

/// Iterates `z <- ti_map(z)` until successive iterates differ by less than
/// `tol` in the log sup-norm.
pub fn iterate_ti_map(
    p: &TransitionMatrix,
    k: usize,
    start: FieldVector,
    tol: f64,
    max_steps: usize,
) -> Result<Iteration> {
    let mut z = start;
    for steps in 1..=max_steps {
        let next = ti_map(p, k, &z)?;
        let delta = next
            .ln()
            .iter()
            .zip(z.ln())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        z = next;
        if delta < tol {
            return Ok(Iteration { z, steps, converged: true });
        }
    }
    Ok(Iteration { z, steps: max_steps, converged: false })
}

/// Settings for [`multistart_fixed_points`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Multistart {
    pub starts: usize,
    pub seed: u64,
    /// Starts are drawn uniformly from `[-radius, radius]^3` in log space.
    pub log_radius: f64,
    /// Newton stops once the log residual falls below this.
    pub tol: f64,
    /// Two roots closer than this in the log sup-norm are merged.
    pub merge_tol: f64,
}

impl Default for Multistart {
    fn default() -> Self {
        Self { starts: 200, seed: 0x5eed, log_radius: 6.0, tol: 1e-12, merge_tol: 1e-6 }
    }
}

/// Finds translation-invariant fixed points of a general matrix by damped
/// Newton iteration on `k F(h) - h` from random starts.
///
/// Deterministic for a given seed. Returns the distinct roots sorted by
/// their log image. Roots are not guaranteed to be exhaustive.
pub fn multistart_fixed_points(
    p: &TransitionMatrix,
    k: usize,
    cfg: &Multistart,
) -> Vec<FieldVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut roots: Vec<[f64; 3]> = Vec::new();
    // The trivial start is always tried.
    let mut starts = vec![[0.0; 3]];
    starts.extend((0..cfg.starts).map(|_| {
        std::array::from_fn(|_| rng.gen_range(-cfg.log_radius..=cfg.log_radius))
    }));
    for h0 in starts {
        if let Some(h) = newton_log(p, k, h0, cfg.tol) {
            if !roots.iter().any(|r| sup_dist(r, &h) < cfg.merge_tol) {
                roots.push(h);
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.into_iter().filter_map(|h| FieldVector::from_ln(h).ok()).collect()
}

fn sup_dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

fn log_residual(p: &TransitionMatrix, k: usize, h: &[f64; 3]) -> Option<[f64; 3]> {
    let f = log_ratio(p, h).ok()?;
    Some(std::array::from_fn(|i| k as f64 * f[i] - h[i]))
}

fn newton_log(p: &TransitionMatrix, k: usize, mut h: [f64; 3], tol: f64) -> Option<[f64; 3]> {
    const MAX_STEPS: usize = 200;
    const H_LIMIT: f64 = 300.0;
    let mut g = log_residual(p, k, &h)?;
    let mut norm = g.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    for _ in 0..MAX_STEPS {
        if norm < tol {
            return Some(h);
        }
        let jf = log_jacobian(p, &h);
        let jac: [[f64; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| k as f64 * jf[i][j] - if i == j { 1.0 } else { 0.0 }));
        let step = solve3(&jac, &g.map(|x| -x))?;
        let mut lambda = 1.0;
        loop {
            let trial: [f64; 3] = std::array::from_fn(|i| h[i] + lambda * step[i]);
            if trial.iter().all(|x| x.abs() < H_LIMIT) {
                if let Some(gt) = log_residual(p, k, &trial) {
                    let nt = gt.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                    if nt < norm || lambda < 1e-6 {
                        h = trial;
                        g = gt;
                        norm = nt;
                        break;
                    }
                }
            }
            lambda *= 0.5;
            if lambda < 1e-9 {
                return None;
            }
        }
    }
    (norm < tol).then_some(h)
}

/// Solves a 3x3 system by Cramer's rule.
fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d.abs() < 1e-300 || !d.is_finite() {
        return None;
    }
    Some(std::array::from_fn(|col| {
        let mut m = *a;
        for r in 0..3 {
            m[r][col] = b[r];
        }
        det(&m) / d
    }))
}
