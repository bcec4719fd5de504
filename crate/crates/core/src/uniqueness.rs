//! Uniqueness certificates by interval narrowing and a contraction bound.
//!
//! When every entry `P_{0,1}, P_{0,2}, P_{0,3}` is positive the ratios
//! `f_i` are bounded on the positive orthant, so every solution of the
//! recursion lies in a box `D_1`. Mapping the box through `f_i^k` gives a
//! nested sequence `D_1 ⊇ D_2 ⊇ ...`. On the log image of a stage box the
//! partials of `F_i = ln f_i(e^h)` are bounded by `θ^(m)`, and
//! `3 k θ^(m) < 1` forces the trivial law to be the only solution.
//!
//! A failed certificate says nothing about non-uniqueness.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AdmissibilityGraph, TransitionMatrix, STATES};
use crate::recursion::{log_jacobian, ratio_raw};

/// A product of three positive closed intervals `[lo_i, hi_i]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntervalBox {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl IntervalBox {
    pub fn new(lo: [f64; 3], hi: [f64; 3]) -> Result<Self> {
        let ok = (0..3).all(|i| lo[i].is_finite() && hi[i].is_finite() && lo[i] > 0.0 && lo[i] <= hi[i]);
        if ok {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidField(lo))
        }
    }

    pub fn point(z: [f64; 3]) -> Result<Self> {
        Self::new(z, z)
    }

    /// The eight vertices, lower/upper chosen by the bits of the index.
    pub fn corners(&self) -> [[f64; 3]; 8] {
        std::array::from_fn(|m| {
            std::array::from_fn(|i| if m >> i & 1 == 1 { self.hi[i] } else { self.lo[i] })
        })
    }

    /// Whether `other` lies inside `self`, allowing a relative slack `tol`.
    pub fn contains_box(&self, other: &IntervalBox, tol: f64) -> bool {
        (0..3).all(|i| {
            other.lo[i] >= self.lo[i] * (1.0 - tol) && other.hi[i] <= self.hi[i] * (1.0 + tol)
        })
    }

    pub fn contains_point(&self, z: &[f64; 3], tol: f64) -> bool {
        (0..3).all(|i| z[i] >= self.lo[i] * (1.0 - tol) && z[i] <= self.hi[i] * (1.0 + tol))
    }

    /// Largest `ln hi_i - ln lo_i`.
    pub fn log_width(&self) -> f64 {
        (0..3).fold(0.0_f64, |m, i| m.max(self.hi[i].ln() - self.lo[i].ln()))
    }
}

/// `P_{0,1} P_{0,2} P_{0,3} > 0`.
pub fn check_condition_a(p: &TransitionMatrix) -> bool {
    p.get(0, 1) * p.get(0, 2) * p.get(0, 3) > 0.0
}

/// `P_{0,0} = 0` while some `P_{i,0} > 0`: then `f_i` blows up as
/// `z -> 0` and no bounding box exists.
pub fn unbounded_flag(p: &TransitionMatrix) -> bool {
    p.get(0, 0) == 0.0 && (1..STATES).any(|i| p.get(i, 0) > 0.0)
}

/// Outcome of the graph-only test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeVerdict {
    /// Every state has exactly one successor: the admissible set is finite
    /// and the Gibbs measure is uniform on it.
    UniqueUniform,
}

pub fn degree_shortcut(graph: &AdmissibilityGraph) -> Option<DegreeVerdict> {
    graph
        .out_degrees()
        .iter()
        .all(|&d| d == 1)
        .then_some(DegreeVerdict::UniqueUniform)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertifyConfig {
    /// Narrowing stops when no bound moves by more than this.
    pub tol: f64,
    pub m_max: usize,
    /// Lower bounds are clamped to this positive floor.
    pub floor: f64,
    /// Points per axis of the grid used to maximise the partials.
    pub theta_grid: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self { tol: 1e-10, m_max: 200, floor: 1e-12, theta_grid: 33 }
    }
}

fn ensure_applicable(p: &TransitionMatrix) -> Result<()> {
    if !check_condition_a(p) {
        return Err(Error::Inapplicable("condition P01*P02*P03 > 0 fails".into()));
    }
    if unbounded_flag(p) {
        return Err(Error::Inapplicable("P00 = 0 while some P_i0 > 0: ratios unbounded".into()));
    }
    Ok(())
}

/// The first box `D_1`: extremes of `f_i^k` over the open orthant, read off
/// from the coefficient ratios `P_{i,j} / P_{0,j}`. Returns the box and
/// whether a lower bound had to be clamped to `floor`.
pub fn initial_box(p: &TransitionMatrix, k: usize, floor: f64) -> Result<(IntervalBox, bool)> {
    ensure_applicable(p)?;
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    let mut clamped = false;
    for i in 1..=3 {
        let ratios = (0..STATES)
            .filter(|&j| p.get(0, j) > 0.0)
            .map(|j| p.get(i, j) / p.get(0, j));
        let (mn, mx) = ratios.fold((f64::INFINITY, 0.0_f64), |(a, b), r| (a.min(r), b.max(r)));
        let (l, h) = (mn.powi(k as i32), mx.powi(k as i32));
        if l < floor {
            clamped = true;
        }
        lo[i - 1] = l.max(floor);
        hi[i - 1] = h.max(lo[i - 1]);
    }
    Ok((IntervalBox::new(lo, hi)?, clamped))
}

/// One narrowing step: the exact range of each `f_i^k` over `current`,
/// taken at the corners (each `f_i` is monotone along coordinate lines).
pub fn narrow_step(
    p: &TransitionMatrix,
    k: usize,
    current: &IntervalBox,
    floor: f64,
) -> Result<(IntervalBox, bool)> {
    let corners = current.corners();
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    let mut clamped = false;
    for i in 1..=3 {
        let mut mn = f64::INFINITY;
        let mut mx = 0.0_f64;
        for c in &corners {
            let v = ratio_raw(p, i, c)?.powi(k as i32);
            mn = mn.min(v);
            mx = mx.max(v);
        }
        if mn < floor {
            clamped = true;
        }
        lo[i - 1] = mn.max(floor);
        hi[i - 1] = mx.max(lo[i - 1]);
    }
    Ok((IntervalBox::new(lo, hi)?, clamped))
}

/// The box sequence `D_1, D_2, ...`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Narrowing {
    pub boxes: Vec<IntervalBox>,
    pub converged: bool,
    pub floor_clamped: bool,
}

fn max_shift(a: &IntervalBox, b: &IntervalBox) -> f64 {
    (0..3).fold(0.0_f64, |m, i| m.max((a.lo[i] - b.lo[i]).abs()).max((a.hi[i] - b.hi[i]).abs()))
}

/// Iterates [`narrow_step`] from [`initial_box`] until no bound moves by
/// more than `cfg.tol` or `cfg.m_max` boxes exist.
pub fn narrow_boxes(p: &TransitionMatrix, k: usize, cfg: &CertifyConfig) -> Result<Narrowing> {
    let (first, mut floor_clamped) = initial_box(p, k, cfg.floor)?;
    let mut boxes = vec![first];
    let mut converged = false;
    while boxes.len() < cfg.m_max.max(1) {
        let last = boxes[boxes.len() - 1];
        let (next, clamped) = narrow_step(p, k, &last, cfg.floor)?;
        floor_clamped |= clamped;
        boxes.push(next);
        if max_shift(&last, &next) < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(Narrowing { boxes, converged, floor_clamped })
}

/// `θ_ij`: the maximum of `|dF_i/dh_j|` over the log image of `b`,
/// indexed `[i-1][j-1]`.
///
/// The maximum is located on a `grid^3` lattice (box faces included) and
/// then polished by golden-section search along each coordinate around the
/// best lattice point.
pub fn theta_matrix(p: &TransitionMatrix, b: &IntervalBox, grid: usize) -> [[f64; 3]; 3] {
    let grid = grid.max(2);
    let lo = b.lo.map(f64::ln);
    let hi = b.hi.map(f64::ln);
    let axis = |c: usize| -> Vec<f64> {
        if hi[c] <= lo[c] {
            vec![lo[c]]
        } else {
            (0..grid).map(|s| lo[c] + (hi[c] - lo[c]) * s as f64 / (grid - 1) as f64).collect()
        }
    };
    let axes = [axis(0), axis(1), axis(2)];
    let mut best = [[0.0_f64; 3]; 3];
    let mut arg = [[[lo[0], lo[1], lo[2]]; 3]; 3];
    for &x in &axes[0] {
        for &y in &axes[1] {
            for &z in &axes[2] {
                let h = [x, y, z];
                let jac = log_jacobian(p, &h);
                for i in 0..3 {
                    for j in 0..3 {
                        let v = jac[i][j].abs();
                        if v > best[i][j] {
                            best[i][j] = v;
                            arg[i][j] = h;
                        }
                    }
                }
            }
        }
    }
    let cell: [f64; 3] = std::array::from_fn(|c| (hi[c] - lo[c]) / (grid - 1) as f64);
    for i in 0..3 {
        for j in 0..3 {
            if best[i][j] == 0.0 {
                continue;
            }
            let objective = |h: &[f64; 3]| log_jacobian(p, h)[i][j].abs();
            let mut h = arg[i][j];
            for _sweep in 0..2 {
                for c in 0..3 {
                    if cell[c] <= 0.0 {
                        continue;
                    }
                    let a = (h[c] - cell[c]).max(lo[c]);
                    let bnd = (h[c] + cell[c]).min(hi[c]);
                    let (t, v) = golden_max(|t| {
                        let mut q = h;
                        q[c] = t;
                        objective(&q)
                    }, a, bnd);
                    if v > best[i][j] {
                        best[i][j] = v;
                        h[c] = t;
                    }
                }
            }
        }
    }
    best
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `θ = max_ij θ_ij` over the box.
pub fn theta_of_box(p: &TransitionMatrix, b: &IntervalBox, grid: usize) -> f64 {
    theta_matrix(p, b, grid)
        .iter()
        .flatten()
        .fold(0.0_f64, |m, &v| m.max(v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// `3 k θ^(m) < 1` at some stage: the trivial law is the only solution.
    Pass,
    /// Narrowing converged but the bound never dropped below `1 / 3k`.
    Fail,
    /// Narrowing did not converge within `m_max` stages and no stage passed.
    Inconclusive,
    /// Condition on row 0 fails, or the ratios are unbounded.
    Inapplicable,
}

/// Serialisable record of a certification run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContractionCertificate {
    pub condition_a: bool,
    pub unbounded_flag: bool,
    pub k: usize,
    /// Index (1-based) of the last stage examined.
    pub m_stop: usize,
    /// `θ^(m)` for each stage, as a running minimum.
    pub theta_sequence: Vec<f64>,
    pub boxes: Vec<IntervalBox>,
    pub verdict: Verdict,
    pub floor: f64,
    pub floor_clamped: bool,
    pub theta_grid: usize,
}

impl ContractionCertificate {
    /// Smallest `3 k θ^(m)` reached, if any stage was examined.
    pub fn best_bound(&self) -> Option<f64> {
        self.theta_sequence.last().map(|t| 3.0 * self.k as f64 * t)
    }
}

pub fn certify_uniqueness(p: &TransitionMatrix, k: usize, cfg: &CertifyConfig) -> ContractionCertificate {
    let condition_a = check_condition_a(p);
    let unbounded = unbounded_flag(p);
    let mut cert = ContractionCertificate {
        condition_a,
        unbounded_flag: unbounded,
        k,
        m_stop: 0,
        theta_sequence: Vec::new(),
        boxes: Vec::new(),
        verdict: Verdict::Inapplicable,
        floor: cfg.floor,
        floor_clamped: false,
        theta_grid: cfg.theta_grid,
    };
    let Ok((first, clamped)) = initial_box(p, k, cfg.floor) else {
        return cert;
    };
    cert.floor_clamped = clamped;
    let threshold = 1.0 / (3.0 * k as f64);
    let mut current = first;
    let mut running = f64::INFINITY;
    loop {
        cert.boxes.push(current);
        cert.m_stop = cert.boxes.len();
        running = running.min(theta_of_box(p, &current, cfg.theta_grid));
        cert.theta_sequence.push(running);
        if running < threshold {
            cert.verdict = Verdict::Pass;
            return cert;
        }
        if cert.m_stop >= cfg.m_max {
            cert.verdict = Verdict::Inconclusive;
            return cert;
        }
        let next = match narrow_step(p, k, &current, cfg.floor) {
            Ok((next, clamped)) => {
                cert.floor_clamped |= clamped;
                next
            }
            Err(_) => {
                cert.verdict = Verdict::Inconclusive;
                return cert;
            }
        };
        let settled = max_shift(&current, &next) < cfg.tol;
        current = next;
        if settled {
            cert.boxes.push(current);
            cert.m_stop = cert.boxes.len();
            running = running.min(theta_of_box(p, &current, cfg.theta_grid));
            cert.theta_sequence.push(running);
            cert.verdict = if running < threshold { Verdict::Pass } else { Verdict::Fail };
            return cert;
        }
    }
}
