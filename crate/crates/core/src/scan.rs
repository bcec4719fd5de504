//! Parameter-grid scans: one classified row per grid point.
//!
//! Rows come out in row-major order (first axis outer) whatever the number
//! of worker threads, and the CSV writer prints every float with 17
//! significant digits, so output is byte-identical across thread counts.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::diamond::{classify_point, DiamondMode, DiamondParams, RegionLabel, ScanSettings};
use crate::error::{Error, Result};
use crate::fertile::{fertile_criterion, fertile_solutions, FertileParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    TiFull,
    Ising,
    Periodic,
    Stick,
    Gun,
    Key,
}

impl ScanMode {
    pub const ALL: [ScanMode; 6] =
        [Self::TiFull, Self::Ising, Self::Periodic, Self::Stick, Self::Gun, Self::Key];

    pub fn name(self) -> &'static str {
        match self {
            Self::TiFull => "ti-full",
            Self::Ising => "ising",
            Self::Periodic => "periodic",
            Self::Stick => "stick",
            Self::Gun => "gun",
            Self::Key => "key",
        }
    }

    /// Name of the second grid axis: `beta`, or `c` for the gun and key
    /// (which are scanned on the `α = β` line).
    pub fn second_axis(self) -> &'static str {
        match self {
            Self::Gun | Self::Key => "c",
            _ => "beta",
        }
    }

    fn diamond(self) -> Option<DiamondMode> {
        match self {
            Self::TiFull => Some(DiamondMode::TiFull),
            Self::Ising => Some(DiamondMode::Ising),
            Self::Periodic => Some(DiamondMode::Periodic),
            _ => None,
        }
    }
}

impl fmt::Display for ScanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Grid(format!("unknown scan mode `{s}`")))
    }
}

/// `points` evenly spaced values from `lo` to `hi` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo > 0.0 && lo < hi && hi < 1.0) {
            return Err(Error::Grid(format!("axis [{lo}, {hi}] must satisfy 0 < lo < hi < 1")));
        }
        if points < 2 {
            return Err(Error::Grid(format!("axis resolution {points} is below 2")));
        }
        Ok(Self { lo, hi, points })
    }

    pub fn values(&self) -> Vec<f64> {
        // Interpolating from both ends hits `hi` exactly.
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let t = i as f64 / n;
                self.lo * (1.0 - t) + self.hi * t
            })
            .collect()
    }
}

impl Default for Axis {
    fn default() -> Self {
        Self { lo: 0.005, hi: 0.995, points: 100 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanGrid {
    pub mode: ScanMode,
    pub k: usize,
    pub alpha: Axis,
    /// `beta` for diamond and stick modes, `c` for gun and key.
    pub second: Axis,
    /// Fixed gun weight; `a = b = (1 - c - d) / 2`. Ignored elsewhere.
    pub d: f64,
}

impl ScanGrid {
    pub fn new(mode: ScanMode, k: usize, alpha: Axis, second: Axis, d: f64) -> Result<Self> {
        let grid = Self { mode, k, alpha, second, d };
        grid.check()?;
        Ok(grid)
    }

    /// The default 100 x 100 grid over `[0.005, 0.995]^2`. For the gun the
    /// `c` axis stops short of `1 - d`.
    pub fn square(mode: ScanMode, k: usize, d: f64) -> Result<Self> {
        let mut second = Axis::default();
        if mode == ScanMode::Gun {
            second.hi = second.hi.min(1.0 - d - second.lo);
        }
        Self::new(mode, k, Axis::default(), second, d)
    }

    fn check(&self) -> Result<()> {
        Axis::new(self.alpha.lo, self.alpha.hi, self.alpha.points)?;
        Axis::new(self.second.lo, self.second.hi, self.second.points)?;
        if self.k == 0 {
            return Err(Error::Grid("k must be at least 1".into()));
        }
        if self.mode == ScanMode::Gun && !(self.d > 0.0 && self.second.hi + self.d < 1.0) {
            return Err(Error::Grid(format!(
                "gun scans need d > 0 and c + d < 1 on the whole axis (d = {}, c up to {})",
                self.d, self.second.hi
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.alpha.points * self.second.points
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in output order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let second = self.second.values();
        self.alpha
            .values()
            .into_iter()
            .flat_map(|a| second.iter().map(move |&s| (a, s)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegionRow {
    pub alpha: f64,
    /// `beta` or `c`, see [`ScanMode::second_axis`].
    pub second: f64,
    pub criterion: f64,
    pub root_count: usize,
    pub label: RegionLabel,
}

/// Classifies one grid point.
pub fn classify(grid: &ScanGrid, alpha: f64, second: f64, scan: &ScanSettings) -> Result<RegionRow> {
    let (criterion, root_count, label) = if let Some(mode) = grid.mode.diamond() {
        let c = classify_point(&DiamondParams::new(alpha, second, grid.k)?, mode, scan)?;
        (c.criterion, c.count, c.label)
    } else {
        let p = match grid.mode {
            ScanMode::Stick => FertileParams::stick(alpha, second, grid.k)?,
            ScanMode::Gun => {
                let ab = (1.0 - second - grid.d) / 2.0;
                FertileParams::gun(alpha, alpha, ab, ab, second, grid.d, grid.k)?
            }
            _ => {
                let ab = (1.0 - second) / 2.0;
                FertileParams::key(alpha, alpha, ab, ab, second, grid.k)?
            }
        };
        let criterion = fertile_criterion(&p);
        let count = fertile_solutions(&p, scan)?.len();
        (criterion, count, RegionLabel::for_roots(criterion, count))
    };
    Ok(RegionRow { alpha, second, criterion, root_count, label })
}

/// Classifies every grid point on a pool of `threads` workers (`0` picks
/// the rayon default).
pub fn run_scan(grid: &ScanGrid, scan: &ScanSettings, threads: usize) -> Result<Vec<RegionRow>> {
    grid.check()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Grid(format!("cannot start worker pool: {e}")))?;
    let points = grid.points();
    pool.install(|| points.par_iter().map(|&(a, s)| classify(grid, a, s, scan)).collect())
}

pub fn write_csv<W: Write>(mut out: W, mode: ScanMode, rows: &[RegionRow]) -> io::Result<()> {
    writeln!(out, "alpha,{},criterion,root_count,label", mode.second_axis())?;
    for r in rows {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{},{}",
            r.alpha,
            r.second,
            r.criterion,
            r.root_count,
            r.label.name()
        )?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Agreement {
    pub boundary_cells: usize,
    pub agreeing: usize,
}

impl Agreement {
    pub fn fraction(&self) -> f64 {
        if self.boundary_cells == 0 {
            1.0
        } else {
            self.agreeing as f64 / self.boundary_cells as f64
        }
    }
}

/// Agreement between criterion sign and found multiplicity on
/// boundary-adjacent cells.
///
/// A cell is boundary-adjacent when its criterion sign or its
/// multiple/not-multiple class differs from one of its four neighbours; it
/// agrees when `criterion > 0` exactly when it is labelled `multiple`.
/// Cells with a NaN criterion are skipped.
pub fn boundary_agreement(rows: &[RegionRow], grid: &ScanGrid) -> Agreement {
    let (na, ns) = (grid.alpha.points, grid.second.points);
    assert_eq!(rows.len(), na * ns, "rows do not match the grid");
    let positive = |r: &RegionRow| r.criterion > 0.0;
    let multiple = |r: &RegionRow| r.label == RegionLabel::Multiple;
    let mut out = Agreement { boundary_cells: 0, agreeing: 0 };
    for i in 0..na {
        for j in 0..ns {
            let r = &rows[i * ns + j];
            if r.criterion.is_nan() {
                continue;
            }
            let neighbours = [
                (i > 0).then(|| (i - 1, j)),
                (i + 1 < na).then(|| (i + 1, j)),
                (j > 0).then(|| (i, j - 1)),
                (j + 1 < ns).then(|| (i, j + 1)),
            ];
            let on_boundary = neighbours.into_iter().flatten().any(|(a, b)| {
                let q = &rows[a * ns + b];
                !q.criterion.is_nan() && (positive(q) != positive(r) || multiple(q) != multiple(r))
            });
            if on_boundary {
                out.boundary_cells += 1;
                if positive(r) == multiple(r) {
                    out.agreeing += 1;
                }
            }
        }
    }
    out
}
