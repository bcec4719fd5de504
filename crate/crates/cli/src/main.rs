//! `cayley-hc`: certificates, solves, grid scans and finite-tree checks for
//! the four-state hard-core models.
//!
//! Exit codes: 0 success (certify: pass; verify: every field passed),
//! 1 usage or runtime error, 2 certificate failed or inconclusive (or a
//! field failed verification), 3 certificate not applicable.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cayley_hc::diamond::{
    ising_fixed_points, periodic_pairs_k2, periodic_scan_general, ti_diamond_solutions, DiamondParams, PeriodicPair,
    ScanSettings,
};
use cayley_hc::fertile::{fertile_solutions, gun_solutions_experimental, FertileParams};
use cayley_hc::oracle::{
    finite_measure, verify_field, BoundaryField, FiniteMeasureSpec, FiniteTree, VerifyReport, DEFAULT_BUDGET,
};
use cayley_hc::recursion::{fixed_point_residual, Multistart};
use cayley_hc::scan::{boundary_agreement, run_scan, write_csv, Axis, ScanGrid, ScanMode};
use cayley_hc::uniqueness::{certify_uniqueness, CertifyConfig, Verdict};
use cayley_hc::{build_matrix, FieldVector, Model, ModelParams, RootBranching, TransitionMatrix, TreeShape};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

const EXIT_ERROR: u8 = 1;
const EXIT_NOT_CERTIFIED: u8 = 2;
const EXIT_INAPPLICABLE: u8 = 3;

#[derive(Parser)]
#[command(name = "cayley-hc", version, about = "Gibbs measures of four-state hard-core models on Cayley trees")]
struct Cli {
    /// TOML config with `[diamond]`, `[stick]`, `[gun]`, `[key]`, `[certify]`,
    /// `[solver]` and `[scan]` sections. Flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Try to certify uniqueness by interval contraction; prints JSON.
    Certify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long)]
        floor: Option<f64>,
        #[arg(long)]
        theta_grid: Option<usize>,
    },
    /// Solve for translation-invariant or period-2 laws; prints CSV.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = SolveMode::Ti)]
        mode: SolveMode,
        #[command(flatten)]
        solver: SolverArgs,
        /// Seed of the multi-start solver (`--mode experimental` only).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Classify every point of a parameter grid; writes CSV.
    Scan {
        #[arg(long)]
        mode: Option<ScanMode>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        alpha_lo: Option<f64>,
        #[arg(long)]
        alpha_hi: Option<f64>,
        #[arg(long)]
        alpha_points: Option<usize>,
        /// Second axis: beta, or c for the gun and key.
        #[arg(long, alias = "beta-lo", alias = "c-lo")]
        second_lo: Option<f64>,
        #[arg(long, alias = "beta-hi", alias = "c-hi")]
        second_hi: Option<f64>,
        #[arg(long, alias = "beta-points", alias = "c-points")]
        second_points: Option<usize>,
        /// Fixed gun weight d; a = b = (1 - c - d) / 2.
        #[arg(long)]
        d: Option<f64>,
        /// Worker threads; falls back to HC_THREADS, then all cores.
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Output file, `-` for stdout.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Check solutions against exact finite-tree measures.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// Depth of the larger ball.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Root::Full)]
        root: Root,
        #[arg(long, value_enum, default_value_t = VerifyMode::Ti)]
        mode: VerifyMode,
        /// Verify this field instead of solving, as `z1,z2,z3`.
        #[arg(long, value_delimiter = ',')]
        field: Option<Vec<f64>>,
        #[arg(long)]
        budget: Option<u128>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the depth-n measure of the first field as CSV.
        #[arg(long, value_name = "PATH")]
        dump: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Debug)]
struct ModelArgs {
    #[arg(long)]
    model: Model,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args, Clone, Debug, Default)]
struct SolverArgs {
    /// Bracketing intervals of the root scan.
    #[arg(long)]
    intervals: Option<usize>,
    /// Upper end of the root scan.
    #[arg(long)]
    upper: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SolveMode {
    /// Translation-invariant laws.
    Ti,
    /// Diamond laws with f = g, h = 1.
    Ising,
    /// Diamond period-2 laws with f = g, h = 1.
    Periodic,
    /// Multi-start Newton on the full map (gun and key, any alpha, beta).
    Experimental,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VerifyMode {
    Ti,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Root {
    /// Root has k children.
    Half,
    /// Root has k + 1 children.
    Full,
}

// ---------------------------------------------------------------------------
// Config file

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct Config {
    diamond: Option<ModelSection>,
    stick: Option<ModelSection>,
    gun: Option<ModelSection>,
    key: Option<ModelSection>,
    #[serde(default)]
    certify: CertifySection,
    #[serde(default)]
    solver: SolverSection,
    #[serde(default)]
    scan: ScanSection,
}

#[derive(Deserialize, Default, Debug, Clone)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    alpha: Option<f64>,
    beta: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    c: Option<f64>,
    d: Option<f64>,
    k: Option<usize>,
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct CertifySection {
    tol: Option<f64>,
    m_max: Option<usize>,
    floor: Option<f64>,
    theta_grid: Option<usize>,
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    intervals: Option<usize>,
    upper: Option<f64>,
    seed: Option<u64>,
    starts: Option<usize>,
}

#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct ScanSection {
    mode: Option<String>,
    k: Option<usize>,
    alpha_lo: Option<f64>,
    alpha_hi: Option<f64>,
    alpha_points: Option<usize>,
    second_lo: Option<f64>,
    second_hi: Option<f64>,
    second_points: Option<usize>,
    d: Option<f64>,
}

impl Config {
    fn load(path: Option<&Path>) -> Result<Self, String> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    fn model(&self, m: Model) -> ModelSection {
        let section = match m {
            Model::Diamond => &self.diamond,
            Model::Stick => &self.stick,
            Model::Gun => &self.gun,
            Model::Key => &self.key,
        };
        section.clone().unwrap_or_default()
    }
}

/// Model parameters after flags and config are merged.
struct Resolved {
    params: ModelParams,
    k: usize,
}

fn resolve_model(args: &ModelArgs, cfg: &Config) -> Result<Resolved, String> {
    let sec = cfg.model(args.model);
    let need = |flag: Option<f64>, file: Option<f64>, name: &str| {
        flag.or(file).ok_or_else(|| format!("missing parameter --{name} for the {} model", args.model))
    };
    let alpha = need(args.alpha, sec.alpha, "alpha")?;
    // The gun and key default to the symmetric line alpha = beta.
    let beta = match args.model {
        Model::Gun | Model::Key => args.beta.or(sec.beta).unwrap_or(alpha),
        _ => need(args.beta, sec.beta, "beta")?,
    };
    let params = match args.model {
        Model::Diamond => ModelParams::Diamond { alpha, beta },
        Model::Stick => ModelParams::Stick { alpha, beta },
        Model::Gun => ModelParams::Gun {
            alpha,
            beta,
            a: need(args.a, sec.a, "a")?,
            b: need(args.b, sec.b, "b")?,
            c: need(args.c, sec.c, "c")?,
            d: need(args.d, sec.d, "d")?,
        },
        Model::Key => ModelParams::Key {
            alpha,
            beta,
            a: need(args.a, sec.a, "a")?,
            b: need(args.b, sec.b, "b")?,
            c: need(args.c, sec.c, "c")?,
        },
    };
    params.validate().map_err(|e| e.to_string())?;
    let k = args.k.or(sec.k).unwrap_or(2);
    if k == 0 {
        return Err("k must be at least 1".into());
    }
    Ok(Resolved { params, k })
}

fn scan_settings(args: &SolverArgs, cfg: &Config) -> ScanSettings {
    let mut s = ScanSettings::default();
    if let Some(n) = args.intervals.or(cfg.solver.intervals) {
        s.intervals = n;
    }
    s.upper = args.upper.or(cfg.solver.upper);
    s
}

// ---------------------------------------------------------------------------
// Output helpers

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, String> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) if p == Path::new("-") => Ok(Box::new(io::stdout().lock())),
        Some(p) => {
            let f = File::create(p).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn csv_row(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",")
}

fn io_err(e: io::Error) -> String {
    format!("write failed: {e}")
}

// ---------------------------------------------------------------------------
// Subcommands

fn cmd_certify(
    model: &ModelArgs,
    cfg: &Config,
    tol: Option<f64>,
    m_max: Option<usize>,
    floor: Option<f64>,
    theta_grid: Option<usize>,
) -> Result<u8, String> {
    let r = resolve_model(model, cfg)?;
    let p = build_matrix(&r.params).map_err(|e| e.to_string())?;
    let mut c = CertifyConfig::default();
    c.tol = tol.or(cfg.certify.tol).unwrap_or(c.tol);
    c.m_max = m_max.or(cfg.certify.m_max).unwrap_or(c.m_max);
    c.floor = floor.or(cfg.certify.floor).unwrap_or(c.floor);
    c.theta_grid = theta_grid.or(cfg.certify.theta_grid).unwrap_or(c.theta_grid);
    let cert = certify_uniqueness(&p, r.k, &c);
    let json = serde_json::json!({
        "model": model.model.name(),
        "params": r.params,
        "k": r.k,
        "matrix": p.rows(),
        "certificate": cert,
    });
    let mut w = open_out(None)?;
    writeln!(w, "{}", serde_json::to_string_pretty(&json).map_err(|e| e.to_string())?).map_err(io_err)?;
    w.flush().map_err(io_err)?;
    Ok(match cert.verdict {
        Verdict::Pass => {
            eprintln!("unique: 3k*theta = {:.6} < 1", cert.best_bound().unwrap_or(f64::NAN));
            0
        }
        Verdict::Fail | Verdict::Inconclusive => {
            eprintln!(
                "not certified ({:?}): best 3k*theta = {:.6}; this does not imply non-uniqueness",
                cert.verdict,
                cert.best_bound().unwrap_or(f64::NAN)
            );
            EXIT_NOT_CERTIFIED
        }
        Verdict::Inapplicable => {
            if !cert.condition_a {
                eprintln!(
                    "not applicable: the certificate needs P01*P02*P03 > 0, here P01 = {}, P02 = {}, P03 = {}",
                    p.get(0, 1),
                    p.get(0, 2),
                    p.get(0, 3)
                );
            } else {
                eprintln!("not applicable: P00 = 0 while some P_i0 > 0, so the ratios are unbounded near z = 0");
            }
            EXIT_INAPPLICABLE
        }
    })
}

fn diamond_params(r: &Resolved) -> Result<DiamondParams, String> {
    let ModelParams::Diamond { alpha, beta } = r.params else {
        return Err(format!("this mode needs --model diamond, got {}", r.params.model()));
    };
    DiamondParams::new(alpha, beta, r.k).map_err(|e| e.to_string())
}

fn periodic_pairs(p: &DiamondParams, scan: &ScanSettings) -> Result<Vec<PeriodicPair>, String> {
    if p.k == 2 {
        periodic_pairs_k2(p).map_err(|e| e.to_string())
    } else {
        Ok(periodic_scan_general(p, scan))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    model: &ModelArgs,
    cfg: &Config,
    mode: SolveMode,
    solver: &SolverArgs,
    seed: Option<u64>,
    starts: Option<usize>,
    out: Option<&Path>,
) -> Result<u8, String> {
    let r = resolve_model(model, cfg)?;
    let scan = scan_settings(solver, cfg);
    let seed = seed.or(cfg.solver.seed);
    if seed.is_some() && mode != SolveMode::Experimental {
        return Err("--seed only applies to --mode experimental".into());
    }
    let mut w = open_out(out)?;
    match mode {
        SolveMode::Ti => match r.params {
            ModelParams::Diamond { .. } => {
                let p = diamond_params(&r)?;
                let sols = ti_diamond_solutions(&p, &scan).map_err(|e| e.to_string())?;
                writeln!(w, "v,u,w,f,g,h,residual").map_err(io_err)?;
                for s in sols {
                    writeln!(w, "{}", csv_row(&[s.v, s.u, s.w, s.f, s.g, s.h, s.residual])).map_err(io_err)?;
                }
            }
            _ => {
                let p = FertileParams::from_model(&r.params, r.k).map_err(|e| e.to_string())?;
                if p.graph != Model::Stick && p.alpha != p.beta {
                    return Err("the scalar gun/key solver needs alpha = beta; use --mode experimental".into());
                }
                let sols = fertile_solutions(&p, &scan).map_err(|e| e.to_string())?;
                writeln!(w, "u,v,w,f,g,h,residual").map_err(io_err)?;
                for s in sols {
                    writeln!(w, "{}", csv_row(&[s.u, s.v, s.w, s.f, s.g, s.h, s.residual])).map_err(io_err)?;
                }
            }
        },
        SolveMode::Ising => {
            let p = diamond_params(&r)?;
            let m = p.matrix();
            writeln!(w, "z,f,g,h,residual").map_err(io_err)?;
            for z in ising_fixed_points(&p, &scan) {
                let field = FieldVector::new([z, z, 1.0]).map_err(|e| e.to_string())?;
                let res = fixed_point_residual(&m, p.k, &field).map_err(|e| e.to_string())?;
                writeln!(w, "{}", csv_row(&[z, z, z, 1.0, res])).map_err(io_err)?;
            }
        }
        SolveMode::Periodic => {
            let p = diamond_params(&r)?;
            // Each 2-cycle gives two measures, one per parity assignment.
            writeln!(w, "measure,z_even,z_odd,residual").map_err(io_err)?;
            let mut n = 0;
            for pair in periodic_pairs(&p, &scan)? {
                for q in [pair, pair.swapped()] {
                    n += 1;
                    writeln!(w, "{n},{}", csv_row(&[q.z_even, q.z_odd, q.residual])).map_err(io_err)?;
                }
            }
        }
        SolveMode::Experimental => {
            let p = FertileParams::from_model(&r.params, r.k).map_err(|e| e.to_string())?;
            let mut opts = Multistart::default();
            opts.seed = seed.unwrap_or(opts.seed);
            opts.starts = starts.or(cfg.solver.starts).unwrap_or(opts.starts);
            let roots = gun_solutions_experimental(&p, &opts).map_err(|e| e.to_string())?;
            let m = p.matrix();
            writeln!(w, "z1,z2,z3,residual,seed").map_err(io_err)?;
            for z in roots {
                let res = fixed_point_residual(&m, p.k, &z).map_err(|e| e.to_string())?;
                let c = z.components();
                writeln!(w, "{},{}", csv_row(&[c[0], c[1], c[2], res]), opts.seed).map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    cfg: &Config,
    mode: Option<ScanMode>,
    k: Option<usize>,
    alpha: (Option<f64>, Option<f64>, Option<usize>),
    second: (Option<f64>, Option<f64>, Option<usize>),
    d: Option<f64>,
    threads: Option<usize>,
    solver: &SolverArgs,
    out: &Path,
) -> Result<u8, String> {
    let s = &cfg.scan;
    let mode = match (mode, &s.mode) {
        (Some(m), _) => m,
        (None, Some(name)) => name.parse().map_err(|e: cayley_hc::Error| e.to_string())?,
        (None, None) => return Err("missing --mode".into()),
    };
    let k = k.or(s.k).unwrap_or(2);
    let d = d.or(s.d).unwrap_or(0.0);
    let mut grid = ScanGrid::square(mode, k, if mode == ScanMode::Gun { d } else { 0.0 })
        .map_err(|e| e.to_string())?;
    let axis = |base: Axis, lo: Option<f64>, hi: Option<f64>, n: Option<usize>| {
        Axis::new(lo.unwrap_or(base.lo), hi.unwrap_or(base.hi), n.unwrap_or(base.points)).map_err(|e| e.to_string())
    };
    grid.alpha = axis(grid.alpha, alpha.0.or(s.alpha_lo), alpha.1.or(s.alpha_hi), alpha.2.or(s.alpha_points))?;
    grid.second =
        axis(grid.second, second.0.or(s.second_lo), second.1.or(s.second_hi), second.2.or(s.second_points))?;
    let grid = ScanGrid::new(grid.mode, grid.k, grid.alpha, grid.second, grid.d).map_err(|e| e.to_string())?;

    let threads = match threads {
        Some(t) => t,
        None => match std::env::var("HC_THREADS") {
            Ok(v) => v.trim().parse().map_err(|_| format!("HC_THREADS = `{v}` is not a thread count"))?,
            Err(_) => 0,
        },
    };
    let scan = scan_settings(solver, cfg);
    let rows = run_scan(&grid, &scan, threads).map_err(|e| e.to_string())?;
    let mut w = open_out(Some(out))?;
    write_csv(&mut w, mode, &rows).map_err(io_err)?;
    w.flush().map_err(io_err)?;
    let a = boundary_agreement(&rows, &grid);
    eprintln!(
        "{} points; criterion sign and multiplicity agree on {}/{} boundary-adjacent cells ({:.1}%)",
        rows.len(),
        a.agreeing,
        a.boundary_cells,
        100.0 * a.fraction()
    );
    Ok(0)
}

fn verify_fields(r: &Resolved, mode: VerifyMode, scan: &ScanSettings) -> Result<(TransitionMatrix, Vec<BoundaryField>), String> {
    let err = |e: cayley_hc::Error| e.to_string();
    Ok(match (mode, r.params) {
        (VerifyMode::Periodic, _) => {
            let p = diamond_params(r)?;
            let mut fields = Vec::new();
            for pair in periodic_pairs(&p, scan)? {
                for q in [pair, pair.swapped()] {
                    fields.push(BoundaryField::Periodic {
                        even: FieldVector::new([q.z_even, q.z_even, 1.0]).map_err(err)?,
                        odd: FieldVector::new([q.z_odd, q.z_odd, 1.0]).map_err(err)?,
                    });
                }
            }
            (p.matrix(), fields)
        }
        (VerifyMode::Ti, ModelParams::Diamond { .. }) => {
            let p = diamond_params(r)?;
            let sols = ti_diamond_solutions(&p, scan).map_err(err)?;
            let fields = sols.iter().map(|s| s.field().map(BoundaryField::Constant)).collect::<Result<_, _>>();
            (p.matrix(), fields.map_err(err)?)
        }
        (VerifyMode::Ti, _) => {
            let p = FertileParams::from_model(&r.params, r.k).map_err(err)?;
            let fields: Vec<BoundaryField> = if p.graph != Model::Stick && p.alpha != p.beta {
                gun_solutions_experimental(&p, &Multistart::default())
                    .map_err(err)?
                    .into_iter()
                    .map(BoundaryField::Constant)
                    .collect()
            } else {
                let sols = fertile_solutions(&p, scan).map_err(err)?;
                sols.iter().map(|s| s.field().map(BoundaryField::Constant)).collect::<Result<_, _>>().map_err(err)?
            };
            (p.matrix(), fields)
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    model: &ModelArgs,
    cfg: &Config,
    n: usize,
    root: Root,
    mode: VerifyMode,
    field: Option<&[f64]>,
    budget: Option<u128>,
    solver: &SolverArgs,
    dump: Option<&Path>,
) -> Result<u8, String> {
    let r = resolve_model(model, cfg)?;
    let scan = scan_settings(solver, cfg);
    let (p, fields) = match field {
        Some(z) => {
            if z.len() != 3 {
                return Err(format!("--field needs three values z1,z2,z3, got {}", z.len()));
            }
            let z = FieldVector::new([z[0], z[1], z[2]]).map_err(|e| e.to_string())?;
            (build_matrix(&r.params).map_err(|e| e.to_string())?, vec![BoundaryField::Constant(z)])
        }
        None => verify_fields(&r, mode, &scan)?,
    };
    if fields.is_empty() {
        return Err("no solution fields to verify".into());
    }
    let root = match root {
        Root::Half => RootBranching::HalfTree,
        Root::Full => RootBranching::FullTree,
    };
    let shape = TreeShape::new(r.k, n, root).map_err(|e| e.to_string())?;
    let budget = budget.unwrap_or(DEFAULT_BUDGET);

    let mut w = open_out(None)?;
    writeln!(
        w,
        "even_z1,even_z2,even_z3,odd_z1,odd_z2,odd_z3,configurations,solution_residual,perturbed_residual,perturbed_state,passed"
    )
    .map_err(io_err)?;
    let mut all_passed = true;
    for f in &fields {
        let rep: VerifyReport = verify_field(&p, f, shape, budget).map_err(|e| e.to_string())?;
        let (e, o) = (f.at_depth(0).components(), f.at_depth(1).components());
        writeln!(
            w,
            "{},{},{},{},{}",
            csv_row(&[e[0], e[1], e[2], o[0], o[1], o[2]]),
            rep.configurations,
            csv_row(&[rep.solution_residual, rep.perturbed_residual]),
            rep.perturbed_state,
            rep.passed()
        )
        .map_err(io_err)?;
        all_passed &= rep.passed();
    }
    w.flush().map_err(io_err)?;
    drop(w);
    if let Some(path) = dump {
        let tree = FiniteTree::new(shape).map_err(|e| e.to_string())?;
        let spec = FiniteMeasureSpec::from_field(&p, &tree, &fields[0]);
        let table = finite_measure(&spec, &tree, budget).map_err(|e| e.to_string())?;
        let mut w = open_out(Some(path))?;
        table.write_csv(&mut w).map_err(io_err)?;
        w.flush().map_err(io_err)?;
    }
    Ok(if all_passed { 0 } else { EXIT_NOT_CERTIFIED })
}

fn run(cli: Cli) -> Result<u8, String> {
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Certify { model, tol, m_max, floor, theta_grid } => {
            cmd_certify(&model, &cfg, tol, m_max, floor, theta_grid)
        }
        Command::Solve { model, mode, solver, seed, starts, out } => {
            cmd_solve(&model, &cfg, mode, &solver, seed, starts, out.as_deref())
        }
        Command::Scan {
            mode,
            k,
            alpha_lo,
            alpha_hi,
            alpha_points,
            second_lo,
            second_hi,
            second_points,
            d,
            threads,
            solver,
            out,
        } => cmd_scan(
            &cfg,
            mode,
            k,
            (alpha_lo, alpha_hi, alpha_points),
            (second_lo, second_hi, second_points),
            d,
            threads,
            &solver,
            &out,
        ),
        Command::Verify { model, n, root, mode, field, budget, solver, dump } => {
            cmd_verify(&model, &cfg, n, root, mode, field.as_deref(), budget, &solver, dump.as_deref())
        }
    }
}

fn main() -> ExitCode {
    // Usage errors exit 1 like every other error; 2 and 3 are reserved.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
