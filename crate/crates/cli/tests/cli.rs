use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cayley-hc"));
    c.env_remove("HC_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data_rows(o: &Output) -> Vec<Vec<f64>> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').filter_map(|f| f.parse().ok()).collect())
        .collect()
}

const SKEWED_GUN: [&str; 12] =
    ["--model", "gun", "--alpha", "0.9", "--a", "0.05", "--b", "0.05", "--c", "0.05", "--d", "0.85"];

#[test]
fn certify_exit_codes() {
    let mut args = vec!["certify"];
    args.extend(SKEWED_GUN);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json["certificate"]["verdict"], "pass");

    let o = run(&["certify", "--model", "diamond", "--alpha", "0.3", "--beta", "0.6", "--k", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("P01*P02*P03 > 0"), "{}", stderr(&o));

    let o = run(&["certify", "--model", "key", "--alpha", "0.3", "--a", "0.3", "--b", "0.3", "--c", "0.4"]);
    assert_eq!(o.status.code(), Some(3));

    // Row 0 uniform is not enough: the other gun rows have zeros.
    let o = run(&["certify", "--model", "gun", "--alpha", "0.5", "--a", "0.25", "--b", "0.25", "--c", "0.25", "--d", "0.25"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn certified_point_has_one_root() {
    let mut args = vec!["solve"];
    args.extend(SKEWED_GUN);
    let o = run(&args);
    assert!(o.status.success());
    let rows = data_rows(&o);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], 1.0);
}

#[test]
fn solve_tables() {
    let o = run(&["solve", "--model", "diamond", "--alpha", "0.9", "--beta", "0.1"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("v,u,w,f,g,h,residual\n"));
    let rows = data_rows(&o);
    assert!(rows.len() >= 3);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]), "sorted by v");
    assert!(rows.iter().all(|r| r[6] < 1e-9));

    let o = run(&["solve", "--model", "stick", "--alpha", "0.9", "--beta", "0.1", "--k", "2"]);
    assert!(data_rows(&o).len() >= 3);

    let o = run(&["solve", "--model", "diamond", "--alpha", "0.1", "--beta", "0.9", "--mode", "periodic"]);
    let rows = data_rows(&o);
    assert_eq!(rows.len(), 2, "both parity assignments");
    assert!((rows[0][1] - 0.016133230340664).abs() < 1e-12);
    assert!((rows[0][2] - 61.98386676965933).abs() < 1e-9);
    assert_eq!((rows[1][1], rows[1][2]), (rows[0][2], rows[0][1]));

    let o = run(&["solve", "--model", "diamond", "--alpha", "0.95", "--beta", "0.5", "--mode", "ising"]);
    assert_eq!(data_rows(&o).len(), 3);
}

#[test]
fn seed_is_recorded_and_scoped() {
    let args = [
        "solve", "--model", "gun", "--alpha", "0.3", "--beta", "0.6", "--a", "0.05", "--b", "0.05", "--c", "0.45",
        "--d", "0.45", "--mode", "experimental", "--seed", "11",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).lines().skip(1).all(|l| l.ends_with(",11")));

    let o = run(&["solve", "--model", "diamond", "--alpha", "0.1", "--beta", "0.9", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(1));

    // The scalar gun solver needs alpha = beta.
    let o = run(&args[..args.len() - 4]);
    assert_eq!(o.status.code(), Some(1));
}

fn scan_args(out: &str) -> Vec<&str> {
    vec![
        "scan", "--mode", "ti-full", "--alpha-lo", "0.05", "--alpha-hi", "0.95", "--alpha-points", "6",
        "--beta-lo", "0.05", "--beta-hi", "0.95", "--beta-points", "5", "--intervals", "2048", "--out", out,
    ]
}

#[test]
fn scan_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.csv");
    let many = dir.path().join("many.csv");
    let env = dir.path().join("env.csv");
    let mut args = scan_args(one.to_str().unwrap());
    args.extend(["--threads", "1"]);
    assert!(run(&args).status.success());
    let mut args = scan_args(many.to_str().unwrap());
    args.extend(["--threads", "3"]);
    assert!(run(&args).status.success());
    let o = bin().args(scan_args(env.to_str().unwrap())).env("HC_THREADS", "2").output().unwrap();
    assert!(o.status.success());

    let text = std::fs::read(&one).unwrap();
    assert_eq!(text, std::fs::read(&many).unwrap());
    assert_eq!(text, std::fs::read(&env).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert!(text.starts_with("alpha,beta,criterion,root_count,label\n"));
    assert_eq!(text.lines().count(), 31);
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let second: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(first[0], second[0], "alpha is the outer loop");
}

#[test]
fn scan_errors() {
    let o = run(&scan_args("/nonexistent-dir/x.csv"));
    assert_eq!(o.status.code(), Some(1));
    let o = bin().args(scan_args("-")).env("HC_THREADS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["scan", "--mode", "gun", "--d", "0.3", "--c-hi", "0.9", "--out", "-"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("c + d < 1"));
}

#[test]
fn gun_scan_uses_c_axis() {
    let o = run(&[
        "scan", "--mode", "gun", "--d", "0.45", "--alpha-points", "3", "--c-points", "3", "--c-hi", "0.5",
        "--intervals", "1024", "--out", "-",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("alpha,c,criterion"));
}

#[test]
fn verify_reports() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("measure.csv");
    let o = run(&[
        "verify", "--model", "diamond", "--alpha", "0.1", "--beta", "0.9", "--mode", "periodic", "--dump",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 3);
    let table = std::fs::read_to_string(&dump).unwrap();
    assert!(table.starts_with("s0,s1,"));
    assert_eq!(table.lines().count(), 2049);
    let total: f64 = table.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);

    // A field that is not a solution.
    let o = run(&["verify", "--model", "stick", "--alpha", "0.9", "--beta", "0.1", "--field", "2,1,1"]);
    assert_eq!(o.status.code(), Some(2));

    // On the full tree a nontrivial law is not compatible between depths 1 and 0.
    let o = run(&["verify", "--model", "stick", "--alpha", "0.9", "--beta", "0.1", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "--model", "stick", "--alpha", "0.9", "--beta", "0.1", "--n", "1", "--root", "half"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let o = run(&["verify", "--model", "stick", "--alpha", "0.9", "--beta", "0.1", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("budget"));
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn config_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hc.toml");
    write(&cfg, "[diamond]\nalpha = 0.1\nbeta = 0.9\nk = 2\n\n[solver]\nintervals = 4096\n");
    let c = cfg.to_str().unwrap();

    let o = run(&["--config", c, "solve", "--model", "diamond", "--mode", "periodic"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(data_rows(&o).len(), 2);

    // The flag wins over the file: (0.5, 0.5) has no 2-cycle.
    let o = run(&["--config", c, "solve", "--model", "diamond", "--mode", "periodic", "--alpha", "0.5", "--beta", "0.5"]);
    assert!(o.status.success());
    assert_eq!(data_rows(&o).len(), 0);

    write(&cfg, "[diamond]\nalpha = 0.1\ngamma = 2\n");
    let o = run(&["--config", c, "solve", "--model", "diamond"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn invalid_parameters() {
    let o = run(&["solve", "--model", "diamond", "--alpha", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--beta"));
    let o = run(&["solve", "--model", "gun", "--alpha", "0.1", "--a", "0.3", "--b", "0.3", "--c", "0.3", "--d", "0.3"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["solve", "--model", "diamond", "--alpha", "1.5", "--beta", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["solve", "--model", "square", "--alpha", "0.5", "--beta", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
