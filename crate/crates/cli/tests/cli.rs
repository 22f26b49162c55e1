use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qillum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qillum"))
        .args(args)
        .output()
        .expect("spawn qillum")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let idx = csv
        .lines()
        .next()
        .unwrap()
        .split(',')
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows(csv).into_iter().map(|r| r[idx].clone()).collect()
}

#[test]
fn three_point_grid_gives_three_rows() {
    let csv = stdout(&qillum(&[
        "error-curves",
        "-q",
        "--set",
        "m_values=1000,3000,10000",
    ]));
    assert!(csv.starts_with("M,p_cd,p_ng,p_ci,p_count,r_cd,r_ci,ratio_db,"));
    assert_eq!(rows(&csv).len(), 3);
    assert_eq!(column(&csv, "M"), ["1000", "3000", "10000"]);
}

#[test]
fn no_loss_path_gives_coin_flip() {
    let csv = stdout(&qillum(&[
        "error-curves",
        "-q",
        "--set",
        "kappa=0",
        "--set",
        "m_values=1000,100000,10000000",
    ]));
    for v in column(&csv, "p_cd") {
        assert_eq!(v.parse::<f64>().unwrap(), 0.5);
    }
}

#[test]
fn error_curves_write_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curves.csv");
    let svg = dir.path().join("curves.svg");
    let o = qillum(&[
        "error-curves",
        "--set",
        "m_values=1000,100000,20000000",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let log = String::from_utf8(o.stderr).unwrap();
    assert!(log.contains("# n_b = 20 (default)"));
    assert!(log.contains("# m_values = 1000,100000,20000000 (flag)"));
    assert_eq!(log.lines().filter(|l| l.starts_with("M = ")).count(), 3);
    assert_eq!(rows(&fs::read_to_string(&csv).unwrap()).len(), 3);
    let picture = fs::read_to_string(&svg).unwrap();
    assert_eq!(picture.matches("stroke-dasharray=\"6 4\"").count(), 4);
    assert!(picture.contains("M = 100000"));
}

#[test]
fn qpg_window_and_defaults() {
    let csv = stdout(&qillum(&["qpg-report", "-q", "--set", "window=5"]));
    assert_eq!(rows(&csv).len(), 11);
    let t2: Vec<f64> = column(&csv, "t_abs2")
        .iter()
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(t2[5], 1.0);
    assert!((t2[6] / 1e-4 - 1.0).abs() < 1e-3);
    let csv = stdout(&qillum(&["qpg-report", "-q", "--set", "eta=0"]));
    assert!(column(&csv, "t_abs2")
        .iter()
        .all(|v| v.parse::<f64>().unwrap() == 0.0));
}

#[test]
fn source_defaults_give_about_1e5_modes() {
    let csv = stdout(&qillum(&["source-report", "-q"]));
    assert_eq!(column(&csv, "M"), ["100001"]);
    let n_s: f64 = column(&csv, "N_S")[0].parse().unwrap();
    assert!((n_s - 1e-3).abs() < 1e-15);
}

#[test]
fn montecarlo_is_reproducible_across_thread_counts() {
    let args = |threads: &'static str| {
        [
            "montecarlo",
            "-q",
            "--set",
            "n_s=0.1",
            "--set",
            "kappa=0.1",
            "--set",
            "n_b=1",
            "--set",
            "m=100",
            "--set",
            "trials=3000",
            "--seed",
            "7",
            "--threads",
            threads,
        ]
    };
    let one = stdout(&qillum(&args("1")));
    let four = stdout(&qillum(&args("4")));
    assert_eq!(one, four);
    assert_eq!(rows(&one).len(), 3);
    let other_seed = stdout(&qillum(&[&args("1")[..12], &["--seed", "8"]].concat()));
    assert_ne!(one, other_seed);
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# small run\nwindow = 1   # three rows\ngamma_hz = 2e4\n",
    )
    .unwrap();
    let o = qillum(&[
        "qpg-report",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "window=2",
    ]);
    let log = String::from_utf8(o.stderr.clone()).unwrap();
    assert!(log.contains("# gamma_hz = 20000 (config)"));
    assert_eq!(rows(&stdout(&o)).len(), 5);
}

#[test]
fn exit_codes() {
    assert_eq!(
        qillum(&["montecarlo", "-q", "--set", "trials=0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qillum(&["qpg-report", "-q", "--set", "colour=red"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qillum(&["qpg-report", "-q", "--config", "/nonexistent/run.cfg"])
            .status
            .code(),
        Some(2)
    );
    let unwritable = Path::new("/nonexistent/dir/out.csv");
    assert_eq!(
        qillum(&["source-report", "-q", "--out", unwritable.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let o = qillum(&[
        "error-curves",
        "-q",
        "--set",
        "n_b=1e4",
        "--set",
        "m_values=1000,2000,3000",
    ]);
    assert_eq!(o.status.code(), Some(3));
}
