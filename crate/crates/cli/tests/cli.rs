use std::path::Path;
use std::process::{Command, Output};

fn tanpq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tanpq"))
        .args(args)
        .env_remove("TANPQ_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn probe_reports_the_attracting_fixed_point() {
    let out = tanpq(&["probe", "--p", "1", "--q", "1", "--lambda", "2+0i"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["outcome"], "attracted");
    assert_eq!(report["period"], 1);
    let point = &report["points"][0];
    assert!(point[0].as_f64().unwrap().abs() < 1e-12);
    assert!((point[1].as_f64().unwrap() - 1.9150).abs() < 1e-4);
    let mu = &report["multiplier"];
    assert!((mu[0].as_f64().unwrap() - 0.1664).abs() < 1e-4);
    assert!(mu[1].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn probe_reports_prepoles_and_capture() {
    let out = tanpq(&["probe", "--p", "1", "--q", "1", "--lambda", "0-1.5707963267948966i"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["outcome"], "prepole");
    assert_eq!(report["prepole_order"], 1);
    let out = tanpq(&["probe", "--p", "1", "--q", "1", "--lambda", "0.5+0i"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["outcome"], "captured");
}

#[test]
fn order_two_centers_csv() {
    let out = tanpq(&["centers", "--p", "1", "--q", "1", "--order", "2", "--m-min", "-2", "--m-max", "2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("order,m,branch,lambda_re,lambda_im,residual"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    assert!(rows
        .iter()
        .any(|r| r[0] == 2.0 && r[3].abs() < 1e-12 && (r[4] + std::f64::consts::FRAC_PI_2).abs() < 1e-12));
}

#[test]
fn order_three_centers_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("c3.csv");
    let out = tanpq(&[
        "centers", "--p", "1", "--q", "1", "--order", "3", "--width", "3", "--seeds", "9", "--out",
        path_str(&out_path),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&out_path).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(!rows.is_empty());
    for row in rows {
        let residual: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!(row.starts_with("3,") && residual < 1e-10, "{row}");
    }
}

#[test]
fn renders_do_not_depend_on_threads_or_repetition() {
    let dir = tempfile::tempdir().unwrap();
    let render = |threads: &str, tag: &str| {
        let ppm = dir.path().join(format!("{tag}.ppm"));
        let csv = dir.path().join(format!("{tag}.csv"));
        let out = tanpq(&[
            "render-param", "--p", "2", "--q", "3", "--width", "6", "--res", "64", "--threads", threads, "--out",
            path_str(&ppm), "--csv", path_str(&csv),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        (std::fs::read(ppm).unwrap(), std::fs::read(csv).unwrap())
    };
    let first = render("1", "a");
    assert!(first.0.starts_with(b"P6\n64 64\n255\n"));
    assert_eq!(first, render("3", "b"));
    assert_eq!(first, render("1", "c"));
}

#[test]
fn dynamical_plane_render() {
    let dir = tempfile::tempdir().unwrap();
    let ppm = dir.path().join("dyn.ppm");
    let out = tanpq(&[
        "render-dyn", "--p", "1", "--q", "1", "--lambda", "2+0i", "--width", "4", "--res", "32", "--out",
        path_str(&ppm),
    ]);
    assert_eq!(code(&out), 0);
    let bytes = std::fs::read(ppm).unwrap();
    let header = b"P6\n32 32\n255\n";
    assert_eq!(bytes.len(), header.len() + 3 * 32 * 32);
    // The attracting fixed point pulls in a period-one basin.
    assert!(bytes[header.len()..].chunks(3).any(|c| c == [255, 215, 0]));
}

#[test]
fn thread_count_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let ppm = dir.path().join("t.ppm");
    let base = ["render-param", "--p", "1", "--q", "1", "--res", "8", "--out", path_str(&ppm)];
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_tanpq"));
        cmd.args(base).args(extra).env_remove("TANPQ_THREADS");
        if let Some(v) = env {
            cmd.env("TANPQ_THREADS", v);
        }
        cmd.output().unwrap()
    };
    let out = run(Some("3"), &[]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("3 threads"));
    let out = run(Some("3"), &["--threads", "2"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("2 threads"));
    assert_eq!(code(&run(Some("many"), &[])), 1);
    assert_eq!(code(&run(Some("0"), &[])), 1);
}

#[test]
fn usage_errors_exit_with_one() {
    for args in [
        vec!["probe", "--p", "1", "--q", "1", "--lambda", "2+0j"],
        vec!["probe", "--p", "0", "--q", "1", "--lambda", "2+0i"],
        vec!["probe", "--p", "1", "--q", "1", "--lambda", "0+0i"],
        vec!["centers", "--p", "1", "--q", "1", "--order", "7"],
        vec!["render-param", "--p", "1", "--q", "1", "--res", "0", "--out", "x.ppm"],
        vec!["verify", "--p", "1", "--q", "1", "--suite", "nonsense"],
        vec!["verify", "--p", "3", "--q", "3", "--suite", "symmetry"],
        vec!["frobnicate"],
    ] {
        let out = tanpq(&args);
        assert_eq!(code(&out), 1, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(code(&tanpq(&["--help"])), 0);
}

#[test]
fn io_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/plane.ppm");
    let out = tanpq(&["render-param", "--p", "1", "--q", "1", "--res", "8", "--out", path_str(&missing)]);
    assert_eq!(code(&out), 2);
    // A regular file where the certificate directory should go.
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, b"").unwrap();
    let out = tanpq(&["verify", "--p", "1", "--q", "1", "--suite", "centers", "--out-dir", path_str(&blocker)]);
    assert_eq!(code(&out), 2);
}

#[test]
fn failed_and_inconclusive_verification() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = path_str(dir.path());
    // Thirty iterations cannot settle any cycle: no multipliers to compare.
    let out = tanpq(&[
        "verify", "--p", "1", "--q", "2", "--suite", "multipliers", "--max-iter", "30", "--warmup", "20", "--out-dir",
        out_dir,
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    // Period-two partners are beyond a period budget of one.
    let out = tanpq(&["verify", "--p", "1", "--q", "1", "--suite", "symmetry", "--max-period", "1", "--out-dir", out_dir]);
    assert_eq!(code(&out), 4);
}

#[test]
fn verify_all_suites_for_the_tangent_family() {
    let dir = tempfile::tempdir().unwrap();
    let out = tanpq(&[
        "verify", "--p", "1", "--q", "1", "--suite", "all", "--s2-res", "400", "--out-dir", path_str(dir.path()),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(code(&out), 0, "{stdout}");
    assert_eq!(stdout.lines().filter(|l| l.contains(" PASS ")).count(), 7, "{stdout}");
    for name in ["symmetry", "multipliers", "s1-structure", "s1-boundary", "separating-rays", "s2-bounded", "centers"] {
        let cert = dir.path().join(format!("{name}_p1_q1.json"));
        let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
        assert_eq!(json["passed"], true);
        assert_eq!(json["params"]["p"], 1);
    }
    assert!(dir.path().join("s2_bounded_p1_q1.ppm").exists());
}
