use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use delta_forge::delaunay::{certify, CertParams, CertStatus};
use delta_forge::geom::{kernel, Point};
use delta_forge::io::{format_net, read_net, write_net, Report};
use delta_forge::net::{generate_test_net, Net, TestNetKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_delta-forge"));
    c.env_remove("DELTA_FORGE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn delta-forge")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn grid_net(dir: &Path, seed: u64) -> PathBuf {
    let net = generate_test_net(&TestNetKind::JitteredGrid { jitter: 0.2 }, 2, 100, seed).unwrap();
    let path = dir.join("in.net");
    write_net(&path, &net).unwrap();
    path
}

fn perturb_into(dir: &Path, input: &Path, tag: &str) -> (Output, PathBuf, PathBuf, PathBuf) {
    let out = dir.join(format!("{tag}.net"));
    let trace = dir.join(format!("{tag}.trace"));
    let report = dir.join(format!("{tag}.report"));
    let o = run(&[
        "perturb",
        "--input",
        s(input),
        "--output",
        s(&out),
        "--trace",
        s(&trace),
        "--report",
        s(&report),
        "--seed",
        "7",
    ]);
    (o, out, trace, report)
}

#[test]
fn help_and_version_exit_zero() {
    for args in [
        &["--help"][..],
        &["--version"],
        &["perturb", "--help"],
        &["certify", "--help"],
    ] {
        let o = run(args);
        assert_eq!(code(&o), 0, "{args:?}");
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn parse_errors_are_one_line() {
    let o = run(&["perturb", "--input", "x.net"]);
    assert_eq!(code(&o), 1);
    let e = stderr(&o);
    assert!(e.starts_with("error: PARAM_ARGS: "), "{e}");
    assert_eq!(e.trim_end().lines().count(), 1, "{e}");
}

#[test]
fn rho_out_of_range_is_param_error() {
    let dir = TempDir::new().unwrap();
    let input = grid_net(dir.path(), 1);
    let o = run(&[
        "perturb",
        "--input",
        s(&input),
        "--output",
        s(&dir.path().join("o.net")),
        "--seed",
        "1",
        "--rho-tilde",
        "0.9",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("error: PARAM_RHO: "), "{}", stderr(&o));
    assert!(!dir.path().join("o.net").exists());
}

#[test]
fn missing_input_is_io_error() {
    let dir = TempDir::new().unwrap();
    let o = run(&[
        "certify",
        "--input",
        s(&dir.path().join("nope.net")),
        "--gamma0",
        "0.1",
        "--delta0",
        "0",
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("error: INPUT_IO: "), "{}", stderr(&o));
}

#[test]
fn malformed_input_is_parse_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.net");
    fs::write(&path, "2 3 1.0 0.5\n0 0\n1 x\n0 1\n").unwrap();
    let o = run(&["certify", "--input", s(&path), "--gamma0", "0.1", "--delta0", "0"]);
    assert_eq!(code(&o), 1);
    let e = stderr(&o);
    assert!(e.starts_with("error: INPUT_PARSE: "), "{e}");
    assert!(e.contains("line 3"), "{e}");
}

#[test]
fn fuzzed_inputs_exit_one() {
    let dir = TempDir::new().unwrap();
    let valid = format_net(&generate_test_net(&TestNetKind::JitteredGrid { jitter: 0.2 }, 2, 16, 3).unwrap());
    let lines: Vec<&str> = valid.lines().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let path = dir.path().join("fuzz.net");
    for case in 0..60 {
        let mut ls: Vec<String> = lines.iter().map(|l| l.to_string()).collect();
        let row = rng.random_range(0..ls.len());
        match case % 6 {
            // drop a coordinate
            0 => {
                let row = 1 + row % (ls.len() - 1);
                ls[row] = ls[row].split_whitespace().next().unwrap().to_string();
            }
            // non-numeric token
            1 => {
                let bad: String = (0..rng.random_range(1..6))
                    .map(|_| rng.random_range('g'..='z'))
                    .collect();
                ls[row].push(' ');
                ls[row].push_str(&bad);
            }
            // missing points
            2 => ls.truncate(1 + rng.random_range(0..ls.len() - 1)),
            // extra point
            3 => ls.push("0.5 0.5".into()),
            // broken header
            4 => {
                ls[0] = ls[0]
                    .split_whitespace()
                    .take(rng.random_range(0..4))
                    .collect::<Vec<_>>()
                    .join(" ")
            }
            // non-finite coordinate
            _ => {
                let row = 1 + row % (ls.len() - 1);
                ls[row] = format!("nan {}", ls[row].split_whitespace().nth(1).unwrap());
            }
        }
        fs::write(&path, ls.join("\n")).unwrap();
        let o = run(&["certify", "--input", s(&path), "--gamma0", "0.1", "--delta0", "0"]);
        assert_eq!(code(&o), 1, "case {case}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error: INPUT_"), "case {case}: {}", stderr(&o));
    }
}

#[test]
fn exact_grid_is_nongeneric() {
    let dir = TempDir::new().unwrap();
    let pts = (0..36)
        .map(|i| Point::new(vec![(i % 6) as f64, (i / 6) as f64]))
        .collect();
    let net = Net::new(pts, 1.0, 1.0, false).unwrap();
    let path = dir.path().join("grid.net");
    write_net(&path, &net).unwrap();
    let o = run(&["certify", "--input", s(&path), "--gamma0", "0.1", "--delta0", "0"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error: NONGENERIC: "));
}

#[test]
fn theoretical_run_succeeds_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = grid_net(dir.path(), 11);
    let (o1, out1, trace1, rep1) = perturb_into(dir.path(), &input, "a");
    assert_eq!(code(&o1), 0, "{}", stderr(&o1));
    let (o2, out2, trace2, rep2) = perturb_into(dir.path(), &input, "b");
    assert_eq!(code(&o2), 0, "{}", stderr(&o2));
    for (a, b) in [(&out1, &out2), (&trace1, &trace2), (&rep1, &rep2)] {
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap(), "{a:?} differs from {b:?}");
    }
    assert_eq!(o1.stdout, o2.stdout);

    let report = Report::parse(&fs::read_to_string(&rep1).unwrap()).unwrap();
    let mean = report.get_f64("run", "mean_trials").unwrap();
    assert!(mean <= 3.0, "mean trials {mean}");
    assert_eq!(report.get("delaunay", "status"), Some("pass"));
    assert_eq!(report.get("forbidden", "count"), Some("0"));
    assert!(report.get_f64("protection", "min_protection").unwrap() > 0.0);

    // the output reads back and re-serialises to the same bytes
    let text = fs::read_to_string(&out1).unwrap();
    let back = read_net(&out1).unwrap();
    assert_eq!(format_net(&back), text);
    assert_eq!(back.len(), 100);

    let trace = fs::read_to_string(&trace1).unwrap();
    assert_eq!(trace.lines().filter(|l| !l.starts_with('#')).count(), 100);
}

#[test]
fn certify_reproduces_perturb_verdict() {
    let dir = TempDir::new().unwrap();
    let input = grid_net(dir.path(), 12);
    let (o, out, _, rep) = perturb_into(dir.path(), &input, "a");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = Report::parse(&fs::read_to_string(&rep).unwrap()).unwrap();
    let gamma0 = report.get("params", "gamma0").unwrap().to_string();
    let c = run(&["certify", "--input", s(&out), "--gamma0", &gamma0, "--delta0", "1e-30"]);
    assert_eq!(code(&c), 0, "{}", stderr(&c));
}

#[test]
fn tampered_net_fails_certification() {
    let dir = TempDir::new().unwrap();
    let net = generate_test_net(&TestNetKind::JitteredGrid { jitter: 0.2 }, 2, 100, 21).unwrap();
    let cert = certify(
        &net,
        &CertParams {
            gamma0: 1e-3,
            delta: 0.0,
        },
    )
    .unwrap();
    assert_eq!(cert.status, CertStatus::Pass);
    let target = cert
        .restricted
        .iter()
        .min_by(|a, b| a.protection.total_cmp(&b.protection))
        .unwrap();
    let coords: Vec<Vec<f64>> = target
        .simplex
        .vertices()
        .iter()
        .map(|&v| net.point(v).coords().to_vec())
        .collect();
    let sphere = kernel::circumsphere(&coords);
    let c = sphere.center.coords().to_vec();
    // nearest non-incident point, moved radially to just outside the ball
    let q = (0..net.len())
        .filter(|&q| !target.simplex.contains(q))
        .min_by(|&a, &b| {
            let da = dist(net.point(a).coords(), &c);
            let db = dist(net.point(b).coords(), &c);
            da.total_cmp(&db)
        })
        .unwrap();
    let x = net.point(q).coords();
    let d = dist(x, &c);
    let want = sphere.radius + 1e-6;
    let moved: Vec<f64> = c.iter().zip(x).map(|(ci, xi)| ci + (xi - ci) * want / d).collect();
    let mut pts = net.points().to_vec();
    pts[q] = Point::new(moved);
    let tampered = Net::new(pts, net.eps(), net.mu0() * 0.5, false).unwrap();
    let path = dir.path().join("tampered.net");
    write_net(&path, &tampered).unwrap();

    let rep = dir.path().join("t.report");
    let o = run(&[
        "certify",
        "--input",
        s(&path),
        "--gamma0",
        "1e-3",
        "--delta0",
        "1e-3",
        "--report",
        s(&rep),
    ]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error: CERT_FAIL: "), "{}", stderr(&o));
    let report = Report::parse(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert!(report.get("delaunay", "status").unwrap().starts_with("fail"));
    assert!(report.get_f64("protection", "min_protection").unwrap() < 1e-5);

    // the untouched net certifies at the same thresholds
    let clean = dir.path().join("clean.net");
    write_net(&clean, &net.with_params(net.eps(), net.mu0() * 0.5).unwrap()).unwrap();
    let o = run(&["certify", "--input", s(&clean), "--gamma0", "1e-3", "--delta0", "1e-9"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[test]
fn plot_needs_planar_net() {
    let dir = TempDir::new().unwrap();
    let net = generate_test_net(&TestNetKind::JitteredGrid { jitter: 0.2 }, 3, 27, 4).unwrap();
    let path = dir.path().join("n3.net");
    write_net(&path, &net).unwrap();
    let plot = dir.path().join("p.svg");
    let o = run(&[
        "certify",
        "--input",
        s(&path),
        "--gamma0",
        "0.01",
        "--delta0",
        "0",
        "--emit-plot",
        s(&plot),
    ]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("error: PARAM_DIM: "), "{}", stderr(&o));
    assert!(!plot.exists());
}

#[test]
fn planar_plot_is_svg() {
    let dir = TempDir::new().unwrap();
    let input = grid_net(dir.path(), 5);
    let plot = dir.path().join("p.svg");
    let o = run(&[
        "certify",
        "--input",
        s(&input),
        "--gamma0",
        "1e-3",
        "--delta0",
        "0",
        "--emit-plot",
        s(&plot),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(fs::read_to_string(&plot).unwrap().starts_with("<svg"));
}

#[test]
fn bad_thread_count_rejected() {
    let o = bin()
        .env("DELTA_FORGE_THREADS", "lots")
        .arg("selftest")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("error: PARAM_THREADS: "), "{}", stderr(&o));
    let o = bin()
        .env("DELTA_FORGE_THREADS", "2")
        .args(["precision", "--m", "2"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn retry_cap_exit_two() {
    let dir = TempDir::new().unwrap();
    let input = grid_net(dir.path(), 6);
    let out = dir.path().join("o.net");
    let trace = dir.path().join("o.trace");
    let o = run(&[
        "perturb",
        "--input",
        s(&input),
        "--output",
        s(&out),
        "--trace",
        s(&trace),
        "--seed",
        "1",
        "--retry-cap",
        "1",
        "--mode",
        "practical",
        "--gamma0",
        "0.05",
        "--alpha0",
        "0.5",
    ]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error: RETRY_CAP: "), "{}", stderr(&o));
    assert!(!out.exists());
    assert!(trace.exists());
}

#[test]
fn theoretical_mode_rejects_gamma_override() {
    let o = run(&["report-params", "--m", "2", "--mu0", "0.8", "--gamma0", "0.1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("error: PARAM_MODE: "), "{}", stderr(&o));
}

#[test]
fn precision_prints_powers_of_two() {
    let o = run(&["precision", "--m", "2"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("2^-40"), "{text}");
    assert!(text.contains("2^-120"), "{text}");
}

#[test]
fn unwritable_output_is_output_error() {
    let dir = TempDir::new().unwrap();
    let input = grid_net(dir.path(), 8);
    let out = dir.path().join("missing_dir").join("o.net");
    let o = run(&["perturb", "--input", s(&input), "--output", s(&out), "--seed", "1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("error: OUTPUT_IO: "), "{}", stderr(&o));
}
