use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dae-singular"));
    c.env_remove("DAE_SINGULAR_TOL");
    c
}

fn systems() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../systems")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn sys(name: &str) -> String {
    systems().join(name).to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &tempfile::TempDir, name: &str, src: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, src).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn classify_equilibrium_crossing_above_zero() {
    let out = run(&[
        "classify",
        &sys("equilibrium-crossing.dae"),
        "--alpha",
        "0.01",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let points = v["result"]["points"].as_array().unwrap();
    let find = |x: f64, y: f64| {
        points
            .iter()
            .find(|p| {
                let q = p["p"].as_array().unwrap();
                (q[0].as_f64().unwrap() - x).hypot(q[1].as_f64().unwrap() - y) < 1e-6
            })
            .unwrap_or_else(|| panic!("no point near ({x}, {y})"))
    };
    assert_eq!(find(0.01, 0.0)["class"]["kind"], "saddle");
    assert_eq!(find(0.0, -0.01)["class"]["kind"], "folded_node");
    // Branch points on the outer lines of Sigma.
    find(1.0, 0.99);
    find(-1.0, -1.01);
}

#[test]
fn classify_scalar_family() {
    let out = run(&["classify", &sys("saddle-node-1d.dae"), "--alpha", "-0.25"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let types: Vec<(f64, String)> = v["result"]["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| {
            (
                p["x"].as_f64().unwrap(),
                p["class"]["type"].as_str().unwrap().to_owned(),
            )
        })
        .collect();
    assert_eq!(types.len(), 3, "{types:?}");
    assert!((types[0].0 + 1.0).abs() < 1e-9 && types[0].1 == "simple_singularity");
    assert!((types[1].0 + 0.5).abs() < 1e-9 && types[1].1 == "simple_equilibrium");
    assert!((types[2].0 - 0.5).abs() < 1e-9 && types[2].1 == "simple_equilibrium");
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        vec!["classify".to_string(), sys("equilibrium-crossing.dae")],
        vec!["scan".to_string(), sys("fold-pair.dae")],
        vec![
            "portrait".to_string(),
            sys("equilibrium-crossing.dae"),
            "--alpha".into(),
            "-0.05".into(),
        ],
        vec![
            "simulate".to_string(),
            sys("equilibrium-crossing.dae"),
            "--from".into(),
            "0.5,0.5".into(),
        ],
    ] {
        let a = bin().args(&args).output().unwrap();
        let b = bin().args(&args).output().unwrap();
        assert_eq!(
            a.status.code(),
            Some(0),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn scan_examples_report_their_event() {
    for (file, code) in [
        ("saddle-node-1d.dae", "A1.1"),
        ("singularity-fold-1d.dae", "A2.1"),
        ("transcritical-singularity-1d.dae", "A3.0,0"),
        ("equilibrium-crossing.dae", "L3"),
        ("circle-birth.dae", "T2"),
        ("hyperbola-switch.dae", "T1"),
        ("fold-pair.dae", "L4"),
        ("fold-meets-singular-equilibrium.dae", "L5"),
        ("cycle-fold.dae", "L9"),
    ] {
        let out = run(&["scan", &sys(file)]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{file}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let v = json(&out);
        let codes: Vec<&str> = v["result"]["events"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["code"].as_str().unwrap())
            .collect();
        assert_eq!(codes, vec![code], "{file}");
    }
}

#[test]
fn scan_of_the_crossing_reports_deltas() {
    let out = run(&[
        "scan",
        &sys("equilibrium-crossing.dae"),
        "--alpha-range",
        "-0.1:0.1",
        "--samples",
        "21",
    ]);
    let v = json(&out);
    let d = &v["result"]["events"][0]["deltas"];
    for k in ["delta1", "delta2", "delta4"] {
        assert_eq!(d[k].as_f64(), Some(-1.0), "{k}");
    }
}

#[test]
fn transcritical_normal_form_in_scan() {
    let v = json(&run(&["scan", &sys("transcritical-singularity-1d.dae")]));
    let nf = &v["result"]["events"][0]["normal_form"];
    assert_eq!(nf["s"], 1);
    assert!((nf["A"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn portrait_writes_svg_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("p.svg");
    let out = run(&[
        "portrait",
        &sys("equilibrium-crossing.dae"),
        "--alpha",
        "-0.05",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let svg = std::fs::read_to_string(out_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("#2ca02c"), "folded node glyph");
    assert!(svg.trim_end().ends_with("</svg>"));
}

#[test]
fn scalar_portrait_shows_singularity_pair() {
    let out = run(&[
        "portrait",
        &sys("singularity-fold-1d.dae"),
        "--alpha",
        "-0.04",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(
        svg.contains("#1f77b4") && svg.contains("#d62728"),
        "incoming and outgoing singularities"
    );
}

#[test]
fn simulate_reaches_the_impasse_point() {
    let v = json(&run(&["simulate", &sys("impasse-1d.dae"), "--from", "-1"]));
    let end = &v["result"]["pieces"][0]["end"];
    assert_eq!(end["event"], "reached_singularity");
    assert!((end["t"].as_f64().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn simulate_splits_at_sigma() {
    let v = json(&run(&[
        "simulate",
        &sys("equilibrium-crossing.dae"),
        "--from",
        "0.5,0.5",
        "--tmax",
        "5",
    ]));
    let pieces = v["result"]["pieces"].as_array().unwrap();
    assert!(pieces.len() >= 2);
    assert_eq!(pieces[0]["orientation"], "forward");
    assert_eq!(pieces[1]["orientation"], "reversed");
}

#[test]
fn input_errors_exit_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.dae", "dim = 1\nf = x + $\ng = 1\n");
    let out = run(&["classify", &bad]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2, column 9"), "{err}");

    let dup = write(&dir, "dup.dae", "f = x\ng = 1\nf = 2\n");
    let out = run(&["classify", &dup]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3, column 1"));

    let out = run(&["classify", "/nonexistent/system.dae"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["scan", &sys("impasse-1d.dae")]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["simulate", &sys("equilibrium-crossing.dae"), "--from", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn start_on_sigma_exits_3() {
    let out = run(&[
        "simulate",
        &sys("equilibrium-crossing.dae"),
        "--from",
        "0,0.3",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("initial condition on singular set"));
    let out = run(&["simulate", &sys("impasse-1d.dae"), "--from", "0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn non_generic_only_run_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        &dir,
        "degenerate.dae",
        "f1 = y + alpha + x^2\nf2 = 2*y\ng = x + y^2\nbbox = -1 -1 1 1\nalpha = -0.1 : 0.1\n",
    );
    let out = run(&["scan", &f, "--samples", "11"]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let v = json(&out);
    assert!(v["result"]["events"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e["generic"] == false));
}

#[test]
fn tolerance_from_environment() {
    let args = ["classify", &sys("impasse-1d.dae")];
    let default = json(&bin().args(args).output().unwrap());
    assert_eq!(default["tolerances"]["zero"].as_f64(), Some(1e-9));
    let env = json(
        &bin()
            .args(args)
            .env("DAE_SINGULAR_TOL", "1e-6")
            .output()
            .unwrap(),
    );
    assert_eq!(env["tolerances"]["zero"].as_f64(), Some(1e-6));

    // A `tol` key in the file wins over the environment.
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "tol.dae", "f = 1\ng = -x\ntol = 1e-8\n");
    let v = json(
        &bin()
            .args(["classify", &f])
            .env("DAE_SINGULAR_TOL", "1e-6")
            .output()
            .unwrap(),
    );
    assert_eq!(v["tolerances"]["zero"].as_f64(), Some(1e-8));
}

#[test]
fn version_and_help() {
    let out = run(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}
