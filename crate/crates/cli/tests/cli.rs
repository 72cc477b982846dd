use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use faber_manifold::codec::encode;
use faber_manifold::corpus::{make_function, FunctionSpec};
use faber_manifold::format::parse_manifold;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_faber-manifold"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn encode_then_decode_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let code = path(dir.path(), "f.code");
    let out = run(&[
        "encode", "--dim", "2", "--alpha", "1", "--m", "1", "--n", "3",
        "--function", "family=faber-random;seed=5;level=2", "--out", &code,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let text = fs::read_to_string(&code).unwrap();
    let parsed = parse_manifold(&text).unwrap();
    let spec: FunctionSpec = "family=faber-random;d=2;alpha=1;seed=5;level=2".parse().unwrap();
    let direct = encode(&make_function(&spec).unwrap(), 1, 3, 1.0, 2).unwrap();
    assert_eq!(parsed, direct);

    let pts = [[0.1, 0.2], [0.5, 0.5], [0.9, 0.33], [0.0, 0.7]];
    let points = path(dir.path(), "pts.csv");
    let rows: Vec<String> = pts.iter().map(|p| format!("{},{}", p[0], p[1])).collect();
    fs::write(&points, rows.join("\n")).unwrap();
    let values = path(dir.path(), "values.csv");
    let out = run(&["decode", "--code", &code, "--points", &points, "--out", &values]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let csv = fs::read_to_string(&values).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x1,x2,value"));
    for (p, line) in pts.iter().zip(lines) {
        let v: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(v.to_bits(), direct.eval(p).to_bits());
    }
}

#[test]
fn decode_rejects_points_outside_the_cube() {
    let dir = tempfile::tempdir().unwrap();
    let code = path(dir.path(), "f.code");
    assert!(run(&[
        "encode", "--dim", "1", "--alpha", "0.5", "--m", "2", "--n", "2",
        "--function", "family=tensor-smooth;seed=1;level=1", "--out", &code,
    ])
    .status
    .success());
    let points = path(dir.path(), "pts.csv");
    fs::write(&points, "1.5\n").unwrap();
    let out = run(&["decode", "--code", &code, "--points", &points, "--out", &path(dir.path(), "o.csv")]);
    assert!(!out.status.success());
}

#[test]
fn params_reports_selection() {
    let out = run(&["params", "--N", "1000000", "--dim", "2"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("m = 1\n"), "{stdout}");
    assert!(stdout.contains("n = 13\n"), "{stdout}");
    assert!(stdout.contains("N >= N(d): false"), "{stdout}");

    assert!(!run(&["params", "--N", "10", "--dim", "3"]).status.success());
}

#[test]
fn verify_exit_codes() {
    assert!(run(&["verify", "--suite", "budget"]).status.success());
    assert!(run(&["verify", "--suite", "params", "--N", "1000000", "--dim", "2"]).status.success());
    assert!(!run(&["verify", "--suite", "no-such-suite"]).status.success());
    assert!(!run(&["verify", "--suite", "pipeline", "--alpha", "1.5"]).status.success());
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "a.csv");
    let b = path(dir.path(), "b.csv");
    for out in [&a, &b] {
        let o = run(&[
            "verify", "--suite", "covering", "--dim", "2", "--alpha", "1", "--m", "2",
            "--functions", "2", "--out", out,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read(format!("{a}.txt")).unwrap(), fs::read(format!("{b}.txt")).unwrap());
    assert!(fs::read_to_string(&a).unwrap().starts_with("suite,"));
}
