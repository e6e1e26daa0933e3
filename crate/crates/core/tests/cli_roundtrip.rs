mod common;

use std::path::Path;

use common::{c, gaussian};
use krylov_prescribe::cli::{self, mtx, Scenario};
use krylov_prescribe::linalg::CMat;
use krylov_prescribe::scenarios::{random_block, random_restarted};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::main_with(
        std::iter::once("krylov-prescribe").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TWO_BY_TWO: &str = r#"{
  "schema": 1,
  "kind": "gmres",
  "residuals": [1.0, 0.5],
  "ritz": [[3.0]],
  "eigenvalues": [1.0, 2.0]
}
"#;

#[test]
fn two_by_two_construct_then_verify() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("tiny.json");
    std::fs::write(&spec, TWO_BY_TWO).unwrap();
    let out = tmp.path().join("out");
    assert_eq!(
        run(&["construct", "--spec", s(&spec), "--out", s(&out)]).0,
        0
    );
    let a = mtx::read(&out.join("A.mtx")).unwrap();
    assert_eq!(a.shape(), (2, 2));
    // trace(A) = 3 and det(A) = 2 for eigenvalues {1, 2}
    assert!((a.trace() - c(3.0, 0.0)).norm() < 1e-12);
    assert!((a.determinant() - c(2.0, 0.0)).norm() < 1e-12);
    let b = mtx::read(&out.join("b.mtx")).unwrap();
    // one GMRES step: H_1 = b^* A b = 3 gives the Ritz value
    assert!(((b.adjoint() * &a * &b)[(0, 0)] - c(3.0, 0.0)).norm() < 1e-12);

    let report = tmp.path().join("report.json");
    let (code, _, _) = run(&[
        "verify",
        "--spec",
        s(&spec),
        "--in",
        s(&out),
        "--report",
        s(&report),
    ]);
    assert_eq!(code, 0);
    let json: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["pass"], true);
    assert_eq!(json["scenario"], "tiny");
}

#[test]
fn identity_run_converges_in_one_step() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("A.mtx"), tmp.path().join("b.mtx"));
    mtx::write(&a, &CMat::identity(4, 4)).unwrap();
    mtx::write(&b, &gaussian(4, 1, 3)).unwrap();
    let csv = tmp.path().join("res.csv");
    let plot = tmp.path().join("res.svg");
    let (code, stdout, _) = run(&[
        "run",
        "--matrix",
        s(&a),
        "--rhs",
        s(&b),
        "--m",
        "3",
        "--csv",
        s(&csv),
        "--plot",
        s(&plot),
    ]);
    assert_eq!(code, 0, "{stdout}");
    let mut rows = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(
        rows.headers().unwrap(),
        vec!["cycle", "iteration", "resnorm"]
    );
    let rows: Vec<csv::StringRecord> = rows.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2, "breakdown after the first step");
    assert!(rows[1][2].parse::<f64>().unwrap() < 1e-14 * rows[0][2].parse::<f64>().unwrap());
    assert!(std::fs::read_to_string(plot).unwrap().starts_with("<svg"));
}

#[test]
fn block_csv_carries_the_residual_quantity() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("A.mtx"), tmp.path().join("B.mtx"));
    let mat = gaussian(8, 8, 5) + CMat::identity(8, 8) * c(4.0, 0.0);
    mtx::write(&a, &mat).unwrap();
    mtx::write(&b, &gaussian(8, 2, 6)).unwrap();
    let csv = tmp.path().join("res.csv");
    let args = [
        "run",
        "--matrix",
        s(&a),
        "--rhs",
        s(&b),
        "--block",
        "--m",
        "2",
        "--cycles",
        "2",
        "--csv",
        s(&csv),
    ];
    assert_eq!(run(&args).0, 0);
    let mut rd = csv::Reader::from_path(&csv).unwrap();
    assert_eq!(
        rd.headers().unwrap(),
        vec![
            "cycle",
            "iteration",
            "resnorm_fro",
            "R_11",
            "R_12",
            "R_21",
            "R_22"
        ]
    );
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        let parse = |t: &str| -> f64 {
            // `re+imi` or a plain real
            match t.strip_suffix('i') {
                Some(body) => {
                    let b = body.as_bytes();
                    let cut = (1..b.len())
                        .rev()
                        .find(|&k| matches!(b[k], b'+' | b'-') && b[k - 1] != b'e')
                        .unwrap();
                    c(body[..cut].parse().unwrap(), body[cut..].parse().unwrap()).norm()
                }
                None => t.parse::<f64>().unwrap().abs(),
            }
        };
        let fro = (3..7).map(|k| parse(&r[k]).powi(2)).sum::<f64>().sqrt();
        let stated: f64 = r[2].parse().unwrap();
        assert!(
            (fro - stated).abs() <= 1e-12 * stated.max(1e-300),
            "{fro} vs {stated}"
        );
        // lower triangle of the upper triangular factor
        assert_eq!(parse(&r[5]), 0.0);
    }
}

#[test]
fn inadmissible_scenario_is_refused_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("bad.json");
    std::fs::write(&spec, TWO_BY_TWO.replace("[1.0, 0.5]", "[1.0, 1.5]")).unwrap();
    let out = tmp.path().join("out");
    let (code, _, err) = run(&["construct", "--spec", s(&spec), "--out", s(&out)]);
    assert_eq!(code, 2, "{err}");
    assert!(!err.is_empty());
    assert!(!out.exists());
}

#[test]
fn parse_errors_name_the_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (
            TWO_BY_TWO.replace("\"ritz\": [[3.0]]", "\"ritz\": [[\"x\"]]"),
            "ritz",
        ),
        (
            TWO_BY_TWO.replace("\"schema\": 1", "\"schema\": 7"),
            "schema",
        ),
        (
            TWO_BY_TWO.replace("\"eigenvalues\": [1.0, 2.0]", "\"eigenvalues\": [1.0]"),
            "eigenvalues",
        ),
        (
            TWO_BY_TWO.replace("\"kind\": \"gmres\"", "\"kind\": \"lsqr\""),
            "kind",
        ),
    ];
    for (text, key) in cases {
        let spec = tmp.path().join("case.json");
        std::fs::write(&spec, text).unwrap();
        let (code, _, err) = run(&[
            "construct",
            "--spec",
            s(&spec),
            "--out",
            s(&tmp.path().join("o")),
        ]);
        assert_eq!(code, 2);
        assert!(err.contains(key), "{key}: {err}");
    }
}

#[test]
fn malformed_json_reports_position() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("broken.json");
    std::fs::write(&spec, "{\n  \"schema\": 1,\n  \"kind\": \n").unwrap();
    let (code, _, err) = run(&[
        "construct",
        "--spec",
        s(&spec),
        "--out",
        s(&tmp.path().join("o")),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("line"), "{err}");
}

#[test]
fn reports_share_one_schema_across_kinds() {
    let tmp = tempfile::tempdir().unwrap();
    let scenarios = [
        ("tiny", Scenario::parse(TWO_BY_TWO).unwrap()),
        (
            "restarted",
            Scenario::from_scalar(&random_restarted(2, 3, 9), None),
        ),
        (
            "block",
            Scenario::from_block(&random_block(2, 2, 2, 9), None),
        ),
    ];
    let mut args: Vec<String> = vec!["verify".into()];
    for (name, sc) in &scenarios {
        let spec = tmp.path().join(format!("{name}.json"));
        std::fs::write(&spec, sc.to_json()).unwrap();
        let dir = tmp.path().join(name);
        assert_eq!(
            run(&["construct", "--spec", s(&spec), "--out", s(&dir)]).0,
            0
        );
        args.extend([
            "--spec".into(),
            s(&spec).into(),
            "--in".into(),
            s(&dir).into(),
        ]);
    }
    let report = tmp.path().join("all.json");
    args.extend(["--report".into(), s(&report).into()]);
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    assert_eq!(run(&argv).0, 0);
    let json: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    let reports = json.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    let keys = |v: &Value| {
        let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
        k.sort();
        k
    };
    for r in reports {
        assert_eq!(keys(r), keys(&reports[0]));
        for ch in r["checks"].as_array().unwrap() {
            assert_eq!(
                keys(ch),
                vec!["detail", "deviation", "name", "pass", "tolerance"]
            );
        }
    }
}

#[test]
fn manifest_lists_the_written_files() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = tmp.path().join("r.json");
    std::fs::write(
        &spec,
        Scenario::from_scalar(&random_restarted(2, 2, 4), None).to_json(),
    )
    .unwrap();
    let dir = tmp.path().join("out");
    assert_eq!(
        run(&["construct", "--spec", s(&spec), "--out", s(&dir)]).0,
        0
    );
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["n"], 4);
    for f in manifest["files"].as_array().unwrap() {
        assert!(dir.join(f.as_str().unwrap()).exists(), "{f}");
    }
    // the copied scenario rebuilds the same system
    let again = tmp.path().join("again");
    assert_eq!(
        run(&[
            "construct",
            "--spec",
            s(&dir.join("scenario.json")),
            "--out",
            s(&again)
        ])
        .0,
        0
    );
    assert_eq!(
        std::fs::read(dir.join("A.mtx")).unwrap(),
        std::fs::read(again.join("A.mtx")).unwrap()
    );
}

#[test]
fn unknown_demo_and_bad_usage_exit_two() {
    let (code, stdout, _) = run(&["demo", "nonsense"]);
    assert_eq!(code, 2);
    assert!(stdout.contains("mirroring"));
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["run", "--matrix", "x"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn every_demo_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, stdout, err) = run(&["demo", "all", "--out", s(tmp.path())]);
    assert_eq!(code, 0, "{stdout}{err}");
    for name in cli::DEMOS {
        assert!(tmp.path().join(name).join("report.json").exists(), "{name}");
    }
}

#[test]
fn shipped_scenarios_verify() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/scenarios");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let spec = entry.unwrap().path();
        let out = tmp.path().join(spec.file_stem().unwrap());
        assert_eq!(
            run(&["construct", "--spec", s(&spec), "--out", s(&out)]).0,
            0,
            "{}",
            spec.display()
        );
        let report = tmp.path().join("r.json");
        assert_eq!(
            run(&[
                "verify",
                "--spec",
                s(&spec),
                "--in",
                s(&out),
                "--report",
                s(&report)
            ])
            .0,
            0,
            "{}",
            spec.display()
        );
        seen += 1;
    }
    assert_eq!(seen, 3);
}
