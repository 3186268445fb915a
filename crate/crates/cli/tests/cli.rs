use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn stergm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stergm"))
        .args(args)
        .output()
        .unwrap()
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SMALL_SCENARIO: &str = r#"{
  "n": 12,
  "steps": 300,
  "burn_in": 50,
  "replicates": 2,
  "seed": 5,
  "formation": {"terms": [{"kind": "edges"}, {"kind": "degree1"}], "theta": [-3.0, 1.0]},
  "dissolution": {"terms": [{"kind": "edges"}], "theta": [2.0]}
}"#;

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn parse_curve(stdout: &[u8]) -> Vec<[f64; 4]> {
    let text = String::from_utf8(stdout.to_vec()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,f,F,h"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|f| f.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

#[test]
fn geometric_pmf_halves_each_step() {
    let out = stergm(&[
        "pmf",
        "--model-json",
        r#"{"kind":"mixture","omega":[0.5],"pi":[1.0]}"#,
        "--x-max",
        "20",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = parse_curve(&out.stdout);
    assert_eq!(rows.len(), 20);
    for [x, f, cdf, h] in rows {
        assert!((f - 0.5f64.powi(x as i32)).abs() < 1e-15);
        assert!((cdf - (1.0 - 0.5f64.powi(x as i32))).abs() < 1e-15);
        assert!((h - 0.5).abs() < 1e-15);
    }
}

#[test]
fn mixture_hazard_starts_at_point_one_nine() {
    let model = configs_dir().join("mixture_model.json");
    let out = stergm(&["hazard", "--model", model.to_str().unwrap(), "--x-max", "300"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = parse_curve(&out.stdout);
    assert_eq!(rows[0][3], 0.19);
    assert!(rows.windows(2).all(|w| w[1][3] <= w[0][3]));
    assert!((rows[199][3] - 0.1).abs() < 1e-4);
}

#[test]
fn piecewise_curve_is_written_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let model = configs_dir().join("piecewise_model.json");
    let out_dir = dir.path().join("curves");
    let out = stergm(&[
        "pmf",
        "--model",
        model.to_str().unwrap(),
        "--x-max",
        "40",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = parse_curve(&fs::read(out_dir.join("pmf_curve.csv")).unwrap());
    assert_eq!(rows.len(), 40);
    assert_eq!(rows[0][3], 0.2);
    assert_eq!(rows[6][3], 0.1);
    assert!((rows[6][1] - 0.8f64.powi(6) * 0.1).abs() < 1e-15);
}

#[test]
fn invalid_model_is_a_config_error() {
    let out = stergm(&[
        "pmf",
        "--model-json",
        r#"{"kind":"mixture","omega":[0.2,0.1],"pi":[0.5,0.1]}"#,
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("sum"), "{}", stderr(&out));

    let out = stergm(&["hazard"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bundled_configs_validate() {
    for name in ["monogamy_both.json", "mixture_dissolution.json"] {
        let path = configs_dir().join(name);
        let out = stergm(&["validate-config", "--config", path.to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", stderr(&out));
    }
}

#[test]
fn bad_config_reports_line_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let text = SMALL_SCENARIO.replace("\"burn_in\": 50", "\"burn_in\": 300");
    let path = write_config(dir.path(), "bad.json", &text);
    let out = stergm(&["validate-config", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));

    let path = write_config(dir.path(), "syntax.json", "{\n  \"n\": 12,\n  \"steps\": ,\n}");
    let out = stergm(&["simulate", "--config", path.to_str().unwrap(), "--out", "unused"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let missing = dir.path().join("missing.json");
    let out = stergm(&["validate-config", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_writes_outputs_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "small.json", SMALL_SCENARIO);
    let runs: Vec<PathBuf> = ["a", "b"].iter().map(|r| dir.path().join(r)).collect();
    for run in &runs {
        let out = stergm(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            run.to_str().unwrap(),
            "--threads",
            "1",
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for file in ["spells.csv", "hazard.csv", "stats.json", "manifest.json"] {
        let a = fs::read(runs[0].join(file)).unwrap();
        assert_eq!(a, fs::read(runs[1].join(file)).unwrap(), "{file}");
    }
    let hazard = fs::read_to_string(runs[0].join("hazard.csv")).unwrap();
    assert!(hazard.starts_with("age,n_terminated_at,n_terminated_ge,hazard\n"));
    assert_eq!(hazard.lines().count(), 16);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(runs[0].join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["replicate_seeds"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["config"]["seed"], 5);

    let reseeded = dir.path().join("c");
    let out = stergm(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        reseeded.to_str().unwrap(),
        "--seed",
        "6",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_ne!(
        fs::read(reseeded.join("spells.csv")).unwrap(),
        fs::read(runs[0].join("spells.csv")).unwrap()
    );
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "small.json", SMALL_SCENARIO);
    let blocker = write_config(dir.path(), "file", "not a directory");
    let out = stergm(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        blocker.join("sub").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(!blocker.join("sub").exists());
}

#[test]
fn missing_output_directory_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "small.json", SMALL_SCENARIO);
    let out = stergm(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
