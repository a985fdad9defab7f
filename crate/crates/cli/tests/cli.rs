use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const GAUSS: &[&str] = &["--family", "gaussian", "--alpha", "1", "--gamma", "1"];

fn run_in(dir: Option<&Path>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_shallowdirac"));
    cmd.args(args);
    match dir {
        Some(d) => cmd.env("SHALLOWDIRAC_OUTPUT_DIR", d),
        None => cmd.env_remove("SHALLOWDIRAC_OUTPUT_DIR"),
    };
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_in(None, args)
}

fn with_gauss<'a>(cmd: &'a str, rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend_from_slice(GAUSS);
    v.extend_from_slice(rest);
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.contains("timestamp"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn schema_validator() -> jsonschema::Validator {
    let text = include_str!("../schemas/report.schema.json");
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
}

#[test]
fn region_csv_has_plot_columns() {
    let o = run(&["region", "--alpha", "0.5,1", "--gamma-steps", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows = body(&text);
    assert_eq!(rows[0], "alpha,gamma,m_boundary,m_upper,numeric_agrees");
    assert_eq!(rows.len(), 1 + 2 * 5);
    for row in &rows[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        let gamma: f64 = cells[1].parse().unwrap();
        assert!((-1.0..=1.0).contains(&gamma));
        let upper: f64 = cells[3].parse().unwrap();
        assert!(upper > 0.0 && upper <= 2.0);
        assert!(cells[4].is_empty() || cells[4] == "true", "{row}");
    }
}

#[test]
fn pade_csv_marks_undefined_decay_as_nan() {
    let args = with_gauss("pade", &["--m", "0.1", "--lambda", "9:11:0.5"]);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows = body(&text);
    assert_eq!(rows[0], "lambda,energy,gamma");
    assert_eq!(rows.len(), 6);
    assert!(rows[1].split(',').nth(2).unwrap() != "NaN");
    assert_eq!(rows[5].split(',').nth(2).unwrap(), "NaN");
}

#[test]
fn metadata_precedes_the_header() {
    let args = with_gauss("energy", &["--m", "1", "--lambda", "0.1"]);
    let text = stdout(&run(&args));
    let lines: Vec<&str> = text.lines().collect();
    let header = lines.iter().position(|l| !l.starts_with('#')).unwrap();
    assert!(header > 0);
    assert_eq!(lines[header], "lambda,energy,m_minus_E");
    for key in ["tool", "command", "timestamp", "config", "tolerances", "achieved"] {
        assert!(
            lines[..header].iter().any(|l| l.starts_with(&format!("# {key}: "))),
            "missing {key}"
        );
    }
}

#[test]
fn reruns_are_identical_apart_from_the_timestamp() {
    let args = with_gauss("scan", &["--m", "1", "--lambda", "0.2:0.4:0.2", "-j", "2"]);
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(without_timestamp(&a), without_timestamp(&b));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let args = with_gauss("functionals", &[]);
    let o = run_in(Some(dir.path()), &args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(dir.path().join("functionals.csv")).unwrap();
    assert!(body(&text)[0].starts_with("functional,value"));

    let mut named = with_gauss("functionals", &["--format", "json", "-o", "f.json"]);
    let o = run_in(Some(dir.path()), &named);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("f.json").is_file());

    named.truncate(named.len() - 2);
    named.extend(["-o", "-"]);
    let o = run_in(Some(dir.path()), &named);
    assert!(stdout(&o).starts_with('{'));
}

#[test]
fn json_reports_match_the_schema() {
    let validator = schema_validator();
    let cases: Vec<Vec<&str>> = vec![
        with_gauss("functionals", &["--m", "0.5", "--q", "0.3"]),
        with_gauss("energy", &["--m", "1", "--lambda", "0.1:0.3:0.1"]),
        with_gauss("energy", &["--m", "1", "--q", "0.5", "--lambda", "0.1", "--method", "pt2-2d"]),
        with_gauss("pade", &["--m", "1", "--lambda", "0.5", "--kind", "nr22"]),
        vec!["region", "--alpha", "1", "--gamma-steps", "3"],
        with_gauss("shoot", &["--m", "1", "--lambda", "0.5"]),
        with_gauss("scan", &["--m", "1", "--lambda", "0.5"]),
        with_gauss("fit", &["--m", "1", "--lambda", "0.5"]),
    ];
    for mut args in cases {
        args.extend(["--format", "json"]);
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
        assert_eq!(doc["metadata"]["command"], args[0]);
    }
}

#[test]
fn shoot_writes_a_normalized_wavefunction() {
    let dir = tempfile::tempdir().unwrap();
    let wf = dir.path().join("wf.csv");
    let args = with_gauss(
        "shoot",
        &["--m", "1", "--lambda", "0.5", "--format", "json", "--wavefunction", wf.to_str().unwrap()],
    );
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["data"]["nodes"], 0);
    let text = std::fs::read_to_string(wf).unwrap();
    let rows = body(&text);
    assert_eq!(rows[0], "x,psi1,psi2,rho");
    let points: Vec<(f64, f64)> = rows[1..]
        .iter()
        .map(|r| {
            let c: Vec<f64> = r.split(',').map(|s| s.parse().unwrap()).collect();
            (c[0], c[3])
        })
        .collect();
    let norm: f64 = points
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum();
    assert!((norm - 1.0).abs() < 1e-8, "{norm}");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "[potential]\nfamily = \"gaussian\"\nalpha = 1.0\ngamma = 1.0\n\n[model]\nm = 1.0\nlambda = \"0.1:0.3:0.1\"\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let text = stdout(&run(&["energy", "-c", p]));
    assert_eq!(body(&text).len(), 4);
    let text = stdout(&run(&["energy", "-c", p, "--lambda", "0.5"]));
    let rows = body(&text);
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("0.5,"));
}

#[test]
fn invalid_configuration_exits_with_2_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[solver]\nrel_tolerance = 1e-9\n").unwrap();
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (with_gauss("energy", &["--m", "1", "--lambda", "1:0:0.5"]), "model.lambda"),
        (with_gauss("energy", &["--lambda", "0.1"]), "model.m"),
        (with_gauss("energy", &["--m", "-1", "--lambda", "0.1"]), "model.m"),
        (vec!["shoot", "--family", "square", "--depth", "1", "--m", "1", "--lambda", "1"], "potential.half_width"),
        (with_gauss("shoot", &["--m", "1", "--lambda", "0:1:0.5"]), "model.lambda"),
        (with_gauss("shoot", &["--m", "1", "--lambda", "1", "-o", "/no/such/dir/x.json"]), "output.path"),
        (with_gauss("scan", &["--m", "1", "--lambda", "1", "--grid-step", "-1"]), "solver.grid_step"),
        (with_gauss("scan", &["--m", "1", "--lambda", "1", "-j", "0"]), "jobs"),
        (vec!["energy", "-c", bad.to_str().unwrap()], "solver.rel_tolerance"),
    ];
    for (args, field) in cases {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains(&format!("`{field}`")), "{args:?}: {}", stderr(&o));
        assert!(stdout(&o).is_empty());
    }
}

#[test]
fn failed_points_are_reported_in_band_with_exit_1() {
    let args = with_gauss("scan", &["--m", "1", "--lambda", "0:0.1:0.1"]);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("1 of 2 points failed"));
    let text = stdout(&o);
    let rows = body(&text);
    assert_eq!(rows.len(), 3);
    assert!(rows[1].contains("no bound state"));
    assert!(rows[2].ends_with(','));
}
