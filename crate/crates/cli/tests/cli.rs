use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mspredict_cli::{
    execute, run_sweep, validate_config, CliError, Format, EXIT_CONFIG, EXIT_INVARIANT,
};

const BIN: &str = env!("CARGO_BIN_EXE_mspredict");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const CROSSING: &str = r#"
model = "avoided_crossing"
[params]
omega = 1.0
s = 0.9
[sweep]
variable = "theta"
start = 0.0
stop = 3.141592653589793
count = 65
"#;

#[test]
fn config_run_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", CROSSING);
    let out = dir.path().join("out.csv");
    let status = run(&["run", &cfg, "--output", out.to_str().unwrap()]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sweep_value,p_gamma_0,p_gamma_1,pred_0,pred_1,avg_change,var_true,var_pred,mse"
    );
    assert_eq!(lines.next().unwrap(), "0,0.1,0.9,-1,1,0.8,0.36,0.36,0");
    assert_eq!(lines.count(), 64);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"
model = "driven_qubit"
steps = 300
[sweep]
variable = "tau"
start = 0.0
stop = 10.0
count = 41
"#;
    let cfg = write_config(dir.path(), "d.toml", body);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        assert!(run(&["run", &cfg, "-o", path.to_str().unwrap()])
            .status
            .success());
    }
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn bad_config_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.toml",
        &CROSSING.replace("s = 0.9", "s = 1.3"),
    );
    let out = run(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("params.s") && err.contains("[0, 1]"), "{err}");

    let missing = run(&["run", dir.path().join("nope.toml").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn flag_overrides_are_validated() {
    let out = run(&["avoided-crossing", "--s", "-0.5", "--count", "3"]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    let out = run(&[
        "driven-qubit",
        "--steps",
        "0",
        "--stop",
        "1",
        "--count",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn unwritable_output_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("x.csv");
    let out = run(&[
        "avoided-crossing",
        "--count",
        "3",
        "-o",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn subcommands_print_to_stdout() {
    let out = run(&[
        "driven-qubit",
        "--stop",
        "2",
        "--count",
        "5",
        "--steps",
        "100",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().nth(1).unwrap().starts_with("0,1,0,0,,"));

    let out = run(&["avoided-crossing", "--count", "3", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["model"], "avoided_crossing");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);
    assert_eq!(doc["rows"][0]["outcomes"][0]["prediction"], -1.0);
}

#[test]
fn invariant_violation_code() {
    let err = CliError::Invariant(vec!["x".into()]);
    assert_eq!(err.exit_code(), EXIT_INVARIANT);
}

#[test]
fn library_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = validate_config(CROSSING).unwrap();
    cfg.output_path = Some(dir.path().join("r.json"));
    let rows = execute(&cfg, Format::Json).unwrap();
    assert_eq!(rows, run_sweep(&cfg).unwrap());
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 65);
}

#[test]
fn shipped_configs_are_valid() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["driven_qubit.toml", "avoided_crossing.toml"] {
        let text = fs::read_to_string(root.join(name)).unwrap();
        let cfg = validate_config(&text).unwrap_or_else(|e| panic!("{name}: {e:?}"));
        assert!(cfg.output_path.is_some());
    }
}
