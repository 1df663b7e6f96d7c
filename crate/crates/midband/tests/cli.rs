//! End-to-end tests of the `midband` binary and the library-level run
//! entry point: strict config handling, exit codes, manifest shape, and
//! byte-identical reruns.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use midband::cli::{run, sha256_hex, validate};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_midband"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn run_binary(subcommand: &str, config_path: &str) -> Output {
    binary()
        .args([subcommand, "--config", config_path])
        .output()
        .expect("binary runs")
}

fn spectrum_config(out_dir: &Path) -> String {
    format!(
        r#"
experiment = "spectrum"
output_path = "{}"
nu = 1
L = 12
lambda = 0.5
seed = 7
layout = "stationary"

[distribution]
kind = "uniform"
lo = -1.0
hi = 1.0
"#,
        out_dir.display()
    )
}

#[test]
fn torus_run_passes_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = write_config(
        dir.path(),
        "torus.toml",
        &format!(
            r#"
experiment = "torus-lemma"
output_path = "{}"
nu = 1
delta = 0.75
grid = 128
"#,
            out.display()
        ),
    );
    let result = run_binary("torus-lemma", &config);
    assert!(result.status.success(), "{result:?}");
    let stdout = String::from_utf8(result.stdout).unwrap();
    assert!(stdout.contains("torus-lemma: PASS"), "{stdout}");

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "torus-lemma");
    assert_eq!(manifest["pass"], true);
    assert_eq!(manifest["config"]["grid"], 128);
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 1);
    assert_eq!(outputs[0]["name"], "torus.csv");

    let csv = fs::read(out.join("torus.csv")).unwrap();
    assert_eq!(outputs[0]["sha256"], sha256_hex(&csv));
    assert_eq!(outputs[0]["bytes"], csv.len() as u64);
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("nu,delta,grid,min,argmin_0\n"), "{text}");
}

#[test]
fn failing_run_exits_one_but_still_writes_outputs() {
    // An even-dimensional scan collapses at the corner, so the verdict is
    // an honest FAIL with outputs on disk.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = write_config(
        dir.path(),
        "torus.toml",
        &format!(
            r#"
experiment = "torus-lemma"
output_path = "{}"
nu = 2
delta = 0.5
grid = 64
"#,
            out.display()
        ),
    );
    let result = run_binary("torus-lemma", &config);
    assert_eq!(result.status.code(), Some(1), "{result:?}");
    let stdout = String::from_utf8(result.stdout).unwrap();
    assert!(stdout.contains("torus-lemma: FAIL"), "{stdout}");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["pass"], false);
}

#[test]
fn config_problems_exit_two_with_itemized_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "bad.toml",
        r#"
experiment = "torus-lemma"
output_path = "out"
nu = 1
delta = 0.75
grid = 128
gird = 64
lambda = 0.5
"#,
    );
    let result = run_binary("torus-lemma", &config);
    assert_eq!(result.status.code(), Some(2), "{result:?}");
    let stderr = String::from_utf8(result.stderr).unwrap();
    assert!(stderr.contains("gird: unknown key"), "{stderr}");
    assert!(
        stderr.contains("lambda: not used by experiment `torus-lemma`"),
        "{stderr}"
    );
}

#[test]
fn missing_config_file_exits_two() {
    let result = run_binary("torus-lemma", "/nonexistent/torus.toml");
    assert_eq!(result.status.code(), Some(2), "{result:?}");
}

#[test]
fn subcommand_must_match_config_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "spec.toml", &spectrum_config(&dir.path().join("out")));
    let result = run_binary("mourre", &config);
    assert_eq!(result.status.code(), Some(2), "{result:?}");
    let stderr = String::from_utf8(result.stderr).unwrap();
    assert!(
        stderr.contains("config names experiment `spectrum`"),
        "{stderr}"
    );
}

#[test]
fn validate_prints_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "spec.toml", &spectrum_config(&dir.path().join("out")));
    let result = run_binary("validate", &config);
    assert!(result.status.success(), "{result:?}");
    let doc: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    assert_eq!(doc["experiment"], "spectrum");
    assert_eq!(doc["plateau_radius"], 0.5);
    assert_eq!(doc["boundary"], "dirichlet");
    assert_eq!(doc["distribution"]["kind"], "uniform");
    // Validation writes nothing.
    assert!(!dir.path().join("out").exists());
}

#[test]
fn invalid_thread_env_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "spec.toml", &spectrum_config(&dir.path().join("out")));
    let result = binary()
        .args(["validate", "--config", &config])
        .env("MIDBAND_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(2), "{result:?}");
}

#[test]
fn spectrum_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifests = Vec::new();
    for name in ["first", "second"] {
        let out = dir.path().join(name);
        let config = write_config(
            dir.path(),
            &format!("{name}.toml"),
            &spectrum_config(&out),
        );
        let result = binary()
            .args(["spectrum", "--config", &config])
            .env("MIDBAND_THREADS", "2")
            .output()
            .unwrap();
        assert!(result.status.success(), "{result:?}");
        let mut manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        for file in ["eigenvalues.csv", "realization.csv", "prediction.csv"] {
            assert!(out.join(file).exists(), "{file} missing");
        }
        // Wall time and the output directory are the only run-specific
        // fields; data files must agree hash-for-hash.
        manifest["wall_ms"] = serde_json::json!(0);
        manifest["config"]["output_path"] = serde_json::json!("");
        manifests.push(manifest);
    }
    assert_eq!(manifests[0], manifests[1]);
}

#[test]
fn json_format_emits_ordered_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config_text = format!(
        r#"
experiment = "dos"
output_path = "{}"
format = "json"
nu = 1
L = 10
lambda = 0.0
seed = 3
bins = 10
layout = "stationary"

[distribution]
kind = "atomic"
points = [0.0]
weights = [1.0]
"#,
        out.display()
    );
    let cfg = validate(&config_text).unwrap();
    let manifest = run(&cfg).unwrap();
    assert!(manifest.pass);
    let names: Vec<&str> = manifest.outputs.iter().map(|o| o.name.as_str()).collect();
    assert_eq!(names, ["dos.json", "realization.json", "prediction.json"]);
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("dos.json")).unwrap()).unwrap();
    assert_eq!(
        doc["columns"],
        serde_json::json!(["bin", "lo", "hi", "count", "fraction"])
    );
    assert_eq!(doc["rows"].as_array().unwrap().len(), 10);
    // lambda = 0 with a delta mass at zero: every eigenvalue sits in the
    // free band, so nothing lands outside the prediction.
    assert_eq!(manifest.summary["outside_fraction"], 0.0);
}

#[test]
fn mourre_rows_follow_the_documented_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config_text = format!(
        r#"
experiment = "mourre"
output_path = "{}"
nu = 1
L = 40
lambda = 0.02
a = -0.5
b = 0.5
seeds = [1, 2]
layout = "stationary"

[distribution]
kind = "uniform"
lo = -1.0
hi = 1.0
"#,
        out.display()
    );
    let cfg = validate(&config_text).unwrap();
    let manifest = run(&cfg).unwrap();
    let text = fs::read_to_string(out.join("mourre.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "nu,N,a,b,delta,lambda,seed,rank_P,m,margin_2delta,margin_3delta,filtered_flag"
    );
    let rows: Vec<&str> = lines.collect();
    // One unfiltered and one filtered row per seed, in seed order.
    assert_eq!(rows.len(), 4);
    assert!(rows[0].ends_with(",0"), "{}", rows[0]);
    assert!(rows[1].ends_with(",1"), "{}", rows[1]);
    let first: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(first[0], "1");
    assert_eq!(first[1], "81");
    assert_eq!(manifest.seeds, vec![1, 2]);
}

#[test]
fn weyl_rows_stay_under_their_bound() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config_text = format!(
        r#"
experiment = "weyl"
output_path = "{}"
nu = 1
L = 16
lambda = 0.5
seed = 5
energies = [0.0]
windows = [2, 4]
ell = 100
layout = "single-bump"
bump_radius = 8

[distribution]
kind = "atomic"
points = [0.0, 1.0]
weights = [0.5, 0.5]
"#,
        out.display()
    );
    let cfg = validate(&config_text).unwrap();
    let manifest = run(&cfg).unwrap();
    assert!(manifest.pass, "{:?}", manifest.summary);
    let text = fs::read_to_string(out.join("weyl.csv")).unwrap();
    // Two windows, two coupling targets.
    assert_eq!(text.lines().count(), 5);
    assert!(text
        .lines()
        .next()
        .unwrap()
        .starts_with("energy,window,target,omega,"));
}

#[test]
fn commutator_identity_reports_zero_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config_text = format!(
        r#"
experiment = "commutator-identity"
output_path = "{}"
nu = 2
L = 4
trials = 5
seed = 9
"#,
        out.display()
    );
    let cfg = validate(&config_text).unwrap();
    let manifest = run(&cfg).unwrap();
    assert!(manifest.pass);
    let worst = manifest.summary["worst_residual"].as_f64().unwrap();
    assert!(worst <= 1e-12, "worst residual {worst}");
}

#[test]
fn lambda_scan_reports_a_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config_text = format!(
        r#"
experiment = "lambda-scan"
output_path = "{}"
nu = 1
L = 40
lambda_grid = [0.0, 0.01]
a = -0.5
b = 0.5
seeds = [1]
layout = "stationary"

[distribution]
kind = "atomic"
points = [0.0]
weights = [1.0]
"#,
        out.display()
    );
    let cfg = validate(&config_text).unwrap();
    let manifest = run(&cfg).unwrap();
    // A delta mass at zero never perturbs the operator, so the scan
    // clears its whole grid.
    assert!(manifest.pass);
    assert_eq!(manifest.summary["lambda_threshold"], 0.01);
}
