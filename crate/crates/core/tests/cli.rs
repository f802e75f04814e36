mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use chirpsim::config::ScenarioConfig;
use common::{scenario, scenario_path, SCENARIOS};
use tempfile::TempDir;

fn chirpsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chirpsim")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const ZERO_FIELD: &str = r#"
name = "zero-field"

[system]
detunings = [0.0]

[pulse]
shape = "gaussian"
peak_rabi = 0.0
fwhm_ps = 10.0
start_ps = -20.0
end_ps = 20.0

[integrator]
samples = 50
"#;

fn parse_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn shipped_scenarios_round_trip() {
    for name in SCENARIOS {
        let cfg = scenario(name);
        let again = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(cfg, again, "{name}");
        assert_eq!(cfg.hash(), again.hash());
    }
}

#[test]
fn unknown_key_exits_1_and_names_it() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.toml", &ZERO_FIELD.replace("samples = 50", "sample_count = 50"));
    let out = chirpsim(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sample_count"));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(chirpsim(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(chirpsim(&["simulate"]).status.code(), Some(1));
    let out = chirpsim(&["simulate", "--config", "/nonexistent/scenario.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(chirpsim(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "z.toml", ZERO_FIELD);
    let out = Command::new(env!("CARGO_BIN_EXE_chirpsim"))
        .args(["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()])
        .env("CHIRPSIM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn zero_field_keeps_ground_state_and_writes_manifest() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "z.toml", ZERO_FIELD);
    let out_dir = dir.path().join("run");
    let out = chirpsim(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let (header, rows) = parse_csv(&out_dir.join("populations.csv"));
    assert_eq!(header, ["time_ps", "P0", "P1"]);
    assert_eq!(rows.len(), 50);
    assert!(rows.iter().all(|r| r[1] == 1.0 && r[2] == 0.0));

    let (header, rows) = parse_csv(&out_dir.join("eigen.csv"));
    assert_eq!(header, ["time_ps", "E0", "E1"]);
    assert!(rows.iter().all(|r| r[1] == 0.0 && r[2] == 0.0));

    let (header, _) = parse_csv(&out_dir.join("pulse.csv"));
    assert_eq!(header, ["time_ps", "envelope", "phi_dot"]);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["scenario_hash"], ScenarioConfig::from_toml_str(ZERO_FIELD).unwrap().hash());
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 5);
    for p in outputs {
        assert!(fs::metadata(p.as_str().unwrap()).unwrap().len() > 0);
    }
    assert!(out_dir.join("plot.py").exists());
}

#[test]
fn population_rows_sum_to_one_after_text_round_trip() {
    let dir = TempDir::new().unwrap();
    let text = ZERO_FIELD
        .replace("peak_rabi = 0.0", "peak_rabi = 0.3")
        .replace("fwhm_ps = 10.0", "fwhm_ps = 10.0\nchirp = [0.0, 0.0, 0.02]")
        .replace("samples = 50", "samples = 400");
    let cfg = write(dir.path(), "c.toml", &text);
    let out = chirpsim(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap(), "--preset", "anthracene-5lvl"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = parse_csv(&dir.path().join("populations.csv"));
    assert_eq!(header.len(), 6);
    for r in &rows {
        let sum: f64 = r[1..].iter().sum();
        assert!((sum - 1.0).abs() < 1e-6, "row at t = {} sums to {sum}", r[0]);
    }
    assert!(rows.last().unwrap()[1] < 0.999, "pulse did something");
}

#[test]
fn step_override_is_applied_and_recorded_in_the_hash() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "z.toml", ZERO_FIELD);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(chirpsim(&["simulate", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(chirpsim(&["simulate", "--config", &cfg, "--out", b.to_str().unwrap(), "--step", "0.01"]).status.success());
    let hash = |d: &Path| {
        let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("manifest.json")).unwrap()).unwrap();
        m["scenario_hash"].as_str().unwrap().to_string()
    };
    assert_ne!(hash(&a), hash(&b));
    assert_eq!(chirpsim(&["simulate", "--config", &cfg, "--step", "-1"]).status.code(), Some(1));
}

#[test]
fn parity_sweep_orders() {
    let dir = TempDir::new().unwrap();
    let cfg = scenario_path("two_level_adiabatic");
    let cfg = cfg.to_str().unwrap();
    let out_dir = dir.path().to_str().unwrap();

    let out = chirpsim(&["parity-sweep", "--config", cfg, "--out", out_dir, "--orders", "2,3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("parity.csv")).unwrap();
    let classes: Vec<&str> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(classes, ["inversion", "transparency"]);

    let out = chirpsim(&["parity-sweep", "--config", cfg, "--out", out_dir, "--orders"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("parity.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1, "header only");

    let out = chirpsim(&["parity-sweep", "--config", cfg, "--out", out_dir, "--orders", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gate_exit_codes() {
    let cfg = scenario_path("gate");
    let cfg = cfg.to_str().unwrap();
    let out = chirpsim(&["gate", "--config", cfg]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("PASS"), "{table}");

    let out = chirpsim(&["gate", "--config", cfg, "--threshold", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));

    let dir = TempDir::new().unwrap();
    let weak = fs::read_to_string(&cfg).unwrap().replace("peak_rabi = 1.0", "peak_rabi = 0.0");
    let weak = write(dir.path(), "weak.toml", &weak);
    let out = chirpsim(&["gate", "--config", &weak]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("classified"));
}

#[test]
fn beats_command_writes_spectrum() {
    let dir = TempDir::new().unwrap();
    let text = r#"
[system]
preset = "anthracene-5lvl"

[pulse]
shape = "gaussian"
peak_rabi = 0.1
fwhm_ps = 10.0
start_ps = -30.0
end_ps = 30.0
free_evolution_ps = 3000.0

[integrator]
step_ps = 0.1
samples = 1000
"#;
    let cfg = write(dir.path(), "b.toml", text);
    let out = chirpsim(&["beats", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = parse_csv(&dir.path().join("peaks.csv"));
    assert_eq!(header, ["frequency_ghz", "power"]);
    assert!(!rows.is_empty());
    let (_, spectrum) = parse_csv(&dir.path().join("beats.csv"));
    assert!(spectrum.len() > 1000);
}
