//! Subcommand implementations behind the `chirpsim` binary. Every run writes
//! its artifacts into one output directory and returns a [`RunManifest`]
//! listing them.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::analysis::{beat_spectrum, parity_sweep, populations, BeatSpectrum, ParityRow};
use crate::config::{Artifact, ScenarioConfig, SystemSection};
use crate::error::{Error, Result};
use crate::exec::ExecMode;
use crate::gates::{cnot_truth_table, GateReport};
use crate::propagator::{evolve_density, DensityMatrix};
use crate::quantum_system::{dressed_frame, DrivenSystem};
use crate::units::rad_per_ps_to_ghz;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Command-line overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub step: Option<f64>,
    pub preset: Option<String>,
}

pub fn load_config(path: &Path, overrides: &Overrides) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::from_path(path)?;
    if let Some(step) = overrides.step {
        cfg.integrator.step_ps = Some(step);
    }
    if let Some(preset) = &overrides.preset {
        cfg.system = SystemSection { preset: Some(preset.clone()), ..SystemSection::default() };
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub scenario: Option<String>,
    pub scenario_hash: String,
    pub tool_version: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<PathBuf>,
}

struct ManifestBuilder {
    command: &'static str,
    scenario: Option<String>,
    hash: String,
    started: f64,
    out_dir: PathBuf,
    outputs: Vec<PathBuf>,
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

impl ManifestBuilder {
    fn new(command: &'static str, cfg: &ScenarioConfig, out_dir: &Path) -> Result<Self> {
        fs::create_dir_all(out_dir)?;
        Ok(Self {
            command,
            scenario: cfg.name.clone(),
            hash: cfg.hash(),
            started: unix_now(),
            out_dir: out_dir.to_path_buf(),
            outputs: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.out_dir.join(name);
        fs::write(&path, contents)?;
        self.outputs.push(path);
        Ok(())
    }

    fn finish(mut self) -> Result<RunManifest> {
        for path in &self.outputs {
            if fs::metadata(path)?.len() == 0 {
                return Err(Error::Config(format!("output {} is empty", path.display())));
            }
        }
        let manifest_path = self.out_dir.join("manifest.json");
        self.outputs.push(manifest_path.clone());
        let manifest = RunManifest {
            command: self.command.to_string(),
            scenario: self.scenario,
            scenario_hash: self.hash,
            tool_version: TOOL_VERSION.to_string(),
            started_unix: self.started,
            finished_unix: unix_now(),
            outputs: self.outputs,
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(&manifest_path, json + "\n")?;
        Ok(manifest)
    }
}

fn push_row(buf: &mut String, values: impl IntoIterator<Item = f64>) {
    let mut first = true;
    for v in values {
        if !first {
            buf.push(',');
        }
        first = false;
        // 17 significant digits round-trip every f64
        let _ = write!(buf, "{v:.16e}");
    }
    buf.push('\n');
}

fn header(first: &str, prefix: &str, n: usize) -> String {
    let mut h = first.to_string();
    for i in 0..n {
        let _ = write!(h, ",{prefix}{i}");
    }
    h.push('\n');
    h
}

/// Full simulation: populations, dressed energies, pulse shape and a plot
/// script.
pub fn run_simulate(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunManifest> {
    let mut manifest = ManifestBuilder::new("simulate", cfg, out_dir)?;
    let system = cfg.system()?;
    let pulse = cfg.pulse()?;
    let integrator = cfg.integrator()?;
    let dim = system.dim();
    let driven = DrivenSystem::new(system, pulse.clone());
    let traj = evolve_density(&driven, &DensityMatrix::ground(dim), cfg.window(), &integrator)?;
    let wants = |a: Artifact| cfg.outputs.artifacts.contains(&a);

    if wants(Artifact::Populations) {
        let series = populations(&traj);
        let mut csv = header("time_ps", "P", dim);
        for (t, p) in series.times.iter().zip(&series.populations) {
            push_row(&mut csv, std::iter::once(*t).chain(p.iter().copied()));
        }
        manifest.write("populations.csv", &csv)?;
    }
    if wants(Artifact::Eigen) {
        let frame = dressed_frame(&driven, &traj.times)?;
        let mut csv = header("time_ps", "E", dim);
        for (t, e) in frame.times.iter().zip(frame.eigenvalues()) {
            push_row(&mut csv, std::iter::once(*t).chain(e.iter().copied()));
        }
        manifest.write("eigen.csv", &csv)?;
    }
    if wants(Artifact::Pulse) {
        let mut csv = String::from("time_ps,envelope,phi_dot\n");
        for &t in &traj.times {
            let env = if pulse.in_window(t) { pulse.envelope.amplitude(t) } else { 0.0 };
            push_row(&mut csv, [t, env, pulse.chirp.instantaneous_frequency(t)]);
        }
        manifest.write("pulse.csv", &csv)?;
    }
    if wants(Artifact::Plot) {
        manifest.write("plot.py", &plot_script(dim))?;
    }
    manifest.finish()
}

fn plot_script(dim: usize) -> String {
    format!(
        r#"# Renders the CSVs in this directory: python3 plot.py
import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
LEVELS = {dim}


def load(name):
    path = os.path.join(HERE, name)
    if not os.path.exists(path):
        return None
    with open(path) as fh:
        rows = list(csv.reader(fh))
    cols = list(zip(*[[float(x) for x in r] for r in rows[1:]]))
    return rows[0], cols


panels = [p for p in ("populations.csv", "eigen.csv", "pulse.csv") if load(p)]
fig, axes = plt.subplots(len(panels), 1, sharex=True, figsize=(8, 3 * len(panels)), squeeze=False)
for ax, name in zip(axes[:, 0], panels):
    head, cols = load(name)
    for label, col in zip(head[1:], cols[1:]):
        ax.plot(cols[0], col, label=label, lw=1)
    ax.set_ylabel(name[:-4])
    ax.legend(loc="best", fontsize="small")
axes[-1, 0].set_xlabel("time (ps)")
fig.tight_layout()
fig.savefig(os.path.join(HERE, "plot.png"), dpi=150)
"#
    )
}

/// Final populations and class for each chirp order on a two-level system.
pub fn run_parity_sweep(
    cfg: &ScenarioConfig,
    orders: Option<&[usize]>,
    out_dir: &Path,
    mode: ExecMode,
) -> Result<(Vec<ParityRow>, RunManifest)> {
    let scenario = cfg.parity_scenario()?;
    if scenario.system.dim() != 2 {
        return Err(Error::Config(format!(
            "system: parity-sweep needs a two-level system, got {} levels",
            scenario.system.dim()
        )));
    }
    let orders = orders.unwrap_or(&cfg.parity.as_ref().expect("checked by parity_scenario").orders);
    let mut manifest = ManifestBuilder::new("parity-sweep", cfg, out_dir)?;
    let rows = parity_sweep(&scenario, orders, mode)?;
    manifest.write("parity.csv", &parity_csv(&rows))?;
    Ok((rows, manifest.finish()?))
}

pub fn parity_csv(rows: &[ParityRow]) -> String {
    let mut csv = String::from("order,final_excited,final_ground,classification\n");
    for r in rows {
        let class = r.outcome.map_or("indeterminate".to_string(), |o| o.to_string());
        let _ = writeln!(csv, "{},{:.16e},{:.16e},{class}", r.order, r.final_excited, r.final_ground);
    }
    csv
}

pub fn render_parity_table(rows: &[ParityRow]) -> String {
    let mut s = String::from("order  P_excited   P_ground    class\n");
    for r in rows {
        let class = r.outcome.map_or("indeterminate".to_string(), |o| o.to_string());
        let _ = writeln!(s, "{:<5}  {:.8}  {:.8}  {class}", r.order, r.final_excited, r.final_ground);
    }
    s
}

/// Truth tables on the two-level reduction and, for larger systems, on the
/// full system with B read from the bright state.
#[derive(Debug, Clone)]
pub struct GateOutcome {
    pub reduced: GateReport,
    pub full: Option<std::result::Result<GateReport, String>>,
}

impl GateOutcome {
    pub fn pass(&self) -> bool {
        self.reduced.pass
    }

    pub fn render(&self) -> String {
        let mut s = String::from("two-level reduction\n");
        s.push_str(&self.reduced.render());
        match &self.full {
            Some(Ok(report)) => {
                s.push_str("\nfull system (bright state as B)\n");
                s.push_str(&report.render());
            }
            Some(Err(msg)) => {
                let _ = writeln!(s, "\nfull system (bright state as B): {msg}");
            }
            None => {}
        }
        s
    }
}

pub fn run_gate(cfg: &ScenarioConfig, threshold: Option<f64>, mode: ExecMode) -> Result<GateOutcome> {
    let (inverting, dark, cfg_threshold) = cfg.gate_pulses()?;
    let threshold = threshold.unwrap_or(cfg_threshold);
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Config(format!("gate.threshold: {threshold} outside (0, 1]")));
    }
    let system = cfg.system()?;
    let integrator = cfg.integrator()?;
    let reduced = cnot_truth_table(&inverting, &dark, &system.two_level_reduction(), threshold, &integrator, mode)?;
    let full = (system.dim() > 2).then(|| {
        cnot_truth_table(&inverting, &dark, &system, threshold, &integrator, mode).map_err(|e| e.to_string())
    });
    Ok(GateOutcome { reduced, full })
}

/// Beat spectrum of the configured level over the field-free record (or the
/// whole run when there is none).
pub fn run_beats(cfg: &ScenarioConfig, out_dir: &Path) -> Result<(BeatSpectrum, RunManifest)> {
    let system = cfg.system()?;
    let pulse = cfg.pulse()?;
    let integrator = cfg.integrator()?;
    let level = cfg.beats_level();
    let mut manifest = ManifestBuilder::new("beats", cfg, out_dir)?;
    let window = cfg.window();
    let driven = DrivenSystem::new(system.clone(), pulse.clone());
    let traj = evolve_density(&driven, &DensityMatrix::ground(system.dim()), window, &integrator)?;
    let record = (cfg.pulse.free_evolution_ps > 0.0).then_some((pulse.end, window.1));
    let spectrum = beat_spectrum(&populations(&traj), level, record)?;

    let mut csv = String::from("frequency_ghz,power\n");
    for (w, p) in spectrum.frequencies.iter().zip(&spectrum.power) {
        push_row(&mut csv, [rad_per_ps_to_ghz(*w), *p]);
    }
    manifest.write("beats.csv", &csv)?;
    let mut peaks = String::from("frequency_ghz,power\n");
    for p in &spectrum.peaks {
        push_row(&mut peaks, [rad_per_ps_to_ghz(p.frequency), p.power]);
    }
    manifest.write("peaks.csv", &peaks)?;
    Ok((spectrum, manifest.finish()?))
}
