use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chirpsim::cli::{self, Overrides};
use chirpsim::exec::{self, ExecMode};
use chirpsim::Error;

#[derive(Parser)]
#[command(name = "chirpsim", version, about = "Chirped-pulse density-matrix simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Fixed integrator step in ps, overriding the scenario.
    #[arg(long)]
    step: Option<f64>,
    /// Replace the scenario's system with a named preset.
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one scenario and write populations, dressed energies and pulse CSVs.
    Simulate(Common),
    /// Classify single-term chirps of several orders on a two-level system.
    ParitySweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated chirp orders; defaults to the scenario's list.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        orders: Option<Vec<usize>>,
    },
    /// Evaluate the CNOT truth table for the scenario's gate pulses.
    Gate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Beat spectrum of the field-free part of a run.
    Beats(Common),
}

fn threads_from_env() -> Result<Option<usize>, Error> {
    match std::env::var("CHIRPSIM_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Error::Config(format!("CHIRPSIM_THREADS: expected a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn load(common: &Common) -> Result<chirpsim::config::ScenarioConfig, Error> {
    let overrides = Overrides { step: common.step, preset: common.preset.clone() };
    cli::load_config(&common.config, &overrides)
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    exec::init_threads(threads_from_env()?);
    let mode = ExecMode::Parallel;
    match cli.command {
        Command::Simulate(common) => {
            let manifest = cli::run_simulate(&load(&common)?, &common.out)?;
            for path in &manifest.outputs {
                println!("wrote {}", path.display());
            }
        }
        Command::ParitySweep { common, orders } => {
            let cfg = load(&common)?;
            let (rows, _) = cli::run_parity_sweep(&cfg, orders.as_deref(), &common.out, mode)?;
            print!("{}", cli::render_parity_table(&rows));
        }
        Command::Gate { common, threshold } => {
            let outcome = cli::run_gate(&load(&common)?, threshold, mode)?;
            print!("{}", outcome.render());
            if !outcome.pass() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Beats(common) => {
            let (spectrum, _) = cli::run_beats(&load(&common)?, &common.out)?;
            println!("resolution {:.6} GHz", chirpsim::units::rad_per_ps_to_ghz(spectrum.resolution));
            for p in &spectrum.peaks {
                println!("{:.6} GHz  power {:.6e}", chirpsim::units::rad_per_ps_to_ghz(p.frequency), p.power);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
