//! Command-line interface for the chsh-dynamics toolkit.
//!
//! Three subcommands cover the production workflows:
//!
//! * `trace` — Bell parameter B(tau) for one relative coupling, as CSV.
//! * `sweep` — B over a Cartesian (tau, r1) grid, as long-format CSV.
//! * `threshold` — bisection for the spontaneous-emission rate above which no
//!   coupling split violates the inequality anywhere on the grid, as JSON.
//!
//! Exit codes: 0 on success, 1 when the numerical evaluation fails, and 2 for
//! configuration errors (including command-line parse errors).

mod config;
mod output;

use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use chsh_dynamics::{
    bell_trace, find_threshold, sweep, Error as ModelError, IntegratorConfig, Model, SweepGrid,
    TimeGrid,
};
use clap::{Parser, Subcommand};

use config::{CommonArgs, Kind, ModelChoice, Resolved};

/// Bisection bracket for the threshold search, in units of gamma0.  The lower
/// end is the undamped system (which violates) and the upper end sits well
/// above the strongest decay that still allows any violation.
const THRESHOLD_BRACKET: (f64, f64) = (0.0, 0.25);

#[derive(Parser)]
#[command(
    name = "chsh-dynamics",
    version,
    about = "Bell-inequality dynamics of two qubits coupled to a common lossy cavity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bell parameter B(tau) along a time grid for one relative coupling
    Trace(CommonArgs),
    /// B over the full (tau, r1) grid, in long-format CSV
    Sweep(CommonArgs),
    /// Bisection for the spontaneous-emission threshold of Bell violation
    Threshold(CommonArgs),
}

enum CliError {
    /// Invalid configuration; exit code 2.
    Config(String),
    /// The requested computation or output write failed; exit code 1.
    Runtime(String),
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::InvalidParameter(_) => CliError::Config(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (kind, args) = match &cli.command {
        Command::Trace(a) => (Kind::Trace, a),
        Command::Sweep(a) => (Kind::Sweep, a),
        Command::Threshold(a) => (Kind::Threshold, a),
    };
    let cfg = Resolved::from_args(kind, args)?;
    if args.dump_config {
        print!("{}", cfg.to_toml());
        return Ok(());
    }

    let model = match cfg.model {
        ModelChoice::Analytic => Model::Analytic,
        ModelChoice::Lindblad => Model::Lindblad {
            fock_cutoff: cfg.fock_cutoff,
        },
    };
    let integrator = IntegratorConfig {
        rel_tol: cfg.rel_tol,
        ..IntegratorConfig::default()
    };
    let time = TimeGrid {
        tau_max: cfg.tau_max,
        steps: cfg.tau_steps,
    };

    match kind {
        Kind::Trace => {
            let rows = bell_trace(model, cfg.strength, cfg.r1, cfg.gamma_s, &time, &integrator)?;
            write_output(&cfg, |w| output::write_trace_csv(w, &rows))
        }
        Kind::Sweep => {
            let grid = SweepGrid {
                time,
                r1_values: r1_linspace(&cfg),
            };
            let rows = sweep(model, cfg.strength, cfg.gamma_s, &grid, &integrator)?;
            write_output(&cfg, |w| output::write_sweep_csv(w, &rows))
        }
        Kind::Threshold => {
            let grid = SweepGrid {
                time,
                r1_values: r1_linspace(&cfg),
            };
            let result = find_threshold(model, cfg.strength, &grid, THRESHOLD_BRACKET, &integrator)?;
            write_output(&cfg, |w| output::write_threshold_json(w, &result, &cfg))
        }
    }
}

/// Evenly spaced relative couplings with exact endpoints.
fn r1_linspace(cfg: &Resolved) -> Vec<f64> {
    let (min, max, steps) = (cfg.r1_min, cfg.r1_max, cfg.r1_steps);
    (0..=steps)
        .map(|k| {
            if k == steps {
                max
            } else {
                min + (max - min) * k as f64 / steps as f64
            }
        })
        .collect()
}

/// Runs the writer against the configured sink: the `--out` file when given,
/// stdout otherwise.  The writer only runs after the computation succeeded,
/// so a failed run never leaves a partial table behind.
fn write_output<F>(cfg: &Resolved, writer: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    let target = || {
        cfg.out
            .as_ref()
            .map_or_else(|| "stdout".to_string(), |p| p.display().to_string())
    };
    match &cfg.out {
        Some(path) => {
            let file =
                File::create(path).map_err(|e| CliError::Runtime(format!(
                    "cannot write output to {}: {e}",
                    target()
                )))?;
            let mut w = io::BufWriter::new(file);
            writer(&mut w).and_then(|()| w.flush()).map_err(|e| {
                CliError::Runtime(format!("cannot write output to {}: {e}", target()))
            })
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            writer(&mut w).and_then(|()| w.flush()).map_err(|e| {
                CliError::Runtime(format!("cannot write output to {}: {e}", target()))
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_line_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn linspace_endpoints_are_exact() {
        let args = CommonArgs {
            model: None,
            strength: None,
            r1: None,
            gamma_s: None,
            tau_max: None,
            tau_steps: None,
            r1_min: Some(0.05),
            r1_max: Some(0.95),
            r1_steps: Some(18),
            rel_tol: None,
            fock_cutoff: None,
            out: None,
            format: None,
            config: None,
            dump_config: false,
        };
        let cfg = Resolved::from_args(Kind::Threshold, &args).unwrap();
        let grid = r1_linspace(&cfg);
        assert_eq!(grid.len(), 19);
        assert_eq!(grid[0], 0.05);
        assert_eq!(grid[18], 0.95);
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }
}
