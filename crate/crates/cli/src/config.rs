//! Configuration resolution for the command-line front end.
//!
//! Every run is described by the same set of knobs regardless of subcommand.
//! Each knob is resolved with a fixed precedence: an explicit command-line
//! flag wins, then a value from the optional TOML config file, then the
//! subcommand's built-in default.  The resolved configuration can be printed
//! back as TOML (`--dump-config`), and that output re-parses to the same
//! configuration, so a run is always reproducible from its dump.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

/// Which backend evaluates the two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    /// Closed-form single-excitation solution (fast; the default).
    Analytic,
    /// Pseudomode master-equation integration (independent cross-check).
    Lindblad,
}

/// Output serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatChoice {
    /// Comma-separated table; used by `trace` and `sweep`.
    Csv,
    /// Single JSON object; used by `threshold`.
    Json,
}

/// Subcommand identity.  It fixes the defaults that differ between commands:
/// the relative-coupling grid and the output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Trace,
    Sweep,
    Threshold,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Dynamical model to evaluate
    #[arg(long, value_enum)]
    pub model: Option<ModelChoice>,

    /// Dimensionless coupling strength S = R / lambda
    #[arg(long = "S")]
    pub strength: Option<f64>,

    /// Relative coupling of the first qubit (used by `trace`)
    #[arg(long)]
    pub r1: Option<f64>,

    /// Spontaneous-emission rate as a fraction of gamma0
    #[arg(long = "gammaS")]
    pub gamma_s: Option<f64>,

    /// Largest dimensionless time on the grid
    #[arg(long = "tau-max")]
    pub tau_max: Option<f64>,

    /// Number of time-grid intervals (the grid has tau-steps + 1 points)
    #[arg(long = "tau-steps")]
    pub tau_steps: Option<usize>,

    /// Smallest relative coupling in the sweep grid
    #[arg(long = "r1-min")]
    pub r1_min: Option<f64>,

    /// Largest relative coupling in the sweep grid
    #[arg(long = "r1-max")]
    pub r1_max: Option<f64>,

    /// Number of relative-coupling intervals (the grid has r1-steps + 1 points)
    #[arg(long = "r1-steps")]
    pub r1_steps: Option<usize>,

    /// Relative tolerance of the adaptive integrator
    #[arg(long = "rel-tol")]
    pub rel_tol: Option<f64>,

    /// Photon-number cutoff of the pseudomode Fock space
    #[arg(long = "fock-cutoff")]
    pub fock_cutoff: Option<usize>,

    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<FormatChoice>,

    /// TOML config file supplying values for flags that were not given
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Print the fully resolved configuration as TOML and exit
    #[arg(long = "dump-config")]
    pub dump_config: bool,
}

/// On-disk configuration.  Keys mirror the command-line flags (`S`, `gammaS`,
/// `tau_max`, ...); every key is optional, and unknown keys are rejected so a
/// typo cannot silently fall back to a default.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: Option<ModelChoice>,
    #[serde(rename = "S")]
    strength: Option<f64>,
    r1: Option<f64>,
    #[serde(rename = "gammaS")]
    gamma_s: Option<f64>,
    tau_max: Option<f64>,
    tau_steps: Option<usize>,
    r1_min: Option<f64>,
    r1_max: Option<f64>,
    r1_steps: Option<usize>,
    rel_tol: Option<f64>,
    fock_cutoff: Option<usize>,
    out: Option<PathBuf>,
    format: Option<FormatChoice>,
}

/// Mirror of [`Resolved`] in the on-disk schema, used for `--dump-config`.
/// Field order here is the order keys appear in the dump.
#[derive(Serialize)]
struct Dump<'a> {
    model: ModelChoice,
    #[serde(rename = "S")]
    strength: f64,
    r1: f64,
    #[serde(rename = "gammaS")]
    gamma_s: f64,
    tau_max: f64,
    tau_steps: usize,
    r1_min: f64,
    r1_max: f64,
    r1_steps: usize,
    rel_tol: f64,
    fock_cutoff: usize,
    format: FormatChoice,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<&'a PathBuf>,
}

/// A configuration problem: a bad flag value, an unreadable or invalid config
/// file, or an inconsistent combination.  Always maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub kind: Kind,
    pub model: ModelChoice,
    pub strength: f64,
    pub r1: f64,
    pub gamma_s: f64,
    pub tau_max: f64,
    pub tau_steps: usize,
    pub r1_min: f64,
    pub r1_max: f64,
    pub r1_steps: usize,
    pub rel_tol: f64,
    pub fock_cutoff: usize,
    pub format: FormatChoice,
    pub out: Option<PathBuf>,
}

impl Resolved {
    /// Merges flags, the optional config file, and per-command defaults, then
    /// validates the result.
    pub fn from_args(kind: Kind, args: &CommonArgs) -> Result<Self, ConfigError> {
        let file = match &args.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let (r1_min_d, r1_max_d, r1_steps_d) = match kind {
            Kind::Threshold => (0.05, 0.95, 18),
            Kind::Trace | Kind::Sweep => (0.01, 0.99, 98),
        };
        let format_d = match kind {
            Kind::Threshold => FormatChoice::Json,
            Kind::Trace | Kind::Sweep => FormatChoice::Csv,
        };
        let resolved = Resolved {
            kind,
            model: args.model.or(file.model).unwrap_or(ModelChoice::Analytic),
            strength: args.strength.or(file.strength).unwrap_or(10.0),
            r1: args.r1.or(file.r1).unwrap_or(0.4),
            gamma_s: args.gamma_s.or(file.gamma_s).unwrap_or(0.0),
            tau_max: args.tau_max.or(file.tau_max).unwrap_or(20.0),
            tau_steps: args.tau_steps.or(file.tau_steps).unwrap_or(2000),
            r1_min: args.r1_min.or(file.r1_min).unwrap_or(r1_min_d),
            r1_max: args.r1_max.or(file.r1_max).unwrap_or(r1_max_d),
            r1_steps: args.r1_steps.or(file.r1_steps).unwrap_or(r1_steps_d),
            rel_tol: args.rel_tol.or(file.rel_tol).unwrap_or(1e-9),
            fock_cutoff: args.fock_cutoff.or(file.fock_cutoff).unwrap_or(1),
            format: args.format.or(file.format).unwrap_or(format_d),
            out: args.out.clone().or(file.out),
        };
        resolved.validate()?;
        Ok(resolved)
    }

    /// Rejects values outside the physically or numerically meaningful range.
    /// All fields are checked regardless of which command uses them, so a
    /// dumped configuration is valid for any subcommand.
    fn validate(&self) -> Result<(), ConfigError> {
        let fail = |msg: String| Err(ConfigError(msg));
        if !(self.strength.is_finite() && self.strength > 0.0) {
            return fail(format!("S must be positive, got {}", self.strength));
        }
        if !(self.r1.is_finite() && (0.0..=1.0).contains(&self.r1)) {
            return fail(format!("r1 must lie in [0, 1], got {}", self.r1));
        }
        if !(self.gamma_s.is_finite() && self.gamma_s >= 0.0) {
            return fail(format!("gammaS must be non-negative, got {}", self.gamma_s));
        }
        if !(self.tau_max.is_finite() && self.tau_max > 0.0) {
            return fail(format!("tau-max must be positive, got {}", self.tau_max));
        }
        if self.tau_steps < 2 {
            return fail(format!("tau-steps must be at least 2, got {}", self.tau_steps));
        }
        if !(self.r1_min.is_finite() && self.r1_max.is_finite())
            || !(0.0 < self.r1_min && self.r1_min < self.r1_max && self.r1_max < 1.0)
        {
            return fail(format!(
                "the relative-coupling grid needs 0 < r1-min < r1-max < 1, got [{}, {}]",
                self.r1_min, self.r1_max
            ));
        }
        if self.r1_steps < 1 {
            return fail(format!("r1-steps must be at least 1, got {}", self.r1_steps));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return fail(format!("rel-tol must be positive, got {}", self.rel_tol));
        }
        if self.fock_cutoff < 1 {
            return fail(format!("fock-cutoff must be at least 1, got {}", self.fock_cutoff));
        }
        match (self.kind, self.format) {
            (Kind::Threshold, FormatChoice::Csv) => {
                fail("the threshold result is a single scalar; use --format json".into())
            }
            (Kind::Trace | Kind::Sweep, FormatChoice::Json) => {
                fail("trace and sweep emit tables; use --format csv".into())
            }
            _ => Ok(()),
        }
    }

    /// Serializes the resolved configuration in the config-file schema.
    pub fn to_toml(&self) -> String {
        let dump = Dump {
            model: self.model,
            strength: self.strength,
            r1: self.r1,
            gamma_s: self.gamma_s,
            tau_max: self.tau_max,
            tau_steps: self.tau_steps,
            r1_min: self.r1_min,
            r1_max: self.r1_max,
            r1_steps: self.r1_steps,
            rel_tol: self.rel_tol,
            fock_cutoff: self.fock_cutoff,
            format: self.format,
            out: self.out.as_ref(),
        };
        toml::to_string(&dump).expect("a flat table of scalars always serializes")
    }
}

fn load_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        ConfigError(format!("cannot read config file {}: {e}", path.display()))
    })?;
    toml::from_str(&text).map_err(|e| {
        ConfigError(format!("invalid config file {}: {e}", path.display()))
    })
}
