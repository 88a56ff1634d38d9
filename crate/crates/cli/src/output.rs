//! Result serialization: CSV tables for traces and sweeps, and a single JSON
//! object for the threshold search.
//!
//! Output is byte-deterministic: floats are printed with Rust's shortest
//! round-trip formatting, lines end with `\n`, and nothing is quoted, so two
//! runs with the same configuration produce identical bytes.

use std::io::{self, Write};

use chsh_dynamics::{SweepRow, ThresholdResult};
use serde::Serialize;

use crate::config::Resolved;

/// Writes the `tau,B,violation` table of a single-coupling trace.
pub fn write_trace_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> io::Result<()> {
    w.write_all(b"tau,B,violation\n")?;
    for row in rows {
        writeln!(w, "{},{},{}", row.tau, row.b, row.violation)?;
    }
    Ok(())
}

/// Writes the long-format `tau,r1,B,violation` table of a sweep, in the row
/// order produced by the sweep itself (all times for the first coupling,
/// then the next coupling, and so on).
pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> io::Result<()> {
    w.write_all(b"tau,r1,B,violation\n")?;
    for row in rows {
        writeln!(w, "{},{},{},{}", row.tau, row.r1, row.b, row.violation)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct GridOut {
    tau_max: f64,
    tau_steps: usize,
    r1_min: f64,
    r1_max: f64,
    r1_steps: usize,
}

#[derive(Serialize)]
struct ThresholdOut {
    gamma_star_over_gamma0: f64,
    bracket_width: f64,
    grid: GridOut,
}

/// Writes the threshold result as one JSON object, echoing the search grid so
/// the result is self-describing.
pub fn write_threshold_json<W: Write>(
    mut w: W,
    result: &ThresholdResult,
    cfg: &Resolved,
) -> io::Result<()> {
    let payload = ThresholdOut {
        gamma_star_over_gamma0: result.gamma_star_over_gamma0,
        bracket_width: result.bracket_width,
        grid: GridOut {
            tau_max: cfg.tau_max,
            tau_steps: cfg.tau_steps,
            r1_min: cfg.r1_min,
            r1_max: cfg.r1_max,
            r1_steps: cfg.r1_steps,
        },
    };
    let text = serde_json::to_string_pretty(&payload)
        .expect("a flat result object always serializes");
    w.write_all(text.as_bytes())?;
    w.write_all(b"\n")
}
