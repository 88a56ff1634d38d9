//! Bell-function traces, Cartesian (tau, r1) sweeps, violation intervals
//! with bisection-sharpened boundaries, revival counting, and the
//! spontaneous-emission threshold search.
//!
//! All quantities are in scaled time tau = lambda t. Traces start from the
//! first qubit excited (|10>) with the cavity in vacuum, the configuration
//! whose sub-radiant component trapping produces the revival structure.

use ndarray::Array2;
use rayon::prelude::*;

use crate::analytic::{
    damped_amplitudes_at, density_matrix, project_initial, Amplitudes, InitialProjection,
    TwoQubitState,
};
use crate::bell::bell_result;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::lindblad::{build_generator, PseudomodeGenerator};
use crate::ode::IntegratorConfig;
use crate::params::{derive_params, params_from_regime, DerivedParams};

/// Accuracy of bisection-refined violation-interval boundaries; intervals
/// narrower than this are reported as spurious and dropped.
pub const EDGE_TOL: f64 = 1e-6;

/// Threshold bisection stops once the bracket is narrower than this
/// (in units of gamma0).
pub const THRESHOLD_WIDTH: f64 = 1e-3;

/// Initial state |10>: qubit 1 excited, qubit 2 and the mode in the ground
/// state.
const EXCITED_FIRST: Amplitudes = Amplitudes {
    c1: C64::new(1.0, 0.0),
    c2: C64::new(0.0, 0.0),
};

/// Uniform time grid tau_k = tau_max k / steps for k = 0..=steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub tau_max: f64,
    pub steps: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            tau_max: 20.0,
            steps: 2000,
        }
    }
}

impl TimeGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau_max must be positive, got {}",
                self.tau_max
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 time steps, got {}",
                self.steps
            )));
        }
        Ok(())
    }

    /// Grid points including both endpoints (steps + 1 values).
    pub fn points(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|k| self.tau_max * k as f64 / self.steps as f64)
            .collect()
    }
}

/// Cartesian sweep domain: every relative coupling crossed with every grid
/// time.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub time: TimeGrid,
    /// Relative couplings of qubit 1, strictly ascending and strictly inside
    /// (0, 1).
    pub r1_values: Vec<f64>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            time: TimeGrid::default(),
            r1_values: (1..=99).map(|k| k as f64 / 100.0).collect(),
        }
    }
}

impl SweepGrid {
    /// Coarser 19-point coupling grid (0.05 to 0.95 in steps of 0.05) used
    /// by the threshold search, where each violation functional evaluation
    /// costs a full sweep.
    pub fn threshold_default() -> Self {
        Self {
            time: TimeGrid::default(),
            r1_values: (1..=19).map(|k| (5 * k) as f64 / 100.0).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.time.validate()?;
        if self.r1_values.is_empty() {
            return Err(Error::InvalidParameter("r1 grid is empty".into()));
        }
        for &r1 in &self.r1_values {
            if !(r1 > 0.0 && r1 < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "r1 values must lie strictly inside (0, 1), got {r1}"
                )));
            }
        }
        for pair in self.r1_values.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::InvalidParameter(format!(
                    "r1 values must be strictly ascending, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(())
    }
}

/// Dynamical model producing the two-qubit state at each time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Closed-form single-excitation solution; spontaneous emission enters
    /// through the damped memory amplitude.
    Analytic,
    /// Pseudomode master equation integrated numerically. `fock_cutoff` is
    /// the highest cavity Fock state kept; 1 is exact in the
    /// single-excitation sector.
    Lindblad { fock_cutoff: usize },
}

/// One (tau, r1) sample: the maximal CHSH value B and its clipped excess
/// over the classical bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub tau: f64,
    pub r1: f64,
    pub b: f64,
    pub violation: f64,
}

impl SweepRow {
    /// Build a row, deriving the clipped violation from B.
    pub fn new(tau: f64, r1: f64, b: f64) -> Self {
        Self {
            tau,
            r1,
            b,
            violation: (b - 2.0).max(0.0),
        }
    }
}

/// Result of the spontaneous-emission threshold search, in units of gamma0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    /// Midpoint of the final bisection bracket.
    pub gamma_star_over_gamma0: f64,
    /// Width of the final bracket (the absolute uncertainty window).
    pub bracket_width: f64,
}

/// A (model, parameter) pair that can produce the two-qubit state at any
/// scaled time, starting from |10>.
enum Evaluator {
    Analytic {
        params: DerivedParams,
        proj: InitialProjection,
        g: f64,
    },
    Lindblad {
        gen: PseudomodeGenerator,
        rho0: Array2<C64>,
    },
}

impl Evaluator {
    fn new(model: Model, strength: f64, r1: f64, gamma_ratio: f64) -> Result<Self> {
        let (coupling, reservoir, decay) = params_from_regime(strength, r1, gamma_ratio)?;
        let params = derive_params(&coupling, &reservoir, &decay)?;
        match model {
            Model::Analytic => {
                let proj = project_initial(params.r1, &EXCITED_FIRST);
                let g = decay.gamma1 / params.lambda;
                Ok(Self::Analytic { params, proj, g })
            }
            Model::Lindblad { fock_cutoff } => {
                let gen = build_generator(&params, &decay, fock_cutoff)?;
                let rho0 = gen.single_excitation_state(EXCITED_FIRST.c1, EXCITED_FIRST.c2)?;
                Ok(Self::Lindblad { gen, rho0 })
            }
        }
    }

    /// Reduced two-qubit state at tau. The Lindblad branch integrates from
    /// tau = 0 on every call, so prefer `trace` for whole grids.
    fn state_at(&self, tau: f64, cfg: &IntegratorConfig) -> Result<TwoQubitState> {
        match self {
            Self::Analytic { params, proj, g } => {
                let amps = damped_amplitudes_at(tau, params.r1, *g, proj, params);
                density_matrix(&amps)
            }
            Self::Lindblad { gen, rho0 } => {
                if tau == 0.0 {
                    gen.reduce_qubits(rho0)
                } else {
                    gen.reduce_qubits(&gen.evolve_span(rho0, 0.0, tau, cfg)?)
                }
            }
        }
    }

    fn bell_at(&self, tau: f64, cfg: &IntegratorConfig) -> Result<f64> {
        Ok(bell_result(&self.state_at(tau, cfg)?).b)
    }

    /// Bell values over an ascending grid starting at tau = 0; the Lindblad
    /// branch integrates the grid in one pass. `r1` labels the rows.
    fn trace(&self, r1: f64, taus: &[f64], cfg: &IntegratorConfig) -> Result<Vec<SweepRow>> {
        match self {
            Self::Analytic { .. } => taus
                .iter()
                .map(|&tau| {
                    let state = self.state_at(tau, cfg).map_err(|e| Error::Trajectory {
                        tau,
                        r1,
                        source: Box::new(e),
                    })?;
                    Ok(SweepRow::new(tau, r1, bell_result(&state).b))
                })
                .collect(),
            Self::Lindblad { gen, rho0 } => {
                let mut rows = Vec::with_capacity(taus.len());
                gen.evolve(rho0, taus, cfg, |k, rho| {
                    let state = gen
                        .reduce_qubits(&rho)
                        .expect("evolved state keeps the generator dimension");
                    rows.push(SweepRow::new(taus[k], r1, bell_result(&state).b));
                })
                .map_err(|e| match e {
                    Error::StepSizeUnderflow { tau } => Error::Trajectory {
                        tau,
                        r1,
                        source: Box::new(Error::StepSizeUnderflow { tau }),
                    },
                    other => other,
                })?;
                Ok(rows)
            }
        }
    }
}

/// B(tau) along a time grid for one relative coupling. `gamma_ratio` is the
/// spontaneous-emission rate of both qubits as a fraction of gamma0.
pub fn bell_trace(
    model: Model,
    strength: f64,
    r1: f64,
    gamma_ratio: f64,
    time: &TimeGrid,
    cfg: &IntegratorConfig,
) -> Result<Vec<SweepRow>> {
    time.validate()?;
    cfg.validate()?;
    Evaluator::new(model, strength, r1, gamma_ratio)?.trace(r1, &time.points(), cfg)
}

/// B at a single scaled time (the Lindblad model integrates 0 -> tau).
pub fn bell_at(
    model: Model,
    strength: f64,
    r1: f64,
    gamma_ratio: f64,
    tau: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tau must be non-negative, got {tau}"
        )));
    }
    cfg.validate()?;
    Evaluator::new(model, strength, r1, gamma_ratio)?.bell_at(tau, cfg)
}

/// Full Cartesian sweep. Rows come out r1-major: the complete time trace of
/// the first r1, then the next. Trajectories for different couplings are
/// independent and evaluated in parallel; the row order is deterministic.
pub fn sweep(
    model: Model,
    strength: f64,
    gamma_ratio: f64,
    grid: &SweepGrid,
    cfg: &IntegratorConfig,
) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    cfg.validate()?;
    let taus = grid.time.points();
    let blocks: Vec<Vec<SweepRow>> = grid
        .r1_values
        .par_iter()
        .map(|&r1| Evaluator::new(model, strength, r1, gamma_ratio)?.trace(r1, &taus, cfg))
        .collect::<Result<_>>()?;
    Ok(blocks.into_iter().flatten().collect())
}

/// Sharpen one violation boundary inside [lo, hi] by bisection on the
/// continuous model. `entering` says whether the trace crosses into the
/// violating region over this bracket (otherwise it crosses out).
fn refine<F>(eval: &mut F, mut lo: f64, mut hi: f64, entering: bool) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    while hi - lo > EDGE_TOL {
        let mid = 0.5 * (lo + hi);
        let violating = eval(mid)? > 2.0;
        if violating == entering {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximal intervals of B > 2 along a sampled trace. `taus`/`b` are the
/// grid samples; `eval` evaluates the same continuous model at arbitrary
/// tau and is used to sharpen each boundary to within [`EDGE_TOL`]. A
/// violation already present at the first sample starts at the first
/// sample; one persisting at the last sample ends there.
pub fn violation_intervals<F>(taus: &[f64], b: &[f64], mut eval: F) -> Result<Vec<(f64, f64)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    if taus.is_empty() {
        return Err(Error::EmptyInput("violation intervals over no samples"));
    }
    if taus.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: taus.len(),
            got: b.len(),
        });
    }
    for pair in taus.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::InvalidParameter(format!(
                "time samples must be strictly ascending, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }

    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    for (k, &bk) in b.iter().enumerate() {
        let violating = bk > 2.0;
        if violating && start.is_none() {
            start = Some(if k == 0 {
                taus[0]
            } else {
                refine(&mut eval, taus[k - 1], taus[k], true)?
            });
        } else if !violating {
            if let Some(s) = start.take() {
                let end = refine(&mut eval, taus[k - 1], taus[k], false)?;
                if end - s >= EDGE_TOL {
                    out.push((s, end));
                }
            }
        }
    }
    if let Some(s) = start {
        let end = taus[taus.len() - 1];
        if end - s >= EDGE_TOL {
            out.push((s, end));
        }
    }
    Ok(out)
}

/// Violation intervals of a model trace: samples the grid, then sharpens
/// each boundary by re-evaluating the model (the Lindblad branch
/// re-integrates 0 -> tau per probe).
pub fn trace_violation_intervals(
    model: Model,
    strength: f64,
    r1: f64,
    gamma_ratio: f64,
    time: &TimeGrid,
    cfg: &IntegratorConfig,
) -> Result<Vec<(f64, f64)>> {
    time.validate()?;
    cfg.validate()?;
    let ev = Evaluator::new(model, strength, r1, gamma_ratio)?;
    let taus = time.points();
    let rows = ev.trace(r1, &taus, cfg)?;
    let b: Vec<f64> = rows.iter().map(|r| r.b).collect();
    violation_intervals(&taus, &b, |tau| ev.bell_at(tau, cfg))
}

/// Number of distinct returns into the violating region after the first
/// entry: one less than the interval count, zero when at most one interval.
pub fn count_revivals(intervals: &[(f64, f64)]) -> usize {
    intervals.len().saturating_sub(1)
}

/// True when `a` beats `b`: larger B, ties broken toward earlier tau, then
/// smaller r1.
fn better(a: &SweepRow, b: &SweepRow) -> bool {
    if a.b != b.b {
        return a.b > b.b;
    }
    if a.tau != b.tau {
        return a.tau < b.tau;
    }
    a.r1 < b.r1
}

/// The sweep row with the largest B. Ties prefer the smallest tau, then the
/// smallest r1. Errors on an empty slice.
pub fn max_violation(rows: &[SweepRow]) -> Result<SweepRow> {
    let mut rows_iter = rows.iter();
    let mut best = *rows_iter
        .next()
        .ok_or(Error::EmptyInput("maximum over no sweep rows"))?;
    for row in rows_iter {
        if better(row, &best) {
            best = *row;
        }
    }
    Ok(best)
}

/// Peak violation functional V(gamma) = max over the sweep grid of (B - 2),
/// unclipped: V <= 0 means no grid point violates at this emission rate.
pub fn peak_violation(
    model: Model,
    strength: f64,
    gamma_ratio: f64,
    grid: &SweepGrid,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let rows = sweep(model, strength, gamma_ratio, grid, cfg)?;
    let mut best = f64::NEG_INFINITY;
    for row in &rows {
        best = best.max(row.b - 2.0);
    }
    Ok(best)
}

/// Bisect for the spontaneous-emission rate (as a fraction of gamma0) at
/// which the peak violation crosses zero. The bracket is in the same units
/// and must straddle the crossing: V(lo) > 0 >= V(hi). Stops once the
/// bracket is narrower than [`THRESHOLD_WIDTH`] and returns its midpoint.
pub fn find_threshold(
    model: Model,
    strength: f64,
    grid: &SweepGrid,
    bracket: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<ThresholdResult> {
    grid.validate()?;
    let (mut lo, mut hi) = bracket;
    if !(hi > lo) || !(lo >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold bracket must satisfy 0 <= low < high, got ({lo}, {hi})"
        )));
    }
    let v_low = peak_violation(model, strength, lo, grid, cfg)?;
    let v_high = peak_violation(model, strength, hi, grid, cfg)?;
    if !(v_low > 0.0 && v_high <= 0.0) {
        return Err(Error::InvalidBracket { v_low, v_high });
    }
    while hi - lo > THRESHOLD_WIDTH {
        let mid = 0.5 * (lo + hi);
        if peak_violation(model, strength, mid, grid, cfg)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdResult {
        gamma_star_over_gamma0: 0.5 * (lo + hi),
        bracket_width: hi - lo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::violation_margin;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    const S: f64 = 10.0;

    /// Violation intervals of the decay-free r1 = 0.4 trace on the default
    /// grid, frozen from an independent high-precision evaluation.
    const UNDAMPED_EDGES: [(f64, f64); 5] = [
        (0.1834390258789062, 0.4525790405273437),
        (0.8206820678710935, 1.0725765991210938),
        (1.4614047241210937, 1.6888552856445314),
        (2.1077767944335934, 2.299218444824218),
        (2.765552673339844, 2.8979000854492183),
    ];

    /// Same trace with gammaS = gamma0 / 50.
    const DAMPED_EDGES: [(f64, f64); 2] = [
        (0.18963592529296874, 0.43382720947265624),
        (0.8785824584960935, 0.9944607543945312),
    ];

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    fn assert_edges(got: &[(f64, f64)], expected: &[(f64, f64)]) {
        assert_eq!(got.len(), expected.len(), "interval count: {got:?}");
        for (k, ((a, b), (ea, eb))) in got.iter().zip(expected).enumerate() {
            assert!(
                (a - ea).abs() < 1e-6 && (b - eb).abs() < 1e-6,
                "interval {k}: got ({a}, {b}), expected ({ea}, {eb})"
            );
        }
    }

    #[test]
    fn time_grid_points_and_defaults() {
        let grid = TimeGrid::default();
        assert_eq!((grid.tau_max, grid.steps), (20.0, 2000));
        let taus = grid.points();
        assert_eq!(taus.len(), 2001);
        assert_eq!(taus[0], 0.0);
        assert_eq!(taus[2000], 20.0);
        assert_eq!(taus[31], 0.31);
        assert!(taus.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn grid_validation_rejects_bad_inputs() {
        assert!(TimeGrid { tau_max: 0.0, steps: 10 }.validate().is_err());
        assert!(TimeGrid { tau_max: -1.0, steps: 10 }.validate().is_err());
        assert!(TimeGrid { tau_max: f64::NAN, steps: 10 }.validate().is_err());
        assert!(TimeGrid { tau_max: 5.0, steps: 1 }.validate().is_err());
        assert!(TimeGrid { tau_max: 5.0, steps: 2 }.validate().is_ok());

        let time = TimeGrid::default();
        let bad = |r1_values: Vec<f64>| SweepGrid { time, r1_values }.validate().is_err();
        assert!(bad(vec![]));
        assert!(bad(vec![0.0, 0.5]));
        assert!(bad(vec![0.5, 1.0]));
        assert!(bad(vec![0.5, 0.4]));
        assert!(bad(vec![0.5, 0.5]));
        assert!(SweepGrid { time, r1_values: vec![0.2, 0.4] }.validate().is_ok());
    }

    #[test]
    fn default_grids_have_expected_shape() {
        let grid = SweepGrid::default();
        grid.validate().unwrap();
        assert_eq!(grid.r1_values.len(), 99);
        assert_eq!(grid.r1_values[0], 0.01);
        assert_eq!(grid.r1_values[98], 0.99);

        let coarse = SweepGrid::threshold_default();
        coarse.validate().unwrap();
        assert_eq!(coarse.r1_values.len(), 19);
        assert_eq!(coarse.r1_values[0], 0.05);
        assert_eq!(coarse.r1_values[7], 0.4);
        assert_eq!(coarse.r1_values[18], 0.95);
    }

    #[test]
    fn trace_matches_frozen_maximum_without_decay() {
        let rows =
            bell_trace(Model::Analytic, S, 0.4, 0.0, &TimeGrid::default(), &cfg()).unwrap();
        assert_eq!(rows.len(), 2001);
        assert_eq!(rows[0].tau, 0.0);
        assert_eq!(rows[0].b, 2.0, "B starts exactly at the classical bound");
        assert_eq!(rows[0].violation, 0.0);

        let best = max_violation(&rows).unwrap();
        assert_eq!(best.tau, 0.31);
        assert!((best.b - 2.7039912022608372).abs() < 1e-9);
        assert!((best.violation - 0.7039912022608372).abs() < 1e-9);
    }

    #[test]
    fn undamped_intervals_match_frozen_edges() {
        let iv = trace_violation_intervals(
            Model::Analytic,
            S,
            0.4,
            0.0,
            &TimeGrid::default(),
            &cfg(),
        )
        .unwrap();
        assert_edges(&iv, &UNDAMPED_EDGES);
        assert_eq!(count_revivals(&iv), 4);
    }

    #[test]
    fn damped_intervals_and_maximum_match_frozen_values() {
        let time = TimeGrid::default();
        let damped =
            trace_violation_intervals(Model::Analytic, S, 0.4, 0.02, &time, &cfg()).unwrap();
        assert_edges(&damped, &DAMPED_EDGES);

        let undamped =
            trace_violation_intervals(Model::Analytic, S, 0.4, 0.0, &time, &cfg()).unwrap();
        assert_eq!(count_revivals(&undamped) - count_revivals(&damped), 3);

        let rows = bell_trace(Model::Analytic, S, 0.4, 0.02, &time, &cfg()).unwrap();
        let best = max_violation(&rows).unwrap();
        assert_eq!(best.tau, 0.31);
        assert!((best.b - 2.5521544224965225).abs() < 1e-9);
    }

    #[test]
    fn interval_edges_stable_under_grid_refinement() {
        let coarse = trace_violation_intervals(
            Model::Analytic,
            S,
            0.4,
            0.0,
            &TimeGrid::default(),
            &cfg(),
        )
        .unwrap();
        let fine = trace_violation_intervals(
            Model::Analytic,
            S,
            0.4,
            0.0,
            &TimeGrid { tau_max: 20.0, steps: 4000 },
            &cfg(),
        )
        .unwrap();
        assert_eq!(coarse.len(), fine.len());
        let dtau = 20.0 / 2000.0;
        for ((a1, b1), (a2, b2)) in coarse.iter().zip(&fine) {
            assert!((a1 - a2).abs() < 2.0 * dtau && (b1 - b2).abs() < 2.0 * dtau);
            // Both brackets converge onto the same continuous crossing, so
            // the sharpened edges agree far tighter than the grid spacing.
            assert!((a1 - a2).abs() < 2e-6 && (b1 - b2).abs() < 2e-6);
        }
    }

    #[test]
    fn revival_count_is_intervals_minus_one() {
        assert_eq!(count_revivals(&[]), 0);
        assert_eq!(count_revivals(&[(0.1, 0.2)]), 0);
        let five = [(0.1, 0.2), (0.3, 0.4), (0.5, 0.6), (0.7, 0.8), (0.9, 1.0)];
        assert_eq!(count_revivals(&five), 4);
    }

    #[test]
    fn sweep_is_r1_major_and_consistent() {
        let grid = SweepGrid {
            time: TimeGrid { tau_max: 1.0, steps: 4 },
            r1_values: vec![0.3, 0.6],
        };
        let rows = sweep(Model::Analytic, S, 0.0, &grid, &cfg()).unwrap();
        assert_eq!(rows.len(), 10);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.r1, if i < 5 { 0.3 } else { 0.6 });
            assert_eq!(row.tau, 0.25 * (i % 5) as f64);
            assert_eq!(row.violation, (row.b - 2.0).max(0.0));
        }
        let trace = bell_trace(Model::Analytic, S, 0.3, 0.0, &grid.time, &cfg()).unwrap();
        assert_eq!(&rows[..5], &trace[..]);
    }

    #[test]
    fn global_sweep_maximum_lands_at_frozen_point() {
        let rows = sweep(Model::Analytic, S, 0.0, &SweepGrid::default(), &cfg()).unwrap();
        assert_eq!(rows.len(), 99 * 2001);
        let best = max_violation(&rows).unwrap();
        assert_eq!(best.tau, 0.31);
        assert_eq!(best.r1, 0.4);
        assert!((best.b - 2.7039912022608372).abs() < 1e-9);
    }

    #[test]
    fn symmetric_coupling_never_violates() {
        let rows = bell_trace(
            Model::Analytic,
            S,
            FRAC_1_SQRT_2,
            0.0,
            &TimeGrid::default(),
            &cfg(),
        )
        .unwrap();
        for row in &rows {
            assert!(row.b <= 2.0, "B = {} above 2 at tau = {}", row.b, row.tau);
            assert_eq!(row.violation, 0.0);
        }
    }

    #[test]
    fn max_violation_tie_breaking_and_empty() {
        let rows = [
            SweepRow::new(2.0, 0.5, 2.5),
            SweepRow::new(1.0, 0.7, 2.5),
            SweepRow::new(1.0, 0.3, 2.5),
            SweepRow::new(0.5, 0.9, 2.4),
        ];
        let best = max_violation(&rows).unwrap();
        assert_eq!((best.tau, best.r1), (1.0, 0.3));
        assert!(matches!(max_violation(&[]), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn violation_intervals_on_synthetic_signal() {
        // B = 2 + sin(tau) crosses the bound at 0 and pi.
        let taus: Vec<f64> = (0..=600).map(|k| k as f64 * 0.01).collect();
        let f = |t: f64| 2.0 + t.sin();
        let b: Vec<f64> = taus.iter().map(|&t| f(t)).collect();
        let iv = violation_intervals(&taus, &b, |t| Ok(f(t))).unwrap();
        assert_eq!(iv.len(), 1);
        let (s, e) = iv[0];
        assert!(s >= 0.0 && s < 1e-6, "start = {s}");
        assert!((e - PI).abs() < 1e-6, "end = {e}");
        assert_eq!(count_revivals(&iv), 0);

        // A violating stretch narrower than the edge tolerance is dropped.
        let hair = violation_intervals(&[0.0, 1e-7], &[2.5, 2.5], |_| Ok(2.5)).unwrap();
        assert!(hair.is_empty());

        let err = violation_intervals(&[], &[], |_| Ok(2.0)).unwrap_err();
        assert!(matches!(err, Error::EmptyInput(_)));
        let err = violation_intervals(&[0.0, 1.0], &[2.0], |_| Ok(2.0)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let err = violation_intervals(&[0.0, 0.0], &[2.0, 2.0], |_| Ok(2.0)).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn peak_violation_is_non_increasing_in_decay() {
        let grid = SweepGrid::threshold_default();
        let v = |ratio: f64| peak_violation(Model::Analytic, S, ratio, &grid, &cfg()).unwrap();
        let v0 = v(0.0);
        let v1 = v(0.02);
        let v2 = v(0.111);
        let v3 = v(0.2);
        assert!((v0 - 0.7039912022608372).abs() < 1e-9);
        assert!((v1 - 0.5521544224965225).abs() < 1e-9);
        // Above threshold the only non-negative sample is B(0) = 2 exactly,
        // so the peak violation is exactly zero.
        assert_eq!(v2, 0.0);
        assert_eq!(v3, 0.0);
        assert!(v0 >= v1 && v1 >= v2 && v2 >= v3);
    }

    #[test]
    fn threshold_lands_in_frozen_band() {
        let res = find_threshold(
            Model::Analytic,
            S,
            &SweepGrid::threshold_default(),
            (0.0, 0.25),
            &cfg(),
        )
        .unwrap();
        assert!(
            res.gamma_star_over_gamma0 > 0.1095 && res.gamma_star_over_gamma0 < 0.1115,
            "gamma*/gamma0 = {}",
            res.gamma_star_over_gamma0
        );
        assert_eq!(res.bracket_width, 0.0009765625);
    }

    #[test]
    fn threshold_rejects_bad_brackets() {
        let grid = SweepGrid::threshold_default();
        let run = |bracket| find_threshold(Model::Analytic, S, &grid, bracket, &cfg());
        assert!(matches!(run((0.25, 0.1)), Err(Error::InvalidParameter(_))));
        assert!(matches!(run((0.0, 0.0)), Err(Error::InvalidParameter(_))));
        assert!(matches!(run((-0.1, 0.2)), Err(Error::InvalidParameter(_))));
        // V(0.2) is already zero, so the bracket has no sign change.
        assert!(matches!(run((0.2, 0.25)), Err(Error::InvalidBracket { .. })));
    }

    #[test]
    fn lindblad_trace_agrees_with_analytic_trace() {
        let time = TimeGrid { tau_max: 2.0, steps: 20 };
        for ratio in [0.0, 0.05] {
            let analytic = bell_trace(Model::Analytic, S, 0.4, ratio, &time, &cfg()).unwrap();
            let lindblad = bell_trace(
                Model::Lindblad { fock_cutoff: 1 },
                S,
                0.4,
                ratio,
                &time,
                &cfg(),
            )
            .unwrap();
            let mut worst = 0.0f64;
            for (a, l) in analytic.iter().zip(&lindblad) {
                assert_eq!(a.tau, l.tau);
                worst = worst.max((a.b - l.b).abs());
            }
            assert!(worst <= 1e-6, "ratio {ratio}: max |Delta B| = {worst:.3e}");
        }
    }

    #[test]
    fn relabeling_symmetry_between_qubits() {
        // Exciting qubit 1 at coupling r1 and exciting qubit 2 with the
        // couplings swapped are the same physics with labels exchanged, so
        // the Bell trace is identical.
        let r1: f64 = 0.37;
        let r2 = (1.0 - r1 * r1).sqrt();
        let (c, r, d) = params_from_regime(S, r1, 0.0).unwrap();
        let p = derive_params(&c, &r, &d).unwrap();
        let psi_01 = Amplitudes {
            c1: C64::new(0.0, 0.0),
            c2: C64::new(1.0, 0.0),
        };
        let proj_a = project_initial(r1, &EXCITED_FIRST);
        let proj_b = project_initial(r2, &psi_01);
        for g in [0.0, 0.2] {
            for k in 0..=100 {
                let tau = k as f64 * 0.05;
                let sa = density_matrix(&damped_amplitudes_at(tau, r1, g, &proj_a, &p)).unwrap();
                let sb = density_matrix(&damped_amplitudes_at(tau, r2, g, &proj_b, &p)).unwrap();
                let diff = (bell_result(&sa).b - bell_result(&sb).b).abs();
                assert!(diff < 1e-10, "tau = {tau}, g = {g}: |Delta B| = {diff:.3e}");
            }
        }
    }

    #[test]
    fn rows_reproduce_reconstructed_margin() {
        let rows =
            bell_trace(Model::Analytic, S, 0.4, 0.02, &TimeGrid::default(), &cfg()).unwrap();
        let (c, r, d) = params_from_regime(S, 0.4, 0.02).unwrap();
        let p = derive_params(&c, &r, &d).unwrap();
        let proj = project_initial(p.r1, &EXCITED_FIRST);
        let g = d.gamma1 / p.lambda;
        for k in [0usize, 31, 400, 1000, 2000] {
            let row = rows[k];
            let state =
                density_matrix(&damped_amplitudes_at(row.tau, p.r1, g, &proj, &p)).unwrap();
            assert!((row.b - bell_result(&state).b).abs() <= 1e-12);
            assert!((row.violation - violation_margin(&state)).abs() <= 1e-12);
        }
    }
}
