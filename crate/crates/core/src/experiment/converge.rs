use std::fmt::Write as _;
use std::time::Instant;

use ndarray::Array2;
use rayon::prelude::*;
use serde_json::json;

use super::ExperimentConfig;
use crate::analysis::{
    fit_rate, rate_constant_unweighted, rate_constant_weighted, trajectory_sup_error,
    trajectory_sup_relative_error, transfer_bound, BoundInputs, LineFit,
};
use crate::catalog::ValueClass;
use crate::dynamics::{integrate, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::sampling::{graph_shift, sample_features, sample_graph};

/// Unweighted bounds only hold beyond an unknown threshold size; rows below
/// this are reported but not counted as violations.
pub const UNWEIGHTED_BOUND_MIN_N: usize = 256;

pub const CONVERGENCE_HEADER: &str =
    "graphon,alpha_or_dim,n,n_ref,T,seed,sup_rel_err,abs_err,bound,slope_running,runtime_ms";

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub graphon: String,
    pub alpha_or_dim: f64,
    pub n: usize,
    pub n_ref: usize,
    pub horizon: f64,
    pub trial: usize,
    pub seed: u64,
    pub sup_rel_err: f64,
    pub abs_err: f64,
    /// `C (n^{-e} + n_ref^{-e})` for the row's rate constant and exponent.
    pub bound: f64,
    /// Slope fitted over this trial's rows up to and including `n`.
    pub slope_running: Option<f64>,
    pub runtime_ms: u128,
    /// Whether the bound is asserted for this row.
    pub bound_enforced: bool,
    pub error: Option<String>,
}

impl ConvergenceRow {
    pub fn margin(&self) -> f64 {
        self.bound - self.abs_err
    }

    pub fn violates_bound(&self) -> bool {
        self.bound_enforced && self.error.is_none() && self.abs_err > self.bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialFit {
    pub trial: usize,
    pub seed: u64,
    pub fit: std::result::Result<LineFit, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// Sorted by `(n, trial)`.
    pub rows: Vec<ConvergenceRow>,
    pub trials: Vec<TrialFit>,
    /// Fit of the trial-averaged errors against `n`.
    pub mean_fit: Option<LineFit>,
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

impl ConvergenceReport {
    pub fn slopes(&self) -> Vec<f64> {
        self.trials.iter().filter_map(|t| t.fit.as_ref().ok()).map(|f| f.slope).collect()
    }

    /// Mean and sample standard deviation of the per-trial slopes.
    pub fn slope_stats(&self) -> Option<(f64, f64)> {
        let s = self.slopes();
        (!s.is_empty()).then(|| mean_sd(&s))
    }

    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violates_bound()).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CONVERGENCE_HEADER);
        out.push('\n');
        for r in &self.rows {
            let running = r.slope_running.map(|s| s.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.graphon,
                r.alpha_or_dim,
                r.n,
                r.n_ref,
                r.horizon,
                r.seed,
                r.sup_rel_err,
                r.abs_err,
                r.bound,
                running,
                r.runtime_ms
            );
        }
        out
    }

    /// Fits, slope statistics, bound margins and row errors as JSON.
    pub fn summary_json(&self) -> String {
        let trials: Vec<_> = self
            .trials
            .iter()
            .map(|t| match &t.fit {
                Ok(f) => json!({"trial": t.trial, "seed": t.seed, "slope": f.slope,
                                 "intercept": f.intercept, "stderr": f.stderr}),
                Err(e) => json!({"trial": t.trial, "seed": t.seed, "error": e}),
            })
            .collect();
        let margins: Vec<_> = self
            .rows
            .iter()
            .map(|r| {
                json!({"n": r.n, "trial": r.trial, "seed": r.seed, "abs_err": r.abs_err,
                       "bound": r.bound, "margin": r.margin(), "enforced": r.bound_enforced})
            })
            .collect();
        let errors: Vec<_> = self
            .rows
            .iter()
            .filter_map(|r| r.error.as_ref().map(|e| json!({"n": r.n, "trial": r.trial, "error": e})))
            .collect();
        let stats = self.slope_stats();
        let value = json!({
            "graphon": self.rows.first().map(|r| r.graphon.clone()),
            "slope_mean": stats.map(|s| s.0),
            "slope_sd": stats.map(|s| s.1),
            "mean_fit": self.mean_fit.map(|f| json!({"slope": f.slope, "intercept": f.intercept, "stderr": f.stderr})),
            "trials": trials,
            "bound_violations": self.violations(),
            "bound_checks": margins,
            "errors": errors,
        });
        serde_json::to_string_pretty(&value).expect("JSON values serialize") + "\n"
    }
}

struct Prepared {
    n: usize,
    shift: Array2<f64>,
}

fn elapsed_ms(start: Instant, timing: bool) -> u128 {
    if timing {
        start.elapsed().as_millis()
    } else {
        0
    }
}

/// Runs every trial and assembles rows in `(n, trial)` order. Integration
/// failures become row-level errors; only invalid configs abort.
pub fn run_converge(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let spec = &cfg.graphon;
    let mut sizes = cfg.n_list.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let prepared: Vec<Prepared> = sizes
        .iter()
        .chain(std::iter::once(&cfg.n_ref))
        .map(|&n| Ok(Prepared { n, shift: graph_shift(&sample_graph(spec, n)?) }))
        .collect::<Result<_>>()?;
    let (graphs, reference) = prepared.split_at(sizes.len());
    let reference = &reference[0];

    let per_trial: Vec<Vec<ConvergenceRow>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(cfg, trial, graphs, reference))
        .collect::<Result<_>>()?;

    let mut trials = Vec::with_capacity(cfg.trials);
    let mut rows = Vec::new();
    for (trial, mut trial_rows) in per_trial.into_iter().enumerate() {
        let mut points = Vec::new();
        for row in &mut trial_rows {
            if row.error.is_none() {
                points.push((row.n, row.sup_rel_err));
            }
            row.slope_running = if points.len() >= 3 {
                fit_rate(&points).ok().map(|f| f.slope)
            } else {
                None
            };
        }
        trials.push(TrialFit {
            trial,
            seed: cfg.trial_seed(trial),
            fit: fit_rate(&points).map_err(|e| e.to_string()),
        });
        rows.extend(trial_rows);
    }
    rows.sort_by_key(|r| (r.n, r.trial));

    let means: Vec<(usize, f64)> = sizes
        .iter()
        .filter_map(|&n| {
            let errs: Vec<f64> =
                rows.iter().filter(|r| r.n == n && r.error.is_none()).map(|r| r.sup_rel_err).collect();
            (!errs.is_empty()).then(|| (n, mean_sd(&errs).0))
        })
        .collect();
    Ok(ConvergenceReport {
        rows,
        trials,
        mean_fit: fit_rate(&means).ok(),
    })
}

fn run_trial(cfg: &ExperimentConfig, trial: usize, graphs: &[Prepared], reference: &Prepared) -> Result<Vec<ConvergenceRow>> {
    let spec = &cfg.graphon;
    let seed = cfg.trial_seed(trial);
    let bank = cfg.filter_bank(seed)?;
    let z = cfg.feature_function(seed)?;
    let solver = cfg.solver_config();
    let weighted = spec.value_class() == ValueClass::Weighted;
    let alpha_or_dim = spec.regularity().unwrap_or(f64::NAN);

    let blank = |n: usize| ConvergenceRow {
        graphon: spec.name().to_string(),
        alpha_or_dim,
        n,
        n_ref: cfg.n_ref,
        horizon: cfg.horizon,
        trial,
        seed,
        sup_rel_err: f64::NAN,
        abs_err: f64::NAN,
        bound: f64::NAN,
        slope_running: None,
        runtime_ms: 0,
        bound_enforced: weighted || n >= UNWEIGHTED_BOUND_MIN_N,
        error: None,
    };

    let solve = |p: &Prepared| -> Result<TrajectoryRecord> {
        let x0 = sample_features(spec, &z, p.n)?.into_inner();
        integrate(p.shift.view(), &x0, &bank, cfg.activation, cfg.horizon, &solver)
    };

    let traj_ref = match solve(reference) {
        Ok(t) => t,
        Err(e) if e.is_numerical() => {
            let msg = format!("reference integration failed: {e}");
            return Ok(graphs
                .iter()
                .map(|g| ConvergenceRow {
                    error: Some(msg.clone()),
                    ..blank(g.n)
                })
                .collect());
        }
        Err(e) => return Err(e),
    };

    let inputs = BoundInputs {
        channels: cfg.channels,
        taps: cfg.taps,
        layers: cfg.layers,
        horizon: cfg.horizon,
        h_t: bank.h_sup().certified,
        a1: spec.holder_meta().map_or(0.0, |h| h.a1),
        alpha: spec.holder_meta().map_or(1.0, |h| h.alpha),
        a2: z.lipschitz(),
        x_sup: traj_ref.sup_norm(),
        box_dim: spec.nominal_box_dim().unwrap_or(1.0),
        epsilon: cfg.epsilon,
    };
    let (constant, exponent) = if weighted {
        (rate_constant_weighted(&inputs)?, inputs.alpha)
    } else {
        rate_constant_unweighted(&inputs)?
    };

    graphs
        .par_iter()
        .map(|g| {
            let start = Instant::now();
            let mut row = blank(g.n);
            row.bound = transfer_bound(constant, exponent, g.n, cfg.n_ref);
            let measured = solve(g).and_then(|traj| {
                let abs = trajectory_sup_error(&traj, &traj_ref)?;
                let rel = match trajectory_sup_relative_error(&traj, &traj_ref) {
                    // Both sides identically zero: no error to measure.
                    Err(Error::DegenerateReference { .. }) if abs == 0.0 => 0.0,
                    other => other?,
                };
                Ok((abs, rel))
            });
            row.runtime_ms = elapsed_ms(start, cfg.timing);
            match measured {
                Ok((abs, rel)) => {
                    row.abs_err = abs;
                    row.sup_rel_err = rel;
                }
                Err(e) if e.is_numerical() => row.error = Some(e.to_string()),
                Err(e) => return Err(e),
            }
            Ok(row)
        })
        .collect()
}
