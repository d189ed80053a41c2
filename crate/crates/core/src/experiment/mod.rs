//! Config-driven experiments behind the command-line tool.
//!
//! Every command is a pure function of an [`ExperimentConfig`] returning
//! report values; writing files is left to the caller.

mod audit;
mod config;
mod converge;

use std::fmt::Write as _;

pub use audit::{graphon_error, transfer_audit, AuditReport, AuditRow, AuditSummary};
pub use config::{ExperimentConfig, FilterLaw, SolverChoice, CONFIG_KEYS};
pub use converge::{
    run_converge, ConvergenceReport, ConvergenceRow, TrialFit, CONVERGENCE_HEADER, UNWEIGHTED_BOUND_MIN_N,
};

use crate::catalog::{box_counting_dimension, default_schedule, BoundarySet, BoxCount, GraphonSpec, CATALOG_NAMES};
use crate::dynamics::{integrate, TrajectoryRecord};
use crate::error::Result;
use crate::sampling::{graph_shift, sample_features, sample_graph, FeatureMatrix, SampledGraph};

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One CSV row per shipped graphon with its regime and regularity data.
pub fn cmd_catalog() -> Result<String> {
    let mut out = String::from("name,value_class,a1,alpha,nominal_box_dim\n");
    for name in CATALOG_NAMES {
        let spec = GraphonSpec::by_name(name)?;
        let holder = spec.holder_meta();
        let _ = writeln!(
            out,
            "{name},{},{},{},{}",
            spec.value_class().as_str(),
            opt(holder.map(|h| h.a1)),
            opt(holder.map(|h| h.alpha)),
            opt(spec.nominal_box_dim())
        );
    }
    Ok(out)
}

/// Graph and initial features on `cfg.n` nodes, features seeded by `cfg.seed`.
pub fn cmd_sample(cfg: &ExperimentConfig) -> Result<(SampledGraph, FeatureMatrix)> {
    let graph = sample_graph(&cfg.graphon, cfg.n)?;
    let z = cfg.feature_function(cfg.seed)?;
    let features = sample_features(&cfg.graphon, &z, cfg.n)?;
    Ok((graph, features))
}

/// One integration on `cfg.n` nodes with the trial-0 filters and features.
pub fn cmd_integrate(cfg: &ExperimentConfig) -> Result<TrajectoryRecord> {
    let (graph, features) = cmd_sample(cfg)?;
    let bank = cfg.filter_bank(cfg.seed)?;
    integrate(
        graph_shift(&graph).view(),
        features.values(),
        &bank,
        cfg.activation,
        cfg.horizon,
        &cfg.solver_config(),
    )
}

pub fn cmd_converge(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    run_converge(cfg)
}

/// Box-counting estimate of the support boundary of a binary graphon.
pub fn cmd_boxdim(cfg: &ExperimentConfig) -> Result<BoxCount> {
    let schedule = match &cfg.schedule {
        Some(s) => s.clone(),
        None => default_schedule(&cfg.graphon),
    };
    box_counting_dimension(&BoundarySet(&cfg.graphon), &schedule)
}

pub fn boxdim_csv(count: &BoxCount) -> String {
    let mut out = String::from("m,delta,count\n");
    for &(m, n) in &count.counts {
        let _ = writeln!(out, "{m},{},{n}", 1.0 / m as f64);
    }
    out
}

/// Audit of `cfg.edges` if given, else of the graph sampled from the
/// configured graphon on `cfg.n` nodes.
pub fn cmd_transfer_audit(cfg: &ExperimentConfig) -> Result<AuditReport> {
    let graph = match &cfg.edges {
        Some(path) => SampledGraph::from_edge_csv(&std::fs::read_to_string(path)?)?,
        None => sample_graph(&cfg.graphon, cfg.n)?,
    };
    transfer_audit(&graph, &cfg.proportions, cfg.trials, cfg.seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_lists_seven_graphons() {
        let text = cmd_catalog().unwrap();
        assert_eq!(text.lines().count(), 1 + 7);
        assert!(text.contains("hexaflake,binary,,,1.77"));
    }

    #[test]
    fn scalar_linear_preset_reproduces_e() {
        let cfg = ExperimentConfig::parse(
            "n = 1\nlayers = 1\nchannels = 1\ntaps = 1\nfilter_coefficients = 1\n\
             activation = identity\nfeatures = constant\nfeature_value = 1\n",
        )
        .unwrap();
        let traj = cmd_integrate(&cfg).unwrap();
        assert!((traj.final_state()[[0, 0]] - std::f64::consts::E).abs() < 1e-6);
    }

    #[test]
    fn sample_round_trips_through_csv() {
        let cfg = ExperimentConfig::parse("n = 12\ngraphon = checkerboard").unwrap();
        let (g, z) = cmd_sample(&cfg).unwrap();
        assert_eq!(SampledGraph::from_edge_csv(&g.to_edge_csv()).unwrap(), g);
        assert_eq!(FeatureMatrix::from_csv(&z.to_csv()).unwrap(), z);
    }

    #[test]
    fn zero_features_give_zero_errors_and_no_fit() {
        let cfg = ExperimentConfig::parse(
            "features = constant\nfeature_value = 0\nn_list = 8, 12, 16\nn_ref = 32\ntrials = 2",
        )
        .unwrap();
        let rep = cmd_converge(&cfg).unwrap();
        assert!(rep.rows.iter().all(|r| r.sup_rel_err == 0.0 && r.abs_err == 0.0));
        assert!(rep.trials.iter().all(|t| t.fit.is_err()));
    }

    #[test]
    fn converge_is_deterministic_and_sorted() {
        let cfg = ExperimentConfig::parse("n_list = 16, 8, 24\nn_ref = 48\ntrials = 3\nseed = 11").unwrap();
        let a = cmd_converge(&cfg).unwrap();
        let b = cmd_converge(&cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.summary_json(), b.summary_json());
        let ns: Vec<usize> = a.rows.iter().map(|r| r.n).collect();
        assert_eq!(ns, vec![8, 8, 8, 16, 16, 16, 24, 24, 24]);
        assert!(a.rows.iter().all(|r| r.seed == 11 + r.trial as u64));
        assert_eq!(a.violations(), 0);
    }
}
