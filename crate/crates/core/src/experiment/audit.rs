use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::{kernel_distance, Norm};
use crate::error::{Error, Result};
use crate::sampling::{induce_kernel, SampledGraph};

/// One subsample: `nodes` are kept in ascending order, so the subgraph's
/// induced kernel lines up with the full graph's node positions.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub proportion: f64,
    pub trial: usize,
    pub seed: u64,
    pub nodes: Vec<usize>,
    /// `None` when the subsample was empty and skipped.
    pub graphon_error: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditSummary {
    pub proportion: f64,
    pub mean: f64,
    pub sd: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub summary: Vec<AuditSummary>,
}

impl AuditReport {
    /// Per-trial rows; the sampled node list is `;`-separated.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("proportion,trial,seed,kept,graphon_error,nodes\n");
        for r in &self.rows {
            let err = match r.graphon_error {
                Some(e) => e.to_string(),
                None => "skipped: empty subgraph".into(),
            };
            let nodes: Vec<String> = r.nodes.iter().map(usize::to_string).collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.proportion,
                r.trial,
                r.seed,
                r.nodes.len(),
                err,
                nodes.join(";")
            );
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("proportion,mean,sd,trials\n");
        for s in &self.summary {
            let _ = writeln!(out, "{},{},{},{}", s.proportion, s.mean, s.sd, s.trials);
        }
        out
    }
}

/// `‖W_sub − W_full‖ / ‖W_full‖` between induced kernels in `L2`.
pub fn graphon_error(sub: &SampledGraph, full: &SampledGraph) -> Result<f64> {
    let a = full.adjacency();
    let norm = (a.iter().map(|x| x * x).sum::<f64>()).sqrt() / full.n() as f64;
    if norm == 0.0 {
        return Err(Error::DegenerateReference { t: 0.0 });
    }
    Ok(kernel_distance(&induce_kernel(sub), &induce_kernel(full), Norm::L2, 1)? / norm)
}

/// Uniform subsamples without replacement at each proportion. Trial `t`
/// at proportion index `p` draws from stream `p` of seed `seed + t`.
pub fn transfer_audit(graph: &SampledGraph, proportions: &[f64], trials: usize, seed: u64) -> Result<AuditReport> {
    if trials == 0 {
        return Err(Error::invalid("audit needs at least one trial"));
    }
    if let Some(p) = proportions.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
        return Err(Error::invalid(format!("proportion {p} outside (0, 1]")));
    }
    let n = graph.n();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (pi, &p) in proportions.iter().enumerate() {
        let keep = (p * n as f64).round() as usize;
        let mut errors = Vec::new();
        for trial in 0..trials {
            let trial_seed = seed.wrapping_add(trial as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
            rng.set_stream(pi as u64);
            let mut nodes = rand::seq::index::sample(&mut rng, n, keep.min(n)).into_vec();
            nodes.sort_unstable();
            let graphon_error = if nodes.is_empty() {
                None
            } else {
                let e = graphon_error(&graph.induced_subgraph(&nodes)?, graph)?;
                errors.push(e);
                Some(e)
            };
            rows.push(AuditRow {
                proportion: p,
                trial,
                seed: trial_seed,
                nodes,
                graphon_error,
            });
        }
        if !errors.is_empty() {
            let m = errors.len() as f64;
            let mean = errors.iter().sum::<f64>() / m;
            let sd = if errors.len() > 1 {
                (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
            } else {
                0.0
            };
            summary.push(AuditSummary {
                proportion: p,
                mean,
                sd,
                trials: errors.len(),
            });
        }
    }
    Ok(AuditReport { rows, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::GraphonSpec;
    use crate::sampling::{sample_weighted, GraphClass};
    use ndarray::Array2;

    #[test]
    fn full_graph_has_zero_error() {
        let g = sample_weighted(&GraphonSpec::tent(1.0).unwrap(), 64).unwrap();
        let rep = transfer_audit(&g, &[1.0], 3, 5).unwrap();
        assert!(rep.summary[0].mean == 0.0 && rep.summary[0].sd == 0.0);
    }

    #[test]
    fn complete_graph_has_zero_error() {
        let g = SampledGraph::new(Array2::ones((20, 20)), GraphClass::Unweighted).unwrap();
        let rep = transfer_audit(&g, &[0.1, 0.35, 0.5], 4, 1).unwrap();
        assert!(rep.summary.iter().all(|s| s.mean == 0.0));
    }

    #[test]
    fn single_node_closed_form() {
        // Kernel [[w, 1], [1, 0]] against the constant w on the unit square.
        let w = 0.6;
        let a = ndarray::array![[w, 1.0], [1.0, 0.0]];
        let full = SampledGraph::new(a, GraphClass::Weighted).unwrap();
        let sub = full.induced_subgraph(&[0]).unwrap();
        let diff = ((2.0 * (1.0 - w) * (1.0 - w) + w * w) / 4.0f64).sqrt();
        let norm = ((w * w + 2.0) / 4.0f64).sqrt();
        assert!((graphon_error(&sub, &full).unwrap() - diff / norm).abs() < 1e-15);
    }

    #[test]
    fn empty_subsamples_are_skipped_and_seeds_reproduce() {
        let g = sample_weighted(&GraphonSpec::tent(1.0).unwrap(), 8).unwrap();
        let rep = transfer_audit(&g, &[0.01, 0.5], 2, 9).unwrap();
        assert!(rep.rows[0].graphon_error.is_none());
        assert_eq!(rep.summary.len(), 1);
        assert_eq!(rep, transfer_audit(&g, &[0.01, 0.5], 2, 9).unwrap());
        assert!(transfer_audit(&g, &[0.0], 1, 0).is_err());
    }
}
