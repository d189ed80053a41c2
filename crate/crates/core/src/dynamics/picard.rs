use ndarray::Array2;

use super::{eval_grid, GndeSystem, SolverMeta, TrajectoryRecord};
use crate::error::{Error, Result};

pub const MAX_PICARD_NODES: usize = 64;
pub const MAX_PICARD_HORIZON: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(super) struct PicardSettings {
    pub points_per_unit: usize,
    pub max_iterations: usize,
    pub tol: f64,
}

/// Successive approximation `X ← Z + ∫₀ᵗ Φ(S; X(s); H(s)) ds` with
/// composite trapezoid quadrature, window by window. Each window is short
/// enough that the integral map contracts with factor at most 0.4.
pub(super) fn picard(
    sys: &GndeSystem<'_>,
    z: &Array2<f64>,
    horizon: f64,
    points: usize,
    cfg: PicardSettings,
) -> Result<TrajectoryRecord> {
    let n = z.nrows();
    if n > MAX_PICARD_NODES || horizon > MAX_PICARD_HORIZON {
        return Err(Error::ComplexityGuard(format!(
            "fixed-point oracle is limited to n <= {MAX_PICARD_NODES} and T <= {MAX_PICARD_HORIZON}, got n = {n}, T = {horizon}"
        )));
    }
    let times = eval_grid(horizon, points);
    let per_output = ((cfg.points_per_unit as f64 * horizon) / points as f64).ceil().max(1.0) as usize;
    let nodes = points * per_output;
    let dt = horizon / nodes as f64;
    let grid: Vec<f64> = (0..=nodes)
        .map(|i| if i == nodes { horizon } else { i as f64 * dt })
        .collect();

    let lip = sys.lipschitz_bound();
    let tau = if lip > 0.0 { (0.4 / lip).min(horizon) } else { horizon };
    let window = ((tau / dt).floor() as usize).max(1);

    let mut path: Vec<Array2<f64>> = Vec::with_capacity(nodes + 1);
    path.push(z.clone());
    let mut iterations_total = 0;
    let mut evals = 0;
    let mut start = 0;
    while start < nodes {
        let end = (start + window).min(nodes);
        let x0 = path[start].clone();
        let mut guess: Vec<Array2<f64>> = vec![x0.clone(); end - start + 1];
        let mut prev_change = f64::NAN;
        let mut factor = f64::NAN;
        let mut converged = false;
        for _ in 0..cfg.max_iterations {
            iterations_total += 1;
            let slopes = guess
                .iter()
                .enumerate()
                .map(|(i, x)| sys.rhs(grid[start + i], x))
                .collect::<Result<Vec<_>>>()?;
            evals += slopes.len();
            let mut next = Vec::with_capacity(guess.len());
            next.push(x0.clone());
            for i in 1..guess.len() {
                let h = grid[start + i] - grid[start + i - 1];
                let mut x = next[i - 1].clone();
                x.scaled_add(0.5 * h, &slopes[i - 1]);
                x.scaled_add(0.5 * h, &slopes[i]);
                next.push(x);
            }
            let mut change: f64 = 0.0;
            let mut scale: f64 = 1.0;
            for (a, b) in next.iter().zip(&guess) {
                for (p, q) in a.iter().zip(b) {
                    change = change.max((p - q).abs());
                    scale = scale.max(p.abs());
                }
            }
            if !change.is_finite() {
                return Err(Error::Divergence { t: grid[end] });
            }
            if prev_change > 0.0 {
                factor = change / prev_change;
            }
            prev_change = change;
            guess = next;
            if change <= cfg.tol * scale {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::FixedPoint {
                start: grid[start],
                end: grid[end],
                iterations: cfg.max_iterations,
                factor,
            });
        }
        path.extend(guess.into_iter().skip(1));
        start = end;
    }

    let states = (0..=points).map(|j| path[j * per_output].clone()).collect();
    Ok(TrajectoryRecord::new(
        times,
        states,
        SolverMeta {
            method: "picard".into(),
            settings: format!(
                "nodes={nodes} window={} tol={} max_iterations={}",
                window as f64 * dt,
                cfg.tol,
                cfg.max_iterations
            ),
            accepted: iterations_total,
            rejected: 0,
            rhs_evals: evals,
        },
    ))
}
