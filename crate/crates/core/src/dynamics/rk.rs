use ndarray::Array2;

use super::{eval_grid, GndeSystem, SolverMeta, TrajectoryRecord};
use crate::error::{Error, Result};

fn check_finite(x: &Array2<f64>, t: f64) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { t })
    }
}

/// `y + Σ c_i k_i` without intermediate allocations beyond the result.
fn combine(y: &Array2<f64>, terms: &[(f64, &Array2<f64>)]) -> Array2<f64> {
    let mut out = y.clone();
    for &(c, k) in terms {
        if c != 0.0 {
            out.scaled_add(c, k);
        }
    }
    out
}

pub(super) fn rk4(sys: &GndeSystem<'_>, z: &Array2<f64>, horizon: f64, points: usize, step: f64) -> Result<TrajectoryRecord> {
    let times = eval_grid(horizon, points);
    let spacing = horizon / points as f64;
    let substeps = (spacing / step).ceil().max(1.0) as usize;
    let mut states = Vec::with_capacity(points + 1);
    states.push(z.clone());
    let mut y = z.clone();
    let mut evals = 0;
    for j in 0..points {
        let t0 = times[j];
        let h = (times[j + 1] - t0) / substeps as f64;
        for s in 0..substeps {
            let t = t0 + s as f64 * h;
            let tm = (t + 0.5 * h).min(horizon);
            let te = (t + h).min(horizon);
            let k1 = sys.rhs(t, &y)?;
            let k2 = sys.rhs(tm, &combine(&y, &[(0.5 * h, &k1)]))?;
            let k3 = sys.rhs(tm, &combine(&y, &[(0.5 * h, &k2)]))?;
            let k4 = sys.rhs(te, &combine(&y, &[(h, &k3)]))?;
            evals += 4;
            y = combine(&y, &[(h / 6.0, &k1), (h / 3.0, &k2), (h / 3.0, &k3), (h / 6.0, &k4)]);
            check_finite(&y, te)?;
        }
        states.push(y.clone());
    }
    Ok(TrajectoryRecord::new(
        times,
        states,
        SolverMeta {
            method: "rk4".into(),
            settings: format!("step={}", (horizon / points as f64) / substeps as f64),
            accepted: points * substeps,
            rejected: 0,
            rhs_evals: evals,
        },
    ))
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// Step-size control.
const SAFE: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(super) struct Dp5Settings {
    pub atol: f64,
    pub rtol: f64,
    pub h0: f64,
    pub max_steps: usize,
}

pub(super) fn dp5(sys: &GndeSystem<'_>, z: &Array2<f64>, horizon: f64, points: usize, cfg: Dp5Settings) -> Result<TrajectoryRecord> {
    let times = eval_grid(horizon, points);
    let mut states = Vec::with_capacity(points + 1);
    states.push(z.clone());
    let mut next_out = 1;

    let mut t = 0.0;
    let mut y = z.clone();
    let mut k1 = sys.rhs(0.0, &y)?;
    let mut evals = 1;
    let mut h = cfg.h0.min(horizon);
    let mut facold: f64 = 1e-4;
    let expo = 0.2 - BETA * 0.75;
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut last_rejected = false;

    while next_out <= points {
        if accepted >= cfg.max_steps {
            return Err(Error::NonConvergence {
                t,
                reason: format!("exceeded {} accepted steps", cfg.max_steps),
            });
        }
        let last = t + h >= horizon || (horizon - (t + h)) <= 1e-12 * horizon;
        if last {
            h = horizon - t;
        }
        if h <= f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::NonConvergence {
                t,
                reason: format!("step size {h:e} underflowed"),
            });
        }
        let at = |c: f64| (t + c * h).min(horizon);
        let k2 = sys.rhs(at(C2), &combine(&y, &[(h * A21, &k1)]))?;
        let k3 = sys.rhs(at(C3), &combine(&y, &[(h * A31, &k1), (h * A32, &k2)]))?;
        let k4 = sys.rhs(at(C4), &combine(&y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]))?;
        let k5 = sys.rhs(
            at(C5),
            &combine(&y, &[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]),
        )?;
        let k6 = sys.rhs(
            at(1.0),
            &combine(
                &y,
                &[(h * A61, &k1), (h * A62, &k2), (h * A63, &k3), (h * A64, &k4), (h * A65, &k5)],
            ),
        )?;
        let y1 = combine(
            &y,
            &[(h * A71, &k1), (h * A73, &k3), (h * A74, &k4), (h * A75, &k5), (h * A76, &k6)],
        );
        let t1 = if last { horizon } else { t + h };
        let k7 = sys.rhs(t1, &y1)?;
        evals += 6;

        let mut sum = 0.0;
        for idx in 0..y.len() {
            let (i, j) = (idx / y.ncols(), idx % y.ncols());
            let e = h
                * (E1 * k1[[i, j]] + E3 * k3[[i, j]] + E4 * k4[[i, j]] + E5 * k5[[i, j]] + E6 * k6[[i, j]]
                    + E7 * k7[[i, j]]);
            let sk = cfg.atol + cfg.rtol * y[[i, j]].abs().max(y1[[i, j]].abs());
            sum += (e / sk) * (e / sk);
        }
        let err = (sum / y.len() as f64).sqrt();
        if !err.is_finite() {
            if y1.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence { t: t1 });
            }
            return Err(Error::NonConvergence {
                t,
                reason: "non-finite error estimate".into(),
            });
        }

        let fac11 = err.powf(expo);
        if err <= 1.0 {
            let mut fac = fac11 / facold.powf(BETA);
            fac = (1.0 / FAC_MAX).max((1.0 / FAC_MIN).min(fac / SAFE));
            let mut hnew = h / fac;
            facold = err.max(1e-4);
            accepted += 1;

            // Dense output on the accepted step.
            let ydiff = &y1 - &y;
            let bspl = &k1 * h - &ydiff;
            let r4 = &ydiff - &(&k7 * h) - &bspl;
            let r5 = combine(
                &Array2::zeros(y.dim()),
                &[(h * D1, &k1), (h * D3, &k3), (h * D4, &k4), (h * D5, &k5), (h * D6, &k6), (h * D7, &k7)],
            );
            while next_out <= points && (times[next_out] <= t1 || (last && next_out == points)) {
                if next_out == points && last {
                    states.push(y1.clone());
                } else {
                    let theta = (times[next_out] - t) / h;
                    let theta1 = 1.0 - theta;
                    let mut out = r5.clone() * theta1;
                    out += &r4;
                    out *= theta;
                    out += &bspl;
                    out *= theta1;
                    out += &ydiff;
                    out *= theta;
                    out += &y;
                    states.push(out);
                }
                next_out += 1;
            }

            check_finite(&y1, t1)?;
            y = y1;
            k1 = k7;
            t = t1;
            if last_rejected {
                hnew = hnew.min(h);
            }
            last_rejected = false;
            h = hnew;
        } else {
            let hnew = h / (1.0 / FAC_MIN).min(fac11 / SAFE);
            rejected += 1;
            h = if last_rejected { hnew.min(h) } else { hnew };
            last_rejected = true;
        }
    }

    Ok(TrajectoryRecord::new(
        times,
        states,
        SolverMeta {
            method: "dp5".into(),
            settings: format!(
                "atol={} rtol={} h0={} max_steps={}",
                cfg.atol, cfg.rtol, cfg.h0, cfg.max_steps
            ),
            accepted,
            rejected,
            rhs_evals: evals,
        },
    ))
}
