use crate::dynamics::TrajectoryRecord;
use crate::error::{Error, Result};
use crate::sampling::{induce_features, overlay_l2_distance};

/// Below this reference norm a relative error is meaningless.
pub const DEGENERATE_NORM: f64 = 1e-12;

/// Default slack in the unweighted exponent `1 − (b + ε)/2`.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Scalars entering the stability and rate constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub channels: usize,
    pub taps: usize,
    pub layers: usize,
    pub horizon: f64,
    /// Certified `sup_t max |h|`.
    pub h_t: f64,
    pub a1: f64,
    pub alpha: f64,
    /// Lipschitz constant of the initial feature function.
    pub a2: f64,
    /// `sup_t ‖X(t)‖` of the reference trajectory.
    pub x_sup: f64,
    pub box_dim: f64,
    pub epsilon: f64,
}

impl Default for BoundInputs {
    fn default() -> Self {
        BoundInputs {
            channels: 1,
            taps: 1,
            layers: 1,
            horizon: 1.0,
            h_t: 1.0,
            a1: 0.0,
            alpha: 1.0,
            a2: 0.0,
            x_sup: 0.0,
            box_dim: 1.0,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        let reals = [
            ("T", self.horizon),
            ("h_T", self.h_t),
            ("A1", self.a1),
            ("A2", self.a2),
            ("X_sup", self.x_sup),
        ];
        for (name, v) in reals {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("{name} must be finite and nonnegative, got {v}")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        Ok(())
    }

    /// `(F K h_T)^L`, the Lipschitz constant of the vector field.
    pub fn growth(&self) -> f64 {
        (self.channels as f64 * self.taps as f64 * self.h_t).powi(self.layers as i32)
    }

    fn p(&self) -> f64 {
        (self.horizon * self.growth()).exp()
    }

    fn feature_term(&self) -> f64 {
        self.a2 * (self.channels as f64 / 3.0).sqrt()
    }
}

/// `(P, Q)` with `P = exp(T (F K h_T)^L)` and `Q = (P − 1) L K ‖X‖`.
pub fn stability_constants(inp: &BoundInputs) -> Result<(f64, f64)> {
    inp.validate()?;
    let p = inp.p();
    let q = (p - 1.0) * inp.layers as f64 * inp.taps as f64 * inp.x_sup;
    Ok((p, q))
}

/// `√((2^{2α+2} − 2) / ((2α+1)(2α+2)))`, the `n^{-α}` coefficient of
/// `‖W − W_n‖` per unit Hölder constant.
pub fn kernel_rate_factor(alpha: f64) -> f64 {
    let num = 2f64.powf(2.0 * alpha + 2.0) - 2.0;
    (num / ((2.0 * alpha + 1.0) * (2.0 * alpha + 2.0))).sqrt()
}

/// Constant `C` of the weighted rate `‖X_n − X‖ ≤ C n^{-α}`.
pub fn rate_constant_weighted(inp: &BoundInputs) -> Result<f64> {
    inp.validate()?;
    let kernel = inp.layers as f64 * inp.taps as f64 * inp.x_sup * inp.a1 * kernel_rate_factor(inp.alpha);
    Ok(inp.p() * (inp.feature_term() + kernel))
}

/// Constant `C̃` and exponent `1 − (b + ε)/2` of the unweighted rate.
pub fn rate_constant_unweighted(inp: &BoundInputs) -> Result<(f64, f64)> {
    inp.validate()?;
    let (b, eps) = (inp.box_dim, inp.epsilon);
    if !(1.0..2.0).contains(&b) {
        return Err(Error::invalid(format!("box dimension must lie in [1, 2), got {b}")));
    }
    if !(eps > 0.0 && eps < 2.0 - b) {
        return Err(Error::invalid(format!("epsilon must lie in (0, {}), got {eps}", 2.0 - b)));
    }
    let c = inp.p() * (inp.feature_term() + inp.layers as f64 * inp.taps as f64 * inp.x_sup);
    Ok((c, 1.0 - (b + eps) / 2.0))
}

/// Outcome of an inequality check `lhs ≤ bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub bound: f64,
}

impl BoundCheck {
    pub fn margin(&self) -> f64 {
        self.bound - self.lhs
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.bound
    }

    /// Holds once `slack` is granted to the left side, e.g. solver error.
    pub fn holds_within(&self, slack: f64) -> bool {
        self.lhs - slack <= self.bound
    }
}

fn same_grid(a: &TrajectoryRecord, b: &TrajectoryRecord) -> Result<()> {
    let same = a.times().len() == b.times().len()
        && a.times().iter().zip(b.times()).all(|(s, t)| (s - t).abs() <= 1e-12 * t.abs().max(1.0));
    if !same {
        return Err(Error::dim("trajectories use different evaluation grids"));
    }
    if a.channels() != b.channels() {
        return Err(Error::dim(format!(
            "trajectories have {} and {} channels",
            a.channels(),
            b.channels()
        )));
    }
    Ok(())
}

/// Per grid time, the overlay distance between induced states and the
/// induced norm of `b`.
fn distances(a: &TrajectoryRecord, b: &TrajectoryRecord) -> Result<Vec<(f64, f64)>> {
    same_grid(a, b)?;
    a.states()
        .iter()
        .zip(b.states())
        .map(|(x, y)| {
            let fx = induce_features(x)?;
            let fy = induce_features(y)?;
            Ok((overlay_l2_distance(&fx, &fy)?, fy.l2_norm()))
        })
        .collect()
}

/// `max_t ‖X_a(t) − X_b(t)‖` between induced trajectories of any sizes.
pub fn trajectory_sup_error(a: &TrajectoryRecord, b: &TrajectoryRecord) -> Result<f64> {
    Ok(distances(a, b)?.into_iter().map(|(d, _)| d).fold(0.0, f64::max))
}

/// `max_t ‖X_n(t) − X_ref(t)‖ / ‖X_ref(t)‖`.
pub fn trajectory_sup_relative_error(traj_n: &TrajectoryRecord, traj_ref: &TrajectoryRecord) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for ((d, norm), &t) in distances(traj_n, traj_ref)?.into_iter().zip(traj_ref.times()) {
        if norm < DEGENERATE_NORM {
            return Err(Error::DegenerateReference { t });
        }
        worst = worst.max(d / norm);
    }
    Ok(worst)
}

/// `sup_t ‖X_n − X_ref‖ ≤ P ‖Z_n − Z_ref‖ + Q ‖W_n − W_ref‖`.
pub fn stability_bound_check(
    traj_n: &TrajectoryRecord,
    traj_ref: &TrajectoryRecord,
    kernel_gap: f64,
    feature_gap: f64,
    p: f64,
    q: f64,
) -> Result<BoundCheck> {
    Ok(BoundCheck {
        lhs: trajectory_sup_error(traj_n, traj_ref)?,
        bound: p * feature_gap + q * kernel_gap,
    })
}

/// `sup_t ‖X_{n₁} − X_{n₂}‖ ≤ C (n₁^{-e} + n₂^{-e})`.
pub fn transferability_gap_check(
    traj_a: &TrajectoryRecord,
    traj_b: &TrajectoryRecord,
    constant: f64,
    exponent: f64,
) -> Result<BoundCheck> {
    Ok(BoundCheck {
        lhs: trajectory_sup_error(traj_a, traj_b)?,
        bound: transfer_bound(constant, exponent, traj_a.n(), traj_b.n()),
    })
}

/// `C (n₁^{-e} + n₂^{-e})`.
pub fn transfer_bound(constant: f64, exponent: f64, n1: usize, n2: usize) -> f64 {
    constant * ((n1 as f64).powf(-exponent) + (n2 as f64).powf(-exponent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn stability_constant_examples() {
        let unit = BoundInputs::default();
        assert!(close(stability_constants(&unit).unwrap().0, E, 1e-15));
        let flat = BoundInputs {
            horizon: 0.0,
            x_sup: 3.0,
            ..unit
        };
        assert_eq!(stability_constants(&flat).unwrap(), (1.0, 0.0));
        let preset = BoundInputs {
            taps: 2,
            layers: 2,
            h_t: 0.5,
            x_sup: 1.0,
            ..unit
        };
        let (p, q) = stability_constants(&preset).unwrap();
        assert!(close(p, E, 1e-15));
        assert!(close(q, (E - 1.0) * 4.0, 1e-12));
        assert!(close(q, 6.87313, 1e-5));
    }

    #[test]
    fn weighted_constant_examples() {
        assert!(close(kernel_rate_factor(1.0), (7.0f64 / 6.0).sqrt(), 1e-15));
        assert!(close(kernel_rate_factor(1.0), 1.08012, 1e-5));
        let zero = BoundInputs {
            x_sup: 5.0,
            ..BoundInputs::default()
        };
        assert_eq!(rate_constant_weighted(&zero).unwrap(), 0.0);
        let feature_only = BoundInputs {
            horizon: 0.0,
            a2: 3f64.sqrt(),
            ..BoundInputs::default()
        };
        assert!(close(rate_constant_weighted(&feature_only).unwrap(), 1.0, 1e-15));
    }

    #[test]
    fn unweighted_constant_examples() {
        let base = BoundInputs {
            box_dim: 1.0,
            epsilon: 1e-9,
            ..BoundInputs::default()
        };
        assert!(close(rate_constant_unweighted(&base).unwrap().1, 0.5, 1e-8));
        let carpet = BoundInputs {
            box_dim: 7f64.ln() / 3f64.ln(),
            epsilon: 0.1,
            ..base
        };
        assert!(close(rate_constant_unweighted(&carpet).unwrap().1, 0.0645, 2e-4));
        assert_eq!(rate_constant_unweighted(&base).unwrap().0, 0.0);
        for eps in [0.0, 1.0, -0.1] {
            let bad = BoundInputs { epsilon: eps, ..base };
            assert!(matches!(rate_constant_unweighted(&bad), Err(Error::InvalidParameter(_))));
        }
        let bad = BoundInputs { alpha: 0.0, ..base };
        assert!(bad.validate().is_err());
    }

    fn constant(rows: &[f64]) -> TrajectoryRecord {
        let x = ndarray::Array2::from_shape_vec((rows.len(), 1), rows.to_vec()).unwrap();
        TrajectoryRecord::from_states(vec![0.0, 0.5, 1.0], vec![x.clone(), x.clone(), x], Default::default())
            .unwrap()
    }

    #[test]
    fn relative_error_examples() {
        let one = constant(&[1.0]);
        let step = constant(&[1.0, 0.0]);
        assert_eq!(trajectory_sup_relative_error(&step, &step).unwrap(), 0.0);
        assert!(close(trajectory_sup_relative_error(&one, &step).unwrap(), 1.0, 1e-15));
        assert!(close(trajectory_sup_error(&one, &step).unwrap(), 0.5f64.sqrt(), 1e-15));
        let zero = constant(&[0.0, 0.0]);
        assert!(matches!(
            trajectory_sup_relative_error(&one, &zero),
            Err(Error::DegenerateReference { t }) if t == 0.0
        ));
    }

    #[test]
    fn identical_runs_meet_bounds() {
        let a = constant(&[0.3, -0.2]);
        let chk = stability_bound_check(&a, &a, 0.0, 0.0, 1.0, 1.0).unwrap();
        assert!(chk.holds() && chk.margin() == 0.0);
        let chk = transferability_gap_check(&a, &a, 0.0, 1.0).unwrap();
        assert!(chk.holds());
    }

    #[test]
    fn bounds_decrease_in_n() {
        let mut last = f64::INFINITY;
        for n in [16, 32, 64, 128] {
            let b = transfer_bound(2.0, 0.45, n, 4096);
            assert!(b < last);
            last = b;
        }
    }
}
