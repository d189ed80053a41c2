//! Time integration of `dX/dt = Φ(S; X(t); H(t))`, `X(0) = Z`.
//!
//! Three solvers share one interface: classical RK4 with a fixed step,
//! adaptive Dormand–Prince 5(4) with dense output, and a Picard
//! successive-approximation oracle for small systems.

mod picard;
mod rk;

pub use picard::{MAX_PICARD_HORIZON, MAX_PICARD_NODES};

use std::fmt::Write as _;

use ndarray::{Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::neural::{gnn_forward, Activation, FilterBank, Filters};
use crate::record::Record;

pub const DEFAULT_EVAL_POINTS: usize = 100;

/// Right-hand side of the GNDE for a fixed graph, filter bank and
/// activation.
pub struct GndeSystem<'a> {
    shift: ArrayView2<'a, f64>,
    bank: &'a FilterBank,
    act: Activation,
    frozen: Option<Filters>,
}

impl<'a> GndeSystem<'a> {
    pub fn new(shift: ArrayView2<'a, f64>, bank: &'a FilterBank, act: Activation) -> Result<Self> {
        if shift.nrows() != shift.ncols() {
            return Err(Error::dim(format!("shift operator must be square, got {:?}", shift.dim())));
        }
        let frozen = if bank.is_constant() {
            Some(bank.filters_at(0.0)?)
        } else {
            None
        };
        Ok(GndeSystem {
            shift,
            bank,
            act,
            frozen,
        })
    }

    pub fn n(&self) -> usize {
        self.shift.nrows()
    }

    pub fn rhs(&self, t: f64, x: &Array2<f64>) -> Result<Array2<f64>> {
        match &self.frozen {
            Some(h) => gnn_forward(self.shift, x.view(), h, self.act),
            None => gnn_forward(self.shift, x.view(), &self.bank.filters_at(t)?, self.act),
        }
    }

    /// `(F K h_T)^L` with the certified `h_T`: a Lipschitz constant of the
    /// forward map in the induced `L2` norm whenever `‖S‖ ≤ 1`.
    pub fn lipschitz_bound(&self) -> f64 {
        let b = self.bank;
        ((b.channels() * b.taps()) as f64 * b.h_sup().certified).powi(b.layers() as i32)
    }
}

/// `Φ(S; X; H(t))`.
pub fn rhs(s: ArrayView2<'_, f64>, x: &Array2<f64>, bank: &FilterBank, act: Activation, t: f64) -> Result<Array2<f64>> {
    gnn_forward(s, x.view(), &bank.filters_at(t)?, act)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Classical fourth-order Runge–Kutta; `step` defaults to `T/200` and is
    /// shrunk so each output interval holds a whole number of steps.
    Rk4 { step: Option<f64> },
    /// Dormand–Prince 5(4) with PI step control; `h0` defaults to `T/100`.
    Dp5 {
        atol: f64,
        rtol: f64,
        h0: Option<f64>,
        max_steps: usize,
    },
    /// Fixed-point oracle on a trapezoid grid.
    Picard {
        points_per_unit: usize,
        max_iterations: usize,
        tol: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    /// Number of output intervals `M`; states are reported at `jT/M`.
    pub eval_points: usize,
}

impl SolverConfig {
    pub fn rk4() -> Self {
        SolverConfig {
            method: Method::Rk4 { step: None },
            eval_points: DEFAULT_EVAL_POINTS,
        }
    }

    pub fn dp5() -> Self {
        Self::dp5_with(1e-7, 1e-7)
    }

    pub fn dp5_with(atol: f64, rtol: f64) -> Self {
        SolverConfig {
            method: Method::Dp5 {
                atol,
                rtol,
                h0: None,
                max_steps: 1_000_000,
            },
            eval_points: DEFAULT_EVAL_POINTS,
        }
    }

    pub fn picard() -> Self {
        SolverConfig {
            method: Method::Picard {
                points_per_unit: 2048,
                max_iterations: 200,
                tol: 1e-12,
            },
            eval_points: DEFAULT_EVAL_POINTS,
        }
    }

    pub fn with_eval_points(mut self, m: usize) -> Self {
        self.eval_points = m;
        self
    }

    /// Nominal accuracy: the larger dp5 tolerance, the Picard fixed-point
    /// tolerance, or `1e-12` (rounding level) for fixed-step RK4.
    pub fn tolerance(&self) -> f64 {
        match self.method {
            Method::Rk4 { .. } => 1e-12,
            Method::Dp5 { atol, rtol, .. } => atol.max(rtol),
            Method::Picard { tol, .. } => tol,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.method {
            Method::Rk4 { .. } => "rk4",
            Method::Dp5 { .. } => "dp5",
            Method::Picard { .. } => "picard",
        }
    }

    fn validate(&self) -> Result<()> {
        if self.eval_points < 1 {
            return Err(Error::invalid("evaluation grid needs M >= 1"));
        }
        let ok = match self.method {
            Method::Rk4 { step } => step.is_none_or(|h| h > 0.0 && h.is_finite()),
            Method::Dp5 {
                atol,
                rtol,
                h0,
                max_steps,
            } => atol > 0.0 && rtol > 0.0 && max_steps > 0 && h0.is_none_or(|h| h > 0.0 && h.is_finite()),
            Method::Picard {
                points_per_unit,
                max_iterations,
                tol,
            } => points_per_unit > 0 && max_iterations > 0 && tol > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid {} settings: {:?}", self.name(), self.method)))
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolverMeta {
    pub method: String,
    pub settings: String,
    /// Accepted steps (RK4, DP5) or fixed-point sweeps (Picard).
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// States on the uniform grid `t_j = jT/M`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    times: Vec<f64>,
    states: Vec<Array2<f64>>,
    meta: SolverMeta,
}

pub(crate) fn eval_grid(horizon: f64, points: usize) -> Vec<f64> {
    (0..=points)
        .map(|j| if j == points { horizon } else { j as f64 * horizon / points as f64 })
        .collect()
}

impl TrajectoryRecord {
    fn new(times: Vec<f64>, states: Vec<Array2<f64>>, meta: SolverMeta) -> Self {
        debug_assert_eq!(times.len(), states.len());
        TrajectoryRecord { times, states, meta }
    }

    /// Wraps externally produced states, e.g. read back from disk.
    pub fn from_states(times: Vec<f64>, states: Vec<Array2<f64>>, meta: SolverMeta) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::dim(format!("{} times for {} states", times.len(), states.len())));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("times must be strictly increasing"));
        }
        let dim = states[0].dim();
        if dim.0 == 0 || dim.1 == 0 || states.iter().any(|x| x.dim() != dim) {
            return Err(Error::dim("states must share one nonempty shape"));
        }
        Ok(TrajectoryRecord { times, states, meta })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Array2<f64>] {
        &self.states
    }

    pub fn meta(&self) -> &SolverMeta {
        &self.meta
    }

    pub fn n(&self) -> usize {
        self.states[0].nrows()
    }

    pub fn channels(&self) -> usize {
        self.states[0].ncols()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().expect("nonempty grid")
    }

    pub fn final_state(&self) -> &Array2<f64> {
        self.states.last().expect("nonempty grid")
    }

    /// `sup_t ‖X(t)‖` in the induced `L2` norm.
    pub fn sup_norm(&self) -> f64 {
        self.states.iter().map(scaled_norm).fold(0.0, f64::max)
    }

    /// Header `t,n0f0,n0f1,…`: node-major, then channel.
    pub fn to_csv(&self) -> String {
        let (n, f) = (self.n(), self.channels());
        let mut out = String::from("t");
        for i in 0..n {
            for c in 0..f {
                let _ = write!(out, ",n{i}f{c}");
            }
        }
        out.push('\n');
        for (t, x) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{t}");
            for v in x.iter() {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn meta_record(&self) -> Record {
        let mut r = Record::new();
        r.set("method", &self.meta.method);
        r.set("settings", &self.meta.settings);
        r.set("accepted", self.meta.accepted);
        r.set("rejected", self.meta.rejected);
        r.set("rhs_evals", self.meta.rhs_evals);
        r.set("eval_points", self.times.len() - 1);
        r.set("horizon", self.horizon());
        r.set("nodes", self.n());
        r.set("channels", self.channels());
        r
    }
}

/// `‖X‖_F / √n`, the `L2` norm of the induced step function.
pub fn scaled_norm(x: &Array2<f64>) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.nrows() as f64).sqrt()
}

/// `sup_t ‖X_a(t) − X_b(t)‖` for trajectories on the same nodes and grid.
pub fn sup_scaled_distance(a: &TrajectoryRecord, b: &TrajectoryRecord) -> Result<f64> {
    if a.times.len() != b.times.len() || a.n() != b.n() || a.channels() != b.channels() {
        return Err(Error::dim("trajectories differ in grid, node count or channels"));
    }
    Ok(a.states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| scaled_norm(&(x - y)))
        .fold(0.0, f64::max))
}

fn check_inputs(s: ArrayView2<'_, f64>, z: &Array2<f64>, bank: &FilterBank, horizon: f64) -> Result<()> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
    }
    if z.nrows() != s.nrows() || z.ncols() != bank.channels() {
        return Err(Error::dim(format!(
            "initial state {:?} does not match {} nodes and {} channels",
            z.dim(),
            s.nrows(),
            bank.channels()
        )));
    }
    Ok(())
}

/// Solves the GNDE on `[0, T]` and reports states on the evaluation grid.
pub fn integrate(
    s: ArrayView2<'_, f64>,
    z: &Array2<f64>,
    bank: &FilterBank,
    act: Activation,
    horizon: f64,
    cfg: &SolverConfig,
) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    check_inputs(s, z, bank, horizon)?;
    let sys = GndeSystem::new(s, bank, act)?;
    match cfg.method {
        Method::Rk4 { step } => rk::rk4(&sys, z, horizon, cfg.eval_points, step.unwrap_or(horizon / 200.0)),
        Method::Dp5 {
            atol,
            rtol,
            h0,
            max_steps,
        } => rk::dp5(
            &sys,
            z,
            horizon,
            cfg.eval_points,
            rk::Dp5Settings {
                atol,
                rtol,
                h0: h0.unwrap_or(horizon / 100.0),
                max_steps,
            },
        ),
        Method::Picard {
            points_per_unit,
            max_iterations,
            tol,
        } => picard::picard(
            &sys,
            z,
            horizon,
            cfg.eval_points,
            picard::PicardSettings {
                points_per_unit,
                max_iterations,
                tol,
            },
        ),
    }
}

/// The fixed-point oracle; `cfg` supplies the evaluation grid and, if it
/// selects Picard, the quadrature settings.
pub fn picard_solve(
    s: ArrayView2<'_, f64>,
    z: &Array2<f64>,
    bank: &FilterBank,
    act: Activation,
    horizon: f64,
    cfg: &SolverConfig,
) -> Result<TrajectoryRecord> {
    let cfg = match cfg.method {
        Method::Picard { .. } => *cfg,
        _ => SolverConfig::picard().with_eval_points(cfg.eval_points),
    };
    integrate(s, z, bank, act, horizon, &cfg)
}

/// `(ΠX)_i = X_{perm[i]}`.
pub fn permute_rows(x: &Array2<f64>, perm: &[usize]) -> Array2<f64> {
    Array2::from_shape_fn(x.dim(), |(i, j)| x[[perm[i], j]])
}

/// `(ΠSΠᵀ)_{ij} = S_{perm[i], perm[j]}`.
pub fn permute_shift(s: ArrayView2<'_, f64>, perm: &[usize]) -> Array2<f64> {
    Array2::from_shape_fn(s.dim(), |(i, j)| s[[perm[i], perm[j]]])
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::invalid(format!("permutation has {} entries for {n} nodes", perm.len())));
    }
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::invalid("not a permutation of the node indices"));
        }
        seen[p] = true;
    }
    Ok(())
}

/// `sup_t ‖Π X(t; S, Z) − X(t; ΠSΠᵀ, ΠZ)‖` in the induced norm.
pub fn equivariance_check(
    s: ArrayView2<'_, f64>,
    z: &Array2<f64>,
    bank: &FilterBank,
    act: Activation,
    horizon: f64,
    cfg: &SolverConfig,
    perm: &[usize],
) -> Result<f64> {
    check_permutation(perm, s.nrows())?;
    let base = integrate(s, z, bank, act, horizon, cfg)?;
    let ps = permute_shift(s, perm);
    let moved = integrate(ps.view(), &permute_rows(z, perm), bank, act, horizon, cfg)?;
    Ok(base
        .states
        .iter()
        .zip(&moved.states)
        .map(|(x, y)| scaled_norm(&(permute_rows(x, perm) - y)))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scalar(a: f64) -> FilterBank {
        FilterBank::constant(Filters::new(1, 1, 1, vec![a]).unwrap())
    }

    fn random_preset(n: usize, seed: u64) -> (Array2<f64>, Array2<f64>, FilterBank) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let w: f64 = rng.random();
                a[[i, j]] = w;
                a[[j, i]] = w;
            }
        }
        let s = a / n as f64;
        let z = Array2::from_shape_fn((n, 1), |_| rng.random_range(-1.0..1.0));
        let bank = FilterBank::random_constant(2, 1, 2, &mut rng).unwrap();
        (s, z, bank)
    }

    #[test]
    fn exponential_growth() {
        let s = array![[1.0]];
        let z = array![[1.0]];
        let e = std::f64::consts::E;
        for cfg in [SolverConfig::rk4(), SolverConfig::dp5(), SolverConfig::picard()] {
            let tr = integrate(s.view(), &z, &scalar(1.0), Activation::Identity, 1.0, &cfg).unwrap();
            assert_eq!(tr.times().len(), 101);
            assert_eq!(tr.states()[0], z);
            let tol = if cfg.name() == "picard" { 5e-6 } else { 1e-6 };
            assert!((tr.final_state()[[0, 0]] - e).abs() < tol, "{}", cfg.name());
        }
    }

    #[test]
    fn zero_stays_zero() {
        let (s, _, bank) = random_preset(6, 1);
        let z = Array2::zeros((6, 1));
        for cfg in [SolverConfig::rk4(), SolverConfig::dp5(), SolverConfig::picard()] {
            let tr = integrate(s.view(), &z, &bank, Activation::Tanh, 1.0, &cfg).unwrap();
            assert!(tr.states().iter().all(|x| x.iter().all(|&v| v == 0.0)));
        }
    }

    #[test]
    fn solvers_agree_on_random_preset() {
        let (s, z, bank) = random_preset(16, 7);
        let rk = integrate(s.view(), &z, &bank, Activation::Relu, 1.0, &SolverConfig::rk4()).unwrap();
        let dp = integrate(s.view(), &z, &bank, Activation::Relu, 1.0, &SolverConfig::dp5()).unwrap();
        assert!(sup_scaled_distance(&rk, &dp).unwrap() < 1e-6);
        let pc = picard_solve(s.view(), &z, &bank, Activation::Relu, 1.0, &SolverConfig::rk4()).unwrap();
        assert!(sup_scaled_distance(&rk, &pc).unwrap() < 1e-6);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let s = array![[1.0]];
        let z = array![[1.0]];
        let e = std::f64::consts::E;
        let err = |h: f64| {
            let cfg = SolverConfig {
                method: Method::Rk4 { step: Some(h) },
                eval_points: 1,
            };
            let tr = integrate(s.view(), &z, &scalar(1.0), Activation::Identity, 1.0, &cfg).unwrap();
            (tr.final_state()[[0, 0]] - e).abs()
        };
        for h in [0.1, 0.05, 0.025] {
            let ratio = err(h) / err(h / 2.0);
            assert!((12.0..=20.0).contains(&ratio), "h={h} ratio={ratio}");
        }
    }

    #[test]
    fn dense_output_is_grid_consistent() {
        let (s, z, bank) = random_preset(12, 3);
        let a = integrate(s.view(), &z, &bank, Activation::Tanh, 1.0, &SolverConfig::dp5().with_eval_points(100)).unwrap();
        let b = integrate(s.view(), &z, &bank, Activation::Tanh, 1.0, &SolverConfig::dp5().with_eval_points(200)).unwrap();
        for j in 0..=100 {
            assert!(scaled_norm(&(&a.states()[j] - &b.states()[2 * j])) < 1e-6);
        }
    }

    #[test]
    fn equivariance_under_reversal() {
        let (s, z, bank) = random_preset(10, 5);
        let rev: Vec<usize> = (0..10).rev().collect();
        let cfg = SolverConfig::dp5_with(1e-9, 1e-9);
        let d = equivariance_check(s.view(), &z, &bank, Activation::Relu, 1.0, &cfg, &rev).unwrap();
        assert!(d <= 10.0 * cfg.tolerance());
        let id: Vec<usize> = (0..10).collect();
        assert_eq!(equivariance_check(s.view(), &z, &bank, Activation::Relu, 1.0, &cfg, &id).unwrap(), 0.0);
        assert!(equivariance_check(s.view(), &z, &bank, Activation::Relu, 1.0, &cfg, &[0, 0, 1, 2, 3, 4, 5, 6, 7, 8]).is_err());
    }

    #[test]
    fn failure_modes() {
        let s = array![[1.0]];
        let z = array![[1.0]];
        let cfg = SolverConfig {
            method: Method::Dp5 {
                atol: 1e-10,
                rtol: 1e-10,
                h0: None,
                max_steps: 3,
            },
            eval_points: 10,
        };
        let err = integrate(s.view(), &z, &scalar(1.0), Activation::Identity, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { t, .. } if t > 0.0 && t < 1.0));
        let blow = integrate(s.view(), &z, &scalar(1e3), Activation::Identity, 1.0, &SolverConfig::rk4()).unwrap_err();
        assert!(matches!(blow, Error::Divergence { .. }));
        let big = Array2::zeros((65, 65));
        let zb = Array2::zeros((65, 1));
        assert!(matches!(
            picard_solve(big.view(), &zb, &scalar(1.0), Activation::Identity, 1.0, &SolverConfig::picard()),
            Err(Error::ComplexityGuard(_))
        ));
    }

    #[test]
    fn csv_layout() {
        let s = array![[0.5, 0.0], [0.0, 0.5]];
        let z = array![[1.0], [2.0]];
        let tr = integrate(s.view(), &z, &scalar(0.0), Activation::Identity, 1.0, &SolverConfig::rk4().with_eval_points(2)).unwrap();
        let csv = tr.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,n0f0,n1f0");
        assert_eq!(lines[1], "0,1,2");
        assert_eq!(lines[3], "1,1,2");
        assert_eq!(tr.meta_record().get("method"), Some("rk4"));
    }
}
