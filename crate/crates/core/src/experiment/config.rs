use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::DEFAULT_EPSILON;
use crate::catalog::{GraphonKind, GraphonSpec};
use crate::dynamics::{SolverConfig, DEFAULT_EVAL_POINTS};
use crate::error::{Error, Result};
use crate::neural::{Activation, FilterBank, Filters};
use crate::record::{join, Record};
use crate::sampling::{FeatureFunction, FeatureKind};

/// Keys accepted in a config file; anything else is rejected so typos
/// surface as config errors.
pub const CONFIG_KEYS: &[&str] = &[
    "graphon",
    "alpha",
    "frequency",
    "depth",
    "levels",
    "k",
    "n",
    "n_list",
    "n_ref",
    "horizon",
    "layers",
    "channels",
    "taps",
    "filter_law",
    "filter_modes",
    "filter_coefficients",
    "activation",
    "features",
    "degree",
    "feature_value",
    "trials",
    "solver",
    "atol",
    "rtol",
    "eval_points",
    "seed",
    "epsilon",
    "timing",
    "schedule",
    "edges",
    "proportions",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterLaw {
    Constant,
    Fourier { modes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Rk4,
    Dp5,
    Picard,
}

/// One experiment, fully determined by a flat key-value file. Every key has
/// a default; an empty file is the tent convergence preset.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub graphon: GraphonSpec,
    /// Node count for single-graph commands.
    pub n: usize,
    pub n_list: Vec<usize>,
    pub n_ref: usize,
    pub horizon: f64,
    pub layers: usize,
    pub channels: usize,
    pub taps: usize,
    pub filter_law: FilterLaw,
    /// Fixed filter coefficients in `(l, f, g, k)` order instead of random ones.
    pub filter_coefficients: Option<Vec<f64>>,
    pub activation: Activation,
    pub features: FeatureKind,
    pub degree: usize,
    pub feature_value: f64,
    pub trials: usize,
    pub solver: SolverChoice,
    pub atol: f64,
    pub rtol: f64,
    pub eval_points: usize,
    pub seed: u64,
    pub epsilon: f64,
    /// Record wall-clock runtimes; off by default so reruns are byte-identical.
    pub timing: bool,
    pub schedule: Option<Vec<u64>>,
    pub edges: Option<String>,
    pub proportions: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graphon: GraphonSpec::tent(1.0).expect("valid tent"),
            n: 64,
            n_list: vec![128, 192, 256, 384, 512, 768, 1024],
            n_ref: 2048,
            horizon: 1.0,
            layers: 2,
            channels: 1,
            taps: 2,
            filter_law: FilterLaw::Constant,
            filter_coefficients: None,
            activation: Activation::Relu,
            features: FeatureKind::Fourier,
            degree: 10,
            feature_value: 1.0,
            trials: 10,
            solver: SolverChoice::Dp5,
            atol: 1e-7,
            rtol: 1e-7,
            eval_points: DEFAULT_EVAL_POINTS,
            seed: 0,
            epsilon: DEFAULT_EPSILON,
            timing: false,
            schedule: None,
            edges: None,
            proportions: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
        }
    }
}

fn graphon_from(r: &Record) -> Result<GraphonSpec> {
    let name: String = r.parse_or("graphon", "tent".to_string())?;
    let base = GraphonSpec::by_name(&name)?;
    let spec = match base.kind() {
        GraphonKind::Tent { alpha } => GraphonSpec::tent(r.parse_or("alpha", *alpha)?)?,
        GraphonKind::Oscillatory { frequency } => GraphonSpec::oscillatory(r.parse_or("frequency", *frequency)?)?,
        GraphonKind::BlockPattern(p) => match name.as_str() {
            "checkerboard" => GraphonSpec::checkerboard(r.parse_or("k", p.k())?)?,
            _ => GraphonSpec::hsbm(2, &[true, false, false, true], r.parse_or("levels", p.levels())?)?,
        },
        GraphonKind::TriadicCarpet(c) => {
            let depth = r.parse_or("depth", c.depth())?;
            match name.as_str() {
                "hexaflake" => GraphonSpec::hexaflake(depth)?,
                _ => GraphonSpec::sierpinski(depth)?,
            }
        }
    };
    let mut rec = spec.to_record();
    rec.set("name", &name);
    GraphonSpec::from_record(&rec)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_record(&Record::parse(text)?)
    }

    pub fn from_record(r: &Record) -> Result<Self> {
        if let Some(key) = r.keys().find(|k| !CONFIG_KEYS.contains(k)) {
            return Err(Error::Parse {
                line: 0,
                msg: format!("unknown config key `{key}`"),
            });
        }
        let d = Self::default();
        let filter_law = match r.get("filter_law").unwrap_or("constant") {
            "constant" => FilterLaw::Constant,
            "fourier" => FilterLaw::Fourier {
                modes: r.parse_or("filter_modes", 2)?,
            },
            other => return Err(Error::invalid(format!("unknown filter law `{other}`"))),
        };
        let solver = match r.get("solver").unwrap_or("dp5") {
            "rk4" => SolverChoice::Rk4,
            "dp5" => SolverChoice::Dp5,
            "picard" => SolverChoice::Picard,
            other => return Err(Error::invalid(format!("unknown solver `{other}`"))),
        };
        let cfg = ExperimentConfig {
            graphon: graphon_from(r)?,
            n: r.parse_or("n", d.n)?,
            n_list: r.parse_list("n_list")?.unwrap_or(d.n_list),
            n_ref: r.parse_or("n_ref", d.n_ref)?,
            horizon: r.parse_or("horizon", d.horizon)?,
            layers: r.parse_or("layers", d.layers)?,
            channels: r.parse_or("channels", d.channels)?,
            taps: r.parse_or("taps", d.taps)?,
            filter_law,
            filter_coefficients: r.parse_list("filter_coefficients")?,
            activation: match r.get("activation") {
                Some(s) => Activation::parse(s)?,
                None => d.activation,
            },
            features: match r.get("features") {
                Some(s) => FeatureKind::parse(s)?,
                None => d.features,
            },
            degree: r.parse_or("degree", d.degree)?,
            feature_value: r.parse_or("feature_value", d.feature_value)?,
            trials: r.parse_or("trials", d.trials)?,
            solver,
            atol: r.parse_or("atol", d.atol)?,
            rtol: r.parse_or("rtol", d.rtol)?,
            eval_points: r.parse_or("eval_points", d.eval_points)?,
            seed: r.parse_or("seed", d.seed)?,
            epsilon: r.parse_or("epsilon", d.epsilon)?,
            timing: r.parse_or("timing", d.timing)?,
            schedule: r.parse_list("schedule")?,
            edges: r.get("edges").map(str::to_string),
            proportions: r.parse_list("proportions")?.unwrap_or(d.proportions),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n_list.contains(&0) {
            return Err(Error::invalid("node counts must be positive"));
        }
        let max_n = self.n_list.iter().copied().max().unwrap_or(0);
        if self.n_ref <= max_n {
            return Err(Error::invalid(format!(
                "n_ref = {} must exceed every entry of n_list (max {max_n})",
                self.n_ref
            )));
        }
        if self.trials < 1 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::invalid(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.layers == 0 || self.channels == 0 || self.taps == 0 {
            return Err(Error::invalid("layers, channels and taps must be positive"));
        }
        if self.degree == 0 {
            return Err(Error::invalid("feature degree must be positive"));
        }
        if !self.feature_value.is_finite() {
            return Err(Error::invalid("feature_value must be finite"));
        }
        if self.eval_points == 0 || !(self.atol > 0.0 && self.rtol > 0.0) {
            return Err(Error::invalid("solver needs eval_points >= 1 and positive tolerances"));
        }
        if let Some(p) = self.proportions.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(Error::invalid(format!("proportion {p} outside (0, 1]")));
        }
        Ok(())
    }

    pub fn solver_config(&self) -> SolverConfig {
        let base = match self.solver {
            SolverChoice::Rk4 => SolverConfig::rk4(),
            SolverChoice::Dp5 => SolverConfig::dp5_with(self.atol, self.rtol),
            SolverChoice::Picard => SolverConfig::picard(),
        };
        base.with_eval_points(self.eval_points)
    }

    /// Seed of trial `trial`: the base seed offset by the trial index.
    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.seed.wrapping_add(trial as u64)
    }

    /// Filter bank drawn from stream 0 of the trial seed, unless fixed
    /// coefficients are configured.
    pub fn filter_bank(&self, seed: u64) -> Result<FilterBank> {
        if let Some(coeffs) = &self.filter_coefficients {
            let (l, f, k) = (self.layers, self.channels, self.taps);
            return match self.filter_law {
                FilterLaw::Constant => Ok(FilterBank::constant(Filters::new(l, f, k, coeffs.clone())?)),
                FilterLaw::Fourier { modes } => FilterBank::fourier(l, f, k, modes, self.horizon, coeffs.clone()),
            };
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(0);
        let bank = match self.filter_law {
            FilterLaw::Constant => FilterBank::random_constant(self.layers, self.channels, self.taps, &mut rng)?,
            FilterLaw::Fourier { modes } => {
                FilterBank::random_fourier(self.layers, self.channels, self.taps, modes, self.horizon, &mut rng)?
            }
        };
        Ok(bank.with_seed(seed))
    }

    /// Initial feature function drawn from stream 1 of the trial seed.
    pub fn feature_function(&self, seed: u64) -> Result<FeatureFunction> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        match self.features {
            FeatureKind::Fourier => FeatureFunction::random_fourier(self.channels, self.degree, &mut rng),
            FeatureKind::HolderCosine => FeatureFunction::random_holder(self.channels, self.degree, &mut rng),
            FeatureKind::Constant => FeatureFunction::constant(&vec![self.feature_value; self.channels]),
            FeatureKind::Linear => FeatureFunction::linear(self.channels, self.feature_value, 0.0),
        }
    }

    /// The resolved config with every default written out.
    pub fn to_record(&self) -> Record {
        let mut r = Record::new();
        r.set("graphon", self.graphon.name());
        match self.graphon.kind() {
            GraphonKind::Tent { alpha } => r.set("alpha", alpha),
            GraphonKind::Oscillatory { frequency } => r.set("frequency", frequency),
            GraphonKind::BlockPattern(p) if self.graphon.name() == "checkerboard" => r.set("k", p.k()),
            GraphonKind::BlockPattern(p) => r.set("levels", p.levels()),
            GraphonKind::TriadicCarpet(c) => r.set("depth", c.depth()),
        }
        r.set("n", self.n);
        r.set("n_list", join(&self.n_list));
        r.set("n_ref", self.n_ref);
        r.set("horizon", self.horizon);
        r.set("layers", self.layers);
        r.set("channels", self.channels);
        r.set("taps", self.taps);
        match self.filter_law {
            FilterLaw::Constant => r.set("filter_law", "constant"),
            FilterLaw::Fourier { modes } => {
                r.set("filter_law", "fourier");
                r.set("filter_modes", modes);
            }
        }
        if let Some(c) = &self.filter_coefficients {
            r.set("filter_coefficients", join(c));
        }
        r.set("activation", self.activation.name());
        r.set("features", self.features.as_str());
        r.set("degree", self.degree);
        r.set("feature_value", self.feature_value);
        r.set("trials", self.trials);
        r.set(
            "solver",
            match self.solver {
                SolverChoice::Rk4 => "rk4",
                SolverChoice::Dp5 => "dp5",
                SolverChoice::Picard => "picard",
            },
        );
        r.set("atol", self.atol);
        r.set("rtol", self.rtol);
        r.set("eval_points", self.eval_points);
        r.set("seed", self.seed);
        r.set("epsilon", self.epsilon);
        r.set("timing", self.timing);
        if let Some(s) = &self.schedule {
            r.set("schedule", join(s));
        }
        if let Some(e) = &self.edges {
            r.set("edges", e);
        }
        r.set("proportions", join(&self.proportions));
        r
    }
}
