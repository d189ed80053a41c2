use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Fourier,
    HolderCosine,
    Constant,
    Linear,
}

impl FeatureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Fourier => "fourier",
            FeatureKind::HolderCosine => "holder_cosine",
            FeatureKind::Constant => "constant",
            FeatureKind::Linear => "linear",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fourier" => Ok(FeatureKind::Fourier),
            "holder_cosine" | "holder" => Ok(FeatureKind::HolderCosine),
            "constant" => Ok(FeatureKind::Constant),
            "linear" => Ok(FeatureKind::Linear),
            other => Err(Error::invalid(format!("unknown feature kind `{other}`"))),
        }
    }
}

/// One scalar component of an initial feature function.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureChannel {
    /// `Σ_k cos_k cos(2πku) + sin_k sin(2πku)`, `k = 1..=D`.
    Fourier { cos: Vec<f64>, sin: Vec<f64> },
    /// `Σ_k amp_k cos(2π freq_k u)`.
    Cosines { amp: Vec<f64>, freq: Vec<f64> },
    Constant(f64),
    /// `slope · u + intercept`.
    Linear { slope: f64, intercept: f64 },
}

impl FeatureChannel {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            FeatureChannel::Fourier { cos, sin } => cos
                .iter()
                .zip(sin)
                .enumerate()
                .map(|(k, (a, b))| {
                    let w = 2.0 * PI * (k + 1) as f64 * u;
                    a * w.cos() + b * w.sin()
                })
                .sum(),
            FeatureChannel::Cosines { amp, freq } => amp
                .iter()
                .zip(freq)
                .map(|(a, f)| a * (2.0 * PI * f * u).cos())
                .sum(),
            FeatureChannel::Constant(c) => *c,
            FeatureChannel::Linear { slope, intercept } => slope * u + intercept,
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            FeatureChannel::Fourier { cos, sin } => cos
                .iter()
                .zip(sin)
                .enumerate()
                .map(|(k, (a, b))| 2.0 * PI * (k + 1) as f64 * (a.abs() + b.abs()))
                .sum(),
            FeatureChannel::Cosines { amp, freq } => {
                amp.iter().zip(freq).map(|(a, f)| 2.0 * PI * (a * f).abs()).sum()
            }
            FeatureChannel::Constant(_) => 0.0,
            FeatureChannel::Linear { slope, .. } => slope.abs(),
        }
    }
}

/// Initial feature function `Z: [0,1] → ℝ^F`, one channel per feature.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFunction {
    kind: FeatureKind,
    channels: Vec<FeatureChannel>,
}

impl FeatureFunction {
    pub fn new(kind: FeatureKind, channels: Vec<FeatureChannel>) -> Result<Self> {
        if channels.is_empty() {
            return Err(Error::invalid("feature function needs at least one channel"));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        for ch in &channels {
            let ok = match ch {
                FeatureChannel::Fourier { cos, sin } => {
                    cos.len() == sin.len() && finite(cos) && finite(sin)
                }
                FeatureChannel::Cosines { amp, freq } => {
                    amp.len() == freq.len() && finite(amp) && finite(freq)
                }
                FeatureChannel::Constant(c) => c.is_finite(),
                FeatureChannel::Linear { slope, intercept } => {
                    slope.is_finite() && intercept.is_finite()
                }
            };
            if !ok {
                return Err(Error::invalid("feature coefficients must be finite and paired"));
            }
        }
        Ok(FeatureFunction { kind, channels })
    }

    pub fn constant(values: &[f64]) -> Result<Self> {
        let channels = values.iter().map(|&c| FeatureChannel::Constant(c)).collect();
        Self::new(FeatureKind::Constant, channels)
    }

    /// `Z(u) = slope · u + intercept` in every channel.
    pub fn linear(channels: usize, slope: f64, intercept: f64) -> Result<Self> {
        Self::new(
            FeatureKind::Linear,
            vec![FeatureChannel::Linear { slope, intercept }; channels],
        )
    }

    /// Degree-`degree` trigonometric polynomial per channel with coefficients
    /// drawn uniformly from `[-1, 1]`.
    pub fn random_fourier<R: Rng + ?Sized>(channels: usize, degree: usize, rng: &mut R) -> Result<Self> {
        if degree < 1 {
            return Err(Error::invalid("Fourier features need degree >= 1"));
        }
        let chans = (0..channels)
            .map(|_| {
                let cos = (0..degree).map(|_| rng.random_range(-1.0..=1.0)).collect();
                let sin = (0..degree).map(|_| rng.random_range(-1.0..=1.0)).collect();
                FeatureChannel::Fourier { cos, sin }
            })
            .collect();
        Self::new(FeatureKind::Fourier, chans)
    }

    /// `Σ_{k=1}^{D} base^{-k/2} cos(2π base^k u)` with `base ~ U[3, 10]` per
    /// channel: Hölder-1/2 and no smoother.
    pub fn random_holder<R: Rng + ?Sized>(channels: usize, degree: usize, rng: &mut R) -> Result<Self> {
        if degree < 1 {
            return Err(Error::invalid("Hölder features need degree >= 1"));
        }
        let chans = (0..channels)
            .map(|_| {
                let base: f64 = rng.random_range(3.0..=10.0);
                let amp = (1..=degree).map(|k| base.powf(-(k as f64) / 2.0)).collect();
                let freq = (1..=degree).map(|k| base.powi(k as i32)).collect();
                FeatureChannel::Cosines { amp, freq }
            })
            .collect();
        Self::new(FeatureKind::HolderCosine, chans)
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    pub fn channels(&self) -> &[FeatureChannel] {
        &self.channels
    }

    pub fn dim(&self) -> usize {
        self.channels.len()
    }

    pub fn eval_into(&self, u: f64, out: &mut [f64]) {
        for (slot, ch) in out.iter_mut().zip(&self.channels) {
            *slot = ch.eval(u);
        }
    }

    /// Per-channel Lipschitz bound; the largest over channels.
    pub fn lipschitz(&self) -> f64 {
        self.channels.iter().map(FeatureChannel::lipschitz).fold(0.0, f64::max)
    }
}

/// Nodes and weights of the `q`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(q: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(q);
    for i in 0..q {
        let mut x = (PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre(q, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(q, x);
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule.reverse();
    rule
}

/// `P_q(x)` and its derivative by the three-term recurrence.
fn legendre(q: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if q == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=q {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = q as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for q in 1..=10 {
            let rule = gauss_legendre(q);
            assert!((rule.iter().map(|r| r.1).sum::<f64>() - 2.0).abs() < 1e-14);
            for deg in 0..2 * q {
                let exact = if deg % 2 == 0 { 2.0 / (deg + 1) as f64 } else { 0.0 };
                let approx: f64 = rule.iter().map(|&(x, w)| w * x.powi(deg as i32)).sum();
                assert!((approx - exact).abs() < 1e-13, "q={q} deg={deg}");
            }
        }
    }

    #[test]
    fn fourier_degree_one() {
        let z = FeatureFunction::new(
            FeatureKind::Fourier,
            vec![FeatureChannel::Fourier {
                cos: vec![1.0],
                sin: vec![0.0],
            }],
        )
        .unwrap();
        let mut out = [0.0];
        z.eval_into(0.5, &mut out);
        assert!((out[0] + 1.0).abs() < 1e-15);
        assert!((z.lipschitz() - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn random_draws_are_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = FeatureFunction::random_fourier(2, 10, &mut rng).unwrap();
        for ch in z.channels() {
            let FeatureChannel::Fourier { cos, sin } = ch else {
                panic!("fourier channel expected");
            };
            assert!(cos.iter().chain(sin).all(|c| (-1.0..=1.0).contains(c)));
        }
        let h = FeatureFunction::random_holder(1, 4, &mut rng).unwrap();
        let FeatureChannel::Cosines { amp, freq } = &h.channels()[0] else {
            panic!("cosine channel expected");
        };
        let base = freq[0];
        assert!((3.0..=10.0).contains(&base));
        assert!((amp[1] - 1.0 / base).abs() < 1e-15);
        assert!((freq[2] - base.powi(3)).abs() < 1e-9);
    }
}
