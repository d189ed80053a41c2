use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};
use crate::record::{join, Record};

/// Time samples used to estimate `sup_t |h(t)|` for the Fourier law.
pub const SUP_GRID: usize = 10_000;

/// Filter taps of every layer at one instant, indexed `(layer, out, in, tap)`
/// in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Filters {
    layers: usize,
    channels: usize,
    taps: usize,
    data: Vec<f64>,
}

impl Filters {
    pub fn new(layers: usize, channels: usize, taps: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(layers, channels, taps)?;
        if data.len() != layers * channels * channels * taps {
            return Err(Error::dim(format!(
                "expected {} filter taps for dims ({layers},{channels},{taps}), got {}",
                layers * channels * channels * taps,
                data.len()
            )));
        }
        if data.iter().any(|h| !h.is_finite()) {
            return Err(Error::invalid("filter taps must be finite"));
        }
        Ok(Filters {
            layers,
            channels,
            taps,
            data,
        })
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn taps(&self) -> usize {
        self.taps
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, layer: usize, out: usize, input: usize, tap: usize) -> f64 {
        self.data[((layer * self.channels + out) * self.channels + input) * self.taps + tap]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, h| m.max(h.abs()))
    }
}

fn check_dims(layers: usize, channels: usize, taps: usize) -> Result<()> {
    if layers == 0 || channels == 0 || taps == 0 {
        return Err(Error::invalid(format!(
            "filter dims must be positive, got ({layers},{channels},{taps})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimeLaw {
    Constant,
    /// `c₀ + Σ_{m=1}^{M} a_m cos(2πmt/T) + b_m sin(2πmt/T)`; coefficients
    /// stored per tap as `(c₀, a₁..a_M, b₁..b_M)`.
    Fourier { modes: usize, horizon: f64 },
}

/// `sup_t max |h(t)|`: the sampled estimate and a certified upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupBound {
    pub sampled: f64,
    pub certified: f64,
}

/// Time-varying filter taps for an `L`-layer, `F`-channel, `K`-tap network.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    layers: usize,
    channels: usize,
    taps: usize,
    law: TimeLaw,
    coeffs: Vec<f64>,
    seed: Option<u64>,
}

impl FilterBank {
    pub fn constant(filters: Filters) -> Self {
        FilterBank {
            layers: filters.layers,
            channels: filters.channels,
            taps: filters.taps,
            law: TimeLaw::Constant,
            coeffs: filters.data,
            seed: None,
        }
    }

    pub fn fourier(
        layers: usize,
        channels: usize,
        taps: usize,
        modes: usize,
        horizon: f64,
        coeffs: Vec<f64>,
    ) -> Result<Self> {
        check_dims(layers, channels, taps)?;
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
        }
        let expected = layers * channels * channels * taps * (2 * modes + 1);
        if coeffs.len() != expected {
            return Err(Error::dim(format!(
                "expected {expected} Fourier coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("Fourier coefficients must be finite"));
        }
        Ok(FilterBank {
            layers,
            channels,
            taps,
            law: TimeLaw::Fourier { modes, horizon },
            coeffs,
            seed: None,
        })
    }

    /// Constant taps drawn uniformly from `[-1, 1]`.
    pub fn random_constant<R: Rng + ?Sized>(
        layers: usize,
        channels: usize,
        taps: usize,
        rng: &mut R,
    ) -> Result<Self> {
        check_dims(layers, channels, taps)?;
        let data = (0..layers * channels * channels * taps)
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        Ok(Self::constant(Filters::new(layers, channels, taps, data)?))
    }

    /// Fourier coefficients drawn uniformly from `[-1, 1] / (2M + 1)`, so
    /// every tap stays in `[-1, 1]` at all times.
    pub fn random_fourier<R: Rng + ?Sized>(
        layers: usize,
        channels: usize,
        taps: usize,
        modes: usize,
        horizon: f64,
        rng: &mut R,
    ) -> Result<Self> {
        check_dims(layers, channels, taps)?;
        let width = (2 * modes + 1) as f64;
        let coeffs = (0..layers * channels * channels * taps * (2 * modes + 1))
            .map(|_| rng.random_range(-1.0..=1.0) / width)
            .collect();
        Self::fourier(layers, channels, taps, modes, horizon, coeffs)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn taps(&self) -> usize {
        self.taps
    }

    pub fn law(&self) -> &TimeLaw {
        &self.law
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_constant(&self) -> bool {
        self.law == TimeLaw::Constant
    }

    fn tap_count(&self) -> usize {
        self.layers * self.channels * self.channels * self.taps
    }

    /// Taps at time `t`. Constant banks accept any finite `t ≥ 0`.
    pub fn filters_at(&self, t: f64) -> Result<Filters> {
        let data = match &self.law {
            TimeLaw::Constant => {
                if !(t.is_finite() && t >= 0.0) {
                    return Err(Error::Domain { t, horizon: f64::INFINITY });
                }
                self.coeffs.clone()
            }
            TimeLaw::Fourier { modes, horizon } => {
                if !(0.0..=*horizon).contains(&t) {
                    return Err(Error::Domain { t, horizon: *horizon });
                }
                let basis = fourier_basis(*modes, t / horizon);
                self.coeffs
                    .chunks(2 * modes + 1)
                    .map(|c| c.iter().zip(&basis).map(|(a, b)| a * b).sum())
                    .collect()
            }
        };
        Ok(Filters {
            layers: self.layers,
            channels: self.channels,
            taps: self.taps,
            data,
        })
    }

    /// `h_T = sup_{t ≤ T} max |h_{fgk}^{(ℓ)}(t)|`. The Fourier law is
    /// sampled on [`SUP_GRID`] uniform times; the certified bound is the
    /// largest coefficient-magnitude sum.
    pub fn h_sup(&self) -> SupBound {
        match &self.law {
            TimeLaw::Constant => {
                let m = self.coeffs.iter().fold(0.0, |m: f64, h| m.max(h.abs()));
                SupBound {
                    sampled: m,
                    certified: m,
                }
            }
            TimeLaw::Fourier { modes, .. } => {
                let width = 2 * modes + 1;
                let certified = self
                    .coeffs
                    .chunks(width)
                    .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
                    .fold(0.0, f64::max);
                let mut sampled: f64 = 0.0;
                let mut values = vec![0.0; self.tap_count()];
                for i in 0..SUP_GRID {
                    let s = i as f64 / (SUP_GRID - 1) as f64;
                    let basis = fourier_basis(*modes, s);
                    for (v, c) in values.iter_mut().zip(self.coeffs.chunks(width)) {
                        *v = c.iter().zip(&basis).map(|(a, b)| a * b).sum();
                    }
                    sampled = values.iter().fold(sampled, |m, v| m.max(v.abs()));
                }
                SupBound { sampled, certified }
            }
        }
    }

    pub fn to_record(&self) -> Record {
        let mut r = Record::new();
        r.set("layers", self.layers);
        r.set("channels", self.channels);
        r.set("taps", self.taps);
        match &self.law {
            TimeLaw::Constant => r.set("law", "constant"),
            TimeLaw::Fourier { modes, horizon } => {
                r.set("law", "fourier");
                r.set("modes", modes);
                r.set("horizon", horizon);
            }
        }
        r.set("coefficients", join(&self.coeffs));
        if let Some(seed) = self.seed {
            r.set("seed", seed);
        }
        r
    }

    pub fn from_record(r: &Record) -> Result<Self> {
        let layers = r.require("layers")?;
        let channels = r.require("channels")?;
        let taps = r.require("taps")?;
        let coeffs = r.parse_list::<f64>("coefficients")?.unwrap_or_default();
        let law: String = r.parse_or("law", "constant".to_string())?;
        let bank = match law.as_str() {
            "constant" => Self::constant(Filters::new(layers, channels, taps, coeffs)?),
            "fourier" => Self::fourier(
                layers,
                channels,
                taps,
                r.require("modes")?,
                r.require("horizon")?,
                coeffs,
            )?,
            other => return Err(Error::invalid(format!("unknown time law `{other}`"))),
        };
        Ok(match r.parse_opt::<u64>("seed")? {
            Some(seed) => bank.with_seed(seed),
            None => bank,
        })
    }
}

/// `(1, cos 2πs, …, cos 2πMs, sin 2πs, …, sin 2πMs)`.
fn fourier_basis(modes: usize, s: f64) -> Vec<f64> {
    let mut basis = vec![0.0; 2 * modes + 1];
    basis[0] = 1.0;
    for m in 1..=modes {
        let w = 2.0 * PI * m as f64 * s;
        basis[m] = w.cos();
        basis[modes + m] = w.sin();
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single_cosine(horizon: f64) -> FilterBank {
        FilterBank::fourier(1, 1, 1, 1, horizon, vec![0.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn fourier_law_values() {
        let bank = single_cosine(2.0);
        assert_eq!(bank.filters_at(0.0).unwrap().as_slice(), &[1.0]);
        assert!(bank.filters_at(0.5).unwrap().as_slice()[0].abs() < 1e-12);
        assert!(matches!(bank.filters_at(2.5), Err(Error::Domain { .. })));
        assert!(matches!(bank.filters_at(-0.1), Err(Error::Domain { .. })));
        let sup = bank.h_sup();
        assert!((sup.sampled - 1.0).abs() < 1e-6);
        assert_eq!(sup.certified, 1.0);
    }

    #[test]
    fn constant_law_values() {
        let f = Filters::new(1, 1, 2, vec![0.3, -0.7]).unwrap();
        let bank = FilterBank::constant(f.clone());
        assert_eq!(bank.filters_at(123.0).unwrap(), f);
        assert_eq!(bank.h_sup().certified, 0.7);
        let zero = FilterBank::constant(Filters::new(2, 1, 2, vec![0.0; 4]).unwrap());
        assert_eq!(zero.h_sup().sampled, 0.0);
    }

    #[test]
    fn record_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = FilterBank::random_constant(2, 2, 3, &mut rng).unwrap().with_seed(11);
        let text = c.to_record().to_text();
        assert_eq!(FilterBank::from_record(&Record::parse(&text).unwrap()).unwrap(), c);
        let f = FilterBank::random_fourier(2, 1, 2, 3, 1.5, &mut rng).unwrap();
        let text = f.to_record().to_text();
        assert_eq!(FilterBank::from_record(&Record::parse(&text).unwrap()).unwrap(), f);
        assert!(f.h_sup().sampled <= f.h_sup().certified);
        assert!(f.h_sup().certified <= 1.0);
    }

    #[test]
    fn tap_indexing_is_row_major() {
        let data: Vec<f64> = (0..2 * 2 * 2 * 3).map(f64::from).collect();
        let f = Filters::new(2, 2, 3, data).unwrap();
        assert_eq!(f.get(1, 0, 1, 2), (((2 + 0) * 2 + 1) * 3 + 2) as f64);
        assert!(Filters::new(1, 1, 2, vec![1.0]).is_err());
    }
}
