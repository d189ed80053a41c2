use crate::error::{Error, Result};

/// Pointwise nonlinearity with `ρ(0) = 0` and Lipschitz constant at most 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Relu,
    LeakyRelu(f64),
    Tanh,
    Identity,
}

impl Activation {
    pub fn leaky_relu(slope: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&slope) {
            return Err(Error::invalid(format!("leaky slope must lie in [0, 1], got {slope}")));
        }
        Ok(Activation::LeakyRelu(slope))
    }

    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::LeakyRelu(s) => {
                if x >= 0.0 {
                    x
                } else {
                    s * x
                }
            }
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    /// `relu`, `tanh`, `identity`, `leaky_relu` (slope 0.01) or
    /// `leaky_relu:<slope>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            "identity" => Ok(Activation::Identity),
            "leaky_relu" => Ok(Activation::LeakyRelu(0.01)),
            other => match other.strip_prefix("leaky_relu:") {
                Some(slope) => Activation::leaky_relu(
                    slope
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad leaky slope `{slope}`")))?,
                ),
                None => Err(Error::invalid(format!("unknown activation `{other}`"))),
            },
        }
    }

    pub fn name(self) -> String {
        match self {
            Activation::Relu => "relu".into(),
            Activation::LeakyRelu(s) => format!("leaky_relu:{s}"),
            Activation::Tanh => "tanh".into(),
            Activation::Identity => "identity".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for act in [
            Activation::Relu,
            Activation::Tanh,
            Activation::Identity,
            Activation::LeakyRelu(0.2),
        ] {
            assert_eq!(Activation::parse(&act.name()).unwrap(), act);
        }
        assert!(Activation::parse("sigmoid").is_err());
        assert!(Activation::parse("leaky_relu:2").is_err());
    }

    #[test]
    fn fixes_zero() {
        for act in [Activation::Relu, Activation::Tanh, Activation::Identity, Activation::LeakyRelu(0.3)] {
            assert_eq!(act.apply(0.0), 0.0);
        }
        assert_eq!(Activation::LeakyRelu(0.5).apply(-2.0), -1.0);
    }
}
