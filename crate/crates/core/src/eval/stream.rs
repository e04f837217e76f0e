use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::{seed, Error, Result};

/// Synthetic stream families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// Uniform features in `[-1, 1]`; class 1 iff `x[0] > 0`.
    Hyperplane,
    /// Like `Hyperplane`, with the label function complemented after every
    /// drift point.
    Inversion,
    /// Featureless 0/1 error stream; segment `i` (split at the drift points)
    /// has error rate `rates[i]`.
    Bernoulli,
}

impl Generator {
    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "hyperplane" => Ok(Self::Hyperplane),
            "inversion" => Ok(Self::Inversion),
            "bernoulli" => Ok(Self::Bernoulli),
            other => Err(Error::UnknownGenerator(other.into())),
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Self::Hyperplane => "hyperplane",
            Self::Inversion => "inversion",
            Self::Bernoulli => "bernoulli",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct StreamSpec {
    pub generator: String,
    pub seed: u64,
    pub length: usize,
    pub drift_points: Vec<usize>,
    /// Probability of class 1 for the hyperplane families.
    pub class_balance: f64,
    pub n_features: usize,
    /// Per-segment error rates for the Bernoulli family.
    pub rates: Vec<f64>,
}

impl Default for StreamSpec {
    fn default() -> Self {
        Self {
            generator: "hyperplane".into(),
            seed: 1,
            length: 1000,
            drift_points: Vec::new(),
            class_balance: 0.5,
            n_features: 2,
            rates: vec![0.2, 0.8],
        }
    }
}

impl StreamSpec {
    pub fn validate(&self) -> Result<Generator> {
        let generator = Generator::from_id(&self.generator)?;
        if self.drift_points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("drift points must be strictly increasing"));
        }
        if self.drift_points.last().is_some_and(|&d| d >= self.length) {
            return Err(Error::invalid("drift points must lie before the stream end"));
        }
        if !(0.0..=1.0).contains(&self.class_balance) {
            return Err(Error::invalid("class_balance must lie in [0, 1]"));
        }
        match generator {
            Generator::Bernoulli => {
                if self.rates.len() != self.drift_points.len() + 1 {
                    return Err(Error::invalid(format!(
                        "{} drift points need {} rates, got {}",
                        self.drift_points.len(),
                        self.drift_points.len() + 1,
                        self.rates.len()
                    )));
                }
                if self.rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
                    return Err(Error::invalid("rates must lie in [0, 1]"));
                }
            }
            _ if self.n_features == 0 => {
                return Err(Error::invalid("hyperplane streams need at least one feature"))
            }
            _ => {}
        }
        Ok(generator)
    }
}

/// Materialize a stream of `(features, label)` pairs.
pub fn gen_stream(spec: &StreamSpec) -> Result<Vec<(Vec<f64>, usize)>> {
    let generator = spec.validate()?;
    let mut rng = seed::rng(spec.seed);
    let mut out = Vec::with_capacity(spec.length);
    for t in 0..spec.length {
        let segment = spec.drift_points.iter().take_while(|&&d| d <= t).count();
        let item = match generator {
            Generator::Bernoulli => {
                let err = rng.random::<f64>() < spec.rates[segment];
                (Vec::new(), usize::from(err))
            }
            Generator::Hyperplane | Generator::Inversion => {
                let class = usize::from(rng.random::<f64>() < spec.class_balance);
                let u: f64 = rng.random();
                let mut x = vec![if class == 1 { 1.0 - u } else { -u }];
                x.extend((1..spec.n_features).map(|_| rng.random_range(-1.0..=1.0)));
                let flipped = generator == Generator::Inversion && segment % 2 == 1;
                (x, if flipped { 1 - class } else { class })
            }
        };
        out.push(item);
    }
    Ok(out)
}
