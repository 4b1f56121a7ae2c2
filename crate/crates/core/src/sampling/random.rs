use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma};

use crate::{Error, Result};

/// Law of the i.i.d. spacings `γₙ = tₙ − tₙ₋₁`, each with mean `h`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpacingDistribution {
    Exponential { h: f64 },
    /// Shape `k`, scale `h/k`.
    Gamma { k: f64, h: f64 },
    /// Every spacing equals `h`: ordinary uniform sampling.
    Delta { h: f64 },
    /// Spacings drawn uniformly from a recorded list.
    Empirical { spacings: Vec<f64> },
}

impl SpacingDistribution {
    pub fn mean(&self) -> f64 {
        match self {
            Self::Exponential { h } | Self::Gamma { h, .. } | Self::Delta { h } => *h,
            Self::Empirical { spacings } => {
                spacings.iter().sum::<f64>() / spacings.len().max(1) as f64
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |name| Error::InvalidParameter {
            name,
            reason: "must be positive and finite",
        };
        match self {
            Self::Exponential { h } | Self::Delta { h } if !(*h > 0.0 && h.is_finite()) => Err(bad("h")),
            Self::Gamma { h, .. } if !(*h > 0.0 && h.is_finite()) => Err(bad("h")),
            Self::Gamma { k, .. } if !(*k > 0.0 && k.is_finite()) => Err(bad("k")),
            Self::Empirical { spacings }
                if spacings.is_empty() || spacings.iter().any(|s| !(*s > 0.0 && s.is_finite())) =>
            {
                Err(bad("spacings"))
            }
            _ => Ok(()),
        }
    }

    /// `φ(ω) = E[e^{iωγ}]`.
    pub fn characteristic(&self, omega: f64) -> Result<Complex64> {
        let i = Complex64::i();
        match *self {
            Self::Exponential { h } => Ok(1.0 / (1.0 - i * omega * h)),
            Self::Gamma { k, h } => Ok((1.0 - i * omega * h / k).powf(-k)),
            Self::Delta { h } => Ok(Complex64::from_polar(1.0, omega * h)),
            Self::Empirical { .. } => Err(Error::UnknownCharacteristicFunction),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSamplingPlan {
    pub distribution: SpacingDistribution,
    /// `t₁ < t₂ < … < tₙ`, with `t₀ = 0` implied.
    pub times: Vec<f64>,
}

impl RandomSamplingPlan {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `tₙ = tₙ₋₁ + γₙ` for `n = 1..=count`. For `Delta` this is `tₙ = n·h` exactly.
pub fn random_plan(dist: &SpacingDistribution, count: usize, seed: u64) -> Result<RandomSamplingPlan> {
    dist.validate()?;
    if count == 0 {
        return Err(Error::InvalidParameter {
            name: "count",
            reason: "must be at least 1",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let times = match dist {
        SpacingDistribution::Delta { h } => (1..=count).map(|n| n as f64 * h).collect(),
        SpacingDistribution::Exponential { h } => {
            let d = Exp::new(1.0 / h).expect("validated");
            accumulate(count, || d.sample(&mut rng))
        }
        SpacingDistribution::Gamma { k, h } => {
            let d = Gamma::new(*k, h / k).expect("validated");
            accumulate(count, || d.sample(&mut rng))
        }
        SpacingDistribution::Empirical { spacings } => {
            accumulate(count, || spacings[rng.random_range(0..spacings.len())])
        }
    };
    Ok(RandomSamplingPlan {
        distribution: dist.clone(),
        times,
    })
}

fn accumulate(count: usize, mut draw: impl FnMut() -> f64) -> Vec<f64> {
    let mut t = 0.0;
    (0..count)
        .map(|_| {
            t += draw();
            t
        })
        .collect()
}
