//! Sampling-theorem machinery: where to measure and how to rebuild a
//! continuous curve from the measurements.

use alloc::vec::Vec;

use crate::{Error, Result};

mod alias;
pub mod fft;
mod plan;
mod random;
mod shannon;
mod spectrum;

pub use alias::{alias_free_check, AliasVerdict, Collision};
pub use plan::{uniform_plan, uniform_plan_count};
pub use random::{random_plan, RandomSamplingPlan, SpacingDistribution};
pub use shannon::{shannon_reconstruct, sinc};
pub use spectrum::{
    analytic_bandwidth, analytic_spectrum, discrete_spectrum, effective_bandwidth,
    effective_bandwidth_with, BandwidthCriterion, SpectrumEstimate, SpectrumSource,
};

/// Support `[0, t̄]` with trusted window `[0, t̄ − ξ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub tbar: f64,
    pub xi: f64,
    /// Set when `ξ` is shorter than one sample spacing (or than `t̄/100` when
    /// the bandwidth is unknown): Gibbs ringing then reaches the trusted part.
    pub gibbs_exposed: bool,
}

impl Window {
    pub fn support(&self) -> (f64, f64) {
        (0.0, self.tbar)
    }

    pub fn trusted(&self) -> (f64, f64) {
        (0.0, self.tbar - self.xi)
    }

    pub fn in_support(&self, t: f64) -> bool {
        (0.0..=self.tbar).contains(&t)
    }

    pub fn in_trusted(&self, t: f64) -> bool {
        (0.0..=self.tbar - self.xi).contains(&t)
    }

    /// Zero-extension of `f` beyond the support.
    pub fn restrict(&self, f: impl Fn(f64) -> f64, t: f64) -> f64 {
        if self.in_support(t) {
            f(t)
        } else {
            0.0
        }
    }
}

pub fn restrict_and_window(tbar: f64, xi: f64, bandwidth_w: Option<f64>) -> Result<Window> {
    if !(tbar > 0.0 && tbar.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tbar",
            reason: "must be positive and finite",
        });
    }
    if !(xi > 0.0 && xi < tbar) {
        return Err(Error::InvalidParameter {
            name: "xi",
            reason: "must satisfy 0 < xi < tbar",
        });
    }
    let guard = match bandwidth_w {
        Some(w) if w > 0.0 => 1.0 / (2.0 * w),
        _ => tbar / 100.0,
    };
    Ok(Window {
        tbar,
        xi,
        gibbs_exposed: xi < guard,
    })
}

/// Samples of a function restricted to `[0, t̄]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub support: (f64, f64),
    pub trusted: (f64, f64),
    /// Cycles per unit time. When present the samples sit on `n/(2W)`.
    pub bandwidth_w: Option<f64>,
}

impl SampledFunction {
    pub fn new(
        times: Vec<f64>,
        values: Vec<f64>,
        tbar: f64,
        xi: f64,
        bandwidth_w: Option<f64>,
    ) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::LengthMismatch {
                left: times.len(),
                right: values.len(),
            });
        }
        let win = restrict_and_window(tbar, xi, bandwidth_w)?;
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter {
                name: "times",
                reason: "must be strictly increasing",
            });
        }
        let slack = 1e-12 * tbar.max(1.0);
        if times.iter().any(|&t| t < -slack || t > tbar + slack) {
            return Err(Error::InvalidParameter {
                name: "times",
                reason: "must lie inside the support",
            });
        }
        if let Some(w) = bandwidth_w {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "bandwidth_w",
                    reason: "must be positive and finite",
                });
            }
            let h = 1.0 / (2.0 * w);
            let tol = 1e-12 * h.max(1.0);
            let on_grid = times
                .iter()
                .all(|&t| (t - libm::round(t / h) * h).abs() <= tol * (1.0 + t / h));
            let uniform = times.windows(2).all(|p| (p[1] - p[0] - h).abs() <= tol * (1.0 + p[1] / h));
            if !(on_grid && uniform) {
                return Err(Error::InvalidParameter {
                    name: "times",
                    reason: "must be spaced 1/(2W) on the grid n/(2W)",
                });
            }
        }
        Ok(Self {
            times,
            values,
            support: win.support(),
            trusted: win.trusted(),
            bandwidth_w,
        })
    }

    pub fn in_trusted(&self, t: f64) -> bool {
        (self.trusted.0..=self.trusted.1).contains(&t)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}
