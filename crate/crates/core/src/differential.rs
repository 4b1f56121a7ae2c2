//! Differential approach: pointwise coefficient estimates from cumulants
//! measured at nearby times.
//!
//! Each estimator is the cumulant equation solved for the unknown coefficient,
//! with the time derivative replaced by an incremental ratio:
//!
//! ```text
//! λ  =  δ + (⟨p⟩/m − d⟨q⟩/dt)/⟨q⟩           (position form)
//! λ  = −δ − (mω²⟨q⟩ + d⟨p⟩/dt)/⟨p⟩          (momentum form)
//! D_qq = (λ − δ)Δq² − σ/m + ½ dΔq²/dt
//! D_pp = (λ + δ)Δp² + mω²σ + ½ dΔp²/dt
//! D_qp = ½mω²Δq² − Δp²/(2m) + λσ + ½ dσ/dt
//! ```

use alloc::vec::Vec;

use crate::dynamics::{CumulantSource, GaussianState, HamiltonianParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// `(f(t+δt) − f(t))/δt`; first order.
    #[default]
    Forward,
    /// `(f(t+δt) − f(t−δt))/(2δt)`; second order. Below `t = δt` it falls back
    /// to the one-sided second-order stencil on `t, t+δt, t+2δt`.
    Centered,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDiffConfig {
    pub delta_t: f64,
    pub scheme: Scheme,
}

impl FiniteDiffConfig {
    pub fn new(delta_t: f64, scheme: Scheme) -> Result<Self> {
        if !(delta_t > 0.0 && delta_t.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "delta_t",
                reason: "must be positive and finite",
            });
        }
        Ok(Self { delta_t, scheme })
    }

    /// Offsets (in units of `δt`) of the states the scheme needs around `t`.
    fn offsets(&self, t: f64) -> &'static [f64] {
        match self.scheme {
            Scheme::Forward => &[0.0, 1.0],
            Scheme::Centered if t >= self.delta_t => &[-1.0, 0.0, 1.0],
            Scheme::Centered => &[0.0, 1.0, 2.0],
        }
    }
}

/// Time derivatives of the five cumulants.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentRates {
    pub mean_q: f64,
    pub mean_p: f64,
    pub var_q: f64,
    pub var_p: f64,
    pub cov_qp: f64,
}

fn as_array(s: &GaussianState) -> [f64; 5] {
    [s.mean_q, s.mean_p, s.var_q, s.var_p, s.cov_qp]
}

impl MomentRates {
    fn from_combination(states: &[GaussianState], weights: &[f64], scale: f64) -> Self {
        let mut r = [0.0; 5];
        for (s, w) in states.iter().zip(weights) {
            for (ri, v) in r.iter_mut().zip(as_array(s)) {
                *ri += w * v;
            }
        }
        Self {
            mean_q: r[0] / scale,
            mean_p: r[1] / scale,
            var_q: r[2] / scale,
            var_p: r[3] / scale,
            cov_qp: r[4] / scale,
        }
    }

    pub fn forward(at: &GaussianState, later: &GaussianState, dt: f64) -> Self {
        Self::from_combination(&[*at, *later], &[-1.0, 1.0], dt)
    }

    pub fn centered(earlier: &GaussianState, later: &GaussianState, dt: f64) -> Self {
        Self::from_combination(&[*earlier, *later], &[-1.0, 1.0], 2.0 * dt)
    }

    /// Second-order one-sided stencil from `t`, `t+δt`, `t+2δt`.
    pub fn one_sided(at: &GaussianState, next: &GaussianState, next2: &GaussianState, dt: f64) -> Self {
        Self::from_combination(&[*at, *next, *next2], &[-3.0, 4.0, -1.0], 2.0 * dt)
    }
}

/// Minimum first-moment magnitude for either `λ` variant to be formed.
pub const DENOMINATOR_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaEstimate {
    pub from_q: Option<f64>,
    pub from_p: Option<f64>,
    /// Mean of the available variants, each weighted by the square of its
    /// scaled denominator (the inverse of its error amplification squared).
    pub combined: f64,
}

pub fn lambda_expt_point(
    t: f64,
    state: &GaussianState,
    rates: &MomentRates,
    params: &HamiltonianParams,
) -> Result<LambdaEstimate> {
    let (m, w, d) = (params.m, params.omega, params.delta);
    let (q, p) = (state.mean_q, state.mean_p);
    let from_q = (q.abs() > DENOMINATOR_FLOOR).then(|| d + (p / m - rates.mean_q) / q);
    let from_p = (p.abs() > DENOMINATOR_FLOOR).then(|| -d - (m * w * w * q + rates.mean_p) / p);
    let mw = m * w;
    let wq = mw * q * q;
    let wp = p * p / mw;
    let combined = match (from_q, from_p) {
        (Some(a), Some(b)) => (wq * a + wp * b) / (wq + wp),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(Error::BothDenominatorsVanish { t }),
    };
    Ok(LambdaEstimate {
        from_q,
        from_p,
        combined,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionEstimate {
    pub dqq: f64,
    pub dpp: f64,
    pub dqp: f64,
    /// `2mω D_qq`.
    pub delta_qform: f64,
    /// `2 D_pp/(mω)`.
    pub delta_pform: f64,
}

impl DiffusionEstimate {
    /// Mean of the two `Δ` forms; they coincide for the Ohmic model.
    pub fn delta(&self) -> f64 {
        0.5 * (self.delta_qform + self.delta_pform)
    }

    pub fn delta_discrepancy(&self) -> f64 {
        (self.delta_qform - self.delta_pform).abs()
    }
}

pub fn diffusion_expt_point(
    state: &GaussianState,
    rates: &MomentRates,
    lambda: f64,
    params: &HamiltonianParams,
) -> DiffusionEstimate {
    let (m, w, d) = (params.m, params.omega, params.delta);
    let s = state;
    let dqq = (lambda - d) * s.var_q - s.cov_qp / m + 0.5 * rates.var_q;
    let dpp = (lambda + d) * s.var_p + m * w * w * s.cov_qp + 0.5 * rates.var_p;
    let dqp = 0.5 * m * w * w * s.var_q - s.var_p / (2.0 * m) + lambda * s.cov_qp + 0.5 * rates.cov_qp;
    let mw = m * w;
    DiffusionEstimate {
        dqq,
        dpp,
        dqp,
        delta_qform: 2.0 * mw * dqq,
        delta_pform: 2.0 * dpp / mw,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEstimate {
    pub t: f64,
    pub lambda: LambdaEstimate,
    pub diffusion: DiffusionEstimate,
}

/// Estimates from states already measured at the offsets the scheme needs.
/// `states` follow the order of the scheme's stencil: `[t, t+δt]` (forward),
/// `[t−δt, t, t+δt]` (centred) or `[t, t+δt, t+2δt]` (centred near `t = 0`).
pub fn estimate_point(
    t: f64,
    states: &[GaussianState],
    params: &HamiltonianParams,
    cfg: &FiniteDiffConfig,
) -> Result<PointEstimate> {
    let dt = cfg.delta_t;
    let needed = cfg.offsets(t).len();
    if states.len() != needed {
        return Err(Error::LengthMismatch {
            left: states.len(),
            right: needed,
        });
    }
    let (at, rates) = match (cfg.scheme, states) {
        (Scheme::Forward, [a, b]) => (*a, MomentRates::forward(a, b, dt)),
        (Scheme::Centered, [e, a, l]) if t >= dt => (*a, MomentRates::centered(e, l, dt)),
        (Scheme::Centered, [a, b, c]) => (*a, MomentRates::one_sided(a, b, c, dt)),
        _ => unreachable!("length checked above"),
    };
    let lambda = lambda_expt_point(t, &at, &rates, params)?;
    let diffusion = diffusion_expt_point(&at, &rates, lambda.combined, params);
    Ok(PointEstimate { t, lambda, diffusion })
}

/// Pointwise estimates on `plan_times`, in columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DifferentialSeries {
    pub times: Vec<f64>,
    pub lambda_q: Vec<Option<f64>>,
    pub lambda_p: Vec<Option<f64>>,
    pub lambda: Vec<f64>,
    pub dqq: Vec<f64>,
    pub dpp: Vec<f64>,
    pub dqp: Vec<f64>,
    pub delta_qform: Vec<f64>,
    pub delta_pform: Vec<f64>,
}

impl DifferentialSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `Δ` as the mean of the position and momentum forms.
    pub fn delta(&self) -> Vec<f64> {
        self.delta_qform
            .iter()
            .zip(&self.delta_pform)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    fn push(&mut self, e: &PointEstimate) {
        self.times.push(e.t);
        self.lambda_q.push(e.lambda.from_q);
        self.lambda_p.push(e.lambda.from_p);
        self.lambda.push(e.lambda.combined);
        self.dqq.push(e.diffusion.dqq);
        self.dpp.push(e.diffusion.dpp);
        self.dqp.push(e.diffusion.dqp);
        self.delta_qform.push(e.diffusion.delta_qform);
        self.delta_pform.push(e.diffusion.delta_pform);
    }
}

/// Measures every stencil the plan needs with a single request to `source`
/// and returns the estimates at `plan_times` (ascending, non-negative).
pub fn reconstruct_differential<S: CumulantSource + ?Sized>(
    source: &S,
    cfg: &FiniteDiffConfig,
    plan_times: &[f64],
) -> Result<DifferentialSeries> {
    let mut out = DifferentialSeries::default();
    if plan_times.is_empty() {
        return Ok(out);
    }
    if plan_times.iter().any(|&t| t < 0.0) || plan_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter {
            name: "plan_times",
            reason: "must be non-negative and ascending",
        });
    }
    let stencil_times = |t: f64| -> Vec<f64> {
        cfg.offsets(t).iter().map(|o| t + o * cfg.delta_t).collect()
    };
    let mut all: Vec<f64> = plan_times.iter().flat_map(|&t| stencil_times(t)).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    let measured = source.states_at(&all)?;
    let params = source.params();
    for &t in plan_times {
        let states: Vec<GaussianState> = stencil_times(t)
            .iter()
            .map(|tt| {
                let i = all.partition_point(|a| a < tt);
                measured[i]
            })
            .collect();
        out.push(&estimate_point(t, &states, &params, cfg)?);
    }
    Ok(out)
}
