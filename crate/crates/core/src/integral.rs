//! Integral approach: `Λ(t)` from the rotated first cumulants and the diffusion
//! vector from the integrated second-cumulant equation.
//!
//! With `S̃(t) = e^{−tM}S(t)` the first-cumulant equation collapses to
//! `S̃(t) = e^{−Λ(t)} S̃(0)`, so either component gives `Λ`. For the second
//! cumulants, `X̃(t) = e^{2Λ}e^{−tR}X(t)` obeys `dX̃/dt = e^{2Λ}e^{−tR}D(t)`.

use alloc::vec::Vec;

use crate::dynamics::{exp_m, exp_r, DiffusionVector, GaussianState, HamiltonianParams};
use crate::linalg::{mat_vec, Vec2, Vec3};
use crate::{Error, Result};

/// `e^{−tM} S`.
pub fn s_tilde(s: &Vec2, params: &HamiltonianParams, t: f64) -> Vec2 {
    mat_vec(&exp_m(params, -t), s)
}

/// Thresholds for the two-component cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentPolicy {
    /// Both components are compared when each exceeds this magnitude.
    pub usable: f64,
    /// Maximum tolerated difference between the two `Λ` values.
    pub tolerance: f64,
    /// Below this magnitude a component is treated as zero.
    pub vanishing: f64,
}

impl Default for ComponentPolicy {
    fn default() -> Self {
        Self {
            usable: 1e-6,
            tolerance: 1e-6,
            vanishing: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LambdaIntegralSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// 1 or 2.
    pub component_used: Vec<u8>,
    /// `|Λ₁ − Λ₂|` where both components were usable.
    pub discrepancy: Vec<Option<f64>>,
}

/// `Λ(tᵢ) = ln(S̃ⱼ(0)/S̃ⱼ(tᵢ))`, with `j` the larger rotated component at `tᵢ`.
///
/// `states[0]` must be the state at `times[0] = 0`.
pub fn lambda_capital_expt(
    times: &[f64],
    states: &[GaussianState],
    params: &HamiltonianParams,
    policy: &ComponentPolicy,
) -> Result<LambdaIntegralSeries> {
    if times.len() != states.len() {
        return Err(Error::LengthMismatch {
            left: times.len(),
            right: states.len(),
        });
    }
    let mut out = LambdaIntegralSeries::default();
    let Some(&t0) = times.first() else {
        return Ok(out);
    };
    if t0 != 0.0 {
        return Err(Error::InvalidParameter {
            name: "times",
            reason: "series must start at t = 0",
        });
    }
    let s0 = states[0].to_vectors(params).s;

    for (&t, st) in times.iter().zip(states) {
        let s = s_tilde(&st.to_vectors(params).s, params, t);
        // Candidate Λ per component; a sign change means the component is
        // unusable rather than a complex logarithm.
        let per = |j: usize| -> Option<f64> {
            let ratio = s0[j] / s[j];
            (s[j].abs() >= policy.vanishing && s0[j].abs() >= policy.vanishing && ratio > 0.0)
                .then(|| libm::log(ratio))
        };
        let cand = [per(0), per(1)];
        let j = match (cand[0], cand[1]) {
            (None, None) => return Err(Error::VanishingComponent { t }),
            (Some(_), None) => 0,
            (None, Some(_)) => 1,
            (Some(_), Some(_)) => usize::from(s[1].abs() > s[0].abs()),
        };
        let both_usable = (0..2).all(|k| s[k].abs() > policy.usable && s0[k].abs() > policy.usable);
        let discrepancy = match (cand[0], cand[1]) {
            (Some(a), Some(b)) if both_usable => Some((a - b).abs()),
            _ => None,
        };
        if let Some(d) = discrepancy {
            if d > policy.tolerance {
                return Err(Error::InconsistentComponents { t, discrepancy: d });
            }
        }
        out.times.push(t);
        out.values.push(cand[j].expect("selected component is usable"));
        out.component_used.push(j as u8 + 1);
        out.discrepancy.push(discrepancy);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiffusionIntegralRecord {
    pub times: Vec<f64>,
    /// `X(t) − e^{tR}e^{−2Λ(t)}X(0)`.
    pub rhs: Vec<Vec3>,
    /// `e^{2Λ(t)}e^{−tR}X(t)`.
    pub xtilde: Vec<Vec3>,
    /// Finite-difference `dX̃/dt`.
    pub dtilde: Vec<Vec3>,
}

/// Derivative of sampled data on a possibly non-uniform grid: three-point
/// centred stencil inside, three-point one-sided stencils at the ends.
pub fn grid_derivative<const N: usize>(times: &[f64], values: &[[f64; N]]) -> Result<Vec<[f64; N]>> {
    if times.len() != values.len() {
        return Err(Error::LengthMismatch {
            left: times.len(),
            right: values.len(),
        });
    }
    let n = times.len();
    if n < 2 {
        return Err(Error::GridTooCoarse {
            points: n,
            required: 2,
        });
    }
    let combo = |w: [f64; 3], idx: [usize; 3]| {
        let mut d = [0.0; N];
        for c in 0..N {
            d[c] = w[0] * values[idx[0]][c] + w[1] * values[idx[1]][c] + w[2] * values[idx[2]][c];
        }
        d
    };
    if n == 2 {
        let h = times[1] - times[0];
        let mut d = [0.0; N];
        for c in 0..N {
            d[c] = (values[1][c] - values[0][c]) / h;
        }
        return Ok(alloc::vec![d, d]);
    }
    let mut out = Vec::with_capacity(n);
    // Left end.
    let (h1, h2) = (times[1] - times[0], times[2] - times[1]);
    out.push(combo(
        [-(2.0 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2), -h1 / (h2 * (h1 + h2))],
        [0, 1, 2],
    ));
    for i in 1..n - 1 {
        let (h1, h2) = (times[i] - times[i - 1], times[i + 1] - times[i]);
        out.push(combo(
            [-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))],
            [i - 1, i, i + 1],
        ));
    }
    // Right end.
    let (h1, h2) = (times[n - 2] - times[n - 3], times[n - 1] - times[n - 2]);
    out.push(combo(
        [h2 / (h1 * (h1 + h2)), -(h1 + h2) / (h1 * h2), (h1 + 2.0 * h2) / (h2 * (h1 + h2))],
        [n - 3, n - 2, n - 1],
    ));
    Ok(out)
}

pub fn diffusion_rhs(
    states: &[GaussianState],
    lambda: &LambdaIntegralSeries,
    params: &HamiltonianParams,
) -> Result<DiffusionIntegralRecord> {
    if states.len() != lambda.times.len() {
        return Err(Error::LengthMismatch {
            left: states.len(),
            right: lambda.times.len(),
        });
    }
    let Some(first) = states.first() else {
        return Ok(DiffusionIntegralRecord::default());
    };
    let x0 = first.to_vectors(params).x;
    let mut rhs = Vec::with_capacity(states.len());
    let mut xtilde = Vec::with_capacity(states.len());
    for ((&t, &big), st) in lambda.times.iter().zip(&lambda.values).zip(states) {
        let x = st.to_vectors(params).x;
        let fwd = mat_vec(&exp_r(params, t), &x0);
        let decay = libm::exp(-2.0 * big);
        rhs.push([x[0] - decay * fwd[0], x[1] - decay * fwd[1], x[2] - decay * fwd[2]]);
        let back = mat_vec(&exp_r(params, -t), &x);
        let grow = libm::exp(2.0 * big);
        xtilde.push([grow * back[0], grow * back[1], grow * back[2]]);
    }
    let dtilde = if states.len() >= 2 {
        grid_derivative(&lambda.times, &xtilde)?
    } else {
        alloc::vec![[f64::NAN; 3]]
    };
    Ok(DiffusionIntegralRecord {
        times: lambda.times.clone(),
        rhs,
        xtilde,
        dtilde,
    })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiffusionSeries {
    pub times: Vec<f64>,
    pub dqq: Vec<f64>,
    pub dpp: Vec<f64>,
    pub dqp: Vec<f64>,
}

/// `D(tᵢ) = e^{−2Λ(tᵢ)} e^{tᵢR} dX̃/dt(tᵢ)`, unscaled to `D_qq`, `D_pp`, `D_qp`.
pub fn recover_diffusion(
    record: &DiffusionIntegralRecord,
    lambda: &LambdaIntegralSeries,
    params: &HamiltonianParams,
) -> Result<DiffusionSeries> {
    if record.times.len() != lambda.values.len() {
        return Err(Error::LengthMismatch {
            left: record.times.len(),
            right: lambda.values.len(),
        });
    }
    let mut out = DiffusionSeries {
        times: record.times.clone(),
        ..DiffusionSeries::default()
    };
    for ((&t, &big), dt) in record.times.iter().zip(&lambda.values).zip(&record.dtilde) {
        let d = mat_vec(&exp_r(params, t), dt);
        let decay = libm::exp(-2.0 * big);
        let dv = DiffusionVector {
            d: [decay * d[0], decay * d[1], decay * d[2]],
        };
        let (dqq, dpp, dqp) = dv.coefficients(params);
        out.dqq.push(dqq);
        out.dpp.push(dpp);
        out.dqp.push(dqp);
    }
    Ok(out)
}
