//! Symplectic tomograms of Gaussian states and the tomogram-to-cumulant
//! inversion.
//!
//! A tomogram is the marginal of the Wigner function on the line
//! `X − μq − νp = 0`. For a Gaussian state it is a 1D Gaussian in `X` with
//! mean `μ⟨q⟩ + ν⟨p⟩` and variance `μ²Δq² + ν²Δp² + 2μνσ(q,p)`, so three points
//! on a line pin down its mean and variance through a log-quadratic fit.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dynamics::GaussianState;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomographyLine {
    pub mu: f64,
    pub nu: f64,
}

impl TomographyLine {
    pub const POSITION: Self = Self { mu: 1.0, nu: 0.0 };
    pub const MOMENTUM: Self = Self { mu: 0.0, nu: 1.0 };
    pub const DIAGONAL: Self = Self {
        mu: FRAC_1_SQRT_2,
        nu: FRAC_1_SQRT_2,
    };

    pub fn new(mu: f64, nu: f64) -> Result<Self> {
        if !(mu.is_finite() && nu.is_finite()) || (mu == 0.0 && nu == 0.0) {
            return Err(Error::InvalidParameter {
                name: "line",
                reason: "(mu, nu) must be finite and not both zero",
            });
        }
        Ok(Self { mu, nu })
    }

    pub fn mean(&self, s: &GaussianState) -> f64 {
        self.mu * s.mean_q + self.nu * s.mean_p
    }

    pub fn variance(&self, s: &GaussianState) -> f64 {
        let (mu, nu) = (self.mu, self.nu);
        mu * mu * s.var_q + nu * nu * s.var_p + 2.0 * mu * nu * s.cov_qp
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TomogramSample {
    pub line: TomographyLine,
    pub x: f64,
    pub value: f64,
    pub sigma_noise: f64,
}

/// Abscissae to measure on each line.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPlan {
    pub lines: Vec<(TomographyLine, Vec<f64>)>,
}

impl MeasurementPlan {
    /// Three points `{−1, 0, 1}` per canonical line, for when nothing is known.
    pub fn pilot() -> Self {
        let xs = vec![-1.0, 0.0, 1.0];
        Self {
            lines: vec![
                (TomographyLine::POSITION, xs.clone()),
                (TomographyLine::MOMENTUM, xs.clone()),
                (TomographyLine::DIAGONAL, xs),
            ],
        }
    }

    /// Ten-point plan centred on a prior guess: `mean ± {0.5, 1.5}σ` on the two
    /// axis lines, and `mean − 0.5σ`, `mean + 1.5σ` on the diagonal. The
    /// diagonal pair is deliberately asymmetric so that the two-point variance
    /// formula stays well conditioned when the prior is exact.
    pub fn around(prior: &GaussianState) -> Self {
        let axis = |line: TomographyLine| {
            let m = line.mean(prior);
            let sd = libm::sqrt(line.variance(prior).max(f64::MIN_POSITIVE));
            (line, vec![m - 1.5 * sd, m - 0.5 * sd, m + 0.5 * sd, m + 1.5 * sd])
        };
        let diag = TomographyLine::DIAGONAL;
        let m = diag.mean(prior);
        let sd = libm::sqrt(diag.variance(prior).max(f64::MIN_POSITIVE));
        Self {
            lines: vec![
                axis(TomographyLine::POSITION),
                axis(TomographyLine::MOMENTUM),
                (diag, vec![m - 0.5 * sd, m + 1.5 * sd]),
            ],
        }
    }

    pub fn len(&self) -> usize {
        self.lines.iter().map(|(_, xs)| xs.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn wigner_at(state: &GaussianState, q: f64, p: f64) -> Result<f64> {
    let det = state.determinant();
    if !(det > 0.0) {
        return Err(Error::DegenerateCovariance { determinant: det });
    }
    let dq = q - state.mean_q;
    let dp = p - state.mean_p;
    let quad = (state.var_p * dq * dq - 2.0 * state.cov_qp * dq * dp + state.var_q * dp * dp) / det;
    Ok(libm::exp(-0.5 * quad) / (2.0 * PI * libm::sqrt(det)))
}

pub fn tomogram_at(state: &GaussianState, line: &TomographyLine, x: f64) -> Result<f64> {
    let var = line.variance(state);
    if !(var > 0.0) {
        return Err(Error::NonPositiveLineVariance {
            mu: line.mu,
            nu: line.nu,
            variance: var,
        });
    }
    let d = x - line.mean(state);
    Ok(libm::exp(-d * d / (2.0 * var)) / libm::sqrt(2.0 * PI * var))
}

/// Ideal tomogram values plus i.i.d. `N(0, noise_sigma²)` noise. Deterministic
/// for a given seed.
pub fn synthesize(
    state: &GaussianState,
    plan: &MeasurementPlan,
    noise_sigma: f64,
    seed: u64,
) -> Result<Vec<TomogramSample>> {
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "noise_sigma",
            reason: "must be non-negative and finite",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_sigma).expect("sigma validated above");
    let mut out = Vec::with_capacity(plan.len());
    for (line, xs) in &plan.lines {
        for &x in xs {
            let ideal = tomogram_at(state, line, x)?;
            let value = if noise_sigma > 0.0 {
                ideal + noise.sample(&mut rng)
            } else {
                ideal
            };
            out.push(TomogramSample {
                line: *line,
                x,
                value,
                sigma_noise: noise_sigma,
            });
        }
    }
    Ok(out)
}

/// Outcome of [`tc_invert`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub state: GaussianState,
    /// `var_q·var_p − cov² − 1/4` when it is below `−1e−9`. Usually a sign of
    /// tomogram noise rather than of an unphysical state.
    pub uncertainty_violation: Option<f64>,
}

struct LineFit {
    mean: f64,
    variance: f64,
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

fn log_values(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    points
        .iter()
        .map(|&(x, v)| {
            if v > 0.0 {
                Ok((x, libm::log(v)))
            } else {
                Err(Error::NonPositiveValue { x, value: v })
            }
        })
        .collect()
}

/// Least-squares fit of `ln ϖ = aX² + bX + c` (exact for three points).
fn fit_line(line: &TomographyLine, points: &[(f64, f64)]) -> Result<LineFit> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(Error::InsufficientPoints {
            mu: line.mu,
            nu: line.nu,
            reason: "at least three distinct abscissae are needed",
        });
    }
    let logs = log_values(points)?;
    let n = logs.len() as f64;
    let centre = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let scale = logs
        .iter()
        .map(|p| (p.0 - centre).abs())
        .fold(0.0, f64::max);

    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for &(x, y) in &logs {
        let u = (x - centre) / scale;
        let row = [u * u, u, 1.0];
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * y;
        }
    }
    let [au, bu, _] = solve3(ata, atb).ok_or(Error::InsufficientPoints {
        mu: line.mu,
        nu: line.nu,
        reason: "abscissae are degenerate",
    })?;
    let a = au / (scale * scale);
    let b = bu / scale;
    if !(a < 0.0) {
        return Err(Error::NonConcaveFit {
            mu: line.mu,
            nu: line.nu,
            curvature: a,
        });
    }
    Ok(LineFit {
        mean: centre - b / (2.0 * a),
        variance: -1.0 / (2.0 * a),
    })
}

/// Variance on a line whose mean is already known. Uses the log-ratio of two
/// points when possible and the peak height when a single point sits on the
/// mean.
fn variance_with_known_mean(line: &TomographyLine, points: &[(f64, f64)], mean: f64) -> Result<f64> {
    let logs = log_values(points)?;
    match logs.as_slice() {
        [] => Err(Error::InsufficientPoints {
            mu: line.mu,
            nu: line.nu,
            reason: "no points on the covariance line",
        }),
        [(x, y)] => {
            let d = x - mean;
            if d.abs() > 1e-12 * (1.0 + mean.abs()) {
                return Err(Error::InsufficientPoints {
                    mu: line.mu,
                    nu: line.nu,
                    reason: "a single point must lie on the line mean",
                });
            }
            let v = libm::exp(*y);
            Ok(1.0 / (2.0 * PI * v * v))
        }
        [(x1, y1), (x2, y2), ..] => {
            let d1 = (x1 - mean) * (x1 - mean);
            let d2 = (x2 - mean) * (x2 - mean);
            let dy = y1 - y2;
            let var = -(d1 - d2) / (2.0 * dy);
            if !(var > 0.0 && var.is_finite()) {
                return Err(Error::NonConcaveFit {
                    mu: line.mu,
                    nu: line.nu,
                    curvature: -dy / (d1 - d2),
                });
            }
            Ok(var)
        }
    }
}

/// Recovers the five cumulants from tomogram points on a position line
/// `(μ, 0)`, a momentum line `(0, ν)` and one mixed line.
///
/// The axis lines need three or more distinct abscissae. The mixed line only
/// supplies the covariance: with three or more points it is fitted like the
/// others, with two it reuses the already known line mean.
pub fn tc_invert(samples: &[TomogramSample]) -> Result<Inversion> {
    let mut groups: Vec<(TomographyLine, Vec<(f64, f64)>)> = Vec::new();
    for s in samples {
        match groups.iter_mut().find(|(l, _)| *l == s.line) {
            Some((_, pts)) => pts.push((s.x, s.value)),
            None => groups.push((s.line, vec![(s.x, s.value)])),
        }
    }
    let find = |pred: fn(&TomographyLine) -> bool, reason| {
        groups
            .iter()
            .find(|(l, _)| pred(l))
            .ok_or(Error::InsufficientPoints {
                mu: f64::NAN,
                nu: f64::NAN,
                reason,
            })
    };
    let (ql, qpts) = find(|l| l.nu == 0.0, "no position line (mu, 0)")?;
    let (pl, ppts) = find(|l| l.mu == 0.0, "no momentum line (0, nu)")?;
    let (dl, dpts) = find(|l| l.mu != 0.0 && l.nu != 0.0, "no mixed line")?;

    let qf = fit_line(ql, qpts)?;
    let pf = fit_line(pl, ppts)?;
    let mean_q = qf.mean / ql.mu;
    let var_q = qf.variance / (ql.mu * ql.mu);
    let mean_p = pf.mean / pl.nu;
    let var_p = pf.variance / (pl.nu * pl.nu);

    let line_var = if dpts.len() >= 3 {
        fit_line(dl, dpts)?.variance
    } else {
        let m = dl.mu * mean_q + dl.nu * mean_p;
        variance_with_known_mean(dl, dpts, m)?
    };
    let cov_qp = (line_var - dl.mu * dl.mu * var_q - dl.nu * dl.nu * var_p) / (2.0 * dl.mu * dl.nu);

    let state = GaussianState {
        mean_q,
        mean_p,
        var_q,
        var_p,
        cov_qp,
    };
    let excess = state.uncertainty_excess();
    Ok(Inversion {
        state,
        uncertainty_violation: (excess < -crate::dynamics::UNCERTAINTY_TOLERANCE).then_some(excess),
    })
}
