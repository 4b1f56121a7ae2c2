//! Cumulant dynamics of a Gaussian probe under a GSP master equation.
//!
//! In the scaled variables
//!
//! ```text
//! S = (√(mω) ⟨q⟩, ⟨p⟩/√(mω)),   X = (mω Δq², Δp²/(mω), σ(q,p))
//! ```
//!
//! the dynamics is `dS/dt = (M − λ)S` and `dX/dt = (R − 2λ)X + D`. Both drift
//! matrices have closed-form exponentials, so an exact propagator exists
//! whenever `Λ(t) = ∫₀ᵗ λ` does. The Runge-Kutta path is kept as an independent
//! check of that propagator.

use alloc::vec::Vec;

use crate::linalg::{mat_add_scaled, mat_mul, mat_vec, Mat2, Mat3, Vec2, Vec3, IDENTITY2, IDENTITY3};
use crate::ode;
use crate::quadrature::{self, QuadOptions};
use crate::{Error, Result};

pub use crate::ode::SolverOptions;

/// Tolerance on `var_q·var_p − cov² ≥ 1/4` before a violation is reported.
pub const UNCERTAINTY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianParams {
    pub m: f64,
    pub omega: f64,
    pub delta: f64,
}

impl Default for HamiltonianParams {
    fn default() -> Self {
        Self {
            m: 1.0,
            omega: 1.0,
            delta: 0.0,
        }
    }
}

impl HamiltonianParams {
    pub fn new(m: f64, omega: f64, delta: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "m",
                reason: "must be positive and finite",
            });
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: "must be positive and finite",
            });
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "delta",
                reason: "must be finite",
            });
        }
        Ok(Self { m, omega, delta })
    }

    /// `η² = δ² − ω²`; negative values select the oscillatory branch.
    pub fn eta_squared(&self) -> f64 {
        self.delta * self.delta - self.omega * self.omega
    }

    pub(crate) fn m_omega(&self) -> f64 {
        self.m * self.omega
    }
}

/// Pointwise values of the four master-equation coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MecValues {
    pub lambda: f64,
    pub dqq: f64,
    pub dpp: f64,
    pub dqp: f64,
}

/// The coefficients `λ(t)`, `D_qq(t)`, `D_pp(t)`, `D_qp(t)`.
pub trait MecSet {
    fn lambda(&self, t: f64) -> f64;
    fn dqq(&self, t: f64) -> f64;
    fn dpp(&self, t: f64) -> f64;
    fn dqp(&self, t: f64) -> f64;

    /// `Λ(t) = ∫₀ᵗ λ`, when known in closed form.
    fn lambda_integral(&self, _t: f64) -> Option<f64> {
        None
    }

    fn values(&self, t: f64) -> MecValues {
        MecValues {
            lambda: self.lambda(t),
            dqq: self.dqq(t),
            dpp: self.dpp(t),
            dqp: self.dqp(t),
        }
    }
}

impl<T: MecSet + ?Sized> MecSet for &T {
    fn lambda(&self, t: f64) -> f64 {
        (**self).lambda(t)
    }
    fn dqq(&self, t: f64) -> f64 {
        (**self).dqq(t)
    }
    fn dpp(&self, t: f64) -> f64 {
        (**self).dpp(t)
    }
    fn dqp(&self, t: f64) -> f64 {
        (**self).dqp(t)
    }
    fn lambda_integral(&self, t: f64) -> Option<f64> {
        (**self).lambda_integral(t)
    }
}

/// Time-independent coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConstantMecs(pub MecValues);

impl MecSet for ConstantMecs {
    fn lambda(&self, _t: f64) -> f64 {
        self.0.lambda
    }
    fn dqq(&self, _t: f64) -> f64 {
        self.0.dqq
    }
    fn dpp(&self, _t: f64) -> f64 {
        self.0.dpp
    }
    fn dqp(&self, _t: f64) -> f64 {
        self.0.dqp
    }
    fn lambda_integral(&self, t: f64) -> Option<f64> {
        Some(self.0.lambda * t)
    }
}

/// Coefficients given as closures, mainly for tests and user-supplied models.
pub struct FnMecs<L, Q, P, C> {
    pub lambda: L,
    pub dqq: Q,
    pub dpp: P,
    pub dqp: C,
}

impl<L, Q, P, C> MecSet for FnMecs<L, Q, P, C>
where
    L: Fn(f64) -> f64,
    Q: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
    C: Fn(f64) -> f64,
{
    fn lambda(&self, t: f64) -> f64 {
        (self.lambda)(t)
    }
    fn dqq(&self, t: f64) -> f64 {
        (self.dqq)(t)
    }
    fn dpp(&self, t: f64) -> f64 {
        (self.dpp)(t)
    }
    fn dqp(&self, t: f64) -> f64 {
        (self.dqp)(t)
    }
}

/// First and second cumulants of the probe (`ħ = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub mean_q: f64,
    pub mean_p: f64,
    pub var_q: f64,
    pub var_p: f64,
    pub cov_qp: f64,
}

impl GaussianState {
    pub fn new(mean_q: f64, mean_p: f64, var_q: f64, var_p: f64, cov_qp: f64) -> Result<Self> {
        let s = Self {
            mean_q,
            mean_p,
            var_q,
            var_p,
            cov_qp,
        };
        let all_finite = [mean_q, mean_p, var_q, var_p, cov_qp]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParameter {
                name: "state",
                reason: "cumulants must be finite",
            });
        }
        if !(var_q > 0.0 && var_p > 0.0) {
            return Err(Error::InvalidParameter {
                name: "state",
                reason: "variances must be positive",
            });
        }
        Ok(s)
    }

    /// Minimum-uncertainty state of the unit oscillator displaced to `(q, p)`.
    pub fn coherent(mean_q: f64, mean_p: f64) -> Self {
        Self {
            mean_q,
            mean_p,
            var_q: 0.5,
            var_p: 0.5,
            cov_qp: 0.0,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.var_q * self.var_p - self.cov_qp * self.cov_qp
    }

    /// `var_q·var_p − cov² − 1/4`; negative means the state is unphysical.
    pub fn uncertainty_excess(&self) -> f64 {
        self.determinant() - 0.25
    }

    pub fn check_uncertainty(&self, t: f64) -> Option<Diagnostic> {
        let excess = self.uncertainty_excess();
        (excess < -UNCERTAINTY_TOLERANCE).then_some(Diagnostic::UncertaintyViolation { t, excess })
    }

    pub fn to_vectors(&self, params: &HamiltonianParams) -> CumulantVectors {
        let mw = params.m_omega();
        let r = libm::sqrt(mw);
        CumulantVectors {
            s: [r * self.mean_q, self.mean_p / r],
            x: [mw * self.var_q, self.var_p / mw, self.cov_qp],
        }
    }

    pub fn from_vectors(v: &CumulantVectors, params: &HamiltonianParams) -> Self {
        let mw = params.m_omega();
        let r = libm::sqrt(mw);
        Self {
            mean_q: v.s[0] / r,
            mean_p: v.s[1] * r,
            var_q: v.x[0] / mw,
            var_p: v.x[1] * mw,
            cov_qp: v.x[2],
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            self.mean_q - other.mean_q,
            self.mean_p - other.mean_p,
            self.var_q - other.var_q,
            self.var_p - other.var_p,
            self.cov_qp - other.cov_qp,
        ]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Dimensionless cumulants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantVectors {
    pub s: Vec2,
    pub x: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrices {
    pub m2: Mat2,
    pub r3: Mat3,
}

impl DriftMatrices {
    pub fn new(params: &HamiltonianParams) -> Self {
        let (d, w) = (params.delta, params.omega);
        Self {
            m2: [[d, w], [-w, -d]],
            r3: [
                [2.0 * d, 0.0, 2.0 * w],
                [0.0, -2.0 * d, -2.0 * w],
                [-w, w, 0.0],
            ],
        }
    }
}

/// `D = 2(mω D_qq, D_pp/(mω), D_qp)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionVector {
    pub d: Vec3,
}

impl DiffusionVector {
    pub fn from_coefficients(dqq: f64, dpp: f64, dqp: f64, params: &HamiltonianParams) -> Self {
        let mw = params.m_omega();
        Self {
            d: [2.0 * mw * dqq, 2.0 * dpp / mw, 2.0 * dqp],
        }
    }

    pub fn at<M: MecSet + ?Sized>(mecs: &M, t: f64, params: &HamiltonianParams) -> Self {
        Self::from_coefficients(mecs.dqq(t), mecs.dpp(t), mecs.dqp(t), params)
    }

    /// Inverse map, returning `(D_qq, D_pp, D_qp)`.
    pub fn coefficients(&self, params: &HamiltonianParams) -> (f64, f64, f64) {
        let mw = params.m_omega();
        (self.d[0] / (2.0 * mw), self.d[1] * mw / 2.0, self.d[2] / 2.0)
    }
}

/// Returns `(cosh ηt, sinh(ηt)/η)`, continued analytically to `η² < 0`.
fn hyperbolic_pair(eta2: f64, t: f64) -> (f64, f64) {
    let x = eta2 * t * t;
    if x.abs() < 1e-12 {
        // |ηt| < 1e-6: three terms of each series.
        let c = 1.0 + x / 2.0 + x * x / 24.0;
        let s = t * (1.0 + x / 6.0 + x * x / 120.0);
        return (c, s);
    }
    if eta2 > 0.0 {
        let eta = libm::sqrt(eta2);
        (libm::cosh(eta * t), libm::sinh(eta * t) / eta)
    } else {
        let big_omega = libm::sqrt(-eta2);
        (libm::cos(big_omega * t), libm::sin(big_omega * t) / big_omega)
    }
}

/// `e^{tM} = cosh(ηt) I + sinh(ηt)/η M`.
pub fn exp_m(params: &HamiltonianParams, t: f64) -> Mat2 {
    let (c, s) = hyperbolic_pair(params.eta_squared(), t);
    let m = DriftMatrices::new(params).m2;
    mat_add_scaled(&mat_add_scaled(&[[0.0; 2]; 2], &IDENTITY2, c), &m, s)
}

/// `e^{tR}`. Since `R³ = 4η²R`, the exponential is
/// `I + sinh(2ηt)/(2η) R + (cosh(2ηt) − 1)/(4η²) R²`, rewritten through the
/// half-angle pair to avoid cancellation.
pub fn exp_r(params: &HamiltonianParams, t: f64) -> Mat3 {
    let (c, s) = hyperbolic_pair(params.eta_squared(), t);
    let r = DriftMatrices::new(params).r3;
    let r2 = mat_mul(&r, &r);
    mat_add_scaled(&mat_add_scaled(&IDENTITY3, &r, c * s), &r2, 0.5 * s * s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Diagnostic {
    /// The state at `t` breaks the Schrödinger-Robertson bound by `-excess`.
    UncertaintyViolation { t: f64, excess: f64 },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<GaussianState>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Trajectory {
    fn from_states(times: &[f64], states: Vec<GaussianState>) -> Self {
        let diagnostics = times
            .iter()
            .zip(&states)
            .filter_map(|(&t, s)| s.check_uncertainty(t))
            .collect();
        Self {
            times: times.to_vec(),
            states,
            diagnostics,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    match grid.first() {
        None => Ok(()),
        Some(&t0) if t0 != 0.0 => Err(Error::InvalidParameter {
            name: "grid",
            reason: "must start at t = 0",
        }),
        Some(_) if grid.windows(2).any(|w| !(w[1] > w[0])) => Err(Error::InvalidParameter {
            name: "grid",
            reason: "must be strictly increasing",
        }),
        Some(_) => Ok(()),
    }
}

/// Integrates the cumulant equations numerically on `grid` (must start at 0).
pub fn evolve_cumulants<M: MecSet + ?Sized>(
    init: &GaussianState,
    mecs: &M,
    params: &HamiltonianParams,
    grid: &[f64],
    opts: &SolverOptions,
) -> Result<Trajectory> {
    validate_grid(grid)?;
    let drift = DriftMatrices::new(params);
    let v0 = init.to_vectors(params);
    let y0 = [v0.s[0], v0.s[1], v0.x[0], v0.x[1], v0.x[2]];
    let rhs = |t: f64, y: &[f64; 5]| {
        let lam = mecs.lambda(t);
        let d = DiffusionVector::at(mecs, t, params).d;
        let ds = mat_vec(&drift.m2, &[y[0], y[1]]);
        let dx = mat_vec(&drift.r3, &[y[2], y[3], y[4]]);
        [
            ds[0] - lam * y[0],
            ds[1] - lam * y[1],
            dx[0] - 2.0 * lam * y[2] + d[0],
            dx[1] - 2.0 * lam * y[3] + d[1],
            dx[2] - 2.0 * lam * y[4] + d[2],
        ]
    };
    let ys = ode::integrate(rhs, y0, grid, opts)?;
    let states = ys
        .iter()
        .map(|y| {
            GaussianState::from_vectors(
                &CumulantVectors {
                    s: [y[0], y[1]],
                    x: [y[2], y[3], y[4]],
                },
                params,
            )
        })
        .collect();
    Ok(Trajectory::from_states(grid, states))
}

/// Closed-form propagation, interval by interval:
///
/// ```text
/// S(t₁) = e^{−(Λ₁−Λ₀)} e^{(t₁−t₀)M} S(t₀)
/// X(t₁) = e^{−2(Λ₁−Λ₀)} e^{(t₁−t₀)R} X(t₀) + ∫ e^{−2(Λ₁−Λ(t′))} e^{(t₁−t′)R} D(t′) dt′
/// ```
///
/// The remaining integral is done with adaptive Gauss-Kronrod quadrature.
pub fn propagate_exact<M: MecSet + ?Sized>(
    init: &GaussianState,
    mecs: &M,
    params: &HamiltonianParams,
    grid: &[f64],
    quad: &QuadOptions,
) -> Result<Trajectory> {
    validate_grid(grid)?;
    let big_lambda = |t: f64| mecs.lambda_integral(t).ok_or(Error::NoClosedFormIntegral);
    let mut v = init.to_vectors(params);
    let mut states = Vec::with_capacity(grid.len());
    if !grid.is_empty() {
        states.push(*init);
    }
    for w in grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let l0 = big_lambda(t0)?;
        let l1 = big_lambda(t1)?;
        let h = t1 - t0;
        let decay = libm::exp(-(l1 - l0));
        let em = exp_m(params, h);
        let s = mat_vec(&em, &v.s);
        let er = exp_r(params, h);
        let x_hom = mat_vec(&er, &v.x);

        let mut failed = false;
        let integral = quadrature::integrate_vec(
            |tp| {
                let Some(lp) = mecs.lambda_integral(tp) else {
                    failed = true;
                    return [0.0; 3];
                };
                let weight = libm::exp(-2.0 * (l1 - lp));
                let d = DiffusionVector::at(mecs, tp, params).d;
                let g = mat_vec(&exp_r(params, t1 - tp), &d);
                [weight * g[0], weight * g[1], weight * g[2]]
            },
            t0,
            t1,
            quad,
        )?;
        if failed {
            return Err(Error::NoClosedFormIntegral);
        }
        let d2 = decay * decay;
        v = CumulantVectors {
            s: [decay * s[0], decay * s[1]],
            x: [
                d2 * x_hom[0] + integral.value[0],
                d2 * x_hom[1] + integral.value[1],
                d2 * x_hom[2] + integral.value[2],
            ],
        };
        states.push(GaussianState::from_vectors(&v, params));
    }
    Ok(Trajectory::from_states(grid, states))
}

/// Anything that can report the probe cumulants at requested times: an exact
/// model, an ODE run, or a simulated tomography experiment.
pub trait CumulantSource {
    fn params(&self) -> HamiltonianParams;
    /// `times` need not start at zero but must be sorted ascending.
    fn states_at(&self, times: &[f64]) -> Result<Vec<GaussianState>>;
}

/// Noise-free cumulants computed from a known coefficient set.
pub struct OracleSource<M> {
    pub init: GaussianState,
    pub mecs: M,
    pub params: HamiltonianParams,
    pub solver: SolverOptions,
    pub quad: QuadOptions,
}

impl<M: MecSet> OracleSource<M> {
    pub fn new(init: GaussianState, mecs: M, params: HamiltonianParams) -> Self {
        Self {
            init,
            mecs,
            params,
            solver: SolverOptions::default(),
            // Tight enough that finite differences over δt ≈ 1e−4 see no
            // quadrature noise.
            quad: QuadOptions {
                abs_tol: 1e-15,
                rel_tol: 1e-13,
                max_subdivisions: 4000,
            },
        }
    }
}

impl<M: MecSet> CumulantSource for OracleSource<M> {
    fn params(&self) -> HamiltonianParams {
        self.params
    }

    fn states_at(&self, times: &[f64]) -> Result<Vec<GaussianState>> {
        // Prepend t = 0 and drop duplicates so the grid is strictly increasing.
        let mut grid = Vec::with_capacity(times.len() + 1);
        grid.push(0.0);
        for &t in times {
            if t < 0.0 {
                return Err(Error::InvalidParameter {
                    name: "times",
                    reason: "must be non-negative",
                });
            }
            if t > *grid.last().unwrap() {
                grid.push(t);
            } else if t < *grid.last().unwrap() {
                return Err(Error::InvalidParameter {
                    name: "times",
                    reason: "must be sorted ascending",
                });
            }
        }
        let traj = if self.mecs.lambda_integral(0.0).is_some() {
            propagate_exact(&self.init, &self.mecs, &self.params, &grid, &self.quad)?
        } else {
            evolve_cumulants(&self.init, &self.mecs, &self.params, &grid, &self.solver)?
        };
        times
            .iter()
            .map(|t| {
                let i = grid.partition_point(|g| g < t);
                Ok(traj.states[i])
            })
            .collect()
    }
}
