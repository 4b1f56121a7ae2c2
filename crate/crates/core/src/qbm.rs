//! Ohmic quantum Brownian motion in the weak-coupling, high-temperature limit
//! with a Lorentz-Drude cut-off. Used as the ground truth for every
//! reconstruction in the crate.
//!
//! Fourier transforms follow `F[g](s) = ∫₀^t̄ g(t) e^{ist} dt` for the functions
//! restricted to `[0, t̄]`. They are assembled from the elementary integrals
//! `∫₀^t̄ e^{zt} dt` and `∫₀^t̄ t e^{zt} dt` with complex `z`.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::dynamics::{HamiltonianParams, MecSet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmicParams {
    pub alpha: f64,
    pub omega_c: f64,
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidityWarning {
    /// Coupling above 0.3; the weak-coupling expansion is doubtful.
    StrongCoupling,
    /// Temperature below 2ħω/k_B; the high-temperature form is doubtful.
    LowTemperature,
}

impl OhmicParams {
    pub fn new(alpha: f64, omega_c: f64, temperature: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: "must be non-negative and finite",
            });
        }
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "omega_c",
                reason: "must be positive and finite",
            });
        }
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "temperature",
                reason: "must be non-negative and finite",
            });
        }
        Ok(Self {
            alpha,
            omega_c,
            temperature,
        })
    }

    pub fn warnings(&self) -> Vec<ValidityWarning> {
        let mut w = Vec::new();
        if self.alpha > 0.3 {
            w.push(ValidityWarning::StrongCoupling);
        }
        if self.temperature < 2.0 {
            w.push(ValidityWarning::LowTemperature);
        }
        w
    }
}

/// The two benchmark regimes, both with `α = 0.1` and `T = 10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// `ω_c = 10ω`.
    Markovian,
    /// `ω_c = 0.1ω`.
    NonMarkovian,
}

impl Preset {
    pub fn params(self) -> OhmicParams {
        let omega_c = match self {
            Preset::Markovian => 10.0,
            Preset::NonMarkovian => 0.1,
        };
        OhmicParams {
            alpha: 0.1,
            omega_c,
            temperature: 10.0,
        }
    }

    /// Support length `t̄ = 12/ω_c`.
    pub fn tbar(self) -> f64 {
        12.0 / self.params().omega_c
    }

    /// Guard band `ξ = 2/ω_c`; the trusted window is `[0, t̄ − ξ]`.
    pub fn xi(self) -> f64 {
        2.0 / self.params().omega_c
    }
}

/// Which benchmark function a transform or restriction refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficient {
    /// `Λ(t) = ∫₀ᵗ λ`.
    CapitalLambda,
    Lambda,
    /// `Δ(t) = 2mω D_qq`.
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OhmicModel {
    pub ohmic: OhmicParams,
    pub hamiltonian: HamiltonianParams,
}

impl OhmicModel {
    pub fn new(ohmic: OhmicParams, hamiltonian: HamiltonianParams) -> Self {
        Self { ohmic, hamiltonian }
    }

    pub fn preset(p: Preset) -> Self {
        Self::new(p.params(), HamiltonianParams::default())
    }

    fn wc(&self) -> f64 {
        self.ohmic.omega_c
    }

    fn w(&self) -> f64 {
        self.hamiltonian.omega
    }

    fn lambda_prefactor(&self) -> f64 {
        let (a, wc, w) = (self.ohmic.alpha, self.wc(), self.w());
        a * a * wc * wc * w / (wc * wc + w * w)
    }

    fn delta_prefactor(&self) -> f64 {
        let (a, wc, w) = (self.ohmic.alpha, self.wc(), self.w());
        2.0 * a * a * wc * wc * self.ohmic.temperature / (wc * wc + w * w)
    }

    pub fn lambda_theor(&self, t: f64) -> f64 {
        let (wc, w) = (self.wc(), self.w());
        let bracket = libm::cos(w * t) + (wc / w) * libm::sin(w * t);
        self.lambda_prefactor() * (1.0 - libm::exp(-wc * t) * bracket)
    }

    pub fn delta_theor(&self, t: f64) -> f64 {
        let (wc, w) = (self.wc(), self.w());
        let bracket = libm::cos(w * t) - (w / wc) * libm::sin(w * t);
        self.delta_prefactor() * (1.0 - libm::exp(-wc * t) * bracket)
    }

    pub fn capital_lambda_theor(&self, t: f64) -> f64 {
        let (a, wc, w) = (self.ohmic.alpha, self.wc(), self.w());
        let sum = wc * wc + w * w;
        let pref = a * a * wc * wc * w * w / (sum * sum);
        let osc = 2.0 * (wc / w) * libm::cos(w * t) + ((wc * wc - w * w) / (w * w)) * libm::sin(w * t);
        pref * (w * t * sum / (w * w) - 2.0 * wc / w + libm::exp(-wc * t) * osc)
    }

    /// `(λ_∞, Δ_∞)`.
    pub fn stationary_values(&self) -> (f64, f64) {
        (self.lambda_prefactor(), self.delta_prefactor())
    }

    pub fn theor(&self, c: Coefficient, t: f64) -> f64 {
        match c {
            Coefficient::CapitalLambda => self.capital_lambda_theor(t),
            Coefficient::Lambda => self.lambda_theor(t),
            Coefficient::Delta => self.delta_theor(t),
        }
    }

    /// The function restricted to `[0, t̄]` and zero elsewhere.
    pub fn tilde(&self, c: Coefficient, tbar: f64, t: f64) -> f64 {
        if (0.0..=tbar).contains(&t) {
            self.theor(c, t)
        } else {
            0.0
        }
    }

    pub fn fourier(&self, c: Coefficient, tbar: f64, s: f64) -> Complex64 {
        match c {
            Coefficient::CapitalLambda => self.fourier_capital_lambda(tbar, s),
            Coefficient::Lambda => self.fourier_lambda_small(tbar, s),
            Coefficient::Delta => self.fourier_delta(tbar, s),
        }
    }

    pub fn fourier_capital_lambda(&self, tbar: f64, s: f64) -> Complex64 {
        let (a, wc, w) = (self.ohmic.alpha, self.wc(), self.w());
        let sum = wc * wc + w * w;
        let pref = a * a * wc * wc * w * w / (sum * sum);
        let z = Complex64::new(0.0, s);
        let (ic, is) = damped_trig(wc, w, tbar, s);
        let secular = exp_moment1(z, tbar) * (w * sum / (w * w));
        let constant = exp_moment0(z, tbar) * (-2.0 * wc / w);
        (secular + constant + ic * (2.0 * wc / w) + is * ((wc * wc - w * w) / (w * w))) * pref
    }

    pub fn fourier_lambda_small(&self, tbar: f64, s: f64) -> Complex64 {
        let (wc, w) = (self.wc(), self.w());
        let (ic, is) = damped_trig(wc, w, tbar, s);
        let i0 = exp_moment0(Complex64::new(0.0, s), tbar);
        (i0 - ic - is * (wc / w)) * self.lambda_prefactor()
    }

    pub fn fourier_delta(&self, tbar: f64, s: f64) -> Complex64 {
        let (wc, w) = (self.wc(), self.w());
        let (ic, is) = damped_trig(wc, w, tbar, s);
        let i0 = exp_moment0(Complex64::new(0.0, s), tbar);
        (i0 - ic + is * (w / wc)) * self.delta_prefactor()
    }
}

impl MecSet for OhmicModel {
    fn lambda(&self, t: f64) -> f64 {
        self.lambda_theor(t)
    }
    fn dqq(&self, t: f64) -> f64 {
        self.delta_theor(t) / (2.0 * self.hamiltonian.m_omega())
    }
    fn dpp(&self, t: f64) -> f64 {
        self.hamiltonian.m_omega() * self.delta_theor(t) / 2.0
    }
    fn dqp(&self, _t: f64) -> f64 {
        0.0
    }
    fn lambda_integral(&self, t: f64) -> Option<f64> {
        Some(self.capital_lambda_theor(t))
    }
}

const SERIES_RADIUS: f64 = 1e-4;

/// `∫₀ᵀ e^{zt} dt`.
fn exp_moment0(z: Complex64, tbar: f64) -> Complex64 {
    let u = z * tbar;
    if u.norm() < SERIES_RADIUS {
        let series = 1.0 + u * (0.5 + u * (1.0 / 6.0 + u * (1.0 / 24.0 + u / 120.0)));
        return series * tbar;
    }
    (u.exp() - 1.0) / z
}

/// `∫₀ᵀ t e^{zt} dt`, via one integration by parts so that the leading terms do
/// not cancel near `z = 0`.
fn exp_moment1(z: Complex64, tbar: f64) -> Complex64 {
    let u = z * tbar;
    if u.norm() < SERIES_RADIUS {
        let series = 0.5 + u * (1.0 / 3.0 + u * (1.0 / 8.0 + u * (1.0 / 30.0 + u / 144.0)));
        return series * (tbar * tbar);
    }
    ((u.exp() * tbar) - exp_moment0(z, tbar)) / z
}

/// Transforms of `e^{−ω_c t} cos ωt` and `e^{−ω_c t} sin ωt` on `[0, t̄]`.
fn damped_trig(wc: f64, w: f64, tbar: f64, s: f64) -> (Complex64, Complex64) {
    let plus = exp_moment0(Complex64::new(-wc, w + s), tbar);
    let minus = exp_moment0(Complex64::new(-wc, s - w), tbar);
    let cos = (plus + minus) * 0.5;
    let sin = (plus - minus) / Complex64::new(0.0, 2.0);
    (cos, sin)
}
