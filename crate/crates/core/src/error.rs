use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("ODE step size underflow at t = {t}")]
    SolverFailure { t: f64 },

    #[error("quadrature did not reach tolerance (estimated error {estimate:e})")]
    QuadratureFailure { estimate: f64 },

    #[error("closed-form integral of lambda(t) is not available for this coefficient set")]
    NoClosedFormIntegral,

    #[error("degenerate covariance: var_q*var_p - cov^2 = {determinant:e}")]
    DegenerateCovariance { determinant: f64 },

    #[error("non-positive tomogram variance {variance:e} on line (mu={mu}, nu={nu})")]
    NonPositiveLineVariance { mu: f64, nu: f64, variance: f64 },

    #[error("tomogram value {value:e} at X = {x} is not positive, its logarithm is undefined")]
    NonPositiveValue { x: f64, value: f64 },

    #[error("log-quadratic fit on line (mu={mu}, nu={nu}) is not concave (a = {curvature:e})")]
    NonConcaveFit { mu: f64, nu: f64, curvature: f64 },

    #[error("not enough tomogram points on line (mu={mu}, nu={nu}): {reason}")]
    InsufficientPoints {
        mu: f64,
        nu: f64,
        reason: &'static str,
    },

    #[error("both components of the rotated first-cumulant vector vanish at t = {t}")]
    VanishingComponent { t: f64 },

    #[error("Lambda from the two components disagrees by {discrepancy:e} at t = {t}")]
    InconsistentComponents { t: f64, discrepancy: f64 },

    #[error("both first moments vanish at t = {t}, lambda is not estimable there")]
    BothDenominatorsVanish { t: f64 },

    #[error("sampled function has no bandwidth, Shannon reconstruction is undefined")]
    NoBandwidth,

    #[error("spectrum is empty or identically zero")]
    EmptySpectrum,

    #[error("spectrum grid ends at |s| = {s_max} while still above the threshold")]
    SpectrumTooNarrow { s_max: f64 },

    #[error("grid has {points} points, at least {required} are needed")]
    GridTooCoarse { points: usize, required: usize },

    #[error("no closed-form characteristic function for this spacing distribution")]
    UnknownCharacteristicFunction,

    #[error("input slices have mismatched lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
}
