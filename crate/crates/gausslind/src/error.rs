//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the numerical routines.
///
/// Every variant carries enough context to be reported verbatim by the
/// command-line front end, which maps [`Error::is_numerical`] failures to
/// exit status 3 and everything else to exit status 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A covariance block violates the Heisenberg bound `det γ ≥ 1`.
    #[error("covariance determinant {det} is below the Heisenberg bound 1")]
    BelowHeisenberg { det: f64 },

    /// A covariance block has a non-positive diagonal entry or is not finite.
    #[error("invalid covariance block: {0}")]
    InvalidCovariance(String),

    /// A 4×4 transformation fails the symplectic condition `T J Tᵀ = J`.
    #[error("matrix is not symplectic (max deviation {deviation:e})")]
    NonSymplectic { deviation: f64 },

    /// The squeezing amplitude is too small for the squeezing angle to be defined.
    #[error("squeezing amplitude r = {r:e} is too small for the squeezing angle to be defined")]
    DegenerateSqueezing { r: f64 },

    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The adaptive integrator could not meet the requested tolerance.
    #[error("ODE step failure at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },

    /// A right-hand side or state became non-finite.
    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },

    /// Adaptive quadrature did not converge.
    #[error("quadrature failed to reach tolerance {tol:e} (estimated error {estimate:e})")]
    QuadratureFailure { tol: f64, estimate: f64 },

    /// The incomplete Gamma function was requested at a pole.
    #[error("incomplete gamma pole: order a = {a} with z = 0")]
    PoleOrder { a: f64 },

    /// The incomplete Gamma function was requested on its branch cut.
    #[error("argument z = {re}{im:+}i lies on the branch cut (negative real axis)")]
    BranchCut { re: f64, im: f64 },

    /// A power-law index hits a singular denominator of a closed form.
    #[error("power-law index p = {p} is singular for {context}")]
    SingularExponent { p: f64, context: &'static str },

    /// A parameter set fails validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for failures of the numerics on otherwise valid input.
    ///
    /// Validation failures (bad parameters, domain violations, non-symplectic
    /// transformations) return `false`. A singular power-law index counts as
    /// numerical: it is a valid configuration at which a closed form breaks down.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepFailure { .. }
                | Error::NonFinite { .. }
                | Error::QuadratureFailure { .. }
                | Error::BelowHeisenberg { .. }
                | Error::DegenerateSqueezing { .. }
                | Error::SingularExponent { .. }
        )
    }

    /// Stable machine-readable identifier of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::BelowHeisenberg { .. } => "BelowHeisenberg",
            Error::InvalidCovariance(_) => "InvalidCovariance",
            Error::NonSymplectic { .. } => "NonSymplectic",
            Error::DegenerateSqueezing { .. } => "DegenerateSqueezing",
            Error::Domain(_) => "DomainError",
            Error::StepFailure { .. } => "StepFailure",
            Error::NonFinite { .. } => "NonFinite",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::PoleOrder { .. } => "PoleOrder",
            Error::BranchCut { .. } => "BranchCut",
            Error::SingularExponent { .. } => "SingularExponent",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}
