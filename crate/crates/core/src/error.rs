use thiserror::Error;

/// Errors produced by the wavepacket algebra and its oracles.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// Inconsistent dimensions, malformed index sets, out-of-range arguments.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Q is singular or too ill-conditioned to factorize the width matrix.
    #[error("width factor singular: {0}")]
    SingularWidthMatrix(String),

    /// The pair of Gaussians makes the closed-form overlap ill-defined.
    #[error("degenerate Gaussian pair: {0}")]
    DegeneratePair(String),

    /// U†U is numerically singular; the inputs do not describe two valid
    /// Gaussians (the transform normal matrix is provably positive definite
    /// for valid pairs).
    #[error("near-degenerate ladder transform: {0}")]
    NearDegenerateTransform(String),

    /// Branch tracking could not decide between the two square-root branches.
    #[error("branch continuity violated: {0}; sample the trajectory more densely")]
    ContinuityViolation(String),

    /// Parameter propagation drifted off the symplectic manifold.
    #[error("integrator failure: {0}; reduce the time step")]
    IntegratorFailure(String),

    /// A quadrature did not reach the requested accuracy.
    #[error("tolerance not met: estimated error {estimate:.3e} > requested {requested:.3e}")]
    ToleranceNotMet { estimate: f64, requested: f64 },

    /// Grid propagation lost norm beyond the allowed drift.
    #[error("step size too large: {0}")]
    StepSize(String),

    /// The wavepacket carries significant probability near the grid boundary.
    #[error("grid box too small: {0}")]
    BoxTooSmall(String),
}

pub type Result<T> = std::result::Result<T, Error>;
