//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix or vector contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian: max |A - A^dag| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary: max |U^dag U - I| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("state vector is not normalized: | ||psi|| - 1 | = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("resource bound must be positive, got k = {k}")]
    NonPositiveResource { k: f64 },

    #[error(
        "minimum-time solver failed to converge: last iterate {last_iterate}, \
         residual {residual:.3e}"
    )]
    SolverDiverged { last_iterate: f64, residual: f64 },

    #[error("initial and final states are parallel: no control needed (delta_t = 0)")]
    DegenerateProblem,

    #[error("states are not orthogonal: |<psi_i|psi>| = {overlap:.3e}")]
    NotOrthogonal { overlap: f64 },

    #[error("singular closed-form construction: sin(sqrt(k/2) delta_t) = {value:.3e}")]
    SingularConstruction { value: f64 },

    #[error("k coincides with tr(H0^2): the travel-time norm denominator vanishes")]
    SingularDenominator,

    #[error("integration norm drift {drift:.3e} exceeds 1e-6; increase the step count")]
    NormDrift { drift: f64 },

    #[error("quantization rule is undefined for a zero target energy")]
    ZeroTargetEnergy,

    #[error("invalid scenario config: {0}")]
    InvalidConfig(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
