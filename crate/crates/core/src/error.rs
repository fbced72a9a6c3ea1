use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cutoff {r_cut} is below the nearest-neighbour distance {nearest}: no lattice shell enclosed")]
    EmptyShell { r_cut: f64, nearest: f64 },

    #[error("expected a unit vector, got norm {norm}")]
    NotUnitVector { norm: f64 },

    #[error("orientation basis is not orthonormal (max deviation {deviation:.3e})")]
    NonOrthonormalBasis { deviation: f64 },

    #[error("series did not converge after {iterations} refinements: partial value {partial}, error bound {error_bound:.3e}")]
    Convergence {
        partial: f64,
        error_bound: f64,
        iterations: usize,
    },

    #[error("transverse eigenvalues are not degenerate: {first} vs {second}")]
    Anisotropy { first: f64, second: f64 },

    #[error("operator relation `{relation}` violated by {deviation:.3e}")]
    AlgebraViolation { relation: String, deviation: f64 },

    #[error("requested size {requested} exceeds limit {limit}")]
    SizeLimit { requested: usize, limit: usize },

    #[error("soft mode: 1 + 4 g^2 f = {radicand} < 0, the normal phase is unstable")]
    SoftMode { radicand: f64 },

    #[error("coupling eta = {eta} is on the wrong side of the critical value {eta_c} for this phase")]
    PhaseDomain { eta: f64, eta_c: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("malformed quadratic form: {0}")]
    MalformedForm(String),

    #[error("dynamically unstable form: {0} complex normal-mode frequencies")]
    Unstable(usize),

    #[error("root bracketing failed:\n{0}")]
    Bracketing(String),

    #[error("{0}")]
    Domain(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("invalid data: {0}")]
    Validation(String),

    #[error("data set contains no rows")]
    EmptyData,

    #[error("nothing to plot: curve has no samples")]
    NoData,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by the caller's input rather than by the numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Parse { .. }
                | Error::Validation(_)
                | Error::EmptyData
                | Error::Io(_)
                | Error::Csv(_)
                | Error::Json(_)
                | Error::Shape(_)
                | Error::NotUnitVector { .. }
                | Error::NonOrthonormalBasis { .. }
                | Error::EmptyShell { .. }
                | Error::SizeLimit { .. }
        )
    }
}
