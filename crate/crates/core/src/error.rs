use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown problem id `{id}` (valid ids: {valid})")]
    CatalogMiss { id: String, valid: String },

    #[error("oracle fault: {0}")]
    OracleFault(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The declared exponent is too large: the Hölder quotient keeps growing
    /// as the sampled pairs shrink.
    #[error("exponent mismatch: Hölder quotient for nu = {nu} diverges under refinement (near {location:?})")]
    ExponentMismatch { nu: f64, location: Vec<f64> },

    #[error("bracket too small: refined minimizer {minimizer:?} sits on the bracket boundary (radius {radius})")]
    BracketTooSmall { minimizer: Vec<f64>, radius: f64 },

    /// The subproblem model dropped below the divergence threshold along `ray`.
    #[error("subproblem unbounded below along ray {ray:?} (model value {value})")]
    ProxUnbounded { ray: Vec<f64>, value: f64 },

    #[error("envelope undefined at {x:?}: model unbounded below along ray {ray:?}")]
    EnvelopeUndefined { x: Vec<f64>, ray: Vec<f64> },

    #[error("missing capability: {0}")]
    Capability(String),

    #[error("lemma violation: sampled ratio {ratio} <= 0 at a = {a:?}, b = {b:?}")]
    LemmaViolation { ratio: f64, a: Vec<f64>, b: Vec<f64> },

    #[error("gamma too large: {gamma} >= 4^(1-p) * gamma_hat = {limit}")]
    GammaTooLarge { gamma: f64, limit: f64 },

    #[error("prox-bound violation: {0}")]
    ProxBoundViolation(String),

    #[error("point {0:?} is outside the domain of the objective")]
    Domain(Vec<f64>),

    #[error("missing dependency: {0}")]
    Dependency(String),
}
