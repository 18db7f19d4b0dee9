use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("particle number must be at least 1 (got {0})")]
    InvalidParticleNumber(usize),

    #[error("{what} requires an even particle number (got N = {n})")]
    OddParticleNumber { what: &'static str, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("rotation axis is not a unit vector (norm = {0})")]
    NonUnitDirection(f64),

    #[error("matrix is not Hermitian (max |H - H^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("coupling chi must be non-zero")]
    ZeroCoupling,

    #[error("mean spin vanishes; squeezing parameter undefined")]
    VanishingMeanSpin,

    #[error("phase undefined at pole (z = {0})")]
    PhaseUndefined(f64),

    #[error("trajectory reached the pole z = {z} at t = {t}")]
    PoleCrossing { t: f64, z: f64 },

    #[error("expected a {expected} map")]
    WrongMapKind { expected: &'static str },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("event {0} not bracketed in the time window")]
    NotBracketed(String),
}
