use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncation too small: dim {dim} leaves tail mass {tail_mass:.3e} (tolerance {tolerance:.1e})")]
    TruncationTooSmall {
        dim: usize,
        tail_mass: f64,
        tolerance: f64,
    },

    #[error("{what} = {value} out of range (must be < {limit})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("invalid {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("unsupported moment order {0} (supported: 1, 2)")]
    UnsupportedOrder(u32),

    #[error("closed form only holds for a single catalyst photon (got k = {0})")]
    SingleCatalystOnly(usize),

    #[error("closed-form denominator vanishes (|D| = {0:.3e}); success probability is zero here")]
    Pole(f64),

    #[error("r2 = {value} outside the locus domain ({lower}, {upper})")]
    Domain { value: f64, lower: f64, upper: f64 },

    #[error("g2 undefined for zero mean photon number")]
    UndefinedG2,

    #[error("photon-number block n_a + n_b = {total} exceeds truncation {dim}")]
    BlockExceedsTruncation { total: usize, dim: usize },

    #[error("heralding outcome has zero probability")]
    VanishingProbability,

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),

    #[error("{0}")]
    InvalidSpec(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical gate (truncation, poles, vanishing
    /// probabilities) as opposed to malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TruncationTooSmall { .. }
                | Error::Pole(_)
                | Error::BlockExceedsTruncation { .. }
                | Error::VanishingProbability
                | Error::UndefinedG2
        )
    }
}
