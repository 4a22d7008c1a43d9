use thiserror::Error;

/// Errors raised anywhere in the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported site count {0} (expected 1, 7 or 19)")]
    UnsupportedSites(usize),

    #[error("invalid configuration for `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("covariance estimate needs at least one snapshot")]
    EmptySnapshots,

    #[error("subspace dimension {d} exceeds the admissible bound {bound}")]
    SubspaceDimension { d: usize, bound: usize },

    #[error("requested {k} multiplexed users but only {n} antennas are available")]
    TooManyUsers { k: usize, n: usize },

    #[error("slow fading gain of user {ue} is zero, cannot normalize its estimate")]
    ZeroSlowGain { ue: usize },

    #[error("precoding failed: Gram matrix condition number {condition:e} exceeds {bound:e}")]
    PrecodingFailure { condition: f64, bound: f64 },

    #[error("cell {cell} needs {needed} pilots but the codebook only has {available}")]
    PilotShortage {
        cell: usize,
        needed: usize,
        available: usize,
    },

    #[error("missing geometry: {0}")]
    MissingGeometry(String),

    #[error("cannot aggregate an empty set of drops")]
    EmptyDrops,

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("drop with seed {seed:#018x} failed: {source}")]
    Drop {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn in_drop(self, seed: u64) -> Self {
        match self {
            e @ Error::Drop { .. } => e,
            e => Error::Drop {
                seed,
                source: Box::new(e),
            },
        }
    }
}
