use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty data: need at least one row and one column")]
    EmptyData,
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("ragged row {row}: expected {expected} columns, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("too few observations for k: k = {k} requires more than {k} rows, found {n}")]
    TooFewObservations { n: usize, k: usize },
    #[error("sample too small for threshold estimation: need at least {min} scores, found {n}")]
    SampleTooSmall { n: usize, min: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("gap rank {rank} out of range: window {window} over {len} gaps")]
    GapRankOutOfRange {
        rank: usize,
        window: usize,
        len: usize,
    },
    #[error("sample of length {len} too short for {kmax} top spacings")]
    InsufficientSample { len: usize, kmax: usize },
    #[error("stream of length {len} shorter than window width {width}")]
    StreamTooShort { len: usize, width: usize },
    #[error("series of length {len} too short: need at least {min} points")]
    SeriesTooShort { len: usize, min: usize },
    #[error("window {window}: {source}")]
    Window {
        window: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn in_window(self, window: usize) -> Self {
        Error::Window {
            window,
            source: Box::new(self),
        }
    }
}
