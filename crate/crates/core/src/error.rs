use thiserror::Error;

/// Errors raised by the algebra layer, the engines and the certificate reader.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("context error: {0}")]
    Context(String),

    #[error("shape error in {op}: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    Shape {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("unsupported ring: {0}")]
    UnsupportedRing(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("syntax error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("determinant {det} is not a unit")]
    NonUnit { det: String },

    #[error("homomorphism rejected: generator {generator} maps to {image}")]
    HomRejected { generator: String, image: String },

    #[error("rank undefined: {0}")]
    RankUndefined(String),

    #[error("lifter contract violated: {0}")]
    LifterContract(String),

    #[error("all lifting strategies failed: {}", .diagnostics.join("; "))]
    AllStrategiesFailed { diagnostics: Vec<String> },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn shape(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        Error::Shape {
            op,
            left_rows: left.0,
            left_cols: left.1,
            right_rows: right.0,
            right_cols: right.1,
        }
    }
}
