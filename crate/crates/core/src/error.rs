use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ring axiom `{axiom}` fails at witness {witness:?}")]
    RingAxiom { axiom: &'static str, witness: (u8, u8, u8) },

    #[error("size limit exceeded: predicted {predicted} elements, bound is {bound}")]
    SizeLimit { predicted: u64, bound: u64 },

    #[error("side mismatch: expected {expected:?}, got {got:?}")]
    SideMismatch { expected: crate::module::Side, got: crate::module::Side },

    #[error("ring mismatch: `{left}` vs `{right}`")]
    RingMismatch { left: String, right: String },

    #[error("relation {index} maps to a nonzero element")]
    RelationViolated { index: usize },

    #[error("morphisms are not composable at position {position}")]
    NotComposable { position: usize },

    #[error("ring `{label}` has no declared representation basis")]
    UnsupportedRing { label: String },

    #[error("search bound exhausted: {what} (bound {bound})")]
    BoundExceeded { what: String, bound: usize },

    #[error("internal consistency fault: {0}")]
    Internal(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("error at line {line}: {source}")]
    Script {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub fn at_line(self, line: usize) -> Self {
        match self {
            e @ Error::Parse { .. } | e @ Error::Script { .. } => e,
            e => Error::Script { line, source: Box::new(e) },
        }
    }
}
