use thiserror::Error;

/// Errors across the engine. Variants are grouped by how the CLI maps them
/// to exit codes: configuration problems, malformed inputs, and internal
/// invariant violations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("score list is empty")]
    EmptyScores,

    #[error("frame {frame_id}: {tokens} tokens with {special} special tokens leaves no patch tokens")]
    NoPatchTokens {
        frame_id: u64,
        tokens: usize,
        special: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("frame {0} already inserted")]
    DuplicateFrame(u64),

    #[error("frame {got} arrived after frame {newest}; ids must be strictly increasing")]
    OutOfOrderFrame { got: u64, newest: u64 },

    #[error("frame {0} unknown")]
    UnknownFrame(u64),

    #[error("frame {0} is tombstoned")]
    Tombstoned(u64),

    #[error("anchor frame {0} cannot be tombstoned")]
    AnchorProtected(u64),

    #[error("layer {layer} out of range for {layers} layers")]
    LayerOutOfRange { layer: usize, layers: usize },

    #[error("malformed trace at line {line}: {msg}")]
    MalformedTrace { line: usize, msg: String },

    #[error("malformed run log at line {line}: {msg}")]
    MalformedLog { line: usize, msg: String },

    #[error("trace hash mismatch: {0}")]
    TraceHashMismatch(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
