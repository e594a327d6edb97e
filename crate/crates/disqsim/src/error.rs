use thiserror::Error;

/// Errors produced anywhere in the pipeline.
///
/// Each variant maps onto one of the CLI exit-code categories: input errors
/// (bad circuit files, bad configs), resource errors (capacity, routing,
/// deadlock), and internal invariant violations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid instruction: {0}")]
    InvalidInstruction(String),

    #[error("architecture config error: {0}")]
    Schema(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("no optical path between QPUs `{a}` and `{b}`")]
    Unroutable { a: String, b: String },

    #[error("unsupported remote gate kind `{0}`")]
    UnsupportedRemoteGate(String),

    #[error("dependency cycle detected through instructions {0:?}")]
    Cycle(Vec<usize>),

    #[error("assembler deadlock: all cursors blocked on sync points {0:?}")]
    Deadlock(Vec<String>),

    #[error("qubit limit exceeded: circuit needs {needed} active qubits, limit is {limit}")]
    QubitLimit { needed: usize, limit: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Exit-code category for CLI scripting: 2 = input, 3 = capacity/routing,
    /// 4 = internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. }
            | Error::UnknownGate(_)
            | Error::IndexOutOfRange(_)
            | Error::InvalidInstruction(_)
            | Error::Schema(_)
            | Error::UnsupportedRemoteGate(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::Capacity(_) | Error::Unroutable { .. } | Error::QubitLimit { .. } => 3,
            Error::Cycle(_) | Error::Deadlock(_) | Error::Internal(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
