use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..={max}", max = crate::statevec::MAX_QUBITS)]
    QubitCount(usize),
    #[error("invalid wires {wires:?} for {num_qubits}-qubit register")]
    InvalidWires {
        wires: Vec<usize>,
        num_qubits: usize,
    },
    #[error("gate {kind} expects {expected} parameter(s), got {got}")]
    ParamArity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("gate {kind} expects {expected} wire(s), got {got}")]
    WireArity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("shot count must be at least 1")]
    ZeroShots,
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("vector is not L2-normalized (norm {0})")]
    NotNormalized(f64),
    #[error("curve has zero norm")]
    ZeroCurve,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("metric undefined: {0}")]
    NonFiniteMetric(String),
    #[error("prepared-curve kind mismatch: expected {expected}")]
    KindMismatch { expected: &'static str },
    #[error("pair ({a}, {b}): {source}")]
    Pair {
        a: usize,
        b: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("percent {0} outside (0, 100]")]
    PercentOutOfRange(f64),
    #[error("repetitions must be at least 1")]
    Repetitions,
    #[error("matrix contains non-finite entry at ({0}, {1})")]
    NonFiniteEntry(usize, usize),
    #[error("too many qubits for dense unitary: {0} (max {1})")]
    TooManyQubits(usize, usize),
    #[error("unsupported gate kind {0}")]
    UnsupportedGate(&'static str),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
