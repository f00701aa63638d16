use thiserror::Error;

/// Errors raised by the simulator and everything built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QscError {
    #[error("register of {requested} qubits exceeds the limit of {limit}")]
    CapacityExceeded { requested: usize, limit: usize },

    #[error("gate arity {arity} does not match {targets} targets")]
    ArityMismatch { arity: usize, targets: usize },

    #[error("qubit {qubit} out of range for a {count}-qubit register")]
    QubitOutOfRange { qubit: usize, count: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("unknown qubit id {0}")]
    UnknownQubit(u64),

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("forced outcome {outcome:?} for {what} has probability {probability:.3e}")]
    ImpossibleOutcome {
        what: String,
        outcome: Vec<u8>,
        probability: f64,
    },

    #[error("forced outcome list exhausted at {0}")]
    OutcomesExhausted(String),

    #[error("channel is not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("Choi state is not maximally entangled: {0}")]
    InvalidChoi(String),

    #[error("transistor is already consumed")]
    TransistorConsumed,

    #[error("transistor is fresh; refresh requires a consumed transistor")]
    TransistorFresh,

    #[error("transistor input has not been injected")]
    InputMissing,

    #[error("transistor input was already injected")]
    InputAlreadyInjected,

    #[error("unsupported gate kind: {0}")]
    UnsupportedKind(String),

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("state is not an eigenstate of the gate (residual {residual:.3e})")]
    NotEigenstate { residual: f64 },

    #[error("qubits are entangled with the rest of the register (purity {purity})")]
    NotSeparable { purity: f64 },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("post-selected branch has zero norm")]
    ZeroNormBranch,
}

pub type Result<T> = std::result::Result<T, QscError>;
