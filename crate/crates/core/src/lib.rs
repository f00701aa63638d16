//! Simulator for quantum sequential circuits.
//!
//! Gates live as Choi states inside [`transistor::Transistor`]s, are
//! activated by measuring their bulk, and are chained or looped back with
//! ebits. Everything runs on the dense engine in [`qcore`], which also serves
//! as the reference every construction is compared against.

pub mod algos;
pub mod error;
pub mod qconv;
pub mod qcore;
pub mod seqexec;
pub mod transistor;

pub use error::{QscError, Result};
pub use qcore::{
    Basis, ChannelSpec, ChoiState, MeasurementRecord, OutcomeSource, Pauli1, PauliFrame,
    PauliOperator, QubitId, Register, RngPolicy, StateVector, UnitarySpec,
};
pub use qconv::{encode_stream, unroll, ConvCodeSpec, EncodeTrace};
pub use seqexec::{execute, verify, CircuitIR, ExecOptions, ExecResult, Node, VerifyReport};
pub use transistor::{GateKind, Transistor, WireBasisOutcome};
