//! Sequential circuits built from transistors: the circuit IR and its
//! executor, gate iteration, shift registers, finite state machines and
//! Clifford+T pipelines.

mod exec;
mod ir;
mod iterate;
mod pipeline;
mod qfsm;
mod shift;

pub use exec::{
    execute, execute_schedule, execute_with, oracle, total_variation, verify, ActionLog, ExecOptions, ExecResult,
    OracleResult, ReadoutRecord, VerifyReport,
};
pub use ir::{
    connect_hybrid, Action, CircuitIR, Endpoint, InputMode, KindSpec, LegPlan, Node, ReadBasis, Schedule,
    ScheduledAction, Side, StateSpec, TransistorPlan, ValidationError,
};
pub use iterate::{iterate_gate, iterate_gate_with, IterateResult};
pub use pipeline::{
    dense_reference, plan_pipeline, propagate_pauli, run_pipeline, Block, ByproductMode, Gate, PipelinePlan,
    PipelineRun,
};
pub use qfsm::{run_qfsm, run_qfsm_with, FsmStyle, QFSMSpec, QfsmCycle, QfsmOptions, RegisterMode};
pub use shift::{ShiftMode, ShiftRegister, ShiftRegisterSpec};
