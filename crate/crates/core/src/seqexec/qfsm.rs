use crate::error::{QscError, Result};
use crate::qcore::{gates, Basis, Matrix, OutcomeSource, QubitId, Register, RngPolicy, StateVector, UnitarySpec};
use crate::transistor::Transistor;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FsmStyle {
    Moore,
    Mealy,
}

/// A quantum finite state machine with a `k`-qubit register, `m`-qubit
/// inputs and `n`-qubit outputs.
///
/// `transition` acts on `[register, input]`. `output_map` acts on
/// `[register, n output ancillas]` (Moore) or `[register, input, n output
/// ancillas]` (Mealy), the ancillas starting in `|0⟩` and read in Z.
#[derive(Debug, Clone)]
pub struct QFSMSpec {
    pub register_qubits: usize,
    pub input_qubits: usize,
    pub output_qubits: usize,
    pub transition: UnitarySpec,
    pub output_map: UnitarySpec,
    pub style: FsmStyle,
    pub initial: StateVector,
}

impl QFSMSpec {
    fn validate(&self) -> Result<()> {
        let (k, m, n) = (self.register_qubits, self.input_qubits, self.output_qubits);
        let out_arity = match self.style {
            FsmStyle::Moore => k + n,
            FsmStyle::Mealy => k + m + n,
        };
        if self.transition.arity() != k + m {
            return Err(QscError::ArityMismatch {
                arity: self.transition.arity(),
                targets: k + m,
            });
        }
        if self.output_map.arity() != out_arity {
            return Err(QscError::ArityMismatch {
                arity: self.output_map.arity(),
                targets: out_arity,
            });
        }
        if self.initial.qubit_count() != k {
            return Err(QscError::DimensionMismatch(format!(
                "{}-qubit initial register for k = {k}",
                self.initial.qubit_count()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegisterMode {
    /// The register qubits stay put between cycles.
    Persistent,
    /// The register is teleported through identity transistors every cycle.
    Teleport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QfsmOptions {
    pub measure_outputs: bool,
    pub register_mode: RegisterMode,
}

impl Default for QfsmOptions {
    fn default() -> Self {
        QfsmOptions {
            measure_outputs: true,
            register_mode: RegisterMode::Persistent,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QfsmCycle {
    /// Exact distribution of the output qubits, bit `j` = output qubit `j`.
    pub output_distribution: Vec<f64>,
    /// Sampled outputs; empty when outputs are left unmeasured.
    pub outputs: Vec<u8>,
    /// Reduced register state at the end of the cycle.
    pub register_state: Matrix,
}

pub fn run_qfsm(spec: &QFSMSpec, inputs: &[StateVector], policy: &RngPolicy) -> Result<Vec<QfsmCycle>> {
    run_qfsm_with(spec, inputs, policy, QfsmOptions::default())
}

pub fn run_qfsm_with(
    spec: &QFSMSpec,
    inputs: &[StateVector],
    policy: &RngPolicy,
    opts: QfsmOptions,
) -> Result<Vec<QfsmCycle>> {
    spec.validate()?;
    if inputs.is_empty() {
        return Err(QscError::InvalidParameter("a machine run needs at least one input".into()));
    }
    let mut src: OutcomeSource = policy.source();
    let mut reg = Register::new();
    let mut register = reg.alloc_state(&spec.initial)?;
    let mut cycles = Vec::with_capacity(inputs.len());
    for input in inputs {
        if input.qubit_count() != spec.input_qubits {
            return Err(QscError::DimensionMismatch(format!(
                "{}-qubit input for m = {}",
                input.qubit_count(),
                spec.input_qubits
            )));
        }
        let inp = reg.alloc_state(input)?;
        let mut targets: Vec<QubitId> = register.clone();
        targets.extend(&inp);
        reg.apply(&spec.transition, &targets)?;

        let anc = reg.alloc_zeros(spec.output_qubits)?;
        let mut out_targets = register.clone();
        if spec.style == FsmStyle::Mealy {
            out_targets.extend(&inp);
        }
        out_targets.extend(&anc);
        reg.apply(&spec.output_map, &out_targets)?;

        let output_distribution = reg.marginal(&anc)?;
        let mut outputs = Vec::new();
        if opts.measure_outputs {
            for &a in &anc {
                outputs.push(reg.measure(a, Basis::Z, &mut src)?.outcome[0]);
            }
        }
        if opts.register_mode == RegisterMode::Teleport {
            let mut moved = Vec::with_capacity(register.len());
            for &q in &register {
                let mut t = Transistor::build(crate::transistor::GateKind::ChoiStored(gates::i()), &mut reg)?;
                t.inject_input_by_teleport(&mut reg, &[q], &mut src)?;
                t.activate(&mut reg, &mut src)?;
                reg.resolve(t.right_modes())?;
                moved.push(t.right_modes()[0]);
            }
            register = moved;
        }
        cycles.push(QfsmCycle {
            output_distribution,
            outputs,
            register_state: reg.reduced_density(&register)?,
        });
    }
    Ok(cycles)
}
