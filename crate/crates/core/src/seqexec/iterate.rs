use crate::error::Result;
use crate::qcore::{MeasurementRecord, OutcomeSource, Register, RngPolicy, StateVector};
use crate::transistor::{GateKind, Transistor};

#[derive(Debug, Clone)]
pub struct IterateResult {
    pub state: StateVector,
    pub records: Vec<MeasurementRecord>,
    pub peak_qubits: usize,
}

/// Applies the stored gate `k` times with one reusable transistor.
///
/// Round one teleports the input into the left mode. Every later round
/// refreshes the transistor and teleports the previous right mode into the
/// new left mode, which is the ebit loop closing back on the gate.
pub fn iterate_gate(kind: &GateKind, input: &StateVector, k: usize, policy: &RngPolicy) -> Result<StateVector> {
    let mut src = policy.source();
    Ok(iterate_gate_with(kind, input, k, &mut src)?.state)
}

pub fn iterate_gate_with(
    kind: &GateKind,
    input: &StateVector,
    k: usize,
    src: &mut OutcomeSource,
) -> Result<IterateResult> {
    let mut reg = Register::new();
    let mut data = reg.alloc_state(input)?;
    let mut records = Vec::new();
    let mut t: Option<Transistor> = None;
    for _ in 0..k {
        let mut fresh = match t.take() {
            Some(used) => used.refresh(&mut reg)?,
            None => Transistor::build(kind.clone(), &mut reg)?,
        };
        records.extend(fresh.inject_input_by_teleport(&mut reg, &data, src)?);
        let before = fresh.records().len();
        fresh.activate(&mut reg, src)?;
        records.extend(fresh.records()[before..].iter().cloned());
        data = fresh.right_modes().to_vec();
        t = Some(fresh);
    }
    reg.resolve(&data)?;
    let state = reg.extract_pure(&data)?;
    Ok(IterateResult {
        state,
        records,
        peak_qubits: reg.peak_qubits(),
    })
}
