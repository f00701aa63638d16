use crate::error::{QscError, Result};
use crate::qcore::{QubitId, Register, RngPolicy, StateVector, UnitarySpec};
use crate::transistor::{GateKind, Transistor};

/// A gate of one brickwork layer.
#[derive(Debug, Clone, PartialEq)]
pub struct BrickTerm {
    pub u: UnitarySpec,
    pub targets: Vec<usize>,
}

impl BrickTerm {
    pub fn new(u: UnitarySpec, targets: &[usize]) -> Self {
        BrickTerm {
            u,
            targets: targets.to_vec(),
        }
    }
}

fn check_layer(terms: &[BrickTerm], qubits: usize) -> Result<()> {
    let mut used = vec![false; qubits];
    for t in terms {
        if t.u.arity() != t.targets.len() {
            return Err(QscError::ArityMismatch {
                arity: t.u.arity(),
                targets: t.targets.len(),
            });
        }
        for &q in &t.targets {
            if q >= qubits {
                return Err(QscError::QubitOutOfRange { qubit: q, count: qubits });
            }
            if std::mem::replace(&mut used[q], true) {
                return Err(QscError::DuplicateTarget(q));
            }
        }
    }
    Ok(())
}

/// Applies `layers` rounds of `(⊗U_i)(⊗V_j)` to `input`, the odd terms
/// `V_j` first. Each term is one transistor, refreshed every round, and
/// the data loops from its output modes back to the next transistor's
/// input modes by teleportation.
pub fn trotter_brickwork(
    even: &[BrickTerm],
    odd: &[BrickTerm],
    layers: usize,
    input: &StateVector,
    policy: &RngPolicy,
) -> Result<StateVector> {
    let n = input.qubit_count();
    check_layer(even, n)?;
    check_layer(odd, n)?;
    let mut src = policy.source();
    let mut reg = Register::new();
    let mut data: Vec<QubitId> = reg.alloc_state(input)?;
    let terms: Vec<&BrickTerm> = odd.iter().chain(even).collect();
    let mut stored: Vec<Option<Transistor>> = vec![None; terms.len()];
    for _ in 0..layers {
        for (term, slot) in terms.iter().zip(stored.iter_mut()) {
            let mut t = match slot.take() {
                Some(used) => used.refresh(&mut reg)?,
                None => Transistor::build(GateKind::ChoiStored(term.u.clone()), &mut reg)?,
            };
            let ids: Vec<QubitId> = term.targets.iter().map(|&q| data[q]).collect();
            t.inject_input_by_teleport(&mut reg, &ids, &mut src)?;
            t.activate(&mut reg, &mut src)?;
            for (&q, &o) in term.targets.iter().zip(t.right_modes()) {
                data[q] = o;
            }
            *slot = Some(t);
        }
    }
    reg.resolve(&data)?;
    reg.extract_pure(&data)
}

pub fn trotter_reference(even: &[BrickTerm], odd: &[BrickTerm], layers: usize, input: &StateVector) -> Result<StateVector> {
    let mut s = input.clone();
    for _ in 0..layers {
        for t in odd.iter().chain(even) {
            s.apply_gate(&t.u, &t.targets)?;
        }
    }
    Ok(s)
}
