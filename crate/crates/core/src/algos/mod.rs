//! Algorithms assembled from transistors: controlled gates and
//! multiplexers, QFT, amplitude amplification, phase estimation, LCU and
//! gradient steps, Trotter brickwork, history states and QRAM queries.

mod control;
mod history;
mod lcu;
mod qaa;
mod qft;
mod qpe;
mod trotter;

pub use control::{
    controlled_u_reference, controlled_u_via_transistor, eigenstate, qmux, qmux_reference, qmux_with, qram_query,
    QmuxOptions, QmuxSpec,
};
pub use history::{
    clock_angles, clock_state, derived_clock_angles, history_reference, history_state, uniform_clock_deviation,
    HistorySpec,
};
pub use lcu::{complete_first_column, energy_from_norms, gradient_step, lcu, GradientStep, LcuResult};
pub use qaa::{qaa, QaaSpec};
pub use qft::{dft_matrix, qft, qft_circuit};
pub use qpe::{qpe, qpe_distribution, QpeRecord};
pub use trotter::{trotter_brickwork, trotter_reference, BrickTerm};

use crate::error::Result;
use crate::qcore::{StateVector, UnitarySpec};

/// One gate of a combinational circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Op {
    pub label: String,
    pub u: UnitarySpec,
    pub targets: Vec<usize>,
}

impl Op {
    pub fn new(label: impl Into<String>, u: UnitarySpec, targets: &[usize]) -> Self {
        Op {
            label: label.into(),
            u,
            targets: targets.to_vec(),
        }
    }
}

/// Applies `ops` in order to `input`.
pub fn apply_ops(ops: &[Op], input: &StateVector) -> Result<StateVector> {
    let mut s = input.clone();
    for op in ops {
        s.apply_gate(&op.u, &op.targets)?;
    }
    Ok(s)
}

/// Dense unitary of `ops` on `qubits` qubits, built column by column.
pub fn ops_unitary(ops: &[Op], qubits: usize) -> Result<UnitarySpec> {
    let d = 1usize << qubits;
    let mut m = crate::qcore::Matrix::zeros(d, d);
    for j in 0..d {
        let col = apply_ops(ops, &StateVector::basis(qubits, j)?)?;
        for (i, a) in col.amplitudes().iter().enumerate() {
            m[(i, j)] = *a;
        }
    }
    UnitarySpec::new(m)
}
