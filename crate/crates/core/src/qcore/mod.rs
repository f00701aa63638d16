//! Dense statevector engine.
//!
//! Every other module is checked against the primitives here. The global
//! ordering convention is that qubit 0 is the least-significant bit of a
//! basis index; a `k`-qubit matrix applied to targets `[t0, t1, ...]` reads
//! bit `j` of its row/column index as the value of qubit `tj`.

mod channel;
mod measure;
mod pauli;
mod register;
mod state;
mod unitary;

pub use channel::{
    apply_channel, apply_superchannel, choi_of_channel, choi_of_unitary, partial_trace_high,
    trace_distance, unitary_of_choi, ChannelSpec, ChoiState,
};
pub use measure::{Basis, MeasurementRecord, OutcomeSource, RngPolicy};
pub use pauli::{Pauli1, PauliFrame, PauliOperator};
pub use register::{QubitId, Register};
pub use state::{fidelity, StateVector};
pub use unitary::{gates, UnitarySpec};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

/// Largest register the engine will allocate.
pub const MAX_QUBITS: usize = 20;
/// Equality tolerance for states and matrices.
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance for norms and probabilities.
pub const PROB_TOL: f64 = 1e-12;
/// Outcomes below this probability cannot be forced.
pub const FORCE_MIN_PROB: f64 = 1e-12;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Kronecker product `a ⊗ b`. In the qubit-0-is-LSB convention `b` acts on
/// the low qubits.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    Matrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn identity(dim: usize) -> Matrix {
    Matrix::identity(dim, dim)
}

/// Largest |entry| of `a - e^{iφ} b` with φ chosen to align the two.
pub fn distance_mod_phase(a: &Matrix, b: &Matrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        cr(1.0)
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

/// `|tr(A†B)| / dim`, equal to one exactly when the unitaries agree up to a
/// global phase.
pub fn unitary_overlap(a: &Matrix, b: &Matrix) -> f64 {
    let dim = a.nrows() as f64;
    let tr: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    tr.norm() / dim
}

pub(crate) fn log2_exact(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}
