use std::f64::consts::PI;

use super::{ops_unitary, Op};
use crate::error::{QscError, Result};
use crate::qcore::{gates, Matrix, UnitarySpec, C64};

/// Standard `H` plus controlled-`R_k` circuit, finished by the qubit
/// reversal. Qubit 0 is the least significant bit of the transformed
/// integer.
pub fn qft_circuit(n: usize) -> Result<Vec<Op>> {
    if !(1..=6).contains(&n) {
        return Err(QscError::InvalidParameter(format!("QFT size {n} outside 1..=6")));
    }
    let mut ops = Vec::new();
    for i in (0..n).rev() {
        ops.push(Op::new("h", gates::h(), &[i]));
        for j in (0..i).rev() {
            let k = (i - j + 1) as u32;
            ops.push(Op::new(format!("c-r{k}"), gates::rk(k).controlled(), &[i, j]));
        }
    }
    for i in 0..n / 2 {
        ops.push(Op::new("swap", gates::swap(), &[i, n - 1 - i]));
    }
    Ok(ops)
}

/// The `n`-qubit Fourier transform as a dense unitary.
pub fn qft(n: usize) -> Result<UnitarySpec> {
    ops_unitary(&qft_circuit(n)?, n)
}

/// `F_{jk} = ω^{jk}/√N` with `ω = e^{2πi/N}`.
pub fn dft_matrix(n: usize) -> Matrix {
    let d = 1usize << n;
    let norm = 1.0 / (d as f64).sqrt();
    Matrix::from_fn(d, d, |j, k| C64::from_polar(norm, 2.0 * PI * ((j * k) % d) as f64 / d as f64))
}
