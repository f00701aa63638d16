use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::register::QubitId;
use super::unitary::UnitarySpec;
use super::{cr, kron, Matrix, C64};
use crate::error::{QscError, Result};

/// Single-qubit Pauli `X^x Z^z` with the phase dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Pauli1 {
    pub x: bool,
    pub z: bool,
}

impl Pauli1 {
    pub const I: Pauli1 = Pauli1 { x: false, z: false };
    pub const X: Pauli1 = Pauli1 { x: true, z: false };
    pub const Z: Pauli1 = Pauli1 { x: false, z: true };
    pub const XZ: Pauli1 = Pauli1 { x: true, z: true };

    pub fn new(x: bool, z: bool) -> Self {
        Pauli1 { x, z }
    }

    pub fn is_identity(&self) -> bool {
        !self.x && !self.z
    }

    /// Product modulo phase.
    pub fn mul(self, other: Pauli1) -> Pauli1 {
        Pauli1 {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        }
    }

    pub fn label(&self) -> &'static str {
        match (self.x, self.z) {
            (false, false) => "I",
            (true, false) => "X",
            (false, true) => "Z",
            (true, true) => "Y",
        }
    }

    /// Matrix of `X^x Z^z`.
    pub fn matrix(&self) -> Matrix {
        let mut m = Matrix::identity(2, 2);
        if self.z {
            m[(1, 1)] = cr(-1.0);
        }
        if self.x {
            m.swap_rows(0, 1);
        }
        m
    }
}

/// `i^phase · Π_j X_j^{x_j} Z_j^{z_j}` over `n` qubits, qubit 0 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliOperator {
    phase: u8,
    x: Vec<bool>,
    z: Vec<bool>,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator {
            phase: 0,
            x: vec![false; n],
            z: vec![false; n],
        }
    }

    pub fn from_parts(phase: u8, x: Vec<bool>, z: Vec<bool>) -> Result<Self> {
        if x.len() != z.len() {
            return Err(QscError::DimensionMismatch("x/z bit lengths differ".into()));
        }
        Ok(PauliOperator {
            phase: phase % 4,
            x,
            z,
        })
    }

    pub fn single(n: usize, qubit: usize, p: Pauli1) -> Self {
        let mut op = Self::identity(n);
        op.x[qubit] = p.x;
        op.z[qubit] = p.z;
        op
    }

    pub fn from_paulis(ps: &[Pauli1]) -> Self {
        PauliOperator {
            phase: 0,
            x: ps.iter().map(|p| p.x).collect(),
            z: ps.iter().map(|p| p.z).collect(),
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.x.len()
    }

    /// Power of `i` in the global phase.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn phase_factor(&self) -> C64 {
        [cr(1.0), C64::new(0.0, 1.0), cr(-1.0), C64::new(0.0, -1.0)][self.phase as usize]
    }

    pub fn get(&self, q: usize) -> Pauli1 {
        Pauli1::new(self.x[q], self.z[q])
    }

    pub fn paulis(&self) -> Vec<Pauli1> {
        (0..self.qubit_count()).map(|q| self.get(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|b| !b)
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    /// `self · other`.
    pub fn mul(&self, other: &PauliOperator) -> Result<PauliOperator> {
        if self.qubit_count() != other.qubit_count() {
            return Err(QscError::DimensionMismatch(format!(
                "Pauli on {} vs {} qubits",
                self.qubit_count(),
                other.qubit_count()
            )));
        }
        let mut phase = self.phase as u32 + other.phase as u32;
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        for q in 0..self.qubit_count() {
            // X^a Z^b X^c Z^d = (-1)^{bc} X^{a+c} Z^{b+d}
            if self.z[q] && other.x[q] {
                phase += 2;
            }
            x.push(self.x[q] ^ other.x[q]);
            z.push(self.z[q] ^ other.z[q]);
        }
        Ok(PauliOperator {
            phase: (phase % 4) as u8,
            x,
            z,
        })
    }

    /// Dense matrix, qubit 0 least significant.
    pub fn matrix(&self) -> Matrix {
        let mut m = Matrix::identity(1, 1);
        for q in 0..self.qubit_count() {
            m = kron(&self.get(q).matrix(), &m);
        }
        m * self.phase_factor()
    }

    /// Conjugation `C P C†` given the images of every `X_q` and `Z_q`.
    fn conjugate_by_images(&self, images: &[(PauliOperator, PauliOperator)]) -> PauliOperator {
        let n = self.qubit_count();
        let mut acc = PauliOperator::identity(n).with_phase(self.phase);
        for q in 0..n {
            if self.x[q] {
                acc = acc.mul(&images[q].0).expect("same width");
            }
            if self.z[q] {
                acc = acc.mul(&images[q].1).expect("same width");
            }
        }
        acc
    }

    /// `C P C†` for a named Clifford gate acting on `targets`.
    pub fn conjugate_named(&self, name: &str, targets: &[usize]) -> Result<PauliOperator> {
        let n = self.qubit_count();
        let arity = match name {
            "i" | "h" | "s" | "sdg" | "x" | "y" | "z" => 1,
            "cz" | "cnot" | "cx" | "swap" => 2,
            other => return Err(QscError::UnsupportedGate(other.to_string())),
        };
        if targets.len() != arity {
            return Err(QscError::ArityMismatch {
                arity,
                targets: targets.len(),
            });
        }
        for (i, &t) in targets.iter().enumerate() {
            if t >= n {
                return Err(QscError::QubitOutOfRange { qubit: t, count: n });
            }
            if targets[..i].contains(&t) {
                return Err(QscError::DuplicateTarget(t));
            }
        }
        let sx = |q| PauliOperator::single(n, q, Pauli1::X);
        let sz = |q| PauliOperator::single(n, q, Pauli1::Z);
        let mut images: Vec<(PauliOperator, PauliOperator)> =
            (0..n).map(|q| (sx(q), sz(q))).collect();
        let a = targets[0];
        match name {
            "i" => {}
            "h" => images[a] = (sz(a), sx(a)),
            "s" => images[a].0 = PauliOperator::single(n, a, Pauli1::XZ).with_phase(1),
            "sdg" => images[a].0 = PauliOperator::single(n, a, Pauli1::XZ).with_phase(3),
            "x" => images[a].1 = sz(a).with_phase(2),
            "y" => images[a] = (sx(a).with_phase(2), sz(a).with_phase(2)),
            "z" => images[a].0 = sx(a).with_phase(2),
            "cz" => {
                let b = targets[1];
                images[a].0 = sx(a).mul(&sz(b))?;
                images[b].0 = sx(b).mul(&sz(a))?;
            }
            "cnot" | "cx" => {
                let t = targets[1];
                images[a].0 = sx(a).mul(&sx(t))?;
                images[t].1 = sz(a).mul(&sz(t))?;
            }
            "swap" => {
                let b = targets[1];
                images.swap(a, b);
            }
            _ => unreachable!(),
        }
        Ok(self.conjugate_by_images(&images))
    }

    /// Decomposes a matrix that equals `λ·P` for some Pauli `P` and unit `λ`.
    /// Returns `None` when it is not a scaled Pauli.
    pub fn from_matrix(m: &Matrix, tol: f64) -> Option<PauliOperator> {
        let n = super::log2_exact(m.nrows())?;
        let d = m.nrows() as f64;
        for code in 0..1usize << (2 * n) {
            let x: Vec<bool> = (0..n).map(|q| code >> q & 1 == 1).collect();
            let z: Vec<bool> = (0..n).map(|q| code >> (n + q) & 1 == 1).collect();
            let p = PauliOperator { phase: 0, x, z };
            let pm = p.matrix();
            let overlap: C64 = pm
                .iter()
                .zip(m.iter())
                .map(|(a, b)| a.conj() * b)
                .sum::<C64>()
                / d;
            if (overlap.norm() - 1.0).abs() < tol {
                let residual = (m - &pm * overlap)
                    .iter()
                    .map(|v| v.norm())
                    .fold(0.0, f64::max);
                if residual > tol {
                    return None;
                }
                let phase = [cr(1.0), C64::new(0.0, 1.0), cr(-1.0), C64::new(0.0, -1.0)]
                    .iter()
                    .position(|f| (f - overlap).norm() < 1e-6)
                    .map(|i| i as u8);
                return Some(match phase {
                    Some(ph) => p.with_phase(ph),
                    // Non-quarter phase: keep the Pauli, drop the phase.
                    None => p,
                });
            }
        }
        None
    }

    /// `U P U†` when it is again a Pauli (up to global phase).
    pub fn conjugate_unitary(&self, u: &UnitarySpec) -> Option<PauliOperator> {
        if u.arity() != self.qubit_count() {
            return None;
        }
        let m = u.matrix() * self.matrix() * u.matrix().adjoint();
        Self::from_matrix(&m, 1e-9)
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ph = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{ph}")?;
        for q in 0..self.qubit_count() {
            write!(f, "{}", self.get(q).label())?;
        }
        Ok(())
    }
}

/// Pending Pauli byproducts per qubit: the physical state equals
/// `(⊗ frame) · ideal` up to global phase.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PauliFrame {
    entries: BTreeMap<QubitId, Pauli1>,
}

impl PauliFrame {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, q: QubitId) -> Pauli1 {
        self.entries.get(&q).copied().unwrap_or_default()
    }

    pub fn set(&mut self, q: QubitId, p: Pauli1) {
        if p.is_identity() {
            self.entries.remove(&q);
        } else {
            self.entries.insert(q, p);
        }
    }

    /// Left-multiplies the pending byproduct on `q` by `p`.
    pub fn push(&mut self, q: QubitId, p: Pauli1) {
        let cur = self.get(q);
        self.set(q, p.mul(cur));
    }

    pub fn take(&mut self, q: QubitId) -> Pauli1 {
        self.entries.remove(&q).unwrap_or_default()
    }

    pub fn is_clear(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (QubitId, Pauli1)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    /// Joint operator over `qubits` (in order).
    pub fn operator_on(&self, qubits: &[QubitId]) -> PauliOperator {
        PauliOperator::from_paulis(&qubits.iter().map(|q| self.get(*q)).collect::<Vec<_>>())
    }
}
