use crate::error::{QscError, Result};
use crate::qcore::{cr, identity, Matrix, RngPolicy, StateVector, UnitarySpec};
use crate::seqexec::iterate_gate;
use crate::transistor::GateKind;

/// Amplitude amplification problem: `A` acts on `[flag, data…]` with the
/// flag on qubit 0, and the good subspace is flag `|0⟩`.
#[derive(Debug, Clone)]
pub struct QaaSpec {
    a: UnitarySpec,
    initial: StateVector,
    p: f64,
}

impl QaaSpec {
    /// `psi` is the data part of the initial state `|0⟩|ψ⟩`.
    pub fn new(a: UnitarySpec, psi: &StateVector) -> Result<Self> {
        if a.arity() == 0 || a.arity() > 2 {
            return Err(QscError::InvalidParameter(format!(
                "A acts on {} qubits; a stored walk operator needs 1 or 2",
                a.arity()
            )));
        }
        if psi.qubit_count() + 1 != a.arity() {
            return Err(QscError::DimensionMismatch(format!(
                "{}-qubit data for a {}-qubit A",
                psi.qubit_count(),
                a.arity()
            )));
        }
        let initial = StateVector::basis(1, 0)?.tensor(psi)?;
        let prepared = initial.applied(&a, &(0..a.arity()).collect::<Vec<_>>())?;
        let p = prepared.marginal(&[0])?[0];
        if !(1e-12..=1.0 - 1e-12).contains(&p) {
            return Err(QscError::InvalidParameter(format!("good-subspace weight p = {p} outside (0, 1)")));
        }
        Ok(QaaSpec { a, initial, p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn theta(&self) -> f64 {
        self.p.sqrt().asin()
    }

    /// `sin²((2n+1)θ)`.
    pub fn closed_form(&self, n: usize) -> f64 {
        ((2 * n + 1) as f64 * self.theta()).sin().powi(2)
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn prepared(&self) -> Result<StateVector> {
        self.initial.applied(&self.a, &(0..self.a.arity()).collect::<Vec<_>>())
    }

    /// `Q = −A S₀ A† S_good`, with `S₀` reflecting about the initial state
    /// and `S_good` flipping the sign of the good subspace.
    pub fn walk_operator(&self) -> UnitarySpec {
        let n = self.a.arity();
        let d = 1usize << n;
        let col = self.initial.to_column();
        let s0 = identity(d) - (&col * col.adjoint()) * cr(2.0);
        let s_good = Matrix::from_fn(d, d, |i, j| match (i == j, i & 1) {
            (true, 0) => cr(-1.0),
            (true, _) => cr(1.0),
            _ => cr(0.0),
        });
        let a = self.a.matrix();
        let q = (a * s0 * a.adjoint() * s_good) * cr(-1.0);
        UnitarySpec::new(q).expect("product of unitaries")
    }
}

/// Runs `n` rounds of the stored walk operator on `A|0⟩|ψ⟩` and returns
/// the state with the probability of the good subspace.
pub fn qaa(spec: &QaaSpec, n: usize, policy: &RngPolicy) -> Result<(StateVector, f64)> {
    let start = spec.prepared()?;
    let out = iterate_gate(&GateKind::ChoiStored(spec.walk_operator()), &start, n, policy)?;
    let p = out.marginal(&[0])?[0];
    Ok((out, p))
}
