use std::fmt;

use serde::{Deserialize, Serialize};

use super::measure::{Basis, MeasurementRecord, OutcomeSource};
use super::pauli::{Pauli1, PauliFrame};
use super::state::StateVector;
use super::unitary::{gates, UnitarySpec};
use super::{Matrix, C64};
use crate::error::{QscError, Result};

/// Stable label of a qubit inside a [`Register`]. Positions shift when
/// qubits are measured away; ids do not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QubitId(pub u64);

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// A [`StateVector`] whose qubits carry stable ids, plus the pending Pauli
/// frame on those qubits.
#[derive(Debug, Clone, Default)]
pub struct Register {
    state: StateVector,
    ids: Vec<QubitId>,
    next: u64,
    frame: PauliFrame,
    peak: usize,
}

impl Register {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn ids(&self) -> &[QubitId] {
        &self.ids
    }

    pub fn qubit_count(&self) -> usize {
        self.ids.len()
    }

    /// Largest number of simultaneously allocated qubits so far.
    pub fn peak_qubits(&self) -> usize {
        self.peak
    }

    pub fn contains(&self, id: QubitId) -> bool {
        self.ids.contains(&id)
    }

    pub fn frame(&self) -> &PauliFrame {
        &self.frame
    }

    pub fn frame_mut(&mut self) -> &mut PauliFrame {
        &mut self.frame
    }

    pub fn position(&self, id: QubitId) -> Result<usize> {
        self.ids
            .iter()
            .position(|&q| q == id)
            .ok_or(QscError::UnknownQubit(id.0))
    }

    pub fn positions(&self, ids: &[QubitId]) -> Result<Vec<usize>> {
        ids.iter().map(|&q| self.position(q)).collect()
    }

    /// Appends `s`; its qubit 0 gets the first returned id.
    pub fn alloc_state(&mut self, s: &StateVector) -> Result<Vec<QubitId>> {
        self.state = self.state.tensor(s)?;
        let new: Vec<QubitId> = (0..s.qubit_count())
            .map(|i| QubitId(self.next + i as u64))
            .collect();
        self.next += s.qubit_count() as u64;
        self.ids.extend_from_slice(&new);
        self.peak = self.peak.max(self.ids.len());
        Ok(new)
    }

    pub fn alloc_zeros(&mut self, n: usize) -> Result<Vec<QubitId>> {
        self.alloc_state(&StateVector::zeros(n)?)
    }

    pub fn alloc_ebit(&mut self) -> Result<(QubitId, QubitId)> {
        let mut w = StateVector::empty();
        w.make_ebit()?;
        let ids = self.alloc_state(&w)?;
        Ok((ids[0], ids[1]))
    }

    /// Allocates a graph state; edges index the new qubits.
    pub fn alloc_cluster(
        &mut self,
        vertices: usize,
        edges: &[(usize, usize)],
    ) -> Result<Vec<QubitId>> {
        let mut g = StateVector::empty();
        g.make_cluster(vertices, edges)?;
        self.alloc_state(&g)
    }

    pub fn apply(&mut self, u: &UnitarySpec, targets: &[QubitId]) -> Result<()> {
        let pos = self.positions(targets)?;
        self.state.apply_gate(u, &pos)
    }

    pub fn apply_pauli(&mut self, q: QubitId, p: Pauli1) -> Result<()> {
        // X^x Z^z: Z first, then X.
        if p.z {
            self.apply(&gates::z(), &[q])?;
        }
        if p.x {
            self.apply(&gates::x(), &[q])?;
        }
        Ok(())
    }

    /// Applies the pending byproducts of `qubits` physically and clears them.
    pub fn resolve(&mut self, qubits: &[QubitId]) -> Result<()> {
        for &q in qubits {
            let p = self.frame.take(q);
            self.apply_pauli(q, p)?;
        }
        Ok(())
    }

    fn forget(&mut self, removed: &[QubitId]) {
        self.ids.retain(|q| !removed.contains(q));
        for q in removed {
            self.frame.take(*q);
        }
    }

    fn relabel(&self, mut rec: MeasurementRecord, ids: &[QubitId]) -> MeasurementRecord {
        rec.qubits = ids.iter().map(|q| q.0).collect();
        rec
    }

    pub fn measure(
        &mut self,
        q: QubitId,
        basis: Basis,
        src: &mut OutcomeSource,
    ) -> Result<MeasurementRecord> {
        let pos = self.position(q)?;
        let rec = self.state.measure(pos, basis, src)?;
        self.forget(&[q]);
        Ok(self.relabel(rec, &[q]))
    }

    pub fn bell_measure(
        &mut self,
        a: QubitId,
        b: QubitId,
        src: &mut OutcomeSource,
    ) -> Result<MeasurementRecord> {
        let (pa, pb) = (self.position(a)?, self.position(b)?);
        let rec = self.state.bell_measure(pa, pb, src)?;
        self.forget(&[a, b]);
        Ok(self.relabel(rec, &[a, b]))
    }

    pub fn measure_projective(
        &mut self,
        qubits: &[QubitId],
        basis: &[Vec<C64>],
        label: &str,
        src: &mut OutcomeSource,
    ) -> Result<MeasurementRecord> {
        let pos = self.positions(qubits)?;
        let rec = self.state.measure_projective(&pos, basis, label, src)?;
        self.forget(qubits);
        Ok(self.relabel(rec, qubits))
    }

    pub fn marginal(&self, qubits: &[QubitId]) -> Result<Vec<f64>> {
        self.state.marginal(&self.positions(qubits)?)
    }

    pub fn reduced_density(&self, qubits: &[QubitId]) -> Result<Matrix> {
        self.state.reduced_density(&self.positions(qubits)?)
    }

    /// `⟨ψ|ρ|ψ⟩` with `ρ` the reduced state of `qubits` (ignores the frame).
    pub fn fidelity_with(&self, qubits: &[QubitId], psi: &StateVector) -> Result<f64> {
        if psi.qubit_count() != qubits.len() {
            return Err(QscError::DimensionMismatch(format!(
                "{}-qubit reference for {} qubits",
                psi.qubit_count(),
                qubits.len()
            )));
        }
        let rho = self.reduced_density(qubits)?;
        let v = psi.to_column();
        Ok((v.adjoint() * rho * v)[(0, 0)].re.clamp(0.0, 1.0))
    }

    /// The pure state of `qubits`, which must be unentangled with the rest.
    pub fn extract_pure(&self, qubits: &[QubitId]) -> Result<StateVector> {
        let (psi, weight) = self.state.product_factor(&self.positions(qubits)?)?;
        let purity = weight * weight + (1.0 - weight) * (1.0 - weight);
        if purity < 1.0 - 1e-9 {
            return Err(QscError::NotSeparable { purity });
        }
        Ok(psi)
    }

    /// Removes `qubits`, which must be unentangled with the rest, and
    /// returns their state.
    pub fn take_pure(&mut self, qubits: &[QubitId]) -> Result<StateVector> {
        let psi = self.extract_pure(qubits)?;
        let pos = self.positions(qubits)?;
        let rest = self.state.project_out(&pos, psi.amplitudes())?;
        self.state = StateVector::normalized(rest)?;
        self.forget(qubits);
        Ok(psi)
    }
}
