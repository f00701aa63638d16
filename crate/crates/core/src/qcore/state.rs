use std::f64::consts::FRAC_1_SQRT_2;

use super::measure::{Basis, MeasurementRecord, OutcomeSource};
use super::unitary::{gates, UnitarySpec};
use super::{c, cr, log2_exact, Matrix, C64, MAX_QUBITS};
use crate::error::{QscError, Result};

/// Pure state of `qubit_count` qubits; qubit 0 is the least significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

fn check_capacity(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(QscError::CapacityExceeded {
            requested: n,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

impl Default for StateVector {
    fn default() -> Self {
        StateVector::empty()
    }
}

impl StateVector {
    /// The zero-qubit state (a single amplitude 1).
    pub fn empty() -> Self {
        StateVector {
            n: 0,
            amps: vec![cr(1.0)],
        }
    }

    /// `|0…0⟩` on `n` qubits.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_capacity(n)?;
        if index >= 1 << n {
            return Err(QscError::QubitOutOfRange {
                qubit: index,
                count: 1 << n,
            });
        }
        let mut amps = vec![cr(0.0); 1 << n];
        amps[index] = cr(1.0);
        Ok(StateVector { n, amps })
    }

    /// Builds a state from amplitudes that must already be normalized.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = log2_exact(amps.len())
            .ok_or_else(|| QscError::DimensionMismatch(format!("{} amplitudes", amps.len())))?;
        check_capacity(n)?;
        let norm = norm_of(&amps);
        if (norm - 1.0).abs() > 1e-9 {
            return Err(QscError::NotNormalized { norm });
        }
        Ok(StateVector { n, amps })
    }

    /// Builds a state from amplitudes and rescales them to unit norm.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let n = log2_exact(amps.len())
            .ok_or_else(|| QscError::DimensionMismatch(format!("{} amplitudes", amps.len())))?;
        check_capacity(n)?;
        let norm = norm_of(&amps);
        if norm < 1e-300 {
            return Err(QscError::ZeroNormBranch);
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(StateVector { n, amps })
    }

    pub fn plus() -> Self {
        StateVector {
            n: 1,
            amps: vec![cr(FRAC_1_SQRT_2), cr(FRAC_1_SQRT_2)],
        }
    }

    pub fn minus() -> Self {
        StateVector {
            n: 1,
            amps: vec![cr(FRAC_1_SQRT_2), cr(-FRAC_1_SQRT_2)],
        }
    }

    /// Single qubit `a|0⟩ + b|1⟩`, normalized.
    pub fn qubit(a: C64, b: C64) -> Result<Self> {
        Self::normalized(vec![a, b])
    }

    /// Haar-random pure state.
    pub fn random<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_capacity(n)?;
        let amps = (0..1usize << n).map(|_| super::unitary::gaussian(rng)).collect();
        Self::normalized(amps)
    }

    /// Product of the given states; `parts[0]` occupies the lowest qubits.
    pub fn product(parts: &[StateVector]) -> Result<Self> {
        let mut out = StateVector::empty();
        for p in parts {
            out = out.tensor(p)?;
        }
        Ok(out)
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm_of(&self.amps)
    }

    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.n != other.n {
            return Err(QscError::DimensionMismatch(format!(
                "{} vs {} qubits",
                self.n, other.n
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `self ⊗ other` with `other` appended above the existing qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let n = self.n + other.n;
        check_capacity(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for hi in &other.amps {
            for lo in &self.amps {
                amps.push(lo * hi);
            }
        }
        Ok(StateVector { n, amps })
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.n {
                return Err(QscError::QubitOutOfRange {
                    qubit: t,
                    count: self.n,
                });
            }
            if targets[..i].contains(&t) {
                return Err(QscError::DuplicateTarget(t));
            }
        }
        Ok(())
    }

    /// Applies `u` to `targets` in place.
    pub fn apply_gate(&mut self, u: &UnitarySpec, targets: &[usize]) -> Result<()> {
        if u.arity() != targets.len() {
            return Err(QscError::ArityMismatch {
                arity: u.arity(),
                targets: targets.len(),
            });
        }
        self.check_targets(targets)?;
        self.apply_matrix_unchecked(u.matrix(), targets);
        Ok(())
    }

    /// Returns a new state with `u` applied; the receiver is left untouched.
    pub fn applied(&self, u: &UnitarySpec, targets: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_gate(u, targets)?;
        Ok(out)
    }

    pub(crate) fn apply_matrix_unchecked(&mut self, m: &Matrix, targets: &[usize]) {
        let k = targets.len();
        let d = 1usize << k;
        let offsets: Vec<usize> = (0..d)
            .map(|j| {
                targets
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| j >> b & 1 == 1)
                    .map(|(_, &t)| 1usize << t)
                    .sum()
            })
            .collect();
        let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
        let mut buf = vec![cr(0.0); d];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (j, off) in offsets.iter().enumerate() {
                buf[j] = self.amps[base | off];
            }
            for (i, off) in offsets.iter().enumerate() {
                let mut acc = cr(0.0);
                for (j, b) in buf.iter().enumerate() {
                    acc += m[(i, j)] * b;
                }
                self.amps[base | off] = acc;
            }
        }
    }

    /// Appends `|ω⟩ = (|00⟩+|11⟩)/√2` and returns the two new positions.
    pub fn make_ebit(&mut self) -> Result<(usize, usize)> {
        let s = FRAC_1_SQRT_2;
        let ebit = StateVector {
            n: 2,
            amps: vec![cr(s), cr(0.0), cr(0.0), cr(s)],
        };
        let base = self.n;
        *self = self.tensor(&ebit)?;
        Ok((base, base + 1))
    }

    /// Appends a graph state on `vertices` new qubits: `|+⟩` each, CZ per edge.
    /// Edge endpoints index the new qubits (0-based). Returns the new positions.
    pub fn make_cluster(
        &mut self,
        vertices: usize,
        edges: &[(usize, usize)],
    ) -> Result<Vec<usize>> {
        for &(a, b) in edges {
            if a == b {
                return Err(QscError::InvalidParameter(format!(
                    "self-loop edge on vertex {a}"
                )));
            }
            if a >= vertices || b >= vertices {
                return Err(QscError::QubitOutOfRange {
                    qubit: a.max(b),
                    count: vertices,
                });
            }
        }
        let base = self.n;
        check_capacity(base + vertices)?;
        let plus = vec![StateVector::plus(); vertices];
        *self = self.tensor(&StateVector::product(&plus)?)?;
        let cz = gates::cz();
        for &(a, b) in edges {
            self.apply_gate(&cz, &[base + a, base + b])?;
        }
        Ok((base..base + vertices).collect())
    }

    /// Contracts `positions` with `⟨v|`, returning the unnormalized remainder
    /// (positions removed, higher qubits shifted down).
    pub fn project_out(&self, positions: &[usize], v: &[C64]) -> Result<Vec<C64>> {
        self.check_targets(positions)?;
        let k = positions.len();
        if v.len() != 1 << k {
            return Err(QscError::DimensionMismatch(format!(
                "basis vector of length {} for {k} qubits",
                v.len()
            )));
        }
        let rest: Vec<usize> = (0..self.n).filter(|q| !positions.contains(q)).collect();
        let mut out = vec![cr(0.0); 1 << rest.len()];
        for (idx, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            let mut local = 0usize;
            for (b, &p) in positions.iter().enumerate() {
                local |= (idx >> p & 1) << b;
            }
            let mut r = 0usize;
            for (b, &p) in rest.iter().enumerate() {
                r |= (idx >> p & 1) << b;
            }
            out[r] += v[local].conj() * amp;
        }
        Ok(out)
    }

    /// Destructive projective measurement of `positions` onto the orthonormal
    /// `basis` vectors; the measured qubits are removed.
    pub fn measure_projective(
        &mut self,
        positions: &[usize],
        basis: &[Vec<C64>],
        label: &str,
        source: &mut OutcomeSource,
    ) -> Result<MeasurementRecord> {
        let k = positions.len();
        debug_assert_eq!(basis.len(), 1 << k);
        let branches = basis
            .iter()
            .map(|v| self.project_out(positions, v))
            .collect::<Result<Vec<_>>>()?;
        let probs: Vec<f64> = branches
            .iter()
            .map(|b| b.iter().map(|a| a.norm_sqr()).sum())
            .collect();
        let what = format!("{label} measurement of qubits {positions:?}");
        let idx = source.choose(&probs, k, &what)?;
        let p = probs[idx];
        let norm = p.sqrt();
        let amps: Vec<C64> = branches[idx].iter().map(|a| a / norm).collect();
        self.n -= k;
        self.amps = amps;
        Ok(MeasurementRecord {
            qubits: positions.iter().map(|&q| q as u64).collect(),
            basis: label.to_string(),
            outcome: (0..k).map(|b| (idx >> b & 1) as u8).collect(),
            probability: p,
        })
    }

    /// Destructive single-qubit measurement.
    pub fn measure(
        &mut self,
        qubit: usize,
        basis: Basis,
        source: &mut OutcomeSource,
    ) -> Result<MeasurementRecord> {
        self.measure_projective(&[qubit], &basis_vectors(basis), &basis.label(), source)
    }

    /// Destructive Bell measurement. Outcome `(a, b)` means the pair was found
    /// in `(X^a Z^b ⊗ I)|ω⟩` with the Pauli on `q1`.
    pub fn bell_measure(
        &mut self,
        q1: usize,
        q2: usize,
        source: &mut OutcomeSource,
    ) -> Result<MeasurementRecord> {
        if q1 == q2 {
            return Err(QscError::DuplicateTarget(q1));
        }
        self.measure_projective(&[q1, q2], &bell_vectors(), "Bell", source)
    }

    /// Marginal distribution of `positions` in the computational basis, index
    /// bit `j` being `positions[j]`.
    pub fn marginal(&self, positions: &[usize]) -> Result<Vec<f64>> {
        self.check_targets(positions)?;
        let mut out = vec![0.0; 1 << positions.len()];
        for (idx, amp) in self.amps.iter().enumerate() {
            let mut local = 0usize;
            for (b, &p) in positions.iter().enumerate() {
                local |= (idx >> p & 1) << b;
            }
            out[local] += amp.norm_sqr();
        }
        Ok(out)
    }

    /// Reduced density matrix on `positions` (position `j` is bit `j`).
    pub fn reduced_density(&self, positions: &[usize]) -> Result<Matrix> {
        self.check_targets(positions)?;
        let k = positions.len();
        let rest: Vec<usize> = (0..self.n).filter(|q| !positions.contains(q)).collect();
        let kd = 1usize << k;
        let mut keep_off = vec![0usize; kd];
        for (j, off) in keep_off.iter_mut().enumerate() {
            *off = positions
                .iter()
                .enumerate()
                .filter(|(b, _)| j >> b & 1 == 1)
                .map(|(_, &p)| 1usize << p)
                .sum();
        }
        let mut rho = Matrix::zeros(kd, kd);
        let mut col = vec![cr(0.0); kd];
        for r in 0..1usize << rest.len() {
            let base: usize = rest
                .iter()
                .enumerate()
                .filter(|(b, _)| r >> b & 1 == 1)
                .map(|(_, &p)| 1usize << p)
                .sum();
            for (j, off) in keep_off.iter().enumerate() {
                col[j] = self.amps[base | off];
            }
            for a in 0..kd {
                if col[a].norm_sqr() == 0.0 {
                    continue;
                }
                for b in 0..kd {
                    rho[(a, b)] += col[a] * col[b].conj();
                }
            }
        }
        Ok(rho)
    }

    /// Best product factor on `positions`: the normalized state `a` and the
    /// weight `⟨a|ρ|a⟩` it captures, `ρ` being the reduced state there. The
    /// weight is 1 exactly when `positions` are unentangled with the rest.
    pub fn product_factor(&self, positions: &[usize]) -> Result<(StateVector, f64)> {
        self.check_targets(positions)?;
        let k = positions.len();
        let rest: Vec<usize> = (0..self.n).filter(|q| !positions.contains(q)).collect();
        let spread = |bits: usize, qs: &[usize]| -> usize {
            qs.iter().enumerate().filter(|(b, _)| bits >> b & 1 == 1).map(|(_, &p)| 1usize << p).sum()
        };
        let keep_off: Vec<usize> = (0..1usize << k).map(|j| spread(j, positions)).collect();
        let rest_off: Vec<usize> = (0..1usize << rest.len()).map(|r| spread(r, &rest)).collect();
        let column = |base: usize| keep_off.iter().map(|off| self.amps[base | off]).collect::<Vec<C64>>();
        let best = rest_off
            .iter()
            .copied()
            .max_by(|&a, &b| norm_of(&column(a)).total_cmp(&norm_of(&column(b))))
            .unwrap_or(0);
        let a = StateVector::normalized(column(best))?;
        let weight = rest_off
            .iter()
            .map(|&base| {
                keep_off
                    .iter()
                    .zip(&a.amps)
                    .map(|(off, x)| x.conj() * self.amps[base | off])
                    .sum::<C64>()
                    .norm_sqr()
            })
            .sum();
        Ok((a, weight))
    }

    /// `⟨ψ|M|ψ⟩` for `m` acting on `targets`.
    pub fn expectation(&self, m: &Matrix, targets: &[usize]) -> Result<C64> {
        self.check_targets(targets)?;
        if m.nrows() != 1 << targets.len() {
            return Err(QscError::ArityMismatch {
                arity: log2_exact(m.nrows()).unwrap_or(0),
                targets: targets.len(),
            });
        }
        let mut tmp = self.clone();
        tmp.apply_matrix_unchecked(m, targets);
        self.inner(&tmp)
    }

    /// The state as a column matrix.
    pub fn to_column(&self) -> Matrix {
        Matrix::from_column_slice(self.amps.len(), 1, &self.amps)
    }
}

fn norm_of(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Basis vectors for a single-qubit basis; index = outcome.
pub(crate) fn basis_vectors(basis: Basis) -> Vec<Vec<C64>> {
    let s = FRAC_1_SQRT_2;
    match basis {
        Basis::Z => vec![vec![cr(1.0), cr(0.0)], vec![cr(0.0), cr(1.0)]],
        Basis::X => vec![vec![cr(s), cr(s)], vec![cr(s), cr(-s)]],
        Basis::Rotated(theta) => {
            let e = C64::from_polar(s, theta);
            vec![vec![cr(s), e], vec![cr(s), -e]]
        }
    }
}

/// `(X^a Z^b ⊗ I)|ω⟩` indexed by `a + 2b`; the Pauli acts on local bit 0.
pub(crate) fn bell_vectors() -> Vec<Vec<C64>> {
    let s = FRAC_1_SQRT_2;
    (0..4usize)
        .map(|idx| {
            let (a, b) = (idx & 1, idx >> 1);
            let mut v = vec![cr(0.0); 4];
            // |ω⟩ components |00⟩ and |11⟩; Z^b then X^a on bit 0.
            for s0 in 0..2usize {
                let sign = if b == 1 && s0 == 1 { -1.0 } else { 1.0 };
                let out0 = s0 ^ a;
                v[out0 | (s0 << 1)] = c(sign * s, 0.0);
            }
            v
        })
        .collect()
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::kron;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &[C64], b: &[C64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn x_and_h_on_zero() {
        let mut s = StateVector::zeros(1).unwrap();
        s.apply_gate(&gates::x(), &[0]).unwrap();
        assert!(close(s.amplitudes(), &[cr(0.0), cr(1.0)]));
        let s = StateVector::zeros(1)
            .unwrap()
            .applied(&gates::h(), &[0])
            .unwrap();
        assert!(close(s.amplitudes(), StateVector::plus().amplitudes()));
    }

    #[test]
    fn cz_on_plus_plus_matches_matrix_vector_product() {
        let pp = StateVector::product(&[StateVector::plus(), StateVector::plus()]).unwrap();
        let out = pp.applied(&gates::cz(), &[0, 1]).unwrap();
        // oracle: explicit 4x4 times vector
        let v = gates::cz().matrix() * pp.to_column();
        assert!(close(out.amplitudes(), v.as_slice()));
        assert!(close(
            out.amplitudes(),
            &[cr(0.5), cr(0.5), cr(0.5), cr(-0.5)]
        ));
    }

    #[test]
    fn gate_errors() {
        let mut s = StateVector::zeros(2).unwrap();
        assert!(matches!(
            s.apply_gate(&gates::cz(), &[0]),
            Err(QscError::ArityMismatch { .. })
        ));
        assert!(matches!(
            s.apply_gate(&gates::cz(), &[1, 1]),
            Err(QscError::DuplicateTarget(1))
        ));
        assert!(matches!(
            s.apply_gate(&gates::x(), &[2]),
            Err(QscError::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            StateVector::zeros(21),
            Err(QscError::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn gate_on_high_targets_matches_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let psi = StateVector::random(3, &mut rng).unwrap();
        let u = UnitarySpec::random(2, &mut rng);
        // u on (q1, q2) == kron(u, I) with q0 low
        let out = psi.applied(&u, &[1, 2]).unwrap();
        let full = kron(u.matrix(), &Matrix::identity(2, 2)) * psi.to_column();
        assert!(close(out.amplitudes(), full.as_slice()));
    }

    #[test]
    fn measurement_examples() {
        let mut src = OutcomeSource::seeded(1);
        let mut plus = StateVector::plus();
        let rec = plus.measure(0, Basis::X, &mut src).unwrap();
        assert_eq!(rec.outcome, vec![0]);
        assert!((rec.probability - 1.0).abs() < 1e-12);
        assert_eq!(plus.qubit_count(), 0);

        let mut zero = StateVector::zeros(1).unwrap();
        let rec = zero
            .measure(0, Basis::X, &mut OutcomeSource::forced(&[1]))
            .unwrap();
        assert!((rec.probability - 0.5).abs() < 1e-12);
        assert_eq!(zero.qubit_count(), 0);

        let half_pi = std::f64::consts::FRAC_PI_2;
        let mut st = StateVector::qubit(cr(1.0), C64::from_polar(1.0, half_pi)).unwrap();
        let rec = st.measure(0, Basis::Rotated(half_pi), &mut src).unwrap();
        assert_eq!(rec.outcome, vec![0]);
        assert!((rec.probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measurement_removes_and_shifts() {
        // |q0=1, q1=0, q2=1>
        let mut s = StateVector::basis(3, 0b101).unwrap();
        let rec = s
            .measure(1, Basis::Z, &mut OutcomeSource::seeded(0))
            .unwrap();
        assert_eq!(rec.outcome, vec![0]);
        assert_eq!(s.amplitudes()[0b11], cr(1.0));
    }

    #[test]
    fn bell_examples() {
        let mut src = OutcomeSource::seeded(5);
        let mut w = StateVector::empty();
        w.make_ebit().unwrap();
        let rec = w.bell_measure(0, 1, &mut src).unwrap();
        assert_eq!(rec.outcome, vec![0, 0]);
        assert!((rec.probability - 1.0).abs() < 1e-12);

        // |00> = (|ω> + |Zω>)/√2 in Bell terms
        for forced in [[0u8, 0], [0, 1]] {
            let mut s = StateVector::zeros(2).unwrap();
            let rec = s
                .bell_measure(0, 1, &mut OutcomeSource::forced(&forced))
                .unwrap();
            assert!((rec.probability - 0.5).abs() < 1e-12);
        }
        for forced in [[1u8, 0], [1, 1]] {
            let mut s = StateVector::zeros(2).unwrap();
            assert!(s
                .bell_measure(0, 1, &mut OutcomeSource::forced(&forced))
                .is_err());
        }
    }

    #[test]
    fn teleportation_all_outcomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let psi = StateVector::random(1, &mut rng).unwrap();
        for a in 0..2u8 {
            for b in 0..2u8 {
                let mut s = psi.clone();
                s.make_ebit().unwrap();
                let rec = s
                    .bell_measure(0, 1, &mut OutcomeSource::forced(&[a, b]))
                    .unwrap();
                assert!((rec.probability - 0.25).abs() < 1e-12);
                // correction X^a Z^b on the receiver: apply Z^b first, then X^a
                if b == 1 {
                    s.apply_gate(&gates::z(), &[0]).unwrap();
                }
                if a == 1 {
                    s.apply_gate(&gates::x(), &[0]).unwrap();
                }
                assert!(fidelity(&s, &psi).unwrap() > 1.0 - 1e-10);
            }
        }
    }

    #[test]
    fn ebit_examples() {
        let mut s = StateVector::empty();
        s.make_ebit().unwrap();
        let h = FRAC_1_SQRT_2;
        assert!(close(s.amplitudes(), &[cr(h), cr(0.0), cr(0.0), cr(h)]));
        let mut two = s.clone();
        two.make_ebit().unwrap();
        assert!(close(two.amplitudes(), s.tensor(&s).unwrap().amplitudes()));
    }

    #[test]
    fn cluster_examples() {
        let mut s = StateVector::empty();
        s.make_cluster(1, &[]).unwrap();
        assert!(close(s.amplitudes(), StateVector::plus().amplitudes()));

        let mut s = StateVector::empty();
        s.make_cluster(2, &[(0, 1)]).unwrap();
        assert!(close(
            s.amplitudes(),
            &[cr(0.5), cr(0.5), cr(0.5), cr(-0.5)]
        ));

        let mut s = StateVector::empty();
        s.make_cluster(3, &[(0, 1), (1, 2)]).unwrap();
        let (x, z) = (gates::x().into_matrix(), gates::z().into_matrix());
        let i = Matrix::identity(2, 2);
        // stabilizers written as (q0, q1, q2)
        for (a, b, cc) in [(&x, &z, &i), (&z, &x, &z), (&i, &z, &x)] {
            let m = kron(cc, &kron(b, a));
            let e = s.expectation(&m, &[0, 1, 2]).unwrap();
            assert!((e - cr(1.0)).norm() < 1e-12);
        }
        assert!(StateVector::empty().make_cluster(2, &[(1, 1)]).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let z = StateVector::zeros(1).unwrap();
        let o = StateVector::basis(1, 1).unwrap();
        assert!((fidelity(&z, &z).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&z, &o).unwrap().abs() < 1e-12);
        assert!((fidelity(&z, &StateVector::plus()).unwrap() - 0.5).abs() < 1e-12);
        assert!(fidelity(&z, &StateVector::zeros(2).unwrap()).is_err());
    }

    #[test]
    fn reduced_density_of_ebit_is_mixed() {
        let mut s = StateVector::empty();
        s.make_ebit().unwrap();
        let rho = s.reduced_density(&[0]).unwrap();
        assert!((rho[(0, 0)] - cr(0.5)).norm() < 1e-12);
        assert!(rho[(0, 1)].norm() < 1e-12);
    }
}
