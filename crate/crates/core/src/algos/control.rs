use crate::error::{QscError, Result};
use crate::qcore::{c, cr, Matrix, OutcomeSource, QubitId, Register, RngPolicy, StateVector, UnitarySpec, C64};
use crate::transistor::{logical_unitary, GateKind, Transistor};

const EIGEN_TOL: f64 = 1e-8;

/// Some eigenvector of the unitary `u`.
///
/// `u` is normal, so its Hermitian and anti-Hermitian parts share an
/// eigenbasis; a generic real mix of the two separates distinct
/// eigenvalues.
pub fn eigenstate(u: &UnitarySpec) -> Result<StateVector> {
    let m = u.matrix();
    let ad = m.adjoint();
    let herm = (m + &ad) * cr(0.5);
    let anti = (m - &ad) * c(0.0, -0.5);
    let mix = herm + anti * cr(0.618_033_988_749_894_9);
    let eig = mix.symmetric_eigen();
    let v: Vec<C64> = eig.eigenvectors.column(0).iter().copied().collect();
    let s = StateVector::normalized(v)?;
    eigenphase(u, &s)?;
    Ok(s)
}

/// `⟨λ|U|λ⟩` after checking that `λ` is an eigenstate.
pub(crate) fn eigenphase(u: &UnitarySpec, lam: &StateVector) -> Result<C64> {
    if lam.qubit_count() != u.arity() {
        return Err(QscError::DimensionMismatch(format!(
            "{}-qubit eigenstate for a {}-qubit gate",
            lam.qubit_count(),
            u.arity()
        )));
    }
    let ul = lam.applied(u, &(0..u.arity()).collect::<Vec<_>>())?;
    let phase = lam.inner(&ul)?;
    let residual = ul
        .amplitudes()
        .iter()
        .zip(lam.amplitudes())
        .map(|(a, b)| (a - phase * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > EIGEN_TOL {
        return Err(QscError::NotEigenstate { residual });
    }
    Ok(phase / phase.norm())
}

/// Swaps blocks `a` and `b` (`m` qubits each) on the control values where
/// `sel` holds. Targets are `[a, b, control]`.
fn selected_swap(m: usize, k: usize, sel: &dyn Fn(usize) -> bool) -> UnitarySpec {
    let d = 1usize << (2 * m + k);
    let mask = (1usize << m) - 1;
    let mut u = Matrix::zeros(d, d);
    for idx in 0..d {
        let a = idx & mask;
        let b = (idx >> m) & mask;
        let ctl = idx >> (2 * m);
        let out = if sel(ctl) { b | a << m | ctl << (2 * m) } else { idx };
        u[(out, idx)] = cr(1.0);
    }
    UnitarySpec::new(u).expect("permutation")
}

/// `diag` over control values: `phase` where `sel` holds, 1 elsewhere.
fn control_phase(k: usize, phase: C64, sel: &dyn Fn(usize) -> bool) -> UnitarySpec {
    let d = 1usize << k;
    let u = Matrix::from_fn(d, d, |i, j| {
        if i != j {
            cr(0.0)
        } else if sel(i) {
            phase
        } else {
            cr(1.0)
        }
    });
    UnitarySpec::new(u).expect("diagonal phase")
}

/// Applies the gate stored in `t` to `data` on the branches where the
/// control register value satisfies `on`, and returns the qubits now
/// holding the data.
///
/// Off branches swap the data out for an ancilla in the eigenstate `lam`,
/// so the single activation hits the ancilla there. The eigenvalue that
/// leaves on the off branches is taken back with a known phase on the
/// control register.
pub(crate) fn select_apply(
    reg: &mut Register,
    t: Transistor,
    lam: &StateVector,
    control: &[QubitId],
    data: &[QubitId],
    on: &dyn Fn(usize) -> bool,
    src: &mut OutcomeSource,
) -> Result<Vec<QubitId>> {
    let mut t = t;
    let m = data.len();
    if t.arity() != m {
        return Err(QscError::ArityMismatch {
            arity: t.arity(),
            targets: m,
        });
    }
    let u = t.logical_unitary();
    let phase = eigenphase(&u, lam)?;
    reg.resolve(data)?;
    reg.resolve(control)?;
    let k = control.len();
    let off = |v: usize| !on(v);
    let swap = selected_swap(m, k, &off);

    let anc = reg.alloc_state(lam)?;
    let mut targets = data.to_vec();
    targets.extend(&anc);
    targets.extend(control);
    reg.apply(&swap, &targets)?;

    t.inject_input_by_teleport(reg, data, src)?;
    t.activate(reg, src)?;
    let slot = t.right_modes().to_vec();
    reg.resolve(&slot)?;

    let mut targets = slot.clone();
    targets.extend(&anc);
    targets.extend(control);
    reg.apply(&swap, &targets)?;
    if k > 0 {
        reg.apply(&control_phase(k, phase.conj(), &off), control)?;
    } else if !on(0) {
        return Err(QscError::InvalidParameter("selection never fires".into()));
    }
    reg.take_pure(&anc)?;
    Ok(slot)
}

/// Realizes `∧U = diag(I, U)` on `input` (data on the low qubits, one
/// control qubit on top) with a single activation of a transistor storing
/// `U`, and the eigenstate `lambda` of `U` as the idle target.
pub fn controlled_u_via_transistor(
    kind: &GateKind,
    lambda: &StateVector,
    input: &StateVector,
    policy: &RngPolicy,
) -> Result<StateVector> {
    let m = kind.arity();
    if input.qubit_count() != m + 1 {
        return Err(QscError::DimensionMismatch(format!(
            "{}-qubit input for a controlled {m}-qubit gate",
            input.qubit_count()
        )));
    }
    eigenphase(&logical_unitary(kind, false, false), lambda)?;
    let mut src = policy.source();
    let mut reg = Register::new();
    let ids = reg.alloc_state(input)?;
    let (data, control) = ids.split_at(m);
    let t = Transistor::build(kind.clone(), &mut reg)?;
    let out = select_apply(&mut reg, t, lambda, control, data, &|v| v == 1, &mut src)?;
    let mut all = out;
    all.extend(control);
    reg.extract_pure(&all)
}

pub fn controlled_u_reference(u: &UnitarySpec, input: &StateVector) -> Result<StateVector> {
    input.applied(&u.controlled(), &(0..=u.arity()).collect::<Vec<_>>())
}

/// Coherent selection of `unitaries[i]` by a `k`-qubit control register
/// prepared in `Σ c_i |i⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct QmuxSpec {
    control_qubits: usize,
    data_qubits: usize,
    unitaries: Vec<UnitarySpec>,
    coefficients: Vec<C64>,
}

impl QmuxSpec {
    pub fn new(unitaries: Vec<UnitarySpec>, coefficients: Vec<C64>) -> Result<Self> {
        let n = unitaries.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(QscError::InvalidParameter(format!(
                "{n} branches; the control dimension must be a power of two"
            )));
        }
        if coefficients.len() != n {
            return Err(QscError::DimensionMismatch(format!(
                "{} coefficients for {n} branches",
                coefficients.len()
            )));
        }
        let m = unitaries[0].arity();
        if m == 0 || m > 2 || unitaries.iter().any(|u| u.arity() != m) {
            return Err(QscError::InvalidParameter(
                "branch gates must share one arity of 1 or 2".into(),
            ));
        }
        let norm: f64 = coefficients.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(QscError::NotNormalized { norm: norm.sqrt() });
        }
        Ok(QmuxSpec {
            control_qubits: n.trailing_zeros() as usize,
            data_qubits: m,
            unitaries,
            coefficients,
        })
    }

    pub fn control_qubits(&self) -> usize {
        self.control_qubits
    }

    pub fn data_qubits(&self) -> usize {
        self.data_qubits
    }

    pub fn unitaries(&self) -> &[UnitarySpec] {
        &self.unitaries
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coefficients
    }

    fn control_state(&self) -> Result<StateVector> {
        StateVector::from_amplitudes(self.coefficients.clone())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QmuxOptions {
    /// Run every branch transistor backwards, giving `diag(U_iᵗ)`.
    pub backward: bool,
}

/// `Σ c_i |i⟩ U_i|ψ⟩`, data on the low qubits and the control register on
/// top.
pub fn qmux(spec: &QmuxSpec, psi: &StateVector, policy: &RngPolicy) -> Result<StateVector> {
    qmux_with(spec, psi, QmuxOptions::default(), &mut policy.source())
}

pub fn qmux_with(spec: &QmuxSpec, psi: &StateVector, opts: QmuxOptions, src: &mut OutcomeSource) -> Result<StateVector> {
    if psi.qubit_count() != spec.data_qubits {
        return Err(QscError::DimensionMismatch(format!(
            "{}-qubit data for {}-qubit branches",
            psi.qubit_count(),
            spec.data_qubits
        )));
    }
    let mut reg = Register::new();
    let mut data = reg.alloc_state(psi)?;
    let control = reg.alloc_state(&spec.control_state()?)?;
    for (i, u) in spec.unitaries.iter().enumerate() {
        let mut t = Transistor::build(GateKind::ChoiStored(u.clone()), &mut reg)?;
        if opts.backward {
            t = t.run_backward()?;
        }
        let lam = eigenstate(&t.logical_unitary())?;
        data = select_apply(&mut reg, t, &lam, &control, &data, &|v| v == i, src)?;
    }
    let mut all = data;
    all.extend(&control);
    reg.extract_pure(&all)
}

/// Dense `diag(U_0, …)` applied to `(Σ c_i|i⟩) ⊗ |ψ⟩`.
pub fn qmux_reference(spec: &QmuxSpec, psi: &StateVector) -> Result<StateVector> {
    let dm = 1usize << spec.data_qubits;
    let mut amps = vec![cr(0.0); dm << spec.control_qubits];
    for (i, (u, ci)) in spec.unitaries.iter().zip(&spec.coefficients).enumerate() {
        let branch = psi.applied(u, &(0..spec.data_qubits).collect::<Vec<_>>())?;
        for (d, a) in branch.amplitudes().iter().enumerate() {
            amps[i * dm + d] = ci * a;
        }
    }
    StateVector::from_amplitudes(amps)
}

/// Parallel query `Σ c_i |i⟩|D_i⟩` with items `|D_i⟩ = U_i|ψ⟩`; the same
/// circuit as [`qmux`].
pub fn qram_query(addresses: &[C64], items: &[UnitarySpec], psi: &StateVector, policy: &RngPolicy) -> Result<StateVector> {
    let spec = QmuxSpec::new(items.to_vec(), addresses.to_vec())?;
    qmux(&spec, psi, policy)
}
