//! Stored gates with left/right edge modes and a measurable bulk.
//!
//! A [`Transistor`] owns no state of its own: it names qubits inside a
//! [`Register`], and every operation mutates that register. Pauli
//! byproducts live in the register's frame, keyed by the qubit that
//! currently carries the logical data (the first bulk site of a chain before
//! activation, the right modes afterwards).

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::{QscError, Result};
use crate::qcore::{
    choi_of_unitary, cr, gates, Basis, ChoiState, MeasurementRecord, OutcomeSource, Pauli1,
    PauliOperator, QubitId, Register, StateVector, UnitarySpec, C64,
};

/// The gate a transistor stores.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    /// Path cluster with `N` bulk sites measured in the X basis; induces `H^N`.
    Wire(usize),
    /// Two bulk sites, the first measured in a rotated basis; induces `S`.
    SChain,
    /// `(I ⊗ U)` on `arity` ebits, `U` on at most two qubits.
    ChoiStored(UnitarySpec),
    /// An ebit plus a magic ancilla; activation injects `T`.
    MagicT,
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::ChoiStored(u) => u.arity(),
            _ => 1,
        }
    }

    pub fn label(&self) -> String {
        match self {
            GateKind::Wire(n) => format!("wire({n})"),
            GateKind::SChain => "s".into(),
            GateKind::ChoiStored(_) => "choi".into(),
            GateKind::MagicT => "t".into(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GateKind::Wire(0) => Err(QscError::InvalidParameter(
                "wire needs at least one bulk site".into(),
            )),
            GateKind::ChoiStored(u) if u.arity() == 0 || u.arity() > 2 => {
                Err(QscError::InvalidParameter(format!(
                    "stored gate arity {} outside 1..=2",
                    u.arity()
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Fresh,
    Consumed,
}

/// Bulk measurement outcomes, site 1 (next to the left mode) first.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WireBasisOutcome(pub Vec<u8>);

/// Which outcome of the magic-ancilla measurement triggers the Clifford
/// correction, and which correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagicFeedforward {
    /// `T`: apply `S` when the ancilla reads 1.
    SOnOne,
    /// `T†`: apply `S†` when the ancilla reads 0.
    SdgOnZero,
}

/// How a chain or magic transistor is activated.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationRecipe {
    pub bulk_bases: Vec<Basis>,
    /// Pauli appended to the output frame after the bulk is measured.
    pub frame_append: Pauli1,
    pub feedforward: Option<MagicFeedforward>,
}

/// Activation recipe of `kind`, or of its conjugate when `dagger` is set.
pub fn activation_recipe(kind: &GateKind, dagger: bool) -> Result<ActivationRecipe> {
    let recipe = match kind {
        GateKind::Wire(n) => ActivationRecipe {
            bulk_bases: vec![Basis::X; *n],
            frame_append: Pauli1::I,
            feedforward: None,
        },
        GateKind::SChain => ActivationRecipe {
            bulk_bases: vec![Basis::Rotated(-FRAC_PI_2), Basis::X],
            frame_append: Pauli1::I,
            feedforward: None,
        },
        GateKind::MagicT => ActivationRecipe {
            bulk_bases: vec![Basis::Z],
            frame_append: Pauli1::I,
            feedforward: Some(MagicFeedforward::SOnOne),
        },
        GateKind::ChoiStored(_) => ActivationRecipe {
            bulk_bases: vec![],
            frame_append: Pauli1::I,
            feedforward: None,
        },
    };
    if dagger {
        return conjugate_variant(kind);
    }
    Ok(recipe)
}

/// Recipe of the conjugate gate: `S†` by an extra `Z` on the output frame,
/// `T†` by swapping the feedforward.
pub fn conjugate_variant(kind: &GateKind) -> Result<ActivationRecipe> {
    let mut r = activation_recipe(kind, false)?;
    match kind {
        GateKind::SChain => r.frame_append = Pauli1::Z,
        GateKind::MagicT => r.feedforward = Some(MagicFeedforward::SdgOnZero),
        other => {
            return Err(QscError::UnsupportedKind(format!(
                "no conjugate recipe for {}",
                other.label()
            )))
        }
    }
    Ok(r)
}

/// `H Z^s D(θ)`: the map a rotated-basis measurement with outcome `s` puts
/// on the next site of a cluster chain.
fn site_map(basis: Basis, s: u8) -> Result<UnitarySpec> {
    let d = match basis {
        Basis::X => gates::i(),
        Basis::Rotated(theta) => gates::phase(-theta),
        Basis::Z => return Err(QscError::InvalidParameter("Z is not a wire basis".into())),
    };
    let z = if s == 1 { gates::z() } else { gates::i() };
    gates::h().compose(&z)?.compose(&d)
}

/// Splits the ordered product of the bulk's site maps into
/// `byproduct × logical`.
pub fn induced_gate(o: &WireBasisOutcome, kind: &GateKind) -> Result<(UnitarySpec, PauliOperator)> {
    let recipe = activation_recipe(kind, false)?;
    let logical = logical_unitary(kind, false, false);
    if matches!(kind, GateKind::ChoiStored(_) | GateKind::MagicT) {
        let n = logical.arity();
        return Ok((logical, PauliOperator::identity(n)));
    }
    if o.0.len() != recipe.bulk_bases.len() {
        return Err(QscError::DimensionMismatch(format!(
            "{} outcomes for {} bulk sites",
            o.0.len(),
            recipe.bulk_bases.len()
        )));
    }
    let mut m = gates::i();
    for (basis, &s) in recipe.bulk_bases.iter().zip(&o.0) {
        m = site_map(*basis, s)?.compose(&m)?;
    }
    let b = m.matrix() * logical.matrix().adjoint();
    let byproduct = PauliOperator::from_matrix(&b, 1e-9)
        .ok_or_else(|| QscError::InvalidParameter("bulk product is not Pauli × logical".into()))?;
    Ok((logical, byproduct))
}

/// The unitary a transistor of `kind` implements, after orientation and
/// conjugation flags.
pub fn logical_unitary(kind: &GateKind, reversed: bool, dagger: bool) -> UnitarySpec {
    let u = match kind {
        GateKind::Wire(n) => {
            if n % 2 == 1 {
                gates::h()
            } else {
                gates::i()
            }
        }
        GateKind::SChain => gates::s(),
        GateKind::ChoiStored(u) => u.clone(),
        GateKind::MagicT => gates::t(),
    };
    let u = if reversed { u.transpose() } else { u };
    if dagger {
        u.adjoint()
    } else {
        u
    }
}

fn conjugate_through(u: &UnitarySpec, p: &PauliOperator) -> Option<PauliOperator> {
    p.conjugate_unitary(u)
}

fn write_frame(reg: &mut Register, qubits: &[QubitId], p: &PauliOperator) {
    for (i, &q) in qubits.iter().enumerate() {
        reg.frame_mut().set(q, p.get(i));
    }
}

fn take_frame(reg: &mut Register, qubits: &[QubitId]) -> PauliOperator {
    let op = reg.frame().operator_on(qubits);
    for &q in qubits {
        reg.frame_mut().take(q);
    }
    op
}

/// Where one left mode gets its input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LegInput {
    /// Measure the left mode; the extra Pauli selects among the basis
    /// states reachable from the outcome-0 branch.
    Measure(Basis, Pauli1),
    /// Bell-measure this data qubit with the left mode.
    Teleport(QubitId),
}

/// The four single-qubit inputs a measurement can prepare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisState {
    Zero,
    One,
    Plus,
    Minus,
}

impl BasisState {
    pub fn from_symbol(c: char) -> Option<Self> {
        Some(match c {
            '0' => BasisState::Zero,
            '1' => BasisState::One,
            '+' => BasisState::Plus,
            '-' => BasisState::Minus,
            _ => return None,
        })
    }

    pub fn symbol(&self) -> char {
        match self {
            BasisState::Zero => '0',
            BasisState::One => '1',
            BasisState::Plus => '+',
            BasisState::Minus => '-',
        }
    }

    pub fn state(&self) -> StateVector {
        match self {
            BasisState::Zero => StateVector::basis(1, 0).expect("one qubit"),
            BasisState::One => StateVector::basis(1, 1).expect("one qubit"),
            BasisState::Plus => StateVector::plus(),
            BasisState::Minus => StateVector::minus(),
        }
    }

    /// Left-mode measurement preparing this state. A chain's first bulk
    /// site sees `|s⟩` after an X outcome `s` and `H|j⟩` after a Z outcome
    /// `j`; a Choi leg sees the measured eigenstate itself.
    pub fn measure_plan(&self, chain: bool) -> LegInput {
        let computational = matches!(self, BasisState::Zero | BasisState::One);
        let basis = if computational == chain {
            Basis::X
        } else {
            Basis::Z
        };
        let extra = match self {
            BasisState::One => Pauli1::X,
            BasisState::Minus => Pauli1::Z,
            _ => Pauli1::I,
        };
        LegInput::Measure(basis, extra)
    }
}

/// A stored gate inside a [`Register`].
#[derive(Debug, Clone)]
pub struct Transistor {
    kind: GateKind,
    left_modes: Vec<QubitId>,
    right_modes: Vec<QubitId>,
    bulk: Vec<QubitId>,
    status: Status,
    reversed: bool,
    dagger: bool,
    injected: bool,
    records: Vec<MeasurementRecord>,
}

/// Allocates a chain transistor (`Wire(N)` or `SChain`) as the path cluster
/// `L – b1 – … – bN – R`.
pub fn build_chain_transistor(kind: GateKind, reg: &mut Register) -> Result<Transistor> {
    kind.validate()?;
    let n = match kind {
        GateKind::Wire(n) => n,
        GateKind::SChain => 2,
        ref other => {
            return Err(QscError::UnsupportedKind(format!(
                "{} is not a chain",
                other.label()
            )));
        }
    };
    let edges: Vec<(usize, usize)> = (0..n + 1).map(|i| (i, i + 1)).collect();
    let ids = reg.alloc_cluster(n + 2, &edges)?;
    Ok(Transistor::new(
        kind,
        vec![ids[0]],
        ids[1..=n].to_vec(),
        vec![ids[n + 1]],
    ))
}

/// Allocates `arity` ebits and applies `u` to their output halves.
pub fn build_choi_transistor(u: UnitarySpec, reg: &mut Register) -> Result<Transistor> {
    let kind = GateKind::ChoiStored(u.clone());
    kind.validate()?;
    let mut left = Vec::new();
    let mut right = Vec::new();
    for _ in 0..u.arity() {
        let (a, b) = reg.alloc_ebit()?;
        left.push(a);
        right.push(b);
    }
    reg.apply(&u, &right)?;
    Ok(Transistor::new(kind, left, vec![], right))
}

/// An `L – R` ebit plus the ancilla `(|0⟩ + e^{iπ/4}|1⟩)/√2`.
pub fn build_magic_transistor(reg: &mut Register) -> Result<Transistor> {
    let (l, r) = reg.alloc_ebit()?;
    let anc = reg.alloc_state(&magic_state())?[0];
    Ok(Transistor::new(
        GateKind::MagicT,
        vec![l],
        vec![anc],
        vec![r],
    ))
}

fn magic_state() -> StateVector {
    StateVector::qubit(cr(1.0), C64::from_polar(1.0, FRAC_PI_4)).expect("unit amplitudes")
}

/// Applies `T` (or `T†`) to `target` by consuming a magic ancilla. Any
/// pending frame on `target` is resolved first.
pub fn inject_magic_t(
    reg: &mut Register,
    target: QubitId,
    feedforward: MagicFeedforward,
    src: &mut OutcomeSource,
) -> Result<MeasurementRecord> {
    reg.position(target)?;
    let anc = reg.alloc_state(&magic_state())?[0];
    consume_magic(reg, target, anc, feedforward, src)
}

fn consume_magic(
    reg: &mut Register,
    target: QubitId,
    anc: QubitId,
    feedforward: MagicFeedforward,
    src: &mut OutcomeSource,
) -> Result<MeasurementRecord> {
    reg.resolve(&[target])?;
    reg.apply(&gates::cnot(), &[target, anc])?;
    let rec = reg.measure(anc, Basis::Z, src)?;
    match (feedforward, rec.outcome[0]) {
        (MagicFeedforward::SOnOne, 1) => reg.apply(&gates::s(), &[target])?,
        (MagicFeedforward::SdgOnZero, 0) => reg.apply(&gates::sdg(), &[target])?,
        _ => {}
    }
    Ok(rec)
}

impl Transistor {
    fn new(kind: GateKind, left: Vec<QubitId>, bulk: Vec<QubitId>, right: Vec<QubitId>) -> Self {
        Transistor {
            kind,
            left_modes: left,
            right_modes: right,
            bulk,
            status: Status::Fresh,
            reversed: false,
            dagger: false,
            injected: false,
            records: Vec::new(),
        }
    }

    /// Builds a fresh transistor of any kind.
    pub fn build(kind: GateKind, reg: &mut Register) -> Result<Self> {
        match kind {
            GateKind::Wire(_) | GateKind::SChain => build_chain_transistor(kind, reg),
            GateKind::ChoiStored(u) => build_choi_transistor(u, reg),
            GateKind::MagicT => build_magic_transistor(reg),
        }
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn left_modes(&self) -> &[QubitId] {
        &self.left_modes
    }

    pub fn right_modes(&self) -> &[QubitId] {
        &self.right_modes
    }

    pub fn bulk(&self) -> &[QubitId] {
        &self.bulk
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    pub fn is_dagger(&self) -> bool {
        self.dagger
    }

    pub fn arity(&self) -> usize {
        self.kind.arity()
    }

    /// Measurement records from injection and activation, in order.
    pub fn records(&self) -> &[MeasurementRecord] {
        &self.records
    }

    /// The gate this transistor applies once activated.
    pub fn logical_unitary(&self) -> UnitarySpec {
        logical_unitary(&self.kind, self.reversed, self.dagger)
    }

    /// Pending byproduct on the right modes.
    pub fn frame(&self, reg: &Register) -> PauliOperator {
        reg.frame().operator_on(&self.right_modes)
    }

    /// Qubits in construction order, paired with the state they should hold
    /// while fresh.
    pub fn reference(&self) -> (Vec<QubitId>, StateVector) {
        match &self.kind {
            GateKind::Wire(_) | GateKind::SChain => {
                let mut ids = self.left_modes.clone();
                ids.extend(&self.bulk);
                ids.extend(&self.right_modes);
                let n = ids.len();
                let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
                let mut s = StateVector::empty();
                s.make_cluster(n, &edges).expect("chain fits the register");
                (ids, s)
            }
            GateKind::ChoiStored(u) => {
                let (inputs, outputs) = if self.reversed {
                    (&self.right_modes, &self.left_modes)
                } else {
                    (&self.left_modes, &self.right_modes)
                };
                let mut ids = inputs.clone();
                ids.extend(outputs);
                let state = match choi_of_unitary(u) {
                    ChoiState::Pure { state, .. } => state,
                    ChoiState::Mixed { .. } => unreachable!("unitary Choi states are pure"),
                };
                (ids, state)
            }
            GateKind::MagicT => {
                let mut w = StateVector::empty();
                w.make_ebit().expect("two qubits");
                let s = w.tensor(&magic_state()).expect("three qubits");
                (
                    vec![self.left_modes[0], self.right_modes[0], self.bulk[0]],
                    s,
                )
            }
        }
    }

    /// Fidelity of the register with the fresh construction state.
    pub fn fresh_fidelity(&self, reg: &Register) -> Result<f64> {
        let (ids, s) = self.reference();
        reg.fidelity_with(&ids, &s)
    }

    fn ensure_fresh(&self) -> Result<()> {
        if self.status == Status::Consumed {
            return Err(QscError::TransistorConsumed);
        }
        Ok(())
    }

    fn ensure_not_injected(&self) -> Result<()> {
        self.ensure_fresh()?;
        if self.injected {
            return Err(QscError::InputAlreadyInjected);
        }
        Ok(())
    }

    /// Qubit that carries the logical input once injection is done.
    fn input_carriers(&self) -> Vec<QubitId> {
        match self.kind {
            GateKind::Wire(_) | GateKind::SChain => vec![self.bulk[0]],
            _ => self.right_modes.clone(),
        }
    }

    /// The stored gate as seen from the input side, used to push frames
    /// from the input legs onto the outputs.
    fn stored_map(&self) -> Option<UnitarySpec> {
        match &self.kind {
            GateKind::ChoiStored(u) => Some(if self.reversed {
                u.transpose()
            } else {
                u.clone()
            }),
            GateKind::MagicT => Some(gates::i()),
            _ => None,
        }
    }

    /// Places the input-side byproduct `p` onto the input carriers.
    fn push_input_frame(&mut self, reg: &mut Register, p: PauliOperator) -> Result<()> {
        let carriers = self.input_carriers();
        match self.stored_map() {
            None => write_frame(reg, &carriers, &p),
            Some(u) => match conjugate_through(&u, &p) {
                Some(q) => write_frame(reg, &carriers, &q),
                None => {
                    // Non-Clifford stored gate: undo U P U† physically.
                    let fix = u
                        .compose(&UnitarySpec::new_unchecked(p.matrix()))?
                        .compose(&u.adjoint())?;
                    reg.apply(&fix.adjoint(), &carriers)?;
                    write_frame(reg, &carriers, &PauliOperator::identity(carriers.len()));
                }
            },
        }
        Ok(())
    }

    /// True for cluster-chain kinds, whose input sits on the first bulk site.
    pub fn is_chain(&self) -> bool {
        matches!(self.kind, GateKind::Wire(_) | GateKind::SChain)
    }

    /// Injects the input leg by leg. Measured legs take the outcome-0 branch
    /// as their logical input; teleported legs carry their data qubit's
    /// pending frame along. All byproducts end up on the input carriers.
    pub fn inject(
        &mut self,
        reg: &mut Register,
        legs: &[LegInput],
        src: &mut OutcomeSource,
    ) -> Result<Vec<MeasurementRecord>> {
        self.ensure_not_injected()?;
        if legs.len() != self.left_modes.len() {
            return Err(QscError::DimensionMismatch(format!(
                "{} inputs for {} left modes",
                legs.len(),
                self.left_modes.len()
            )));
        }
        let chain = self.is_chain();
        let mut recs = Vec::new();
        let mut paulis = Vec::new();
        for (leg, &l) in legs.iter().zip(&self.left_modes.clone()) {
            match *leg {
                LegInput::Measure(basis, extra) => {
                    let rec = reg.measure(l, basis, src)?;
                    let bit = rec.outcome[0] == 1;
                    let p = match (chain, basis) {
                        (true, Basis::Z) | (false, Basis::X) | (false, Basis::Rotated(_)) => {
                            Pauli1::new(false, bit)
                        }
                        (true, _) | (false, Basis::Z) => Pauli1::new(bit, false),
                    };
                    paulis.push(p.mul(extra));
                    recs.push(rec);
                }
                LegInput::Teleport(d) => {
                    if chain {
                        // Turns the L–b1 cluster bond into an ebit.
                        reg.apply(&gates::h(), &[l])?;
                    }
                    let prior = reg.frame_mut().take(d);
                    let rec = reg.bell_measure(d, l, src)?;
                    let p = Pauli1::new(rec.outcome[0] == 1, rec.outcome[1] == 1);
                    paulis.push(p.mul(prior));
                    recs.push(rec);
                }
            }
        }
        self.push_input_frame(reg, PauliOperator::from_paulis(&paulis))?;
        self.records.extend(recs.iter().cloned());
        self.injected = true;
        Ok(recs)
    }

    /// Prepares the input by measuring every left mode in `basis`.
    pub fn inject_input_by_measurement(
        &mut self,
        reg: &mut Register,
        basis: Basis,
        src: &mut OutcomeSource,
    ) -> Result<Vec<MeasurementRecord>> {
        let legs = vec![LegInput::Measure(basis, Pauli1::I); self.left_modes.len()];
        self.inject(reg, &legs, src)
    }

    /// Prepares `state` on every left mode by measurement.
    pub fn inject_basis_state(
        &mut self,
        reg: &mut Register,
        state: BasisState,
        src: &mut OutcomeSource,
    ) -> Result<Vec<MeasurementRecord>> {
        let leg = state.measure_plan(self.is_chain());
        let legs = vec![leg; self.left_modes.len()];
        self.inject(reg, &legs, src)
    }

    /// Logical input produced by measuring a left mode in `basis`.
    pub fn measured_input(&self, basis: Basis) -> StateVector {
        let one = |u: &UnitarySpec, s: StateVector| s.applied(u, &[0]).expect("one qubit");
        match (self.is_chain(), basis) {
            (true, Basis::Z) | (false, Basis::X) => StateVector::plus(),
            (true, Basis::X) | (false, Basis::Z) => StateVector::basis(1, 0).expect("one qubit"),
            (true, Basis::Rotated(t)) => {
                one(&gates::h(), one(&gates::phase(-t), StateVector::plus()))
            }
            (false, Basis::Rotated(t)) => one(&gates::phase(-t), StateVector::plus()),
        }
    }

    /// Teleports `data` into the left modes.
    pub fn inject_input_by_teleport(
        &mut self,
        reg: &mut Register,
        data: &[QubitId],
        src: &mut OutcomeSource,
    ) -> Result<Vec<MeasurementRecord>> {
        let legs: Vec<LegInput> = data.iter().map(|&d| LegInput::Teleport(d)).collect();
        self.inject(reg, &legs, src)
    }

    /// Measures the bulk, moving the logical data onto the right modes.
    pub fn activate(
        &mut self,
        reg: &mut Register,
        src: &mut OutcomeSource,
    ) -> Result<WireBasisOutcome> {
        self.ensure_fresh()?;
        if !self.injected {
            return Err(QscError::InputMissing);
        }
        let recipe = activation_recipe(&self.kind, self.dagger)?;
        let outcome = match &self.kind {
            GateKind::Wire(_) | GateKind::SChain => {
                let f_in = take_frame(reg, &[self.bulk[0]]);
                let mut bits = Vec::with_capacity(self.bulk.len());
                for (&site, basis) in self.bulk.iter().zip(&recipe.bulk_bases) {
                    let rec = reg.measure(site, *basis, src)?;
                    bits.push(rec.outcome[0]);
                    self.records.push(rec);
                }
                let o = WireBasisOutcome(bits);
                let (logical, byproduct) = induced_gate(&o, &self.kind)?;
                let moved = conjugate_through(&logical, &f_in).expect("chain gates are Clifford");
                let mut f_out = byproduct.mul(&moved)?.paulis()[0];
                f_out = recipe.frame_append.mul(f_out);
                reg.frame_mut().set(self.right_modes[0], f_out);
                o
            }
            GateKind::ChoiStored(_) => WireBasisOutcome::default(),
            GateKind::MagicT => {
                let ff = recipe.feedforward.expect("magic recipe has feedforward");
                let rec = consume_magic(reg, self.right_modes[0], self.bulk[0], ff, src)?;
                let o = WireBasisOutcome(rec.outcome.clone());
                self.records.push(rec);
                o
            }
        };
        self.status = Status::Consumed;
        Ok(outcome)
    }

    /// Swaps the roles of the edge modes; activation then applies the
    /// transpose of the stored gate.
    pub fn run_backward(mut self) -> Result<Transistor> {
        self.ensure_not_injected()?;
        std::mem::swap(&mut self.left_modes, &mut self.right_modes);
        if matches!(self.kind, GateKind::Wire(_) | GateKind::SChain) {
            self.bulk.reverse();
        }
        self.reversed = !self.reversed;
        Ok(self)
    }

    /// Switches to the conjugate recipe (`S†` or `T†`).
    pub fn conjugate_variant(mut self) -> Result<Transistor> {
        self.ensure_not_injected()?;
        conjugate_variant(&self.kind)?;
        self.dagger = !self.dagger;
        Ok(self)
    }

    /// Builds a fresh copy on new qubits. The consumed transistor's right
    /// modes stay in the register.
    pub fn refresh(&self, reg: &mut Register) -> Result<Transistor> {
        if self.status == Status::Fresh {
            return Err(QscError::TransistorFresh);
        }
        let mut t = Transistor::build(self.kind.clone(), reg)?;
        if self.reversed {
            t = t.run_backward()?;
        }
        t.dagger = self.dagger;
        Ok(t)
    }
}
