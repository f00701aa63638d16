use crate::error::{QscError, Result};
use crate::qcore::{gates, OutcomeSource, QubitId, Register, StateVector};
use crate::transistor::{logical_unitary, GateKind, Transistor};

/// Stage layout of a shift register. Each stage holds `width` qubits and
/// passes data on through a transistor of its kind (identity by default).
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftRegisterSpec {
    pub stages: usize,
    pub width: usize,
    pub stage_kinds: Vec<GateKind>,
}

impl ShiftRegisterSpec {
    pub fn identity(stages: usize, width: usize) -> Self {
        ShiftRegisterSpec {
            stages,
            width,
            stage_kinds: vec![GateKind::ChoiStored(gates::i()); stages],
        }
    }

    fn validate(&self) -> Result<()> {
        if self.stages == 0 || self.width == 0 {
            return Err(QscError::InvalidParameter("shift register needs m ≥ 1 stages of width ≥ 1".into()));
        }
        if self.stage_kinds.len() != self.stages {
            return Err(QscError::DimensionMismatch(format!(
                "{} stage kinds for {} stages",
                self.stage_kinds.len(),
                self.stages
            )));
        }
        if let Some(k) = self.stage_kinds.iter().find(|k| k.arity() != 1) {
            return Err(QscError::UnsupportedKind(format!("stage kind {} is not single-qubit", k.label())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftMode {
    /// Stage contents stay on their qubits and only change stage label.
    Persistent,
    /// Every move teleports the data through a fresh stage transistor.
    Teleport,
}

#[derive(Debug, Clone)]
pub struct ShiftRegister {
    spec: ShiftRegisterSpec,
    mode: ShiftMode,
    stages: Vec<Vec<QubitId>>,
}

impl ShiftRegister {
    /// Allocates the register with every stage in `|0…0⟩`.
    pub fn new(reg: &mut Register, spec: ShiftRegisterSpec, mode: ShiftMode) -> Result<Self> {
        let init = vec![StateVector::zeros(spec.width)?; spec.stages];
        Self::with_contents(reg, spec, mode, &init)
    }

    /// Allocates the register with `contents[i]` in stage `i + 1`.
    pub fn with_contents(
        reg: &mut Register,
        spec: ShiftRegisterSpec,
        mode: ShiftMode,
        contents: &[StateVector],
    ) -> Result<Self> {
        spec.validate()?;
        if contents.len() != spec.stages || contents.iter().any(|c| c.qubit_count() != spec.width) {
            return Err(QscError::DimensionMismatch("stage contents do not match the layout".into()));
        }
        let stages = contents.iter().map(|c| reg.alloc_state(c)).collect::<Result<_>>()?;
        Ok(ShiftRegister { spec, mode, stages })
    }

    pub fn spec(&self) -> &ShiftRegisterSpec {
        &self.spec
    }

    /// Qubits of stage `i` (0-based).
    pub fn stage(&self, i: usize) -> &[QubitId] {
        &self.stages[i]
    }

    pub fn stages(&self) -> &[Vec<QubitId>] {
        &self.stages
    }

    fn carry(&self, reg: &mut Register, data: &[QubitId], stage: usize, src: &mut OutcomeSource) -> Result<Vec<QubitId>> {
        let kind = &self.spec.stage_kinds[stage];
        match self.mode {
            ShiftMode::Persistent => {
                let u = logical_unitary(kind, false, false);
                for &q in data {
                    reg.apply(&u, &[q])?;
                }
                Ok(data.to_vec())
            }
            ShiftMode::Teleport => {
                let mut out = Vec::with_capacity(data.len());
                for &q in data {
                    let mut t = Transistor::build(kind.clone(), reg)?;
                    t.inject_input_by_teleport(reg, &[q], src)?;
                    t.activate(reg, src)?;
                    reg.resolve(t.right_modes())?;
                    out.push(t.right_modes()[0]);
                }
                Ok(out)
            }
        }
    }

    /// Moves every stage one step right, loads `incoming` into stage 1, and
    /// returns the qubits evicted from the last stage.
    pub fn shift(&mut self, reg: &mut Register, incoming: &[QubitId], src: &mut OutcomeSource) -> Result<Vec<QubitId>> {
        if incoming.len() != self.spec.width {
            return Err(QscError::DimensionMismatch(format!(
                "{} incoming qubits for stage width {}",
                incoming.len(),
                self.spec.width
            )));
        }
        let m = self.spec.stages;
        let evicted = self.stages[m - 1].clone();
        for i in (1..m).rev() {
            let moved = self.stages[i - 1].clone();
            self.stages[i] = self.carry(reg, &moved, i, src)?;
        }
        self.stages[0] = self.carry(reg, incoming, 0, src)?;
        Ok(evicted)
    }

    /// Shifts in a fresh `data` state and removes the evicted stage, which
    /// must be unentangled with everything else.
    pub fn shift_state(&mut self, reg: &mut Register, data: &StateVector, src: &mut OutcomeSource) -> Result<StateVector> {
        let ids = reg.alloc_state(data)?;
        let out = self.shift(reg, &ids, src)?;
        reg.take_pure(&out)
    }
}
