//! Clifford+T circuits split into Clifford blocks and T layers, run
//! gate by gate through transistors.

use serde::{Deserialize, Serialize};

use crate::error::{QscError, Result};
use crate::qcore::{gates, OutcomeSource, PauliOperator, QubitId, Register, RngPolicy, StateVector};
use crate::transistor::{GateKind, Transistor};

const CLIFFORD: [&str; 10] = ["h", "s", "sdg", "x", "y", "z", "cz", "cnot", "cx", "i"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub name: String,
    pub targets: Vec<usize>,
}

impl Gate {
    pub fn new(name: &str, targets: &[usize]) -> Self {
        Gate {
            name: name.to_string(),
            targets: targets.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Block {
    Clifford(Vec<Gate>),
    /// T on each listed qubit.
    TLayer(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelinePlan {
    pub qubits: usize,
    pub blocks: Vec<Block>,
}

impl PipelinePlan {
    /// The source gate sequence.
    pub fn gates(&self) -> Vec<Gate> {
        self.blocks
            .iter()
            .flat_map(|b| match b {
                Block::Clifford(g) => g.clone(),
                Block::TLayer(ts) => ts.iter().map(|&q| Gate::new("t", &[q])).collect(),
            })
            .collect()
    }
}

fn check_gate(g: &Gate, qubits: usize) -> Result<()> {
    let arity = match g.name.as_str() {
        "cz" | "cnot" | "cx" => 2,
        "t" => 1,
        n if CLIFFORD.contains(&n) => 1,
        other => return Err(QscError::UnsupportedGate(other.to_string())),
    };
    if g.targets.len() != arity {
        return Err(QscError::ArityMismatch {
            arity,
            targets: g.targets.len(),
        });
    }
    for (i, &t) in g.targets.iter().enumerate() {
        if t >= qubits {
            return Err(QscError::QubitOutOfRange { qubit: t, count: qubits });
        }
        if g.targets[..i].contains(&t) {
            return Err(QscError::DuplicateTarget(t));
        }
    }
    Ok(())
}

/// Maximal Clifford blocks separated by layers of T gates on distinct
/// qubits.
pub fn plan_pipeline(circuit: &[Gate], qubits: usize) -> Result<PipelinePlan> {
    let mut blocks: Vec<Block> = Vec::new();
    for g in circuit {
        check_gate(g, qubits)?;
        if g.name == "t" {
            let q = g.targets[0];
            match blocks.last_mut() {
                Some(Block::TLayer(ts)) if !ts.contains(&q) => ts.push(q),
                _ => blocks.push(Block::TLayer(vec![q])),
            }
        } else {
            match blocks.last_mut() {
                Some(Block::Clifford(gs)) => gs.push(g.clone()),
                _ => blocks.push(Block::Clifford(vec![g.clone()])),
            }
        }
    }
    Ok(PipelinePlan { qubits, blocks })
}

/// `C p C†` for the Clifford block `C`.
pub fn propagate_pauli(block: &[Gate], p: &PauliOperator) -> Result<PauliOperator> {
    block
        .iter()
        .try_fold(p.clone(), |acc, g| acc.conjugate_named(&g.name, &g.targets))
}

/// Direct dense simulation of the gate list.
pub fn dense_reference(circuit: &[Gate], input: &StateVector) -> Result<StateVector> {
    let mut s = input.clone();
    for g in circuit {
        let u = gates::by_name(&g.name).ok_or_else(|| QscError::UnsupportedGate(g.name.clone()))?;
        s.apply_gate(&u, &g.targets)?;
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ByproductMode {
    /// Correct every gate's byproduct right after it runs.
    Eager,
    /// Carry one net Pauli through each Clifford block; correct it before
    /// T layers and at the end.
    Deferred,
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub state: StateVector,
    /// Net byproduct at the end of each Clifford block (identity in eager
    /// mode).
    pub block_byproducts: Vec<PauliOperator>,
    pub peak_qubits: usize,
}

fn transistor_for(name: &str) -> Result<(GateKind, bool)> {
    Ok(match name {
        "h" => (GateKind::Wire(1), false),
        "s" => (GateKind::SChain, false),
        "sdg" => (GateKind::SChain, true),
        "t" => (GateKind::MagicT, false),
        "cnot" | "cx" => (GateKind::ChoiStored(gates::cnot()), false),
        other => (
            GateKind::ChoiStored(gates::by_name(other).ok_or_else(|| QscError::UnsupportedGate(other.to_string()))?),
            false,
        ),
    })
}

struct Runner {
    reg: Register,
    data: Vec<QubitId>,
    src: OutcomeSource,
}

impl Runner {
    /// Runs one gate through a fresh transistor and returns the byproduct
    /// it left on its outputs, removed from the register frame.
    fn run(&mut self, name: &str, targets: &[usize]) -> Result<PauliOperator> {
        let (kind, dagger) = transistor_for(name)?;
        let mut t = Transistor::build(kind, &mut self.reg)?;
        if dagger {
            t = t.conjugate_variant()?;
        }
        let ids: Vec<QubitId> = targets.iter().map(|&q| self.data[q]).collect();
        t.inject_input_by_teleport(&mut self.reg, &ids, &mut self.src)?;
        t.activate(&mut self.reg, &mut self.src)?;
        let outs = t.right_modes().to_vec();
        let mut b = PauliOperator::identity(self.data.len());
        for (&q, &o) in targets.iter().zip(&outs) {
            self.data[q] = o;
            let p = self.reg.frame_mut().take(o);
            b = b.mul(&PauliOperator::single(self.data.len(), q, p))?;
        }
        Ok(b)
    }

    fn apply(&mut self, p: &PauliOperator) -> Result<()> {
        for q in 0..self.data.len() {
            self.reg.apply_pauli(self.data[q], p.get(q))?;
        }
        Ok(())
    }
}

/// Executes `plan` on `input` with every gate realized by a transistor.
pub fn run_pipeline(plan: &PipelinePlan, input: &StateVector, mode: ByproductMode, policy: &RngPolicy) -> Result<PipelineRun> {
    if input.qubit_count() != plan.qubits {
        return Err(QscError::DimensionMismatch(format!(
            "{}-qubit input for a {}-qubit plan",
            input.qubit_count(),
            plan.qubits
        )));
    }
    let mut reg = Register::new();
    let data = reg.alloc_state(input)?;
    let mut r = Runner {
        reg,
        data,
        src: policy.source(),
    };
    let n = plan.qubits;
    let mut net = PauliOperator::identity(n);
    let mut block_byproducts = Vec::new();
    for block in &plan.blocks {
        match block {
            Block::Clifford(gs) => {
                for g in gs {
                    let b = r.run(&g.name, &g.targets)?;
                    match mode {
                        ByproductMode::Eager => r.apply(&b)?,
                        ByproductMode::Deferred => {
                            net = b.mul(&propagate_pauli(std::slice::from_ref(g), &net)?)?;
                        }
                    }
                }
                block_byproducts.push(net.clone());
            }
            Block::TLayer(ts) => {
                r.apply(&net)?;
                net = PauliOperator::identity(n);
                for &q in ts {
                    let b = r.run("t", &[q])?;
                    r.apply(&b)?;
                }
            }
        }
    }
    r.apply(&net)?;
    let state = r.reg.extract_pure(&r.data)?;
    Ok(PipelineRun {
        state,
        block_byproducts,
        peak_qubits: r.reg.peak_qubits(),
    })
}
