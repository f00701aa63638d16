//! Streaming `(n, k, m)` quantum convolutional encoder.
//!
//! Every cycle the cycle unitary acts on `[inputs (k), memory (mk), fresh
//! ancillas (n−k)]`, where memory stage 1 holds the previous cycle's
//! inputs. The inputs then shift into stage 1, the last stage is evicted,
//! and the evicted stage together with the ancillas is the cycle's `n`-qubit
//! output.

use serde::Serialize;

use crate::algos::{ops_unitary, Op};
use crate::error::{QscError, Result};
use crate::qcore::{Matrix, OutcomeSource, QubitId, Register, RngPolicy, StateVector, UnitarySpec, MAX_QUBITS};
use crate::seqexec::{ShiftMode, ShiftRegister, ShiftRegisterSpec};
use crate::transistor::{GateKind, Transistor};

#[derive(Debug, Clone, PartialEq)]
pub struct ConvCodeSpec {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// Cycle circuit on local qubits `[inputs, memory, ancillas]`.
    pub cycle_gates: Vec<Op>,
}

impl ConvCodeSpec {
    pub fn new(n: usize, k: usize, m: usize, cycle_gates: Vec<Op>) -> Result<Self> {
        if k == 0 || n < k {
            return Err(QscError::InvalidParameter(format!("(n, k, m) = ({n}, {k}, {m}) needs n ≥ k ≥ 1")));
        }
        let spec = ConvCodeSpec { n, k, m, cycle_gates };
        let width = spec.cycle_width();
        if width > MAX_QUBITS {
            return Err(QscError::CapacityExceeded {
                requested: width,
                limit: MAX_QUBITS,
            });
        }
        for op in &spec.cycle_gates {
            if op.u.arity() != op.targets.len() {
                return Err(QscError::ArityMismatch {
                    arity: op.u.arity(),
                    targets: op.targets.len(),
                });
            }
            if let Some(&q) = op.targets.iter().find(|&&q| q >= width) {
                return Err(QscError::QubitOutOfRange { qubit: q, count: width });
            }
        }
        Ok(spec)
    }

    /// One gate covering the whole cycle.
    pub fn from_unitary(n: usize, k: usize, m: usize, u: UnitarySpec) -> Result<Self> {
        let width = k + m * k + (n - k.min(n));
        if u.arity() != width {
            return Err(QscError::ArityMismatch {
                arity: u.arity(),
                targets: width,
            });
        }
        Self::new(n, k, m, vec![Op::new("cycle", u, &(0..width).collect::<Vec<_>>())])
    }

    /// `k + mk + (n − k)`.
    pub fn cycle_width(&self) -> usize {
        self.n + self.m * self.k
    }

    pub fn memory_qubits(&self) -> usize {
        self.m * self.k
    }

    pub fn cycle_unitary(&self) -> Result<UnitarySpec> {
        ops_unitary(&self.cycle_gates, self.cycle_width())
    }

    /// Columns of the cycle unitary with the ancillas in `|0⟩`: the map
    /// from `k + mk` qubits into `n + mk`.
    pub fn cycle_isometry(&self) -> Result<Matrix> {
        let u = self.cycle_unitary()?;
        let cols = 1usize << (self.k + self.memory_qubits());
        Ok(u.matrix().columns(0, cols).into_owned())
    }

    fn check_run(&self, input: &StateVector, cycles: usize) -> Result<()> {
        if cycles == 0 {
            return Err(QscError::InvalidParameter("at least one cycle".into()));
        }
        if input.qubit_count() != cycles * self.k {
            return Err(QscError::DimensionMismatch(format!(
                "{}-qubit input for {cycles} cycles of {} qubits",
                input.qubit_count(),
                self.k
            )));
        }
        let total = cycles * self.n + self.memory_qubits();
        if total > MAX_QUBITS {
            return Err(QscError::CapacityExceeded {
                requested: total,
                limit: MAX_QUBITS,
            });
        }
        Ok(())
    }
}

/// Where each cycle's output sits in the returned state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EncodeTrace {
    pub emitted: Vec<Vec<usize>>,
    pub memory: Vec<usize>,
    pub cycles: usize,
}

impl EncodeTrace {
    fn new(spec: &ConvCodeSpec, cycles: usize) -> Self {
        let emitted = (0..cycles).map(|c| (c * spec.n..(c + 1) * spec.n).collect()).collect();
        let memory = (cycles * spec.n..cycles * spec.n + spec.memory_qubits()).collect();
        EncodeTrace {
            emitted,
            memory,
            cycles,
        }
    }
}

fn apply_cycle(reg: &mut Register, spec: &ConvCodeSpec, local: &[QubitId]) -> Result<()> {
    for op in &spec.cycle_gates {
        let ids: Vec<QubitId> = op.targets.iter().map(|&t| local[t]).collect();
        reg.apply(&op.u, &ids)?;
    }
    Ok(())
}

/// Encodes `cycles` rounds of input. `input` holds cycle `c`'s inputs on
/// qubits `c·k..(c+1)·k` and may be entangled across cycles. The result
/// lists every cycle's `n` outputs in order, then the final memory with
/// stage 1 first.
pub fn encode_stream(
    spec: &ConvCodeSpec,
    input: &StateVector,
    cycles: usize,
    policy: &RngPolicy,
) -> Result<(StateVector, EncodeTrace)> {
    encode_stream_with(spec, input, cycles, ShiftMode::Persistent, &mut policy.source())
}

pub fn encode_stream_with(
    spec: &ConvCodeSpec,
    input: &StateVector,
    cycles: usize,
    mode: ShiftMode,
    src: &mut OutcomeSource,
) -> Result<(StateVector, EncodeTrace)> {
    spec.check_run(input, cycles)?;
    let (k, n) = (spec.k, spec.n);
    let mut reg = Register::new();
    let inputs = reg.alloc_state(input)?;
    let mut sr = if spec.m > 0 {
        Some(ShiftRegister::new(&mut reg, ShiftRegisterSpec::identity(spec.m, k), mode)?)
    } else {
        None
    };
    let mut out: Vec<QubitId> = Vec::with_capacity(cycles * n + spec.memory_qubits());
    for c in 0..cycles {
        let x = &inputs[c * k..(c + 1) * k];
        let anc = reg.alloc_zeros(n - k)?;
        let mut local = x.to_vec();
        if let Some(sr) = &sr {
            local.extend(sr.stages().iter().flatten());
        }
        local.extend(&anc);
        apply_cycle(&mut reg, spec, &local)?;
        let evicted = match &mut sr {
            Some(sr) => sr.shift(&mut reg, x, src)?,
            None => x.to_vec(),
        };
        out.extend(evicted);
        out.extend(anc);
    }
    if let Some(sr) = &sr {
        out.extend(sr.stages().iter().flatten());
    }
    reg.resolve(&out)?;
    Ok((reg.extract_pure(&out)?, EncodeTrace::new(spec, cycles)))
}

/// The encoder laid out as one combinational circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Unrolled {
    pub ops: Vec<Op>,
    /// Inputs first (`C·k`), then the initial memory, then every cycle's
    /// ancillas.
    pub qubits: usize,
    /// Circuit qubit that ends up at each position of the encoder output.
    pub output_order: Vec<usize>,
}

pub fn unroll(spec: &ConvCodeSpec, cycles: usize) -> Result<Unrolled> {
    let (n, k, mk) = (spec.n, spec.k, spec.memory_qubits());
    let qubits = cycles * k + mk + cycles * (n - k);
    if qubits > MAX_QUBITS {
        return Err(QscError::CapacityExceeded {
            requested: qubits,
            limit: MAX_QUBITS,
        });
    }
    let mut memory: Vec<usize> = (cycles * k..cycles * k + mk).collect();
    let anc_base = cycles * k + mk;
    let mut ops = Vec::new();
    let mut output_order = Vec::new();
    for c in 0..cycles {
        let x: Vec<usize> = (c * k..(c + 1) * k).collect();
        let anc: Vec<usize> = (anc_base + c * (n - k)..anc_base + (c + 1) * (n - k)).collect();
        let mut local = x.clone();
        local.extend(&memory);
        local.extend(&anc);
        for op in &spec.cycle_gates {
            let targets: Vec<usize> = op.targets.iter().map(|&t| local[t]).collect();
            ops.push(Op::new(format!("{}@{}", op.label, c + 1), op.u.clone(), &targets));
        }
        let evicted = if mk > 0 {
            let ev = memory.split_off(mk - k);
            memory.splice(0..0, x);
            ev
        } else {
            x
        };
        output_order.extend(evicted);
        output_order.extend(anc);
    }
    output_order.extend(memory);
    Ok(Unrolled {
        ops,
        qubits,
        output_order,
    })
}

/// Relabels qubits so that new qubit `j` is old qubit `order[j]`.
pub fn permute_qubits(s: &StateVector, order: &[usize]) -> Result<StateVector> {
    let n = s.qubit_count();
    if order.len() != n {
        return Err(QscError::DimensionMismatch(format!("order of {} for {n} qubits", order.len())));
    }
    let mut amps = vec![crate::qcore::cr(0.0); s.dim()];
    for (old, a) in s.amplitudes().iter().enumerate() {
        let new = order
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &q)| acc | ((old >> q) & 1) << j);
        amps[new] = *a;
    }
    StateVector::from_amplitudes(amps)
}

/// Dense simulation of [`unroll`], in the encoder's output order.
pub fn unrolled_reference(spec: &ConvCodeSpec, input: &StateVector, cycles: usize) -> Result<StateVector> {
    spec.check_run(input, cycles)?;
    let u = unroll(spec, cycles)?;
    let rest = StateVector::zeros(u.qubits - input.qubit_count())?;
    let s = crate::algos::apply_ops(&u.ops, &input.tensor(&rest)?)?;
    permute_qubits(&s, &u.output_order)
}

/// The encoder with memory carried by loops: each cycle the memory qubits
/// teleport through a reusable identity transistor, refreshed between
/// cycles, and the byproduct is corrected before the memory is used again.
pub fn memory_loop_variant(spec: &ConvCodeSpec, input: &StateVector, cycles: usize, policy: &RngPolicy) -> Result<StateVector> {
    memory_loop_variant_with(spec, input, cycles, &mut policy.source())
}

pub fn memory_loop_variant_with(
    spec: &ConvCodeSpec,
    input: &StateVector,
    cycles: usize,
    src: &mut OutcomeSource,
) -> Result<StateVector> {
    spec.check_run(input, cycles)?;
    let (n, k, mk) = (spec.n, spec.k, spec.memory_qubits());
    let mut reg = Register::new();
    let inputs = reg.alloc_state(input)?;
    let mut memory = reg.alloc_zeros(mk)?;
    let mut loops: Vec<Option<Transistor>> = vec![None; mk];
    let mut out = Vec::new();
    for c in 0..cycles {
        let x = inputs[c * k..(c + 1) * k].to_vec();
        let anc = reg.alloc_zeros(n - k)?;
        let mut local = x.clone();
        local.extend(&memory);
        local.extend(&anc);
        apply_cycle(&mut reg, spec, &local)?;
        let evicted = if mk > 0 {
            let ev = memory.split_off(mk - k);
            memory.splice(0..0, x);
            ev
        } else {
            x
        };
        out.extend(evicted);
        out.extend(anc);
        for (q, slot) in memory.iter_mut().zip(loops.iter_mut()) {
            let mut t = match slot.take() {
                Some(used) => used.refresh(&mut reg)?,
                None => Transistor::build(GateKind::ChoiStored(crate::qcore::gates::i()), &mut reg)?,
            };
            t.inject_input_by_teleport(&mut reg, &[*q], src)?;
            t.activate(&mut reg, src)?;
            *q = t.right_modes()[0];
            reg.resolve(&[*q])?;
            *slot = Some(t);
        }
    }
    out.extend(&memory);
    reg.extract_pure(&out)
}
