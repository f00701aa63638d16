//! Runs a [`Schedule`] on the dense engine, and checks it against the
//! logical-wire oracle.

use serde::Serialize;

use super::ir::{Action, CircuitIR, LegPlan, ReadBasis, Schedule, ScheduledAction};
use crate::error::{QscError, Result};
use crate::qcore::{
    gates, MeasurementRecord, OutcomeSource, QubitId, Register, RngPolicy, StateVector,
};
use crate::transistor::{LegInput, Transistor};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExecOptions {
    /// Drop byproducts instead of correcting them. Only useful as a
    /// negative control for verification.
    pub ignore_byproducts: bool,
}

/// One executed action with the measurements it made and the pending
/// byproducts on every live wire afterwards.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionLog {
    pub cycle: u32,
    pub action: String,
    pub records: Vec<MeasurementRecord>,
    pub frame: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReadoutRecord {
    pub label: String,
    pub basis: ReadBasis,
    pub wires: Vec<usize>,
    pub outcome: Vec<u8>,
    /// Probability of `outcome` given the readouts sampled before it.
    pub probability: f64,
}

#[derive(Debug, Clone)]
pub struct ExecResult {
    pub log: Vec<ActionLog>,
    pub readouts: Vec<ReadoutRecord>,
    /// Exact joint distribution of all readout bits; bit `j` of the index is
    /// the `j`-th bit read.
    pub distribution: Vec<f64>,
    /// State of every logical wire, wire 0 least significant, after all
    /// byproducts are resolved and before readouts are sampled.
    pub final_state: StateVector,
    pub peak_qubits: usize,
}

struct Machine {
    reg: Register,
    src: OutcomeSource,
    opts: ExecOptions,
    transistors: Vec<Option<Transistor>>,
    wires: Vec<Option<QubitId>>,
    parked: Vec<QubitId>,
}

impl Machine {
    fn phys(&self, w: usize) -> Result<QubitId> {
        self.wires[w].ok_or_else(|| QscError::InvalidCircuit(format!("wire {w} has no qubit")))
    }

    fn resolve(&mut self, ids: &[QubitId]) -> Result<()> {
        if self.opts.ignore_byproducts {
            for &q in ids {
                self.reg.frame_mut().take(q);
            }
            Ok(())
        } else {
            self.reg.resolve(ids)
        }
    }

    fn frame_snapshot(&self) -> Vec<(usize, String)> {
        self.wires
            .iter()
            .enumerate()
            .filter_map(|(w, q)| {
                let p = self.reg.frame().get((*q)?);
                (!p.is_identity()).then(|| (w, p.label().to_string()))
            })
            .collect()
    }

    fn step(&mut self, sched: &Schedule, action: &Action) -> Result<(String, Vec<MeasurementRecord>)> {
        let mut records = Vec::new();
        let text = match action {
            Action::Build { transistor } => {
                let plan = &sched.transistors[*transistor];
                let mut t = Transistor::build(plan.kind.clone(), &mut self.reg)?;
                if plan.backward {
                    t = t.run_backward()?;
                }
                if plan.dagger {
                    t = t.conjugate_variant()?;
                }
                self.transistors[*transistor] = Some(t);
                format!("build {}", plan.id)
            }
            Action::Prep { wires, state } => {
                let ids = self.reg.alloc_state(state)?;
                for (w, q) in wires.iter().zip(ids) {
                    self.wires[*w] = Some(q);
                }
                format!("prepare wires {wires:?}")
            }
            Action::Refresh { transistor } => {
                let old = self.transistors[*transistor].take().expect("built at cycle 0");
                self.transistors[*transistor] = Some(old.refresh(&mut self.reg)?);
                format!("refresh {}", sched.transistors[*transistor].id)
            }
            Action::Gate { name, u, wires } => {
                let ids: Vec<QubitId> = wires.iter().map(|&w| self.phys(w)).collect::<Result<_>>()?;
                self.resolve(&ids)?;
                self.reg.apply(u, &ids)?;
                format!("gate {name} on wires {wires:?}")
            }
            Action::Signal { transistor, legs } => {
                let t = self.transistors[*transistor].as_mut().expect("built at cycle 0");
                let chain = t.is_chain();
                let inputs: Vec<LegInput> = legs
                    .iter()
                    .map(|p| match p {
                        LegPlan::Measure { state, .. } => Ok(state.measure_plan(chain)),
                        LegPlan::Teleport { wire } => self.wires[*wire]
                            .map(LegInput::Teleport)
                            .ok_or_else(|| QscError::InvalidCircuit(format!("wire {wire} has no qubit"))),
                    })
                    .collect::<Result<_>>()?;
                records.extend(t.inject(&mut self.reg, &inputs, &mut self.src)?);
                let before = t.records().len();
                let bits = t.activate(&mut self.reg, &mut self.src)?;
                records.extend(t.records()[before..].iter().cloned());
                for (leg, p) in legs.iter().enumerate() {
                    self.wires[p.wire()] = Some(t.right_modes()[leg]);
                }
                if self.opts.ignore_byproducts {
                    let outs = t.right_modes().to_vec();
                    self.resolve(&outs)?;
                }
                format!("signal {} bulk {:?}", sched.transistors[*transistor].id, bits.0)
            }
            Action::Readout { label, wires, basis } => {
                let ids: Vec<QubitId> = wires.iter().map(|&w| self.phys(w)).collect::<Result<_>>()?;
                self.resolve(&ids)?;
                if *basis == ReadBasis::X {
                    for &q in &ids {
                        self.reg.apply(&gates::h(), &[q])?;
                    }
                }
                self.parked.extend(&ids);
                format!("readout {label} ({basis:?})")
            }
        };
        Ok((text, records))
    }
}

/// Tags outcome errors with the action and cycle that measured.
fn name_measurement(e: QscError, sched: &Schedule, sa: &ScheduledAction) -> QscError {
    let at = match &sa.action {
        Action::Signal { transistor, .. } => format!("signal {} at cycle {}", sched.transistors[*transistor].id, sa.cycle),
        _ => format!("cycle {}", sa.cycle),
    };
    match e {
        QscError::ImpossibleOutcome { what, outcome, probability } => QscError::ImpossibleOutcome {
            what: format!("{what} during {at}"),
            outcome,
            probability,
        },
        QscError::OutcomesExhausted(what) => QscError::OutcomesExhausted(format!("{what} during {at}")),
        other => other,
    }
}

/// Executes `sched` under `policy`.
pub fn execute_schedule(sched: &Schedule, policy: &RngPolicy, opts: ExecOptions) -> Result<ExecResult> {
    let mut m = Machine {
        reg: Register::new(),
        src: policy.source(),
        opts,
        transistors: vec![None; sched.transistors.len()],
        wires: vec![None; sched.wire_count],
        parked: Vec::new(),
    };
    let mut log = Vec::new();
    for sa in &sched.actions {
        let (action, records) = m.step(sched, &sa.action).map_err(|e| name_measurement(e, sched, sa))?;
        log.push(ActionLog {
            cycle: sa.cycle,
            action,
            records,
            frame: m.frame_snapshot(),
        });
    }
    let all: Vec<QubitId> = (0..sched.wire_count).map(|w| m.phys(w)).collect::<Result<_>>()?;
    m.resolve(&all)?;
    let final_state = m.reg.extract_pure(&all)?;
    let distribution = m.reg.marginal(&m.parked)?;

    let mut readouts = Vec::new();
    for (label, wires, basis) in sched.readouts() {
        let mut outcome = Vec::new();
        let mut probability = 1.0;
        for &w in wires {
            let q = m.phys(w)?;
            let rec = m.reg.measure(q, crate::qcore::Basis::Z, &mut m.src).map_err(|e| match e {
                QscError::ImpossibleOutcome { outcome, probability, .. } => QscError::ImpossibleOutcome {
                    what: format!("readout {label}"),
                    outcome,
                    probability,
                },
                QscError::OutcomesExhausted(_) => QscError::OutcomesExhausted(format!("readout {label}")),
                other => other,
            })?;
            outcome.push(rec.outcome[0]);
            probability *= rec.probability;
        }
        readouts.push(ReadoutRecord {
            label: label.to_string(),
            basis,
            wires: wires.to_vec(),
            outcome,
            probability,
        });
    }
    Ok(ExecResult {
        log,
        readouts,
        distribution,
        final_state,
        peak_qubits: m.reg.peak_qubits(),
    })
}

/// Validates and executes `ir`.
pub fn execute(ir: &CircuitIR, policy: &RngPolicy) -> Result<ExecResult> {
    execute_with(ir, policy, ExecOptions::default())
}

pub fn execute_with(ir: &CircuitIR, policy: &RngPolicy, opts: ExecOptions) -> Result<ExecResult> {
    let sched = ir.schedule()?;
    execute_schedule(&sched, policy, opts)
}

/// Result of the logical-wire simulation: every transistor round replaced
/// by its logical unitary acting directly on the wires.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub final_state: StateVector,
    pub distribution: Vec<f64>,
}

pub fn oracle(sched: &Schedule) -> Result<OracleResult> {
    let mut s = StateVector::empty();
    let mut parked = Vec::new();
    for sa in &sched.actions {
        match &sa.action {
            Action::Build { .. } | Action::Refresh { .. } => {}
            Action::Prep { state, .. } => s = s.tensor(state)?,
            Action::Gate { u, wires, .. } => s.apply_gate(u, wires)?,
            Action::Signal { transistor, legs } => {
                for p in legs {
                    if let LegPlan::Measure { state, .. } = p {
                        s = s.tensor(&state.state())?;
                    }
                }
                let plan = &sched.transistors[*transistor];
                let u = crate::transistor::logical_unitary(&plan.kind, plan.backward, plan.dagger);
                let wires: Vec<usize> = legs.iter().map(|p| p.wire()).collect();
                s.apply_gate(&u, &wires)?;
            }
            Action::Readout { wires, basis, .. } => {
                if *basis == ReadBasis::X {
                    for &w in wires {
                        s.apply_gate(&gates::h(), &[w])?;
                    }
                }
                parked.extend(wires);
            }
        }
    }
    let distribution = s.marginal(&parked)?;
    Ok(OracleResult {
        final_state: s,
        distribution,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    /// `1 − F` between executed and oracle wire states, worst seed.
    pub max_deficit: f64,
    /// Total-variation distance of the readout distributions, worst seed.
    pub max_tv_distance: f64,
    pub seeds: Vec<u64>,
    pub readout_bits: usize,
}

pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return 1.0;
    }
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Runs `ir` once per seed and compares each run with the oracle.
pub fn verify(ir: &CircuitIR, seeds: &[u64], opts: ExecOptions) -> Result<VerifyReport> {
    let sched = ir.schedule()?;
    let want = oracle(&sched)?;
    let mut max_deficit: f64 = 0.0;
    let mut max_tv: f64 = 0.0;
    for &seed in seeds {
        let got = execute_schedule(&sched, &RngPolicy::Seeded(seed), opts)?;
        let f = crate::qcore::fidelity(&got.final_state, &want.final_state)?;
        max_deficit = max_deficit.max(1.0 - f);
        max_tv = max_tv.max(total_variation(&got.distribution, &want.distribution));
    }
    let readout_bits = sched.readouts().map(|(_, w, _)| w.len()).sum();
    Ok(VerifyReport {
        max_deficit: max_deficit.max(0.0),
        max_tv_distance: max_tv,
        seeds: seeds.to_vec(),
        readout_bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqexec::ir::{connect_hybrid, Endpoint, InputMode, KindSpec, Node, Side, StateSpec};
    use crate::transistor::BasisState;

    fn out(t: &str) -> Endpoint {
        Endpoint::Mode {
            transistor: t.into(),
            side: Side::Out,
            leg: None,
        }
    }

    fn inp(t: &str, leg: usize) -> Endpoint {
        Endpoint::Mode {
            transistor: t.into(),
            side: Side::In,
            leg: Some(leg),
        }
    }

    fn transistor(id: &str, kind: KindSpec) -> Node {
        Node::Transistor {
            id: id.into(),
            kind,
            backward: false,
            dagger: false,
        }
    }

    fn input(t: &str, s: BasisState, mode: InputMode) -> Node {
        Node::Input {
            transistor: t.into(),
            state: StateSpec::Basis(vec![s]),
            mode,
        }
    }

    fn wire_h(mode: InputMode) -> CircuitIR {
        let mut ir = CircuitIR::new();
        ir.push(transistor("t", KindSpec::Wire(1)))
            .push(input("t", BasisState::Zero, mode))
            .push(Node::Signal {
                target: "t".into(),
                cycle: 1,
            })
            .push(Node::Readout {
                target: out("t"),
                basis: ReadBasis::Z,
                cycle: 2,
            });
        ir
    }

    #[test]
    fn wire_one_reads_hadamard_statistics() {
        for mode in [InputMode::Measure, InputMode::Teleport] {
            let ir = wire_h(mode);
            for seed in 0..4 {
                let r = execute(&ir, &RngPolicy::Seeded(seed)).unwrap();
                assert!((r.distribution[0] - 0.5).abs() < 1e-12);
                assert!((r.distribution[1] - 0.5).abs() < 1e-12);
                assert_eq!(r.readouts.len(), 1);
                assert!((r.readouts[0].probability - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn no_signal_consumes_nothing() {
        let mut ir = CircuitIR::new();
        ir.push(transistor("a", KindSpec::Wire(2)))
            .push(transistor("b", KindSpec::Choi("cz".into())));
        let r = execute(&ir, &RngPolicy::Seeded(0)).unwrap();
        assert!(r.log.iter().all(|l| l.action.starts_with("build") && l.records.is_empty()));
        assert_eq!(r.final_state.qubit_count(), 0);
        assert_eq!(r.peak_qubits, 4 + 4);
    }

    /// H on one qubit, then CNOT onto a second, then both read: the
    /// transistor version against plain gates on two wires.
    #[test]
    fn bell_circuit_matches_combinational() {
        let mut seq = CircuitIR::new();
        seq.push(transistor("h", KindSpec::Wire(1)))
            .push(transistor("cx", KindSpec::Choi("cnot".into())))
            .push(Node::Qubit {
                id: "q".into(),
                state: StateSpec::Basis(vec![BasisState::Zero]),
            })
            .push(input("h", BasisState::Zero, InputMode::Measure))
            .push(Node::Ebit {
                id: "e0".into(),
                a: out("h"),
                b: inp("cx", 0),
                cycle: None,
            })
            .push(Node::Ebit {
                id: "e1".into(),
                a: Endpoint::Qubit("q".into()),
                b: inp("cx", 1),
                cycle: None,
            })
            .push(Node::Signal {
                target: "h".into(),
                cycle: 1,
            })
            .push(Node::Signal {
                target: "cx".into(),
                cycle: 2,
            })
            .push(Node::Readout {
                target: out("cx"),
                basis: ReadBasis::Z,
                cycle: 3,
            });

        let mut comb = CircuitIR::new();
        for q in ["a", "b"] {
            comb.push(Node::Qubit {
                id: q.into(),
                state: StateSpec::Basis(vec![BasisState::Zero]),
            });
        }
        comb.push(Node::Gate {
            name: "h".into(),
            targets: vec![Endpoint::Qubit("a".into())],
            cycle: 1,
        })
        .push(Node::Gate {
            name: "cnot".into(),
            targets: vec![Endpoint::Qubit("a".into()), Endpoint::Qubit("b".into())],
            cycle: 2,
        });
        for (q, c) in [("a", 3), ("b", 3)] {
            comb.push(Node::Readout {
                target: Endpoint::Qubit(q.into()),
                basis: ReadBasis::Z,
                cycle: c,
            });
        }

        let want = execute(&comb, &RngPolicy::Seeded(0)).unwrap().distribution;
        assert!((want[0] - 0.5).abs() < 1e-12 && (want[3] - 0.5).abs() < 1e-12);
        for seed in 0..8 {
            let got = execute(&seq, &RngPolicy::Seeded(seed)).unwrap();
            assert!(total_variation(&got.distribution, &want) < 1e-12);
            assert_eq!(got.readouts[0].outcome[0], got.readouts[0].outcome[1]);
        }
        let rep = verify(&seq, &[1, 2, 3], ExecOptions::default()).unwrap();
        assert!(rep.max_deficit < 1e-10 && rep.max_tv_distance < 1e-12);
    }

    #[test]
    fn loop_iterates_stored_gate() {
        let mut ir = CircuitIR::new();
        ir.push(transistor("s", KindSpec::SChain))
            .push(input("s", BasisState::Plus, InputMode::Teleport))
            .push(Node::Loop {
                from: "s".into(),
                to: "s".into(),
            });
        for c in 1..=2 {
            if c > 1 {
                ir.push(Node::Refresh {
                    target: "s".into(),
                    cycle: c,
                });
            }
            ir.push(Node::Signal {
                target: "s".into(),
                cycle: c,
            });
        }
        ir.push(Node::Readout {
            target: out("s"),
            basis: ReadBasis::X,
            cycle: 2,
        });
        for seed in 0..8 {
            let r = execute(&ir, &RngPolicy::Seeded(seed)).unwrap();
            // S²|+⟩ = |−⟩ reads 1 in X
            assert_eq!(r.readouts[0].outcome, vec![1]);
        }
        let rep = verify(&ir, &[0, 1, 2, 3], ExecOptions::default()).unwrap();
        assert!(rep.max_deficit < 1e-10);
    }

    #[test]
    fn ignoring_byproducts_is_caught() {
        let mut ir = CircuitIR::new();
        ir.push(transistor("t", KindSpec::Wire(3)))
            .push(input("t", BasisState::Plus, InputMode::Teleport))
            .push(Node::Signal {
                target: "t".into(),
                cycle: 1,
            });
        let seeds: Vec<u64> = (0..16).collect();
        let bad = verify(
            &ir,
            &seeds,
            ExecOptions {
                ignore_byproducts: true,
            },
        )
        .unwrap();
        assert!(bad.max_deficit > 0.1);
        assert!(verify(&ir, &seeds, ExecOptions::default()).unwrap().max_deficit < 1e-10);
    }

    #[test]
    fn hybrid_connection_feeds_transistor() {
        let mut ir = CircuitIR::new();
        ir.push(transistor("z", KindSpec::Choi("z".into())))
            .push(Node::Qubit {
                id: "q".into(),
                state: StateSpec::Basis(vec![BasisState::Zero]),
            })
            .push(Node::Gate {
                name: "h".into(),
                targets: vec![Endpoint::Qubit("q".into())],
                cycle: 1,
            })
            .push(Node::Signal {
                target: "z".into(),
                cycle: 1,
            })
            .push(Node::Readout {
                target: out("z"),
                basis: ReadBasis::X,
                cycle: 1,
            });
        let same = connect_hybrid(ir.clone(), &[], "z").unwrap();
        assert_eq!(same, ir);
        assert!(connect_hybrid(ir.clone(), &["q", "q"], "z").is_err());
        let ir = connect_hybrid(ir, &["q"], "z").unwrap();
        for seed in 0..4 {
            // Z H|0⟩ = |−⟩
            let r = execute(&ir, &RngPolicy::Seeded(seed)).unwrap();
            assert!((r.distribution[1] - 1.0).abs() < 1e-12);
        }
    }
}
