//! Circuit IR and its clocked schedule.
//!
//! [`CircuitIR::schedule`] walks the IR cycle by cycle without touching any
//! amplitudes. The walk validates every rule, numbers the logical wires, and
//! tracks how many physical qubits are alive, so the executor and the dense
//! oracle can both run from the same action list.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{QscError, Result};
use crate::qcore::{gates, StateVector, UnitarySpec, C64, MAX_QUBITS};
use crate::transistor::{BasisState, GateKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum KindSpec {
    Wire(usize),
    SChain,
    /// Stored gate by name, see [`gates::by_name`].
    Choi(String),
    MagicT,
}

impl KindSpec {
    pub fn gate_kind(&self) -> Result<GateKind> {
        Ok(match self {
            KindSpec::Wire(n) => GateKind::Wire(*n),
            KindSpec::SChain => GateKind::SChain,
            KindSpec::Choi(name) => {
                let u = gates::by_name(name).ok_or_else(|| QscError::UnsupportedGate(name.clone()))?;
                GateKind::ChoiStored(u)
            }
            KindSpec::MagicT => GateKind::MagicT,
        })
    }

    /// Physical qubits of a fresh instance.
    pub fn size(&self, arity: usize) -> usize {
        match self {
            KindSpec::Wire(n) => n + 2,
            KindSpec::SChain => 4,
            KindSpec::Choi(_) => 2 * arity,
            KindSpec::MagicT => 3,
        }
    }

    /// Qubits removed by activation.
    fn bulk_size(&self) -> usize {
        match self {
            KindSpec::Wire(n) => *n,
            KindSpec::SChain => 2,
            KindSpec::Choi(_) => 0,
            KindSpec::MagicT => 1,
        }
    }
}

/// Initial state of a combinational qubit or a transistor input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StateSpec {
    /// One symbol per leg; a single symbol is broadcast to every leg.
    Basis(Vec<BasisState>),
    /// Amplitudes read from `path`, leg 0 least significant.
    File { path: String, amplitudes: Vec<C64> },
}

impl StateSpec {
    fn state(&self, legs: usize) -> Result<StateVector> {
        match self {
            StateSpec::Basis(syms) => {
                let parts: Vec<StateVector> = if syms.len() == 1 {
                    vec![syms[0].state(); legs]
                } else if syms.len() == legs {
                    syms.iter().map(|s| s.state()).collect()
                } else {
                    return Err(QscError::DimensionMismatch(format!("{} symbols for {legs} legs", syms.len())));
                };
                StateVector::product(&parts)
            }
            StateSpec::File { amplitudes, .. } => {
                let s = StateVector::from_amplitudes(amplitudes.clone())?;
                if s.qubit_count() != legs {
                    return Err(QscError::DimensionMismatch(format!(
                        "{}-qubit state for {legs} legs",
                        s.qubit_count()
                    )));
                }
                Ok(s)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InputMode {
    Measure,
    Teleport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    In,
    Out,
}

/// A combinational qubit, or an edge mode of a transistor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Endpoint {
    Qubit(String),
    Mode {
        transistor: String,
        side: Side,
        leg: Option<usize>,
    },
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Qubit(q) => write!(f, "{q}"),
            Endpoint::Mode { transistor, side, leg } => {
                let s = match side {
                    Side::In => "in",
                    Side::Out => "out",
                };
                write!(f, "{transistor}.{s}")?;
                if let Some(i) = leg {
                    write!(f, "[{i}]")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReadBasis {
    Z,
    X,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Transistor {
        id: String,
        kind: KindSpec,
        backward: bool,
        dagger: bool,
    },
    /// A combinational qubit.
    Qubit { id: String, state: StateSpec },
    /// First-round input of a transistor.
    Input {
        transistor: String,
        state: StateSpec,
        mode: InputMode,
    },
    /// Feeds `a` into `b` when `b`'s transistor is signaled. Without a
    /// cycle the link serves the first signal.
    Ebit {
        id: String,
        a: Endpoint,
        b: Endpoint,
        cycle: Option<u32>,
    },
    /// Output of each round feeds the next round's input.
    Loop { from: String, to: String },
    Gate {
        name: String,
        targets: Vec<Endpoint>,
        cycle: u32,
    },
    Signal { target: String, cycle: u32 },
    Refresh { target: String, cycle: u32 },
    Readout {
        target: Endpoint,
        basis: ReadBasis,
        cycle: u32,
    },
}

impl Node {
    pub fn cycle(&self) -> Option<u32> {
        match self {
            Node::Gate { cycle, .. }
            | Node::Signal { cycle, .. }
            | Node::Refresh { cycle, .. }
            | Node::Readout { cycle, .. } => Some(*cycle),
            Node::Ebit { cycle, .. } => *cycle,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CircuitIR {
    pub nodes: Vec<Node>,
    /// Declared qubit budget; the engine limit applies when absent.
    pub budget: Option<usize>,
}

/// A rule violation, tied to the node that triggered it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    pub node: Option<usize>,
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl From<ValidationError> for QscError {
    fn from(e: ValidationError) -> Self {
        QscError::InvalidCircuit(e.to_string())
    }
}

fn verr(node: Option<usize>, code: &'static str, message: impl Into<String>) -> ValidationError {
    ValidationError {
        node,
        code,
        message: message.into(),
    }
}

/// How one transistor leg is fed when signaled.
#[derive(Debug, Clone, PartialEq)]
pub enum LegPlan {
    /// Measure the left mode; creates `wire` in `state`.
    Measure { wire: usize, state: BasisState },
    /// Teleport the existing `wire` in.
    Teleport { wire: usize },
}

impl LegPlan {
    pub fn wire(&self) -> usize {
        match self {
            LegPlan::Measure { wire, .. } | LegPlan::Teleport { wire } => *wire,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Build { transistor: usize },
    /// Allocates fresh wires (low wire first) in `state`.
    Prep { wires: Vec<usize>, state: StateVector },
    Refresh { transistor: usize },
    Gate { name: String, u: UnitarySpec, wires: Vec<usize> },
    Signal { transistor: usize, legs: Vec<LegPlan> },
    Readout { label: String, wires: Vec<usize>, basis: ReadBasis },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransistorPlan {
    pub id: String,
    pub kind: GateKind,
    pub backward: bool,
    pub dagger: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledAction {
    pub cycle: u32,
    /// IR node the action came from, if any.
    pub node: Option<usize>,
    pub action: Action,
}

/// Deterministic action list derived from a [`CircuitIR`]; cycle 0 holds
/// the initial allocations.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub transistors: Vec<TransistorPlan>,
    pub actions: Vec<ScheduledAction>,
    pub wire_count: usize,
    pub wire_labels: Vec<String>,
    pub cycles: u32,
    pub peak_qubits: usize,
}

impl Schedule {
    pub fn readouts(&self) -> impl Iterator<Item = (&str, &[usize], ReadBasis)> {
        self.actions.iter().filter_map(|a| match &a.action {
            Action::Readout { label, wires, basis } => Some((label.as_str(), wires.as_slice(), *basis)),
            _ => None,
        })
    }
}

#[derive(Debug, Clone)]
struct TState {
    decl: usize,
    kind: KindSpec,
    arity: usize,
    fresh: bool,
    rounds: usize,
    last_signal: Option<u32>,
    outputs: Vec<Option<usize>>,
}

#[derive(Debug, Clone)]
struct Link {
    node: usize,
    source: Endpoint,
    leg: usize,
    cycle: Option<u32>,
    used: bool,
}

struct Walk<'a> {
    ir: &'a CircuitIR,
    tindex: HashMap<String, usize>,
    ts: Vec<TState>,
    plans: Vec<TransistorPlan>,
    qubits: HashMap<String, Option<usize>>,
    wire_alive: Vec<bool>,
    labels: Vec<String>,
    inputs: HashMap<usize, usize>,
    loops: HashMap<usize, usize>,
    links: BTreeMap<usize, Vec<Link>>,
    actions: Vec<ScheduledAction>,
    live: usize,
    peak: usize,
    budget: usize,
}

impl<'a> Walk<'a> {
    fn alloc(&mut self, n: usize, node: Option<usize>) -> std::result::Result<(), ValidationError> {
        self.live += n;
        self.peak = self.peak.max(self.live);
        if self.live > self.budget {
            return Err(verr(
                node,
                "E115",
                format!("{} live qubits exceed the budget of {}", self.live, self.budget),
            ));
        }
        Ok(())
    }

    fn new_wire(&mut self, label: String) -> usize {
        self.wire_alive.push(true);
        self.labels.push(label);
        self.wire_alive.len() - 1
    }

    fn transistor(&self, id: &str, node: usize) -> std::result::Result<usize, ValidationError> {
        self.tindex
            .get(id)
            .copied()
            .ok_or_else(|| verr(Some(node), "E102", format!("unknown transistor '{id}'")))
    }

    fn leg(&self, t: usize, leg: Option<usize>, node: usize) -> std::result::Result<usize, ValidationError> {
        let l = leg.unwrap_or(0);
        if l >= self.ts[t].arity {
            return Err(verr(
                Some(node),
                "E104",
                format!("leg {l} out of range for arity {}", self.ts[t].arity),
            ));
        }
        Ok(l)
    }

    /// Resolves a readable data endpoint (combinational qubit or output
    /// legs) to wires, without consuming them.
    fn data_wires(&self, ep: &Endpoint, node: usize) -> std::result::Result<Vec<usize>, ValidationError> {
        match ep {
            Endpoint::Qubit(q) => match self.qubits.get(q) {
                None => Err(verr(Some(node), "E102", format!("unknown qubit '{q}'"))),
                Some(None) => Err(verr(Some(node), "E112", format!("qubit '{q}' was already consumed"))),
                Some(Some(w)) => Ok(vec![*w]),
            },
            Endpoint::Mode { transistor, side, leg } => {
                let t = self.transistor(transistor, node)?;
                if *side == Side::In {
                    return Err(verr(Some(node), "E114", format!("{ep} is an input mode, not data")));
                }
                let legs: Vec<usize> = match leg {
                    Some(_) => vec![self.leg(t, *leg, node)?],
                    None => (0..self.ts[t].arity).collect(),
                };
                legs.iter()
                    .map(|&l| {
                        self.ts[t].outputs[l].ok_or_else(|| {
                            verr(Some(node), "E113", format!("{transistor}.out[{l}] holds no data at this point"))
                        })
                    })
                    .collect()
            }
        }
    }

    fn consume(&mut self, ep: &Endpoint, node: usize) -> std::result::Result<Vec<usize>, ValidationError> {
        let wires = self.data_wires(ep, node)?;
        match ep {
            Endpoint::Qubit(q) => {
                self.qubits.insert(q.clone(), None);
            }
            Endpoint::Mode { transistor, leg, .. } => {
                let t = self.tindex[transistor];
                match leg {
                    Some(l) => self.ts[t].outputs[*l] = None,
                    None => self.ts[t].outputs.iter_mut().for_each(|o| *o = None),
                }
            }
        }
        Ok(wires)
    }

    fn push(&mut self, cycle: u32, node: Option<usize>, action: Action) {
        self.actions.push(ScheduledAction { cycle, node, action });
    }

    fn declare(&mut self) -> std::result::Result<(), ValidationError> {
        let ir = self.ir;
        for (i, n) in ir.nodes.iter().enumerate() {
            match n {
                Node::Transistor { id, kind, backward, dagger } => {
                    if self.tindex.contains_key(id) || self.qubits.contains_key(id) {
                        return Err(verr(Some(i), "E101", format!("duplicate id '{id}'")));
                    }
                    if let KindSpec::Wire(0) = kind {
                        return Err(verr(Some(i), "E116", "wire length must be at least 1"));
                    }
                    let gk = kind.gate_kind().map_err(|e| verr(Some(i), "E116", e.to_string()))?;
                    let arity = gk.arity();
                    if arity > 2 {
                        return Err(verr(Some(i), "E116", format!("stored gate arity {arity} exceeds 2")));
                    }
                    if *dagger && !matches!(kind, KindSpec::SChain | KindSpec::MagicT) {
                        return Err(verr(Some(i), "E116", "dagger applies to schain and magict only"));
                    }
                    self.tindex.insert(id.clone(), self.ts.len());
                    self.ts.push(TState {
                        decl: i,
                        kind: kind.clone(),
                        arity,
                        fresh: true,
                        rounds: 0,
                        last_signal: None,
                        outputs: vec![None; arity],
                    });
                    self.plans.push(TransistorPlan {
                        id: id.clone(),
                        kind: gk,
                        backward: *backward,
                        dagger: *dagger,
                    });
                }
                Node::Qubit { id, .. } => {
                    if self.tindex.contains_key(id) || self.qubits.contains_key(id) {
                        return Err(verr(Some(i), "E101", format!("duplicate id '{id}'")));
                    }
                    self.qubits.insert(id.clone(), None);
                }
                _ => {}
            }
            if let Some(0) = n.cycle() {
                return Err(verr(Some(i), "E105", "cycles start at 1"));
            }
        }
        let mut ebit_ids: HashMap<&str, usize> = HashMap::new();
        for (i, n) in ir.nodes.iter().enumerate() {
            match n {
                Node::Input { transistor, state, mode } => {
                    let t = self.transistor(transistor, i)?;
                    if self.inputs.insert(t, i).is_some() {
                        return Err(verr(Some(i), "E110", format!("second input for '{transistor}'")));
                    }
                    if matches!(state, StateSpec::File { .. }) && *mode == InputMode::Measure {
                        return Err(verr(Some(i), "E117", "a file state can only be teleported in"));
                    }
                    state
                        .state(self.ts[t].arity)
                        .map_err(|e| verr(Some(i), "E118", e.to_string()))?;
                }
                Node::Loop { from, to } => {
                    if from != to {
                        return Err(verr(Some(i), "E103", "loop endpoints must share a transistor"));
                    }
                    let t = self.transistor(from, i)?;
                    if self.loops.insert(t, i).is_some() {
                        return Err(verr(Some(i), "E110", format!("second loop on '{from}'")));
                    }
                }
                Node::Ebit { id, a, b, cycle } => {
                    if ebit_ids.insert(id.as_str(), i).is_some()
                        || self.tindex.contains_key(id)
                        || self.qubits.contains_key(id)
                    {
                        return Err(verr(Some(i), "E101", format!("duplicate id '{id}'")));
                    }
                    let is_in = |e: &Endpoint| matches!(e, Endpoint::Mode { side: Side::In, .. });
                    let (src, dst) = match (is_in(a), is_in(b)) {
                        (false, true) => (a, b),
                        (true, false) => (b, a),
                        _ => {
                            return Err(verr(
                                Some(i),
                                "E114",
                                "an ebit joins one input mode to one data endpoint",
                            ))
                        }
                    };
                    let Endpoint::Mode { transistor, leg, .. } = dst else { unreachable!() };
                    let t = self.transistor(transistor, i)?;
                    let leg = self.leg(t, *leg, i)?;
                    match src {
                        Endpoint::Qubit(q) if !self.qubits.contains_key(q) => {
                            return Err(verr(Some(i), "E102", format!("unknown qubit '{q}'")));
                        }
                        Endpoint::Mode { transistor: s, leg: sl, .. } => {
                            let st = self.transistor(s, i)?;
                            self.leg(st, *sl, i)?;
                            if sl.is_none() && self.ts[st].arity > 1 {
                                return Err(verr(Some(i), "E104", "multi-leg source needs a leg index"));
                            }
                        }
                        _ => {}
                    }
                    let src = match src {
                        Endpoint::Mode { transistor, side, leg } => Endpoint::Mode {
                            transistor: transistor.clone(),
                            side: *side,
                            leg: Some(leg.unwrap_or(0)),
                        },
                        q => q.clone(),
                    };
                    self.links.entry(t).or_default().push(Link {
                        node: i,
                        source: src,
                        leg,
                        cycle: *cycle,
                        used: false,
                    });
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn setup(&mut self) -> std::result::Result<(), ValidationError> {
        for t in 0..self.ts.len() {
            let size = self.ts[t].kind.size(self.ts[t].arity);
            self.alloc(size, Some(self.ts[t].decl))?;
            self.push(0, Some(self.ts[t].decl), Action::Build { transistor: t });
        }
        let ir = self.ir;
        for (i, n) in ir.nodes.iter().enumerate() {
            if let Node::Qubit { id, state } = n {
                let s = state.state(1).map_err(|e| verr(Some(i), "E118", e.to_string()))?;
                self.alloc(1, Some(i))?;
                let w = self.new_wire(id.clone());
                self.qubits.insert(id.clone(), Some(w));
                self.push(0, Some(i), Action::Prep { wires: vec![w], state: s });
            }
        }
        Ok(())
    }

    fn refresh(&mut self, i: usize, target: &str, cycle: u32) -> std::result::Result<(), ValidationError> {
        let t = self.transistor(target, i)?;
        if self.ts[t].fresh {
            return Err(verr(Some(i), "E108", format!("refresh of fresh transistor '{target}'")));
        }
        let size = self.ts[t].kind.size(self.ts[t].arity);
        self.alloc(size, Some(i))?;
        self.ts[t].fresh = true;
        self.push(cycle, Some(i), Action::Refresh { transistor: t });
        Ok(())
    }

    fn gate(&mut self, i: usize, name: &str, targets: &[Endpoint], cycle: u32) -> std::result::Result<(), ValidationError> {
        let u = gates::by_name(name).ok_or_else(|| verr(Some(i), "E116", format!("unknown gate '{name}'")))?;
        let mut wires = Vec::new();
        for ep in targets {
            if let Endpoint::Mode { transistor, leg: None, .. } = ep {
                let t = self.transistor(transistor, i)?;
                if self.ts[t].arity > 1 {
                    return Err(verr(Some(i), "E104", "multi-leg gate target needs a leg index"));
                }
            }
            wires.extend(self.data_wires(ep, i)?);
        }
        if wires.len() != u.arity() {
            return Err(verr(
                Some(i),
                "E120",
                format!("gate '{name}' has arity {} but {} targets", u.arity(), wires.len()),
            ));
        }
        if (1..wires.len()).any(|k| wires[..k].contains(&wires[k])) {
            return Err(verr(Some(i), "E120", "repeated gate target"));
        }
        self.push(cycle, Some(i), Action::Gate { name: name.to_string(), u, wires });
        Ok(())
    }

    fn signal(&mut self, i: usize, target: &str, cycle: u32) -> std::result::Result<(), ValidationError> {
        let t = self.transistor(target, i)?;
        if !self.ts[t].fresh {
            return Err(verr(
                Some(i),
                "E107",
                format!("'{target}' is consumed; refresh it before signaling again"),
            ));
        }
        let round = self.ts[t].rounds + 1;
        let arity = self.ts[t].arity;
        let mut legs: Vec<Option<LegPlan>> = vec![None; arity];
        let conflict = |leg: usize| verr(Some(i), "E110", format!("'{target}' leg {leg} has two inputs at cycle {cycle}"));

        if round == 1 {
            if let Some(&n) = self.inputs.get(&t) {
                let Node::Input { state, mode, .. } = &self.ir.nodes[n] else { unreachable!() };
                let label = format!("{target}.in@{cycle}");
                match (state, mode) {
                    (StateSpec::Basis(syms), InputMode::Measure) => {
                        for (l, slot) in legs.iter_mut().enumerate() {
                            let s = if syms.len() == 1 { syms[0] } else { syms[l] };
                            let w = self.new_wire(format!("{label}[{l}]"));
                            *slot = Some(LegPlan::Measure { wire: w, state: s });
                        }
                    }
                    _ => {
                        let s = state.state(arity).map_err(|e| verr(Some(n), "E118", e.to_string()))?;
                        self.alloc(arity, Some(n))?;
                        let wires: Vec<usize> = (0..arity).map(|l| self.new_wire(format!("{label}[{l}]"))).collect();
                        self.push(cycle, Some(n), Action::Prep { wires: wires.clone(), state: s });
                        for (l, w) in wires.into_iter().enumerate() {
                            legs[l] = Some(LegPlan::Teleport { wire: w });
                        }
                    }
                }
            }
        } else if self.loops.contains_key(&t) {
            for (l, slot) in legs.iter_mut().enumerate() {
                let w = self.ts[t].outputs[l].ok_or_else(|| {
                    verr(
                        Some(i),
                        "E112",
                        format!("loop on '{target}' has no output on leg {l} to feed back"),
                    )
                })?;
                self.ts[t].outputs[l] = None;
                *slot = Some(LegPlan::Teleport { wire: w });
            }
        }

        let mut links = self.links.remove(&t).unwrap_or_default();
        for link in links.iter_mut().filter(|k| !k.used) {
            let applies = match link.cycle {
                Some(c) => c == cycle,
                None => round == 1,
            };
            if !applies {
                continue;
            }
            if legs[link.leg].is_some() {
                return Err(conflict(link.leg));
            }
            if let Endpoint::Mode { transistor, .. } = &link.source {
                let st = self.tindex[transistor];
                match self.ts[st].last_signal {
                    Some(c) if c < cycle => {}
                    _ => {
                        return Err(verr(
                            Some(link.node),
                            "E111",
                            format!("source '{}' must be activated in an earlier cycle than {cycle}", link.source),
                        ))
                    }
                }
            }
            let w = self.consume(&link.source, link.node)?[0];
            legs[link.leg] = Some(LegPlan::Teleport { wire: w });
            link.used = true;
        }
        self.links.insert(t, links);

        let legs: Vec<LegPlan> = legs
            .into_iter()
            .enumerate()
            .map(|(l, p)| {
                p.ok_or_else(|| {
                    verr(
                        Some(i),
                        "E109",
                        format!("'{target}' signaled at cycle {cycle} has no input on leg {l}"),
                    )
                })
            })
            .collect::<std::result::Result<_, _>>()?;

        // Qubit accounting: measured legs drop L, teleported legs drop the
        // data qubit and L, activation drops the bulk.
        let removed: usize = legs
            .iter()
            .map(|p| match p {
                LegPlan::Measure { .. } => 1,
                LegPlan::Teleport { .. } => 2,
            })
            .sum::<usize>()
            + self.ts[t].kind.bulk_size();
        self.live -= removed;

        let ts = &mut self.ts[t];
        ts.outputs = legs.iter().map(|p| Some(p.wire())).collect();
        ts.fresh = false;
        ts.rounds = round;
        ts.last_signal = Some(cycle);
        self.push(cycle, Some(i), Action::Signal { transistor: t, legs });
        Ok(())
    }

    fn readout(&mut self, i: usize, target: &Endpoint, basis: ReadBasis, cycle: u32) -> std::result::Result<(), ValidationError> {
        let wires = self.consume(target, i)?;
        for &w in &wires {
            self.wire_alive[w] = false;
        }
        self.push(
            cycle,
            Some(i),
            Action::Readout {
                label: target.to_string(),
                wires,
                basis,
            },
        );
        Ok(())
    }

    fn run(mut self) -> std::result::Result<Schedule, ValidationError> {
        self.declare()?;
        self.setup()?;
        let ir = self.ir;
        let cycles = ir.nodes.iter().filter_map(|n| n.cycle()).max().unwrap_or(0);
        for cycle in 1..=cycles {
            let mut signaled: HashMap<&str, usize> = HashMap::new();
            for phase in 0..4 {
                for (i, n) in ir.nodes.iter().enumerate() {
                    match (phase, n) {
                        (0, Node::Refresh { target, cycle: c }) if *c == cycle => self.refresh(i, target, cycle)?,
                        (1, Node::Gate { name, targets, cycle: c }) if *c == cycle => {
                            self.gate(i, name, targets, cycle)?
                        }
                        (2, Node::Signal { target, cycle: c }) if *c == cycle => {
                            if signaled.insert(target.as_str(), i).is_some() {
                                return Err(verr(
                                    Some(i),
                                    "E106",
                                    format!("'{target}' is signaled twice in cycle {cycle}"),
                                ));
                            }
                            self.signal(i, target, cycle)?
                        }
                        (3, Node::Readout { target, basis, cycle: c }) if *c == cycle => {
                            self.readout(i, target, *basis, cycle)?
                        }
                        _ => {}
                    }
                }
            }
        }
        if let Some(link) = self.links.values().flatten().find(|l| !l.used) {
            return Err(verr(Some(link.node), "E119", "ebit link is never consumed by a signal"));
        }
        Ok(Schedule {
            transistors: self.plans,
            actions: self.actions,
            wire_count: self.wire_alive.len(),
            wire_labels: self.labels,
            cycles,
            peak_qubits: self.peak,
        })
    }
}

impl CircuitIR {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, node: Node) -> &mut Self {
        self.nodes.push(node);
        self
    }

    /// Validates the IR and derives its schedule.
    pub fn schedule(&self) -> std::result::Result<Schedule, ValidationError> {
        let budget = self.budget.unwrap_or(MAX_QUBITS).min(MAX_QUBITS);
        Walk {
            ir: self,
            tindex: HashMap::new(),
            ts: Vec::new(),
            plans: Vec::new(),
            qubits: HashMap::new(),
            wire_alive: Vec::new(),
            labels: Vec::new(),
            inputs: HashMap::new(),
            loops: HashMap::new(),
            links: BTreeMap::new(),
            actions: Vec::new(),
            live: 0,
            peak: 0,
            budget,
        }
        .run()
    }

    pub fn validate(&self) -> std::result::Result<(), ValidationError> {
        self.schedule().map(|_| ())
    }

    pub fn cycles(&self) -> u32 {
        self.nodes.iter().filter_map(|n| n.cycle()).max().unwrap_or(0)
    }

    fn transistor_arity(&self, id: &str) -> Option<usize> {
        self.nodes.iter().find_map(|n| match n {
            Node::Transistor { id: t, kind, .. } if t == id => kind.gate_kind().ok().map(|k| k.arity()),
            _ => None,
        })
    }
}

/// Links combinational `qubits` to the input legs of `transistor`, leg `i`
/// taking `qubits[i]`.
pub fn connect_hybrid(mut ir: CircuitIR, qubits: &[&str], transistor: &str) -> Result<CircuitIR> {
    if qubits.is_empty() {
        return Ok(ir);
    }
    let arity = ir
        .transistor_arity(transistor)
        .ok_or_else(|| QscError::InvalidCircuit(format!("unknown transistor '{transistor}'")))?;
    if arity != qubits.len() {
        return Err(QscError::ArityMismatch {
            arity,
            targets: qubits.len(),
        });
    }
    for (leg, q) in qubits.iter().enumerate() {
        ir.nodes.push(Node::Ebit {
            id: format!("hyb_{q}_{transistor}_{leg}"),
            a: Endpoint::Qubit(q.to_string()),
            b: Endpoint::Mode {
                transistor: transistor.to_string(),
                side: Side::In,
                leg: Some(leg),
            },
            cycle: None,
        });
    }
    Ok(ir)
}
