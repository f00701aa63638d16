//! JSON output.
//!
//! Every float is written in scientific notation with 17 significant
//! digits, so equal runs give equal bytes and values survive a round trip.
//! Objects are indented; arrays stay on one line.

use std::collections::BTreeMap;
use std::io;

use qsc_core::qcore::{MeasurementRecord, StateVector};
use qsc_core::seqexec::{ExecResult, ReadBasis, ReadoutRecord, Schedule};
use serde::Serialize;
use serde_json::ser::Formatter;

pub const RUN_SCHEMA: &str = "qsc-run/1";
pub const VERIFY_SCHEMA: &str = "qsc-verify/1";
pub const DEMO_SCHEMA: &str = "qsc-demo/1";

/// Probabilities at or below this are left out of distributions.
const DIST_FLOOR: f64 = 1e-15;

#[derive(Debug, Default)]
struct ReportFormatter {
    depth: usize,
    has_value: bool,
}

impl ReportFormatter {
    fn indent<W: ?Sized + io::Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.depth {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl Formatter for ReportFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b", ")
        }
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.depth += 1;
        self.has_value = false;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.depth -= 1;
        if self.has_value {
            self.indent(w)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.indent(w)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

/// Serializes `value` in the report style, with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ReportFormatter::default());
    value.serialize(&mut ser).expect("report values serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// Amplitudes as `[re, im]` pairs.
pub fn amplitude_pairs(s: &StateVector) -> Vec<[f64; 2]> {
    s.amplitudes().iter().map(|z| [z.re, z.im]).collect()
}

/// Distribution keyed by bit strings of `width` bits; `msb_first` picks
/// whether the highest index bit is written first.
pub fn bit_distribution(p: &[f64], width: usize, msb_first: bool) -> BTreeMap<String, f64> {
    p.iter()
        .enumerate()
        .filter(|(_, &v)| v > DIST_FLOOR)
        .map(|(i, &v)| {
            let bits: String = (0..width).map(|j| if i >> j & 1 == 1 { '1' } else { '0' }).collect();
            let key = if msb_first { bits.chars().rev().collect() } else { bits };
            (key, v)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub file: String,
    pub seed: Option<u64>,
    pub forced_outcomes: Option<String>,
    pub ignore_byproducts: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitSummary {
    pub transistors: Vec<String>,
    pub wires: Vec<String>,
    pub cycles: u32,
    pub peak_qubits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionEntry {
    pub action: String,
    pub records: Vec<MeasurementRecord>,
    /// Pending byproduct on each live wire after the action.
    pub frame: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleEntry {
    pub cycle: u32,
    pub actions: Vec<ActionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinalState {
    pub qubits: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResidual {
    pub deficit: f64,
    pub tv_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub config: RunConfig,
    pub seed: Option<u64>,
    pub circuit: CircuitSummary,
    pub cycles: Vec<CycleEntry>,
    pub readouts: Vec<ReadoutEntry>,
    /// Exact joint readout distribution; each key lists the bits in the
    /// order they were read.
    pub distribution: BTreeMap<String, f64>,
    pub final_state: FinalState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleResidual>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReadoutEntry {
    pub label: String,
    pub basis: &'static str,
    pub wires: Vec<usize>,
    pub outcome: String,
    pub probability: f64,
}

impl From<&ReadoutRecord> for ReadoutEntry {
    fn from(r: &ReadoutRecord) -> Self {
        ReadoutEntry {
            label: r.label.clone(),
            basis: match r.basis {
                ReadBasis::Z => "Z",
                ReadBasis::X => "X",
            },
            wires: r.wires.clone(),
            outcome: r.outcome.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect(),
            probability: r.probability,
        }
    }
}

impl RunReport {
    pub fn new(config: RunConfig, sched: &Schedule, result: &ExecResult, oracle: Option<OracleResidual>) -> Self {
        let mut cycles: Vec<CycleEntry> = Vec::new();
        for entry in &result.log {
            if cycles.last().map(|c| c.cycle) != Some(entry.cycle) {
                cycles.push(CycleEntry {
                    cycle: entry.cycle,
                    actions: Vec::new(),
                });
            }
            cycles.last_mut().expect("pushed above").actions.push(ActionEntry {
                action: entry.action.clone(),
                records: entry.records.clone(),
                frame: entry.frame.clone(),
            });
        }
        let bits: usize = sched.readouts().map(|(_, w, _)| w.len()).sum();
        RunReport {
            schema: RUN_SCHEMA,
            seed: config.seed,
            config,
            circuit: CircuitSummary {
                transistors: sched.transistors.iter().map(|t| format!("{} {}", t.id, t.kind.label())).collect(),
                wires: sched.wire_labels.clone(),
                cycles: sched.cycles,
                peak_qubits: result.peak_qubits,
            },
            cycles,
            readouts: result.readouts.iter().map(ReadoutEntry::from).collect(),
            distribution: bit_distribution(&result.distribution, bits, false),
            final_state: FinalState {
                qubits: result.final_state.qubit_count(),
                amplitudes: amplitude_pairs(&result.final_state),
            },
            oracle,
        }
    }
}
