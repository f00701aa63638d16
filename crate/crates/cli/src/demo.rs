//! Algorithm demos. Each one runs the transistor construction, computes
//! the same quantity densely, and reports both with their residual.

use std::collections::BTreeMap;

use qsc_core::algos::{
    clock_angles, clock_state, derived_clock_angles, history_reference, history_state, lcu, qaa, qmux,
    qmux_reference, qpe, qpe_distribution, trotter_brickwork, trotter_reference, uniform_clock_deviation,
    BrickTerm, HistorySpec, Op, QaaSpec, QmuxSpec,
};
use qsc_core::qconv::{memory_loop_variant, unrolled_reference};
use qsc_core::qcore::{
    apply_superchannel, cr, fidelity, gates, identity, kron, trace_distance, ChannelSpec, Matrix, RngPolicy,
    StateVector, UnitarySpec, C64,
};
use qsc_core::seqexec::total_variation;
use qsc_core::transistor::BasisState;
use qsc_core::{encode_stream, ConvCodeSpec, QscError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::commands::CmdError;
use crate::report::{amplitude_pairs, bit_distribution, DEMO_SCHEMA};

pub const DEMOS: &[&str] = &["qpe", "qaa", "lcu", "qmux", "history", "qconv", "trotter", "superchannel"];

/// `key=value` demo parameters. Every key must be read by the demo.
#[derive(Debug, Clone, Default)]
pub struct Params {
    map: BTreeMap<String, String>,
    used: std::cell::RefCell<Vec<String>>,
}

impl Params {
    pub fn parse(args: &[String]) -> Result<Self, CmdError> {
        let mut map = BTreeMap::new();
        for a in args {
            let (k, v) = a
                .split_once('=')
                .ok_or_else(|| CmdError::validation(format!("demo parameter '{a}' is not key=value")))?;
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(CmdError::validation(format!("parameter '{k}' given twice")));
            }
        }
        Ok(Params {
            map,
            used: Default::default(),
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().push(key.to_string());
        self.map.get(key).map(String::as_str)
    }

    fn num<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, CmdError> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CmdError::validation(format!("parameter {key}='{v}' is not a valid number"))),
        }
    }

    fn text<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.raw(key).unwrap_or(default)
    }

    fn finish(&self) -> Result<(), CmdError> {
        let used = self.used.borrow();
        match self.map.keys().find(|k| !used.contains(k)) {
            Some(k) => Err(CmdError::validation(format!("unknown parameter '{k}'"))),
            None => Ok(()),
        }
    }

    fn echo(&self) -> Value {
        json!(self.map)
    }
}

fn bad(msg: impl Into<String>) -> CmdError {
    CmdError::validation(msg)
}

/// Parameter problems the core reports become validation errors.
fn core_err(e: QscError) -> CmdError {
    match e {
        QscError::InvalidParameter(_)
        | QscError::DimensionMismatch(_)
        | QscError::UnsupportedGate(_)
        | QscError::NotEigenstate { .. }
        | QscError::ArityMismatch { .. }
        | QscError::CapacityExceeded { .. } => CmdError::validation(e.to_string()),
        other => CmdError::runtime(other),
    }
}

fn gate(name: &str) -> Result<UnitarySpec, CmdError> {
    gates::by_name(&name.to_ascii_lowercase()).ok_or_else(|| bad(format!("unknown gate '{name}'")))
}

fn gate_list(list: &str) -> Result<Vec<UnitarySpec>, CmdError> {
    list.split(',').map(gate).collect()
}

fn real_list(key: &str, list: &str) -> Result<Vec<f64>, CmdError> {
    list.split(',')
        .map(|v| v.parse::<f64>().ok().filter(|x| x.is_finite()))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| bad(format!("{key} must be a comma-separated list of numbers")))
}

/// Product state from `0 1 + -` symbols, first symbol on qubit 0.
fn symbols(key: &str, s: &str) -> Result<StateVector, CmdError> {
    let parts: Option<Vec<StateVector>> = s.chars().map(|c| BasisState::from_symbol(c).map(|b| b.state())).collect();
    match parts {
        Some(p) => StateVector::product(&p).map_err(core_err),
        None => Err(bad(format!("{key} must use the symbols 0 1 + -, got '{s}'"))),
    }
}

fn in_range<T: PartialOrd + std::fmt::Display>(key: &str, v: T, lo: T, hi: T) -> Result<T, CmdError> {
    if v < lo || v > hi {
        return Err(bad(format!("{key}={v} outside {lo}..={hi}")));
    }
    Ok(v)
}

/// Runs demo `name` and returns its JSON document.
pub fn run(name: &str, params: &Params, seed: u64) -> Result<Value, CmdError> {
    let policy = RngPolicy::Seeded(seed);
    let result = match name {
        "qpe" => demo_qpe(params, &policy)?,
        "qaa" => demo_qaa(params, &policy)?,
        "lcu" => demo_lcu(params, &policy)?,
        "qmux" => demo_qmux(params, &policy)?,
        "history" => demo_history(params)?,
        "qconv" => demo_qconv(params, &policy)?,
        "trotter" => demo_trotter(params, seed, &policy)?,
        "superchannel" => demo_superchannel(params, seed)?,
        _ => return Err(bad(format!("unknown demo '{name}'; expected one of {}", DEMOS.join(", ")))),
    };
    params.finish()?;
    Ok(json!({
        "schema": DEMO_SCHEMA,
        "demo": name,
        "params": params.echo(),
        "seed": seed,
        "result": result,
    }))
}

fn demo_qpe(p: &Params, policy: &RngPolicy) -> Result<Value, CmdError> {
    let u_name = p.text("u", "s");
    let u = gate(u_name)?;
    let t = in_range("t", p.num("t", 2usize)?, 1, 4)?;
    let default_psi = "1".repeat(u.arity());
    let psi_text = p.text("psi", &default_psi).to_string();
    let psi = symbols("psi", &psi_text)?;
    let r = qpe(&u, &psi, t, policy).map_err(core_err)?;
    let want = qpe_distribution(&u, &psi, t).map_err(core_err)?;
    Ok(json!({
        "u": u_name,
        "t": t,
        "psi": psi_text,
        "readout": { "bits": r.bits, "probability": r.probability, "estimate": r.estimate },
        "distribution": bit_distribution(&r.distribution, t, true),
        "oracle_distribution": bit_distribution(&want, t, true),
        "tv_distance": total_variation(&r.distribution, &want),
    }))
}

fn demo_qaa(p: &Params, policy: &RngPolicy) -> Result<Value, CmdError> {
    let prob: f64 = p.num("p", 0.25)?;
    if !(prob > 0.0 && prob < 1.0) {
        return Err(bad(format!("p={prob} must lie strictly between 0 and 1")));
    }
    let n = in_range("n", p.num("n", 1usize)?, 0, 64)?;
    // amplitude √p on the good flag value |0⟩
    let a = gates::ry(2.0 * prob.sqrt().acos());
    let spec = QaaSpec::new(a, &StateVector::empty()).map_err(core_err)?;
    let (_, got) = qaa(&spec, n, policy).map_err(core_err)?;
    let closed = spec.closed_form(n);
    Ok(json!({
        "p": prob,
        "n": n,
        "success_probability": got,
        "closed_form": closed,
        "residual": (got - closed).abs(),
    }))
}

fn demo_lcu(p: &Params, policy: &RngPolicy) -> Result<Value, CmdError> {
    let cs = real_list("c", p.text("c", "0.5,0.5"))?;
    let us = gate_list(p.text("u", "i,z"))?;
    let psi = symbols("psi", p.text("psi", "+"))?;
    if cs.len() != us.len() {
        return Err(bad(format!("{} coefficients for {} gates", cs.len(), us.len())));
    }
    let coeffs: Vec<C64> = cs.iter().map(|&x| cr(x)).collect();
    let r = lcu(&coeffs, &us, &psi, None, policy).map_err(core_err)?;
    let targets: Vec<usize> = (0..psi.qubit_count()).collect();
    let mut sum = vec![cr(0.0); psi.dim()];
    for (ci, u) in coeffs.iter().zip(&us) {
        for (acc, a) in sum.iter_mut().zip(psi.applied(u, &targets).map_err(core_err)?.amplitudes()) {
            *acc += ci * a;
        }
    }
    let weight: f64 = sum.iter().map(|z| z.norm_sqr()).sum();
    let d = us.len().next_power_of_two() as f64;
    let c_norm_sq: f64 = cs.iter().map(|x| x * x).sum();
    let want = StateVector::normalized(sum).map_err(core_err)?;
    let oracle_p = weight / (d * c_norm_sq);
    Ok(json!({
        "success_probability": r.success_probability,
        "oracle_success_probability": oracle_p,
        "state": amplitude_pairs(&r.state),
        "oracle_state": amplitude_pairs(&want),
        "fidelity": fidelity(&r.state, &want).map_err(core_err)?,
        "probability_residual": (r.success_probability - oracle_p).abs(),
    }))
}

fn demo_qmux(p: &Params, policy: &RngPolicy) -> Result<Value, CmdError> {
    let us = gate_list(p.text("u", "x,z"))?;
    let cs: Vec<C64> = match p.raw("c") {
        Some(list) => real_list("c", list)?.into_iter().map(cr).collect(),
        None => vec![cr(1.0 / (us.len() as f64).sqrt()); us.len()],
    };
    let psi = symbols("psi", p.text("psi", "+"))?;
    let spec = QmuxSpec::new(us, cs).map_err(core_err)?;
    let got = qmux(&spec, &psi, policy).map_err(core_err)?;
    let want = qmux_reference(&spec, &psi).map_err(core_err)?;
    Ok(json!({
        "control_qubits": spec.control_qubits(),
        "data_qubits": spec.data_qubits(),
        "state": amplitude_pairs(&got),
        "oracle_state": amplitude_pairs(&want),
        "fidelity": fidelity(&got, &want).map_err(core_err)?,
    }))
}

fn demo_history(p: &Params) -> Result<Value, CmdError> {
    let depth = in_range("T", p.num("T", 1usize)?, 0, 5)?;
    let mut us = Vec::with_capacity(depth);
    for s in 1..=depth {
        us.push(gate(p.text(&format!("u{s}"), "h"))?);
    }
    let psi = symbols("psi", p.text("psi", "0"))?;
    if us.iter().any(|u| u.arity() != psi.qubit_count()) {
        return Err(bad("every step gate must act on all data qubits"));
    }
    let spec = HistorySpec {
        gates: us,
        initial: psi.clone(),
    };
    let h = history_state(&spec).map_err(core_err)?;
    let want = history_reference(&spec).map_err(core_err)?;
    let m = psi.qubit_count();
    let dm = 1usize << m;
    let data: Vec<usize> = (0..m).collect();
    let mut prefix = psi;
    let mut branches = Vec::new();
    let mut weights = Vec::new();
    let mut worst_fid: f64 = 1.0;
    for t in 0..=depth {
        if t > 0 {
            prefix = prefix.applied(&spec.gates[t - 1], &data).map_err(core_err)?;
        }
        let wall = (1usize << depth) - (1usize << t);
        let slice: Vec<C64> = h.amplitudes()[wall * dm..(wall + 1) * dm].to_vec();
        let weight: f64 = slice.iter().map(|z| z.norm_sqr()).sum();
        let branch = StateVector::normalized(slice.clone()).map_err(core_err)?;
        worst_fid = worst_fid.min(fidelity(&branch, &prefix).map_err(core_err)?);
        let clock: String = (0..depth).map(|l| if wall >> l & 1 == 1 { '1' } else { '0' }).collect();
        branches.push(json!({
            "t": t,
            "clock": clock,
            "weight": weight,
            "data": slice.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        }));
        weights.push(weight);
    }
    let target = 1.0 / (depth + 1) as f64;
    let published = clock_state(depth, &clock_angles(depth).map_err(core_err)?).map_err(core_err)?;
    let derived = clock_state(depth, &derived_clock_angles(depth).map_err(core_err)?).map_err(core_err)?;
    Ok(json!({
        "T": depth,
        "branch_weights": weights,
        "branches": branches,
        "max_weight_error": weights.iter().map(|w| (w - target).abs()).fold(0.0, f64::max),
        "min_prefix_fidelity": worst_fid,
        "reference_fidelity": fidelity(&h, &want).map_err(core_err)?,
        "derived_clock_deviation": uniform_clock_deviation(depth, &derived),
        "published_clock_deviation": uniform_clock_deviation(depth, &published),
    }))
}

/// Every ancilla picks up the parity of input `j mod k` and of the whole
/// memory.
fn parity_code(n: usize, k: usize, m: usize) -> Result<ConvCodeSpec, CmdError> {
    if k == 0 || n < k {
        return Err(bad(format!("(n, k) = ({n}, {k}) needs n ≥ k ≥ 1")));
    }
    let mk = m * k;
    let mut ops = Vec::new();
    for j in 0..n - k {
        let anc = k + mk + j;
        ops.push(Op::new("cnot", gates::cnot(), &[j % k, anc]));
        for q in k..k + mk {
            ops.push(Op::new("cnot", gates::cnot(), &[q, anc]));
        }
    }
    ConvCodeSpec::new(n, k, m, ops).map_err(core_err)
}

fn demo_qconv(p: &Params, policy: &RngPolicy) -> Result<Value, CmdError> {
    let n = in_range("n", p.num("n", 2usize)?, 1, 3)?;
    let k = in_range("k", p.num("k", 1usize)?, 1, n)?;
    let m = in_range("m", p.num("m", 1usize)?, 0, 2)?;
    let cycles = in_range("C", p.num("C", 3usize)?, 1, 4)?;
    let default_input = "+".repeat(cycles * k);
    let input_text = p.text("input", &default_input).to_string();
    if input_text.chars().count() != cycles * k {
        return Err(bad(format!("input needs {} symbols, one per input qubit", cycles * k)));
    }
    let input = symbols("input", &input_text)?;
    let spec = parity_code(n, k, m)?;
    let (stream, trace) = encode_stream(&spec, &input, cycles, policy).map_err(core_err)?;
    let unrolled = unrolled_reference(&spec, &input, cycles).map_err(core_err)?;
    let looped = memory_loop_variant(&spec, &input, cycles, policy).map_err(core_err)?;
    let z: Vec<usize> = (0..stream.qubit_count()).collect();
    let dist = stream.marginal(&z).map_err(core_err)?;
    Ok(json!({
        "n": n, "k": k, "m": m, "cycles": cycles,
        "input": input_text,
        "trace": trace,
        "output_qubits": stream.qubit_count(),
        "z_distribution": bit_distribution(&dist, stream.qubit_count(), false),
        "unrolled_fidelity": fidelity(&stream, &unrolled).map_err(core_err)?,
        "memory_loop_fidelity": fidelity(&looped, &unrolled).map_err(core_err)?,
    }))
}

fn demo_trotter(p: &Params, seed: u64, policy: &RngPolicy) -> Result<Value, CmdError> {
    let n = in_range("n", p.num("n", 4usize)?, 2, 4)?;
    let layers = in_range("layers", p.num("layers", 2usize)?, 0, 6)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = |start: usize| (start..n.saturating_sub(1)).step_by(2).map(|q| [q, q + 1]).collect::<Vec<_>>();
    let even: Vec<BrickTerm> = pairs(0).iter().map(|t| BrickTerm::new(UnitarySpec::random(2, &mut rng), t)).collect();
    let odd: Vec<BrickTerm> = pairs(1).iter().map(|t| BrickTerm::new(UnitarySpec::random(2, &mut rng), t)).collect();
    let psi = StateVector::random(n, &mut rng).map_err(core_err)?;
    let got = trotter_brickwork(&even, &odd, layers, &psi, policy).map_err(core_err)?;
    let want = trotter_reference(&even, &odd, layers, &psi).map_err(core_err)?;
    Ok(json!({
        "n": n,
        "layers": layers,
        "even_terms": even.len(),
        "odd_terms": odd.len(),
        "fidelity": fidelity(&got, &want).map_err(core_err)?,
    }))
}

/// `Σ_K tr_a V (I ⊗ K) U (|0⟩⟨0| ⊗ ρ) U† (I ⊗ K)† V†`, one Kraus branch
/// at a time.
fn superchannel_oracle(pre: &UnitarySpec, post: &UnitarySpec, phi: &ChannelSpec, rho: &Matrix) -> Matrix {
    let dd = rho.nrows();
    let da = pre.dim() / dd;
    let mut anc = Matrix::zeros(da, da);
    anc[(0, 0)] = cr(1.0);
    let start = kron(&anc, rho);
    let mut out = Matrix::zeros(dd, dd);
    for k in phi.kraus_ops() {
        let op = post.matrix() * kron(&identity(pre.dim() / k.nrows()), k) * pre.matrix();
        let full = &op * &start * op.adjoint();
        for a in 0..da {
            out += full.view((a * dd, a * dd), (dd, dd));
        }
    }
    out
}

fn demo_superchannel(p: &Params, seed: u64) -> Result<Value, CmdError> {
    let kraus = in_range("kraus", p.num("kraus", 2usize)?, 1, 2)?;
    let phi_arity = in_range("phi", p.num("phi", 1usize)?, 1, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pre = UnitarySpec::random(2, &mut rng);
    let post = UnitarySpec::random(2, &mut rng);
    let phi = ChannelSpec::random(phi_arity, kraus, &mut rng).map_err(core_err)?;
    let psi = StateVector::random(1, &mut rng).map_err(core_err)?.to_column();
    let rho = &psi * psi.adjoint();
    let got = apply_superchannel(&pre, &post, &phi, &rho).map_err(core_err)?;
    let want = superchannel_oracle(&pre, &post, &phi, &rho);
    let pairs = |m: &Matrix| -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
    };
    Ok(json!({
        "kraus_operators": kraus,
        "channel_arity": phi_arity,
        "output": pairs(&got),
        "oracle_output": pairs(&want),
        "trace_distance": trace_distance(&got, &want),
    }))
}
