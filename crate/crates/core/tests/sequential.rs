use qsc_core::qcore::{fidelity, gates, Matrix, OutcomeSource, RngPolicy, StateVector, UnitarySpec};
use qsc_core::seqexec::{
    dense_reference, iterate_gate_with, plan_pipeline, run_pipeline, run_qfsm_with, ByproductMode, FsmStyle, Gate,
    QFSMSpec, QfsmOptions, RegisterMode,
};
use qsc_core::GateKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn loop_kinds() -> Vec<(GateKind, UnitarySpec)> {
    vec![
        (GateKind::ChoiStored(gates::x()), gates::x()),
        (GateKind::Wire(1), gates::h()),
        (GateKind::SChain, gates::s()),
        (GateKind::MagicT, gates::t()),
    ]
}

fn bits_used(kind: &GateKind, psi: &StateVector, k: usize) -> usize {
    let r = iterate_gate_with(kind, psi, k, &mut OutcomeSource::seeded(0)).unwrap();
    r.records.iter().map(|m| m.outcome.len()).sum()
}

#[test]
fn loop_reproduces_powers_on_every_forced_branch() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x100F);
    for (kind, u) in loop_kinds() {
        let psi = StateVector::random(1, &mut rng).unwrap();
        for k in 0..=2 {
            let want = psi.applied(&u.pow(k as u64), &[0]).unwrap();
            let n = bits_used(&kind, &psi, k);
            for b in 0..(1u32 << n) {
                let forced: Vec<u8> = (0..n).map(|i| (b >> i & 1) as u8).collect();
                let got = iterate_gate_with(&kind, &psi, k, &mut OutcomeSource::forced(&forced)).unwrap();
                assert!(fidelity(&got.state, &want).unwrap() >= 1.0 - TOL, "{kind:?} k={k} {forced:?}");
            }
        }
    }
}

#[test]
fn loop_reproduces_powers_on_random_branches() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x100E);
    for (kind, u) in loop_kinds() {
        for k in 0..=8 {
            let psi = StateVector::random(1, &mut rng).unwrap();
            let want = psi.applied(&u.pow(k as u64), &[0]).unwrap();
            for _ in 0..50 {
                let seed = rng.gen();
                let got = iterate_gate_with(&kind, &psi, k, &mut OutcomeSource::seeded(seed)).unwrap();
                assert!(fidelity(&got.state, &want).unwrap() >= 1.0 - TOL);
            }
        }
    }
}

#[test]
fn loop_keeps_qubit_count_bounded() {
    let psi = StateVector::plus();
    let short = iterate_gate_with(&GateKind::Wire(3), &psi, 1, &mut OutcomeSource::seeded(1)).unwrap();
    let long = iterate_gate_with(&GateKind::Wire(3), &psi, 8, &mut OutcomeSource::seeded(1)).unwrap();
    assert_eq!(short.peak_qubits, long.peak_qubits);
}

pub fn random_circuit(rng: &mut ChaCha8Rng, qubits: usize, len: usize) -> Vec<Gate> {
    (0..len)
        .map(|_| {
            let pick = rng.gen_range(0..if qubits > 1 { 6 } else { 4 });
            let a = rng.gen_range(0..qubits);
            match pick {
                0 => Gate::new("h", &[a]),
                1 => Gate::new("s", &[a]),
                2 => Gate::new("t", &[a]),
                3 => Gate::new("sdg", &[a]),
                _ => {
                    let mut b = rng.gen_range(0..qubits - 1);
                    if b >= a {
                        b += 1;
                    }
                    Gate::new(if pick == 4 { "cnot" } else { "cz" }, &[a, b])
                }
            }
        })
        .collect()
}

#[test]
fn deferred_byproducts_match_eager() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x919E);
    for i in 0..100u64 {
        let qubits = rng.gen_range(1..=5);
        let len = rng.gen_range(1..=20);
        let circuit = random_circuit(&mut rng, qubits, len);
        let psi = StateVector::random(qubits, &mut rng).unwrap();
        let plan = plan_pipeline(&circuit, qubits).unwrap();
        let eager = run_pipeline(&plan, &psi, ByproductMode::Eager, &RngPolicy::Seeded(i)).unwrap();
        let deferred = run_pipeline(&plan, &psi, ByproductMode::Deferred, &RngPolicy::Seeded(i + 1000)).unwrap();
        let dense = dense_reference(&circuit, &psi).unwrap();
        assert!(fidelity(&eager.state, &deferred.state).unwrap() >= 1.0 - TOL, "circuit {i}");
        assert!(fidelity(&deferred.state, &dense).unwrap() >= 1.0 - TOL, "circuit {i}");
    }
}

/// Dense run of a QFSM: the register and all inputs as one pure state, the
/// output ancillas appended per cycle and left unmeasured.
fn qfsm_dense(spec: &QFSMSpec, inputs: &[StateVector]) -> Vec<(Vec<f64>, Matrix)> {
    let (k, m, n) = (spec.register_qubits, spec.input_qubits, spec.output_qubits);
    let mut s = spec.initial.clone();
    let mut out = Vec::new();
    for x in inputs {
        let base = s.qubit_count();
        s = s.tensor(x).unwrap();
        let input: Vec<usize> = (base..base + m).collect();
        let mut t: Vec<usize> = (0..k).collect();
        t.extend(&input);
        s.apply_gate(&spec.transition, &t).unwrap();
        let anc_base = s.qubit_count();
        s = s.tensor(&StateVector::zeros(n).unwrap()).unwrap();
        let anc: Vec<usize> = (anc_base..anc_base + n).collect();
        let mut t: Vec<usize> = (0..k).collect();
        if spec.style == FsmStyle::Mealy {
            t.extend(&input);
        }
        t.extend(&anc);
        s.apply_gate(&spec.output_map, &t).unwrap();
        out.push((s.marginal(&anc).unwrap(), s.reduced_density(&(0..k).collect::<Vec<_>>()).unwrap()));
    }
    out
}

#[test]
fn qfsm_matches_dense_unrolling() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF5);
    for style in [FsmStyle::Moore, FsmStyle::Mealy] {
        for mode in [RegisterMode::Persistent, RegisterMode::Teleport] {
            let out_arity = if style == FsmStyle::Moore { 2 } else { 3 };
            let spec = QFSMSpec {
                register_qubits: 1,
                input_qubits: 1,
                output_qubits: 1,
                transition: UnitarySpec::random(2, &mut rng),
                output_map: UnitarySpec::random(out_arity, &mut rng),
                style,
                initial: StateVector::random(1, &mut rng).unwrap(),
            };
            let inputs: Vec<StateVector> = (0..4).map(|_| StateVector::random(1, &mut rng).unwrap()).collect();
            let opts = QfsmOptions {
                measure_outputs: false,
                register_mode: mode,
            };
            let got = run_qfsm_with(&spec, &inputs, &RngPolicy::Seeded(3), opts).unwrap();
            let want = qfsm_dense(&spec, &inputs);
            for (g, (dist, rho)) in got.iter().zip(&want) {
                for (a, b) in g.output_distribution.iter().zip(dist) {
                    assert!((a - b).abs() < 1e-10);
                }
                assert!((&g.register_state - rho).iter().all(|z| z.norm() < 1e-10));
            }
        }
    }
}
