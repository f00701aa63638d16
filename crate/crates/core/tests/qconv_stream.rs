use qsc_core::algos::Op;
use qsc_core::qconv::{encode_stream_with, memory_loop_variant_with, unroll, unrolled_reference};
use qsc_core::qcore::{fidelity, trace_distance, OutcomeSource, RngPolicy, StateVector, UnitarySpec};
use qsc_core::seqexec::ShiftMode;
use qsc_core::{encode_stream, ConvCodeSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

/// A random cycle circuit: one dense unitary when the cycle is narrow,
/// otherwise a handful of random one- and two-qubit gates.
fn random_code(n: usize, k: usize, m: usize, rng: &mut ChaCha8Rng) -> ConvCodeSpec {
    let width = n + m * k;
    if width <= 4 {
        return ConvCodeSpec::from_unitary(n, k, m, UnitarySpec::random(width, rng)).unwrap();
    }
    let mut qs: Vec<usize> = (0..width).collect();
    let ops = (0..2 * width)
        .map(|i| {
            qs.shuffle(rng);
            let arity = if rng.gen_bool(0.7) { 2 } else { 1 };
            Op::new(format!("g{i}"), UnitarySpec::random(arity, rng), &qs[..arity])
        })
        .collect();
    ConvCodeSpec::new(n, k, m, ops).unwrap()
}

#[test]
fn streaming_equals_unrolled_on_the_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0DE);
    let mut cases = 0;
    for n in 1..=3 {
        for k in 1..=n {
            for m in 0..=2 {
                for cycles in 1..=4 {
                    if cycles * n + m * k > 18 {
                        continue;
                    }
                    let spec = random_code(n, k, m, &mut rng);
                    let psi = StateVector::random(cycles * k, &mut rng).unwrap();
                    let (got, trace) = encode_stream(&spec, &psi, cycles, &RngPolicy::Seeded(cases)).unwrap();
                    let want = unrolled_reference(&spec, &psi, cycles).unwrap();
                    assert!(fidelity(&got, &want).unwrap() >= 1.0 - TOL, "({n},{k},{m}) C={cycles}");
                    assert_eq!(trace.emitted.len(), cycles);
                    assert_eq!(unroll(&spec, cycles).unwrap().ops.len(), cycles * spec.cycle_gates.len());
                    cases += 1;
                }
            }
        }
    }
    assert!(cases > 40);
}

#[test]
fn teleported_memory_matches_persistent() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7E1E);
    for (n, k, m) in [(2, 1, 1), (2, 1, 2), (3, 1, 2)] {
        let spec = random_code(n, k, m, &mut rng);
        let psi = StateVector::random(3 * k, &mut rng).unwrap();
        let want = unrolled_reference(&spec, &psi, 3).unwrap();
        for seed in 0..4 {
            let (got, _) = encode_stream_with(&spec, &psi, 3, ShiftMode::Teleport, &mut OutcomeSource::seeded(seed)).unwrap();
            assert!(fidelity(&got, &want).unwrap() >= 1.0 - TOL);
        }
    }
}

#[test]
fn memory_loop_variant_every_bell_branch() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x100B);
    for (n, cycles) in [(1, 2), (2, 2), (2, 3)] {
        let spec = random_code(n, 1, 1, &mut rng);
        let psi = StateVector::random(cycles, &mut rng).unwrap();
        let want = unrolled_reference(&spec, &psi, cycles).unwrap();
        let bits = 2 * cycles;
        for b in 0..(1u32 << bits) {
            let forced: Vec<u8> = (0..bits).map(|i| (b >> i & 1) as u8).collect();
            let got = memory_loop_variant_with(&spec, &psi, cycles, &mut OutcomeSource::forced(&forced)).unwrap();
            assert!(fidelity(&got, &want).unwrap() >= 1.0 - TOL, "n={n} C={cycles} {forced:?}");
        }
    }
    let spec = random_code(2, 1, 0, &mut rng);
    let psi = StateVector::random(3, &mut rng).unwrap();
    let a = memory_loop_variant_with(&spec, &psi, 3, &mut OutcomeSource::forced(&[])).unwrap();
    let (b, _) = encode_stream(&spec, &psi, 3, &RngPolicy::Seeded(0)).unwrap();
    assert!(fidelity(&a, &b).unwrap() >= 1.0 - 1e-12);
}

/// Cycle maps that only read inputs and memory as controls and act freely
/// on the ancillas.
fn reading_code(n: usize, m: usize, rng: &mut ChaCha8Rng) -> ConvCodeSpec {
    let k = 1;
    let width = n + m * k;
    let readable: Vec<usize> = (0..k + m * k).collect();
    let anc: Vec<usize> = (k + m * k..width).collect();
    let mut ops = Vec::new();
    for (i, &a) in anc.iter().enumerate() {
        for &r in &readable {
            // controlled() puts the control on top: targets [data, control]
            ops.push(Op::new(format!("c{i}{r}"), UnitarySpec::random(1, rng).controlled(), &[a, r]));
        }
        ops.push(Op::new(format!("u{i}"), UnitarySpec::random(1, rng), &[a]));
    }
    if anc.len() == 2 {
        ops.push(Op::new("mix", UnitarySpec::random(2, rng), &anc));
    }
    ConvCodeSpec::new(n, k, m, ops).unwrap()
}

#[test]
fn finite_memory() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF1);
    for n in 2..=3 {
        for m in 0..=2usize {
            let spec = reading_code(n, m, &mut rng);
            let cycles = 4;
            let tail: Vec<u8> = (1..cycles).map(|_| rng.gen_range(0..2)).collect();
            let mut states = Vec::new();
            for first in 0..2u8 {
                let idx = std::iter::once(first)
                    .chain(tail.iter().copied())
                    .enumerate()
                    .fold(0usize, |acc, (i, b)| acc | (b as usize) << i);
                let input = StateVector::basis(cycles, idx).unwrap();
                states.push(encode_stream(&spec, &input, cycles, &RngPolicy::Seeded(1)).unwrap());
            }
            let trace = &states[0].1;
            for c in (m + 1)..cycles {
                let q = &trace.emitted[c];
                let a = states[0].0.reduced_density(q).unwrap();
                let b = states[1].0.reduced_density(q).unwrap();
                assert!(trace_distance(&a, &b) <= 1e-9, "n={n} m={m} cycle {}", c + 1);
            }
            // the first cycle's input is still visible while it sits in memory
            let q: Vec<usize> = trace.emitted[..=m].concat();
            let a = states[0].0.reduced_density(&q).unwrap();
            let b = states[1].0.reduced_density(&q).unwrap();
            assert!(trace_distance(&a, &b) > 1e-3);
        }
    }
}

#[test]
fn cycle_map_is_an_isometry() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x150);
    for (n, k, m) in [(1, 1, 0), (2, 1, 1), (3, 1, 2), (3, 2, 1)] {
        let spec = random_code(n, k, m, &mut rng);
        let v = spec.cycle_isometry().unwrap();
        let g = v.adjoint() * &v;
        let d = g.nrows();
        for i in 0..d {
            for j in 0..d {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g[(i, j)].re - want).abs() < 1e-10 && g[(i, j)].im.abs() < 1e-10);
            }
        }
    }
}
