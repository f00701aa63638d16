use proptest::prelude::*;
use qsc_core::qcore::{
    c, choi_of_unitary, distance_mod_phase, fidelity, gates, identity, kron, unitary_of_choi, Basis, Matrix,
    OutcomeSource, Register, StateVector, UnitarySpec,
};
use qsc_core::seqexec::iterate_gate_with;
use qsc_core::transistor::induced_gate;
use qsc_core::{GateKind, QscError, Transistor, WireBasisOutcome};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn basis_strategy() -> impl Strategy<Value = Basis> {
    prop_oneof![Just(Basis::X), Just(Basis::Z), (-3.0f64..3.0).prop_map(Basis::Rotated)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gates_and_measurements_keep_the_norm(seed: u64, n in 1usize..=5, q in 0usize..5, basis in basis_strategy()) {
        let mut r = rng(seed);
        let q = q % n;
        let mut s = StateVector::random(n, &mut r).unwrap();
        s.apply_gate(&UnitarySpec::random(1, &mut r), &[q]).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
        let mut probs = 0.0;
        for b in 0..2u8 {
            let mut t = s.clone();
            match t.measure(q, basis, &mut OutcomeSource::forced(&[b])) {
                Ok(rec) => {
                    probs += rec.probability;
                    prop_assert!((t.norm() - 1.0).abs() < 1e-12);
                }
                Err(QscError::ImpossibleOutcome { probability, .. }) => probs += probability,
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
        prop_assert!((probs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn teleportation_identity(seed: u64, bell in 0u8..4) {
        let psi = StateVector::random(1, &mut rng(seed)).unwrap();
        let mut reg = Register::new();
        let d = reg.alloc_state(&psi).unwrap()[0];
        let mut t = Transistor::build(GateKind::ChoiStored(gates::i()), &mut reg).unwrap();
        let mut src = OutcomeSource::forced(&[bell & 1, bell >> 1]);
        t.inject_input_by_teleport(&mut reg, &[d], &mut src).unwrap();
        t.activate(&mut reg, &mut src).unwrap();
        let out = t.right_modes().to_vec();
        reg.resolve(&out).unwrap();
        prop_assert!(fidelity(&reg.extract_pure(&out).unwrap(), &psi).unwrap() >= 1.0 - 1e-10);
    }

    #[test]
    fn ebit_transpose(re in prop::collection::vec(-1.0f64..1.0, 8)) {
        let a = Matrix::from_fn(2, 2, |i, j| c(re[2 * i + j], re[4 + 2 * i + j]));
        let mut w = StateVector::empty();
        w.make_ebit().unwrap();
        let omega = w.to_column();
        // kron(hi, lo): the low factor acts on qubit 0
        let left = kron(&identity(2), &a) * &omega;
        let right = kron(&a.transpose(), &identity(2)) * &omega;
        prop_assert!((left - right).norm() <= 1e-12);
    }

    #[test]
    fn choi_round_trip(seed: u64, arity in 1usize..=2) {
        let u = UnitarySpec::random(arity, &mut rng(seed));
        let back = unitary_of_choi(&choi_of_unitary(&u)).unwrap();
        prop_assert!(distance_mod_phase(back.matrix(), u.matrix()) < 1e-10);
    }

    #[test]
    fn identical_seeds_are_bit_identical(seed: u64, k in 0usize..=4) {
        let psi = StateVector::random(1, &mut rng(seed ^ 0xABCD)).unwrap();
        for kind in [GateKind::Wire(2), GateKind::SChain, GateKind::MagicT] {
            let a = iterate_gate_with(&kind, &psi, k, &mut OutcomeSource::seeded(seed)).unwrap();
            let b = iterate_gate_with(&kind, &psi, k, &mut OutcomeSource::seeded(seed)).unwrap();
            prop_assert_eq!(&a.records, &b.records);
            let bits = |s: &StateVector| -> Vec<(u64, u64)> {
                s.amplitudes().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
            };
            prop_assert_eq!(bits(&a.state), bits(&b.state));
        }
    }

    #[test]
    fn iterate_matches_power(seed: u64, k in 0usize..=8, which in 0usize..4) {
        let (kind, u) = [
            (GateKind::ChoiStored(gates::x()), gates::x()),
            (GateKind::Wire(1), gates::h()),
            (GateKind::SChain, gates::s()),
            (GateKind::MagicT, gates::t()),
        ][which].clone();
        let psi = StateVector::random(1, &mut rng(seed)).unwrap();
        let got = iterate_gate_with(&kind, &psi, k, &mut OutcomeSource::seeded(seed)).unwrap();
        let want = psi.applied(&u.pow(k as u64), &[0]).unwrap();
        prop_assert!(fidelity(&got.state, &want).unwrap() >= 1.0 - 1e-10);
    }
}

#[test]
fn logical_action_is_outcome_independent() {
    for n in 1..=4usize {
        let mut first: Option<UnitarySpec> = None;
        for bits in 0..(1u32 << n) {
            let o = WireBasisOutcome((0..n).map(|i| (bits >> i & 1) as u8).collect());
            let (logical, byproduct) = induced_gate(&o, &GateKind::Wire(n)).unwrap();
            let full = UnitarySpec::new(byproduct.matrix() * logical.matrix()).unwrap();
            assert!(full.arity() == 1);
            match &first {
                None => first = Some(logical),
                Some(f) => assert!(distance_mod_phase(f.matrix(), logical.matrix()) < 1e-12),
            }
        }
    }
}

#[test]
fn one_time_rule() {
    let mut reg = Register::new();
    let d = reg.alloc_state(&StateVector::plus()).unwrap();
    let mut src = OutcomeSource::seeded(4);
    let mut t = Transistor::build(GateKind::Wire(2), &mut reg).unwrap();
    t.inject_input_by_teleport(&mut reg, &d, &mut src).unwrap();
    t.activate(&mut reg, &mut src).unwrap();
    assert!(matches!(t.activate(&mut reg, &mut src), Err(QscError::TransistorConsumed)));
    let mut fresh = t.refresh(&mut reg).unwrap();
    let out = t.right_modes().to_vec();
    fresh.inject_input_by_teleport(&mut reg, &out, &mut src).unwrap();
    assert!(fresh.activate(&mut reg, &mut src).is_ok());
}
