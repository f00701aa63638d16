use std::f64::consts::PI;

use qsc_core::algos::{
    clock_angles, clock_state, controlled_u_reference, controlled_u_via_transistor, eigenstate, gradient_step,
    history_state, lcu, qaa, qmux, qmux_reference, qmux_with, qpe, uniform_clock_deviation, HistorySpec, QaaSpec,
    QmuxOptions, QmuxSpec,
};
use qsc_core::qcore::{
    apply_superchannel, c, cr, fidelity, gates, identity, kron, trace_distance, ChannelSpec, Matrix, OutcomeSource,
    RngPolicy, StateVector, UnitarySpec, C64,
};
use qsc_core::GateKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

#[test]
fn controlled_u_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0);
    for arity in 1..=2 {
        for seed in 0..5 {
            let u = UnitarySpec::random(arity, &mut rng);
            let lam = eigenstate(&u).unwrap();
            let input = StateVector::random(arity + 1, &mut rng).unwrap();
            let got = controlled_u_via_transistor(&GateKind::ChoiStored(u.clone()), &lam, &input, &RngPolicy::Seeded(seed))
                .unwrap();
            let want = controlled_u_reference(&u, &input).unwrap();
            assert!(fidelity(&got, &want).unwrap() >= 1.0 - TOL);
        }
    }
}

#[test]
fn qmux_is_block_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x30);
    for (branches, arity) in [(2, 1), (4, 1), (2, 2), (4, 2)] {
        let us: Vec<UnitarySpec> = (0..branches).map(|_| UnitarySpec::random(arity, &mut rng)).collect();
        let spec = QmuxSpec::new(us.clone(), random_coeffs(&mut rng, branches)).unwrap();
        let psi = StateVector::random(arity, &mut rng).unwrap();
        let got = qmux(&spec, &psi, &RngPolicy::Seeded(branches as u64)).unwrap();
        assert!(fidelity(&got, &qmux_reference(&spec, &psi).unwrap()).unwrap() >= 1.0 - TOL);

        let back = qmux_with(&spec, &psi, QmuxOptions { backward: true }, &mut OutcomeSource::seeded(9)).unwrap();
        let transposed = QmuxSpec::new(us.iter().map(|u| u.transpose()).collect(), spec.coefficients().to_vec()).unwrap();
        assert!(fidelity(&back, &qmux_reference(&transposed, &psi).unwrap()).unwrap() >= 1.0 - TOL);
    }
}

/// `|0⟩_flag ⊗ V|ψ⟩` rotated so the flag reads 0 with probability `p`,
/// then entangled with the data.
fn qaa_instance(p: f64, rng: &mut ChaCha8Rng) -> (UnitarySpec, StateVector) {
    let theta = 2.0 * p.sqrt().acos();
    let v = UnitarySpec::random(1, rng);
    let w = UnitarySpec::random(1, rng);
    // tensor(a, b) puts b on the low qubit: the flag. W is controlled by
    // the flag, so its control moves from the top qubit to qubit 0.
    let cw = gates::swap().compose(&w.controlled()).unwrap().compose(&gates::swap()).unwrap();
    let a = cw.compose(&v.tensor(&gates::ry(theta))).unwrap();
    (a, StateVector::random(1, rng).unwrap())
}

#[test]
fn amplitude_amplification_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xAA);
    for p in [0.1, 0.25, 0.5] {
        let (a, psi) = qaa_instance(p, &mut rng);
        let spec = QaaSpec::new(a.clone(), &psi).unwrap();
        assert!((spec.p() - p).abs() < 1e-12);
        // independent walk operator and dense iteration
        let init = StateVector::basis(1, 0).unwrap().tensor(&psi).unwrap().to_column();
        let s0 = identity(4) - (&init * init.adjoint()) * cr(2.0);
        let sg = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![cr(-1.0), cr(1.0), cr(-1.0), cr(1.0)]));
        let q = (a.matrix() * s0 * a.matrix().adjoint() * sg) * cr(-1.0);
        let mut dense = a.matrix() * &init;
        for n in 0..=5usize {
            let (_, got) = qaa(&spec, n, &RngPolicy::Seeded(n as u64)).unwrap();
            let closed = ((2 * n + 1) as f64 * p.sqrt().asin()).sin().powi(2);
            let oracle = dense[0].norm_sqr() + dense[2].norm_sqr();
            assert!((got - closed).abs() < 1e-9, "p={p} n={n}: {got} vs {closed}");
            assert!((oracle - closed).abs() < 1e-9);
            dense = &q * dense;
        }
    }
    let (a, psi) = qaa_instance(0.25, &mut rng);
    let (_, one) = qaa(&QaaSpec::new(a, &psi).unwrap(), 1, &RngPolicy::Seeded(0)).unwrap();
    assert!((one - 1.0).abs() < 1e-9);
}

#[test]
fn phase_estimation_reads_dyadic_phases() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9E);
    for t in 1..=4usize {
        for j in 0..(1usize << t) {
            let phase = 2.0 * PI * j as f64 / (1u64 << t) as f64;
            let v = UnitarySpec::random(1, &mut rng);
            let other = rng.gen_range(0.0..2.0 * PI);
            let diag = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                C64::from_polar(1.0, phase),
                C64::from_polar(1.0, other),
            ]));
            let u = UnitarySpec::new(v.matrix() * diag * v.matrix().adjoint()).unwrap();
            let psi = StateVector::from_amplitudes(v.matrix().column(0).iter().copied().collect()).unwrap();
            let r = qpe(&u, &psi, t, &RngPolicy::Seeded(j as u64)).unwrap();
            assert_eq!(r.outcome, j, "t={t} j={j}");
            assert_eq!(r.bits, format!("{j:0width$b}", width = t));
            assert!(r.probability >= 1.0 - 1e-9);
        }
    }
}

#[test]
fn lcu_matches_dense_combination() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1C);
    for i in 0..24u64 {
        let arity = rng.gen_range(1..=2);
        let terms: usize = rng.gen_range(1..=4);
        let us: Vec<UnitarySpec> = (0..terms).map(|_| UnitarySpec::random(arity, &mut rng)).collect();
        let cs: Vec<C64> = (0..terms).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let psi = StateVector::random(arity, &mut rng).unwrap();
        let targets: Vec<usize> = (0..arity).collect();
        let mut sum = vec![cr(0.0); 1 << arity];
        for (ci, u) in cs.iter().zip(&us) {
            for (acc, a) in sum.iter_mut().zip(psi.applied(u, &targets).unwrap().amplitudes()) {
                *acc += ci * a;
            }
        }
        let weight: f64 = sum.iter().map(|z| z.norm_sqr()).sum();
        let c_norm_sq: f64 = cs.iter().map(|z| z.norm_sqr()).sum();
        let d = terms.next_power_of_two() as f64;
        let want = StateVector::normalized(sum).unwrap();
        let r = lcu(&cs, &us, &psi, None, &RngPolicy::Seeded(i)).unwrap();
        assert!(fidelity(&r.state, &want).unwrap() >= 1.0 - TOL, "instance {i}");
        assert!((r.success_probability - weight / (d * c_norm_sq)).abs() < TOL, "instance {i}");
    }
}

#[test]
fn gradient_norm_matches_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6D);
    let paulis = [gates::x(), gates::y(), gates::z()];
    for i in 0..10u64 {
        let terms: Vec<(f64, UnitarySpec)> =
            (0..3).map(|_| (rng.gen_range(-1.0..1.0), paulis[rng.gen_range(0..3)].clone())).collect();
        let psi = StateVector::random(1, &mut rng).unwrap();
        let mut h = Matrix::zeros(2, 2);
        for (ci, u) in &terms {
            h += u.matrix() * cr(*ci);
        }
        let hpsi = h * psi.to_column();
        let norm = hpsi.norm();
        if norm < 1e-6 {
            continue;
        }
        let g = gradient_step(&terms, &psi, &RngPolicy::Seeded(i)).unwrap();
        assert!((g.norm - norm).abs() < 1e-9);
        let dir = StateVector::normalized(hpsi.iter().copied().collect()).unwrap();
        assert!(fidelity(&g.direction, &dir).unwrap() >= 1.0 - TOL);
    }
}

#[test]
fn history_state_branches() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x41);
    for depth in 0..=5usize {
        for m in 1..=2usize {
            let gates_: Vec<UnitarySpec> = (0..depth).map(|_| UnitarySpec::random(m, &mut rng)).collect();
            let initial = StateVector::random(m, &mut rng).unwrap();
            let h = history_state(&HistorySpec {
                gates: gates_.clone(),
                initial: initial.clone(),
            })
            .unwrap();
            let dm = 1usize << m;
            let data: Vec<usize> = (0..m).collect();
            let mut prefix = initial.clone();
            let mut total = 0.0;
            for t in 0..=depth {
                if t > 0 {
                    prefix = prefix.applied(&gates_[t - 1], &data).unwrap();
                }
                let wall = (1usize << depth) - (1usize << t);
                let slice: Vec<C64> = h.amplitudes()[wall * dm..(wall + 1) * dm].to_vec();
                let w: f64 = slice.iter().map(|z| z.norm_sqr()).sum();
                assert!((w - 1.0 / (depth + 1) as f64).abs() < TOL, "T={depth} t={t}");
                total += w;
                let branch = StateVector::normalized(slice).unwrap();
                assert!(fidelity(&branch, &prefix).unwrap() >= 1.0 - TOL);
            }
            assert!((total - 1.0).abs() < TOL);
        }
    }
}

#[test]
fn published_clock_angles_deviation_is_reported() {
    for depth in 1..=5 {
        let c = clock_state(depth, &clock_angles(depth).unwrap()).unwrap();
        println!("clock depth {depth}: published-angle deviation {:.6e}", uniform_clock_deviation(depth, &c));
    }
}

/// Kraus-branch oracle: sum `V (I ⊗ K) U (|0⟩⟨0| ⊗ ρ)` over
/// branches and trace out the ancilla by hand.
fn superchannel_oracle(pre: &UnitarySpec, post: &UnitarySpec, phi: &ChannelSpec, rho: &Matrix, data: usize) -> Matrix {
    let total = pre.arity();
    let dd = 1usize << data;
    let da = 1usize << (total - data);
    let mut anc = Matrix::zeros(da, da);
    anc[(0, 0)] = cr(1.0);
    let start = kron(&anc, rho);
    let mut out = Matrix::zeros(dd, dd);
    for k in phi.kraus_ops() {
        let pad = identity((1usize << total) / k.nrows());
        let op = post.matrix() * kron(&pad, k) * pre.matrix();
        let full = &op * &start * op.adjoint();
        for i in 0..dd {
            for j in 0..dd {
                for a in 0..da {
                    out[(i, j)] += full[(i + a * dd, j + a * dd)];
                }
            }
        }
    }
    out
}

#[test]
fn superchannel_matches_composed_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5C);
    for i in 0..24 {
        let data = 1;
        let total = 2;
        let pre = UnitarySpec::random(total, &mut rng);
        let post = UnitarySpec::random(total, &mut rng);
        let phi_arity = rng.gen_range(1..=2);
        let kraus = rng.gen_range(1..=2);
        let phi = ChannelSpec::random(phi_arity, kraus, &mut rng).unwrap();
        let a = StateVector::random(data, &mut rng).unwrap().to_column();
        let b = StateVector::random(data, &mut rng).unwrap().to_column();
        let w: f64 = rng.gen_range(0.0..1.0);
        let rho = (&a * a.adjoint()) * cr(w) + (&b * b.adjoint()) * cr(1.0 - w);
        let got = apply_superchannel(&pre, &post, &phi, &rho).unwrap();
        let want = superchannel_oracle(&pre, &post, &phi, &rho, data);
        assert!(trace_distance(&got, &want) <= TOL, "instance {i}");
    }
}
