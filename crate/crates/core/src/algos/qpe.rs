use std::f64::consts::PI;

use serde::Serialize;

use super::control::{eigenphase, eigenstate, select_apply};
use super::qft::qft;
use crate::error::{QscError, Result};
use crate::qcore::{Basis, Register, RngPolicy, StateVector, UnitarySpec, C64};
use crate::transistor::{GateKind, Transistor};

/// Phase-estimation readout. `outcome` is the integer read from the
/// counting register, `bits` the same value written most significant bit
/// first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QpeRecord {
    pub t: usize,
    pub outcome: usize,
    pub bits: String,
    /// Probability of `outcome`.
    pub probability: f64,
    /// `outcome / 2^t`, as a fraction of a full turn.
    pub estimate: f64,
    /// Exact distribution over all `2^t` readouts.
    pub distribution: Vec<f64>,
}

fn check(u: &UnitarySpec, psi: &StateVector, t: usize) -> Result<C64> {
    if !(1..=4).contains(&t) {
        return Err(QscError::InvalidParameter(format!("{t} counting qubits outside 1..=4")));
    }
    eigenphase(u, psi)
}

/// Phase estimation with one stored `U^(2^(r-1))` per counting site `r`,
/// each applied under control of its site, then the inverse QFT and a
/// Z readout of the counting register.
pub fn qpe(u: &UnitarySpec, psi: &StateVector, t: usize, policy: &RngPolicy) -> Result<QpeRecord> {
    check(u, psi, t)?;
    let mut src = policy.source();
    let mut reg = Register::new();
    let mut data = reg.alloc_state(psi)?;
    let counting = reg.alloc_state(&StateVector::product(&vec![StateVector::plus(); t])?)?;
    for (r, &c) in counting.iter().enumerate() {
        let power = u.pow(1u64 << r);
        let lam = eigenstate(&power)?;
        let tr = Transistor::build(GateKind::ChoiStored(power), &mut reg)?;
        data = select_apply(&mut reg, tr, &lam, &[c], &data, &|v| v == 1, &mut src)?;
    }
    reg.apply(&qft(t)?.adjoint(), &counting)?;
    let distribution = reg.marginal(&counting)?;
    let mut outcome = 0usize;
    for (r, &c) in counting.iter().enumerate() {
        let rec = reg.measure(c, Basis::Z, &mut src)?;
        outcome |= (rec.outcome[0] as usize) << r;
    }
    Ok(QpeRecord {
        t,
        outcome,
        bits: format!("{outcome:0t$b}"),
        probability: distribution[outcome],
        estimate: outcome as f64 / (1u64 << t) as f64,
        distribution,
    })
}

/// Dense readout distribution from the eigenphase alone.
pub fn qpe_distribution(u: &UnitarySpec, psi: &StateVector, t: usize) -> Result<Vec<f64>> {
    let phase = check(u, psi, t)?;
    let frac = phase.arg() / (2.0 * PI);
    let n = 1usize << t;
    let amps: Vec<C64> = (0..n)
        .map(|x| C64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * PI * frac * x as f64))
        .collect();
    let s = StateVector::from_amplitudes(amps)?.applied(&qft(t)?.adjoint(), &(0..t).collect::<Vec<_>>())?;
    s.marginal(&(0..t).collect::<Vec<_>>())
}
