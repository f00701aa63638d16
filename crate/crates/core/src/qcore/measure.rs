use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::FORCE_MIN_PROB;
use crate::error::{QscError, Result};

/// Single-qubit measurement basis.
///
/// `Rotated(θ)` projects onto `(|0⟩ ± e^{iθ}|1⟩)/√2`; outcome 0 is the `+`
/// vector. `Rotated(0)` coincides with `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Rotated(f64),
}

impl Basis {
    pub fn label(&self) -> String {
        match self {
            Basis::Z => "Z".into(),
            Basis::X => "X".into(),
            Basis::Rotated(t) => format!("R({t})"),
        }
    }
}

/// How measurement outcomes are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RngPolicy {
    Seeded(u64),
    /// Outcome bits consumed in measurement order. A Bell measurement consumes
    /// two bits `(a, b)`.
    Forced(Vec<u8>),
}

impl RngPolicy {
    pub fn source(&self) -> OutcomeSource {
        OutcomeSource::new(self)
    }
}

/// Runtime state of an [`RngPolicy`].
#[derive(Debug, Clone)]
pub enum OutcomeSource {
    Seeded(ChaCha8Rng),
    Forced(VecDeque<u8>),
}

impl OutcomeSource {
    pub fn new(policy: &RngPolicy) -> Self {
        match policy {
            RngPolicy::Seeded(seed) => OutcomeSource::Seeded(ChaCha8Rng::seed_from_u64(*seed)),
            RngPolicy::Forced(bits) => OutcomeSource::Forced(bits.iter().copied().collect()),
        }
    }

    pub fn seeded(seed: u64) -> Self {
        OutcomeSource::Seeded(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn forced(bits: &[u8]) -> Self {
        OutcomeSource::Forced(bits.iter().copied().collect())
    }

    /// Remaining forced bits, if any.
    pub fn remaining(&self) -> Option<usize> {
        match self {
            OutcomeSource::Forced(q) => Some(q.len()),
            OutcomeSource::Seeded(_) => None,
        }
    }

    /// Picks an outcome index among `probs`, whose length is `2^bits`. Forced
    /// mode reads `bits` entries, least significant first.
    pub fn choose(&mut self, probs: &[f64], bits: usize, what: &str) -> Result<usize> {
        debug_assert_eq!(probs.len(), 1 << bits);
        match self {
            OutcomeSource::Seeded(rng) => {
                let total: f64 = probs.iter().sum();
                let r: f64 = rng.gen::<f64>() * total;
                let mut acc = 0.0;
                let mut last_nonzero = 0;
                for (i, p) in probs.iter().enumerate() {
                    if *p > 0.0 {
                        last_nonzero = i;
                    }
                    acc += p;
                    if r < acc && *p > 0.0 {
                        return Ok(i);
                    }
                }
                Ok(last_nonzero)
            }
            OutcomeSource::Forced(queue) => {
                let mut idx = 0usize;
                let mut outcome = Vec::with_capacity(bits);
                for b in 0..bits {
                    let bit = queue
                        .pop_front()
                        .ok_or_else(|| QscError::OutcomesExhausted(what.to_string()))?;
                    outcome.push(bit & 1);
                    idx |= ((bit & 1) as usize) << b;
                }
                if probs[idx] < FORCE_MIN_PROB {
                    return Err(QscError::ImpossibleOutcome {
                        what: what.to_string(),
                        outcome,
                        probability: probs[idx],
                    });
                }
                Ok(idx)
            }
        }
    }
}

/// Outcome of one destructive measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    /// Register positions (for a bare state) or qubit ids (for a register).
    pub qubits: Vec<u64>,
    pub basis: String,
    pub outcome: Vec<u8>,
    /// Born probability of this outcome in the pre-measurement state.
    pub probability: f64,
}
