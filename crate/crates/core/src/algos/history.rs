use crate::error::{QscError, Result};
use crate::qcore::{cr, gates, Matrix, StateVector, UnitarySpec, C64};

const MAX_DEPTH: usize = 5;

/// `T` gates applied in turn to `initial`; the clock uses the domain-wall
/// code `|t⟩ = |0⟩^t |1⟩^(T−t)`, clock qubit `ℓ` holding symbol `ℓ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HistorySpec {
    pub gates: Vec<UnitarySpec>,
    pub initial: StateVector,
}

impl HistorySpec {
    pub fn depth(&self) -> usize {
        self.gates.len()
    }

    fn validate(&self) -> Result<()> {
        check_depth(self.depth())?;
        let m = self.initial.qubit_count();
        if let Some(u) = self.gates.iter().find(|u| u.arity() != m) {
            return Err(QscError::ArityMismatch {
                arity: u.arity(),
                targets: m,
            });
        }
        Ok(())
    }
}

fn check_depth(t: usize) -> Result<()> {
    if t > MAX_DEPTH {
        return Err(QscError::InvalidParameter(format!("depth {t} above {MAX_DEPTH}")));
    }
    Ok(())
}

/// Basis index of the domain wall `|t⟩` on `T` clock qubits.
fn wall(t: usize, depth: usize) -> usize {
    (1 << depth) - (1 << t)
}

/// The published cascade angles `2·acos(1/√(T−ℓ+2))`, `ℓ = 0..T`.
pub fn clock_angles(depth: usize) -> Result<Vec<f64>> {
    check_depth(depth)?;
    Ok((0..depth)
        .map(|l| 2.0 * (1.0 / ((depth - l + 2) as f64).sqrt()).acos())
        .collect())
}

/// Angles that make the cascade uniform: qubit `ℓ` must leave `|0⟩` with
/// probability `1/(T−ℓ+1)` given that the wall has not appeared yet.
pub fn derived_clock_angles(depth: usize) -> Result<Vec<f64>> {
    check_depth(depth)?;
    Ok((0..depth)
        .map(|l| {
            let rest = (depth - l) as f64;
            2.0 * (rest / (rest + 1.0)).sqrt().acos()
        })
        .collect())
}

/// `diag(a, b)` with the selecting qubit on top.
fn mux2(a: &UnitarySpec, b: &UnitarySpec) -> UnitarySpec {
    let mut m = Matrix::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(a.matrix());
    m.view_mut((2, 2), (2, 2)).copy_from(b.matrix());
    UnitarySpec::new(m).expect("block diagonal of unitaries")
}

/// Rotation cascade on `T` qubits from `|0…0⟩`: `R_y(θ_0)` on qubit 0, then
/// on each qubit `ℓ` either `R_y(θ_ℓ)` when qubit `ℓ−1` is still `|0⟩` or
/// `X` once the wall has passed.
pub fn clock_state(depth: usize, angles: &[f64]) -> Result<StateVector> {
    check_depth(depth)?;
    if angles.len() != depth {
        return Err(QscError::DimensionMismatch(format!("{} angles for depth {depth}", angles.len())));
    }
    let mut s = StateVector::zeros(depth)?;
    for (l, &theta) in angles.iter().enumerate() {
        if l == 0 {
            s.apply_gate(&gates::ry(theta), &[0])?;
        } else {
            s.apply_gate(&mux2(&gates::ry(theta), &gates::x()), &[l, l - 1])?;
        }
    }
    Ok(s)
}

/// Largest `|a − a*|` over clock basis states, `a*` being `1/√(T+1)` on the
/// walls and zero elsewhere.
pub fn uniform_clock_deviation(depth: usize, clock: &StateVector) -> f64 {
    let target = 1.0 / ((depth + 1) as f64).sqrt();
    clock
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let want = if (0..=depth).any(|t| wall(t, depth) == i) { target } else { 0.0 };
            (a - cr(want)).norm()
        })
        .fold(0.0, f64::max)
}

/// `(1/√(T+1)) Σ_t |t⟩ U_t⋯U_1|ψ_0⟩`, data on the low qubits and the clock
/// above. The clock comes from the cascade with derived angles, and `U_s`
/// fires on the branches whose clock qubit `s−1` reads `0`.
pub fn history_state(spec: &HistorySpec) -> Result<StateVector> {
    spec.validate()?;
    let depth = spec.depth();
    let m = spec.initial.qubit_count();
    let clock = clock_state(depth, &derived_clock_angles(depth)?)?;
    let mut s = spec.initial.tensor(&clock)?;
    let data: Vec<usize> = (0..m).collect();
    for (step, u) in spec.gates.iter().enumerate() {
        let c = m + step;
        let mut targets = data.clone();
        targets.push(c);
        s.apply_gate(&gates::x(), &[c])?;
        s.apply_gate(&u.controlled(), &targets)?;
        s.apply_gate(&gates::x(), &[c])?;
    }
    Ok(s)
}

/// The history state written out branch by branch.
pub fn history_reference(spec: &HistorySpec) -> Result<StateVector> {
    spec.validate()?;
    let depth = spec.depth();
    let m = spec.initial.qubit_count();
    let dm = 1usize << m;
    let norm = 1.0 / ((depth + 1) as f64).sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); dm << depth];
    let mut psi = spec.initial.clone();
    let data: Vec<usize> = (0..m).collect();
    for t in 0..=depth {
        if t > 0 {
            psi.apply_gate(&spec.gates[t - 1], &data)?;
        }
        let base = wall(t, depth) * dm;
        for (d, a) in psi.amplitudes().iter().enumerate() {
            amps[base + d] = a * norm;
        }
    }
    StateVector::from_amplitudes(amps)
}
