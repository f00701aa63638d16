use super::control::{qmux_with, QmuxOptions, QmuxSpec};
use crate::error::{QscError, Result};
use crate::qcore::{cr, Matrix, RngPolicy, StateVector, UnitarySpec, C64};

const COLUMN_TOL: f64 = 1e-10;

/// Unitary whose first column is `col / ‖col‖`; the rest comes from
/// Gram–Schmidt over the standard basis in index order.
pub fn complete_first_column(col: &[C64]) -> Result<UnitarySpec> {
    let d = col.len();
    let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !d.is_power_of_two() || norm < 1e-12 {
        return Err(QscError::InvalidParameter("first column needs a nonzero power-of-two length".into()));
    }
    let mut cols: Vec<Vec<C64>> = vec![col.iter().map(|z| z / norm).collect()];
    for j in 0..d {
        if cols.len() == d {
            break;
        }
        let mut v = vec![cr(0.0); d];
        v[j] = cr(1.0);
        for u in &cols {
            let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            cols.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    UnitarySpec::new(Matrix::from_fn(d, d, |i, j| cols[j][i]))
}

#[derive(Debug, Clone)]
pub struct LcuResult {
    /// Normalized post-selected data state.
    pub state: StateVector,
    pub success_probability: f64,
    /// The measurement-basis gate that was used; none for a single term.
    pub w: Option<UnitarySpec>,
}

/// Post-selected `Σ_i w_{i0} U_i |ψ⟩`.
///
/// The control register is prepared uniform, the branches run through the
/// transistor multiplexer, and `W` is applied as the measurement basis so
/// the all-zero control outcome carries the combination. Term lists whose
/// length is not a power of two are padded with identity terms of weight
/// zero. Without an explicit `w`, one is completed from `c / ‖c‖`.
pub fn lcu(
    coefficients: &[C64],
    unitaries: &[UnitarySpec],
    psi: &StateVector,
    w: Option<&UnitarySpec>,
    policy: &RngPolicy,
) -> Result<LcuResult> {
    if coefficients.len() != unitaries.len() || unitaries.is_empty() {
        return Err(QscError::DimensionMismatch(format!(
            "{} coefficients for {} unitaries",
            coefficients.len(),
            unitaries.len()
        )));
    }
    let d = unitaries.len().next_power_of_two();
    let mut coeffs = coefficients.to_vec();
    coeffs.resize(d, cr(0.0));
    let mut us = unitaries.to_vec();
    us.resize(d, UnitarySpec::identity(unitaries[0].arity()));

    let w = match w {
        _ if d == 1 => None,
        Some(w) => {
            if w.dim() != d {
                return Err(QscError::DimensionMismatch(format!("W of dimension {} for {d} terms", w.dim())));
            }
            let norm = coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let overlap: C64 = (0..d).map(|i| w.matrix()[(i, 0)].conj() * coeffs[i]).sum();
            if norm < 1e-12 || (overlap.norm() / norm - 1.0).abs() > COLUMN_TOL {
                return Err(QscError::InvalidParameter(
                    "first column of W is not proportional to the coefficients".into(),
                ));
            }
            Some(w.clone())
        }
        None => Some(complete_first_column(&coeffs)?),
    };

    let uniform = cr(1.0 / (d as f64).sqrt());
    let spec = QmuxSpec::new(us, vec![uniform; d])?;
    let m = spec.data_qubits();
    let k = spec.control_qubits();
    let mut full = qmux_with(&spec, psi, QmuxOptions::default(), &mut policy.source())?;
    let control: Vec<usize> = (m..m + k).collect();
    if let Some(w) = &w {
        full.apply_gate(&w.transpose(), &control)?;
    }
    let branch = full.project_out(&control, &StateVector::zeros(k)?.into_amplitudes())?;
    let success_probability: f64 = branch.iter().map(|z| z.norm_sqr()).sum();
    if success_probability < 1e-14 {
        return Err(QscError::ZeroNormBranch);
    }
    Ok(LcuResult {
        state: StateVector::normalized(branch)?,
        success_probability,
        w,
    })
}

/// Normalized direction of `H|ψ⟩` and its norm, for `H = Σ c_i U_i`.
#[derive(Debug, Clone)]
pub struct GradientStep {
    pub direction: StateVector,
    pub norm: f64,
    pub success_probability: f64,
}

pub fn gradient_step(terms: &[(f64, UnitarySpec)], psi: &StateVector, policy: &RngPolicy) -> Result<GradientStep> {
    let coeffs: Vec<C64> = terms.iter().map(|(c, _)| cr(*c)).collect();
    let us: Vec<UnitarySpec> = terms.iter().map(|(_, u)| u.clone()).collect();
    let r = lcu(&coeffs, &us, psi, None, policy)?;
    let d = terms.len().next_power_of_two() as f64;
    let c_norm = terms.iter().map(|(c, _)| c * c).sum::<f64>().sqrt();
    Ok(GradientStep {
        direction: r.state,
        norm: (r.success_probability * d).sqrt() * c_norm,
        success_probability: r.success_probability,
    })
}

/// `⟨ψ|H|ψ⟩` from two norms: `‖(H + s)ψ‖² − ‖Hψ‖² − s² = 2s⟨H⟩`.
///
/// Only norms enter, so the global phase the byproduct corrections leave on
/// each direction does not matter.
pub fn energy_from_norms(terms: &[(f64, UnitarySpec)], psi: &StateVector, shift: f64, policy: &RngPolicy) -> Result<f64> {
    if shift == 0.0 {
        return Err(QscError::InvalidParameter("shift must be nonzero".into()));
    }
    let plain = gradient_step(terms, psi, policy)?.norm;
    let mut shifted = terms.to_vec();
    shifted.push((shift, UnitarySpec::identity(psi.qubit_count())));
    let moved = gradient_step(&shifted, psi, policy)?.norm;
    Ok((moved * moved - plain * plain - shift * shift) / (2.0 * shift))
}
