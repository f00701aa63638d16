//! Channel–state duality and superchannels.

use super::state::StateVector;
use super::unitary::UnitarySpec;
use super::{cr, identity, kron, log2_exact, Matrix, C64};
use crate::error::{QscError, Result};

/// A CPTP map given by Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    input_arity: usize,
    output_arity: usize,
    kraus_ops: Vec<Matrix>,
}

impl ChannelSpec {
    pub fn new(kraus_ops: Vec<Matrix>) -> Result<Self> {
        let first = kraus_ops.first().ok_or_else(|| {
            QscError::InvalidParameter("channel needs at least one Kraus operator".into())
        })?;
        let (rows, cols) = first.shape();
        let output_arity = log2_exact(rows)
            .ok_or_else(|| QscError::DimensionMismatch(format!("Kraus rows {rows}")))?;
        let input_arity = log2_exact(cols)
            .ok_or_else(|| QscError::DimensionMismatch(format!("Kraus cols {cols}")))?;
        if kraus_ops.iter().any(|k| k.shape() != (rows, cols)) {
            return Err(QscError::DimensionMismatch(
                "Kraus operators differ in shape".into(),
            ));
        }
        let sum = kraus_ops
            .iter()
            .fold(Matrix::zeros(cols, cols), |acc, k| acc + k.adjoint() * k);
        let deviation = (sum - identity(cols))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > 1e-10 {
            return Err(QscError::NotTracePreserving { deviation });
        }
        Ok(ChannelSpec {
            input_arity,
            output_arity,
            kraus_ops,
        })
    }

    pub fn identity(arity: usize) -> Self {
        ChannelSpec {
            input_arity: arity,
            output_arity: arity,
            kraus_ops: vec![identity(1 << arity)],
        }
    }

    pub fn unitary(u: &UnitarySpec) -> Self {
        ChannelSpec {
            input_arity: u.arity(),
            output_arity: u.arity(),
            kraus_ops: vec![u.matrix().clone()],
        }
    }

    pub fn input_arity(&self) -> usize {
        self.input_arity
    }

    pub fn output_arity(&self) -> usize {
        self.output_arity
    }

    pub fn kraus_ops(&self) -> &[Matrix] {
        &self.kraus_ops
    }

    /// Random channel with `count` Kraus operators, taken as blocks of the
    /// first columns of a Haar unitary.
    pub fn random<R: rand::Rng + ?Sized>(arity: usize, count: usize, rng: &mut R) -> Result<Self> {
        let d = 1usize << arity;
        let extra = count.next_power_of_two().trailing_zeros() as usize;
        let big = UnitarySpec::random(arity + extra, rng);
        // Isometry V: d -> d * 2^extra; K_i = rows [i d, (i+1) d) of V.
        let v = big.matrix().columns(0, d);
        let ops: Vec<Matrix> = (0..count).map(|i| v.rows(i * d, d).into_owned()).collect();
        // Renormalize so Σ K†K = I when count is not a power of two.
        let sum = ops
            .iter()
            .fold(Matrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
        let inv_sqrt = hermitian_inverse_sqrt(&sum)?;
        let ops = ops.into_iter().map(|k| k * &inv_sqrt).collect();
        Self::new(ops)
    }
}

fn hermitian_inverse_sqrt(m: &Matrix) -> Result<Matrix> {
    let eig = m.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 1e-14) {
        return Err(QscError::InvalidParameter("singular Kraus sum".into()));
    }
    let d = Matrix::from_diagonal(&eig.eigenvalues.map(|l| cr(1.0 / l.sqrt())));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// Choi form of a gate or channel. Legs: inputs occupy the low qubits,
/// outputs the high qubits; input leg `i` is paired with output leg `i`.
#[derive(Debug, Clone, PartialEq)]
pub enum ChoiState {
    Pure {
        state: StateVector,
        input_arity: usize,
        output_arity: usize,
    },
    Mixed {
        rho: Matrix,
        input_arity: usize,
        output_arity: usize,
    },
}

impl ChoiState {
    pub fn input_arity(&self) -> usize {
        match self {
            ChoiState::Pure { input_arity, .. } | ChoiState::Mixed { input_arity, .. } => {
                *input_arity
            }
        }
    }

    pub fn output_arity(&self) -> usize {
        match self {
            ChoiState::Pure { output_arity, .. } | ChoiState::Mixed { output_arity, .. } => {
                *output_arity
            }
        }
    }

    pub fn density(&self) -> Matrix {
        match self {
            ChoiState::Pure { state, .. } => {
                let v = state.to_column();
                &v * v.adjoint()
            }
            ChoiState::Mixed { rho, .. } => rho.clone(),
        }
    }
}

/// `(I ⊗ U)` applied to `arity` ebits.
pub fn choi_of_unitary(u: &UnitarySpec) -> ChoiState {
    let d = u.dim();
    let norm = (d as f64).sqrt();
    let mut amps = vec![cr(0.0); d * d];
    for inp in 0..d {
        for out in 0..d {
            amps[inp + out * d] = u.matrix()[(out, inp)] / norm;
        }
    }
    ChoiState::Pure {
        state: StateVector::from_amplitudes(amps).expect("unitary columns are normalized"),
        input_arity: u.arity(),
        output_arity: u.arity(),
    }
}

/// `(1/d) Σ_K |K⟩⟩⟨⟨K|` with the same leg convention as [`choi_of_unitary`].
pub fn choi_of_channel(phi: &ChannelSpec) -> ChoiState {
    let din = 1usize << phi.input_arity;
    let dout = 1usize << phi.output_arity;
    let dim = din * dout;
    let mut rho = Matrix::zeros(dim, dim);
    for k in &phi.kraus_ops {
        let v = Matrix::from_fn(dim, 1, |idx, _| {
            k[(idx / din, idx % din)] / (din as f64).sqrt()
        });
        rho += &v * v.adjoint();
    }
    ChoiState::Mixed {
        rho,
        input_arity: phi.input_arity,
        output_arity: phi.output_arity,
    }
}

/// Recovers `U` (up to global phase) from its pure Choi state.
pub fn unitary_of_choi(choi: &ChoiState) -> Result<UnitarySpec> {
    let (state, k_in, k_out) = match choi {
        ChoiState::Pure {
            state,
            input_arity,
            output_arity,
        } => (state, *input_arity, *output_arity),
        ChoiState::Mixed { .. } => {
            return Err(QscError::InvalidChoi(
                "mixed Choi state has no unitary".into(),
            ))
        }
    };
    if k_in != k_out || state.qubit_count() != k_in + k_out || k_in == 0 {
        return Err(QscError::InvalidChoi(format!(
            "legs {k_in}+{k_out} on a {}-qubit state",
            state.qubit_count()
        )));
    }
    let d = 1usize << k_in;
    let inputs: Vec<usize> = (0..k_in).collect();
    let marginal = state.reduced_density(&inputs)?;
    let dev = (marginal - identity(d) * cr(1.0 / d as f64))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if dev > 1e-8 {
        return Err(QscError::InvalidChoi(format!(
            "input marginal deviates from maximally mixed by {dev:.3e}"
        )));
    }
    let norm = (d as f64).sqrt();
    let m = Matrix::from_fn(d, d, |out, inp| state.amplitudes()[inp + out * d] * norm);
    UnitarySpec::new(m).map_err(|e| QscError::InvalidChoi(e.to_string()))
}

/// `Σ K ρ K†` with each Kraus operator extended by identity on the high
/// qubits beyond its arity.
pub fn apply_channel(phi: &ChannelSpec, rho: &Matrix) -> Result<Matrix> {
    if phi.input_arity != phi.output_arity {
        return Err(QscError::DimensionMismatch(
            "embedded channel must preserve arity".into(),
        ));
    }
    let dim = rho.nrows();
    let k = 1usize << phi.input_arity;
    if dim % k != 0 || dim < k {
        return Err(QscError::DimensionMismatch(format!(
            "{}-qubit channel on a dimension-{dim} state",
            phi.input_arity
        )));
    }
    let pad = identity(dim / k);
    let mut out = Matrix::zeros(dim, dim);
    for op in &phi.kraus_ops {
        let full = kron(&pad, op);
        out += &full * rho * full.adjoint();
    }
    Ok(out)
}

/// Traces out all but the lowest `keep` qubits.
pub fn partial_trace_high(rho: &Matrix, keep: usize) -> Matrix {
    let d = 1usize << keep;
    let rest = rho.nrows() / d;
    Matrix::from_fn(d, d, |i, j| {
        (0..rest).map(|r| rho[(i + r * d, j + r * d)]).sum::<C64>()
    })
}

/// `tr_a V Φ U (ρ ⊗ |0⟩⟨0|_a)`. Data occupies the low qubits, the ancilla
/// the high ones; `Φ` acts on the lowest `Φ.arity` qubits.
pub fn apply_superchannel(
    pre: &UnitarySpec,
    post: &UnitarySpec,
    phi: &ChannelSpec,
    rho: &Matrix,
) -> Result<Matrix> {
    if pre.arity() != post.arity() {
        return Err(QscError::DimensionMismatch(format!(
            "pre arity {} vs post arity {}",
            pre.arity(),
            post.arity()
        )));
    }
    let data = log2_exact(rho.nrows())
        .filter(|_| rho.is_square())
        .ok_or_else(|| QscError::DimensionMismatch("density matrix must be 2^k square".into()))?;
    if data > pre.arity()
        || phi.input_arity() > pre.arity()
        || phi.input_arity() != phi.output_arity()
    {
        return Err(QscError::DimensionMismatch(format!(
            "data {data}, channel {}->{}, unitaries {}",
            phi.input_arity(),
            phi.output_arity(),
            pre.arity()
        )));
    }
    let anc_dim = 1usize << (pre.arity() - data);
    let mut anc = Matrix::zeros(anc_dim, anc_dim);
    anc[(0, 0)] = cr(1.0);
    let joint = kron(&anc, rho);
    let after_pre = pre.matrix() * joint * pre.matrix().adjoint();
    let after_phi = apply_channel(phi, &after_pre)?;
    let after_post = post.matrix() * after_phi * post.matrix().adjoint();
    Ok(partial_trace_high(&after_post, data))
}

/// `½ ‖a − b‖₁` for Hermitian `a`, `b`.
pub fn trace_distance(a: &Matrix, b: &Matrix) -> f64 {
    let diff = a - b;
    let herm = (&diff + diff.adjoint()) * cr(0.5);
    herm.symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .sum::<f64>()
        / 2.0
}
