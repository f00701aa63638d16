use rand_distr::StandardNormal;
use super::{c, cr, identity, log2_exact, Matrix, C64};
use crate::error::{QscError, Result};

/// A validated unitary on `arity` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitarySpec {
    arity: usize,
    matrix: Matrix,
}

const UNITARY_TOL: f64 = 1e-10;

impl UnitarySpec {
    pub fn new(matrix: Matrix) -> Result<Self> {
        let (r, cols) = matrix.shape();
        if r != cols {
            return Err(QscError::DimensionMismatch(format!(
                "unitary must be square, got {r}x{cols}"
            )));
        }
        let arity = log2_exact(r).filter(|&a| a >= 1).ok_or_else(|| {
            QscError::DimensionMismatch(format!("dimension {r} is not 2^k, k>=1"))
        })?;
        let deviation = (matrix.adjoint() * &matrix - identity(r))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation > UNITARY_TOL {
            return Err(QscError::NotUnitary { deviation });
        }
        Ok(UnitarySpec { arity, matrix })
    }

    pub(crate) fn new_unchecked(matrix: Matrix) -> Self {
        let arity = log2_exact(matrix.nrows()).expect("power-of-two dimension");
        UnitarySpec { arity, matrix }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn identity(arity: usize) -> Self {
        Self::new_unchecked(identity(1 << arity))
    }

    pub fn adjoint(&self) -> Self {
        Self::new_unchecked(self.matrix.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self::new_unchecked(self.matrix.transpose())
    }

    pub fn conjugate(&self) -> Self {
        Self::new_unchecked(self.matrix.map(|z| z.conj()))
    }

    /// `self · other` (apply `other` first).
    pub fn compose(&self, other: &UnitarySpec) -> Result<Self> {
        if self.arity != other.arity {
            return Err(QscError::ArityMismatch {
                arity: self.arity,
                targets: other.arity,
            });
        }
        Ok(Self::new_unchecked(&self.matrix * &other.matrix))
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut acc = identity(self.dim());
        let mut base = self.matrix.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Self::new_unchecked(acc)
    }

    /// `self ⊗ other`; `other` occupies the low qubits.
    pub fn tensor(&self, other: &UnitarySpec) -> Self {
        Self::new_unchecked(super::kron(&self.matrix, &other.matrix))
    }

    /// The block matrix `diag(I, U)` with the control as the most significant
    /// qubit.
    pub fn controlled(&self) -> Self {
        let d = self.dim();
        let mut m = identity(2 * d);
        m.view_mut((d, d), (d, d)).copy_from(&self.matrix);
        Self::new_unchecked(m)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.transpose())
            .iter()
            .all(|z| z.norm() <= tol)
    }

    /// Haar-random unitary via QR of a complex Gaussian matrix.
    pub fn random<R: rand::Rng + ?Sized>(arity: usize, rng: &mut R) -> Self {
        let d = 1usize << arity;
        let z = Matrix::from_fn(d, d, |_, _| gaussian(rng));
        let qr = z.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..d {
            let rjj = r[(j, j)];
            let ph = if rjj.norm() > 0.0 {
                rjj / rjj.norm()
            } else {
                cr(1.0)
            };
            for i in 0..d {
                q[(i, j)] *= ph;
            }
        }
        Self::new_unchecked(q)
    }
}

/// Standard complex normal sample.
pub(crate) fn gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Standard gate matrices in the qubit-0-is-LSB convention.
pub mod gates {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn m2(a: C64, b: C64, cc: C64, d: C64) -> UnitarySpec {
        UnitarySpec::new_unchecked(Matrix::from_row_slice(2, 2, &[a, b, cc, d]))
    }

    pub fn i() -> UnitarySpec {
        UnitarySpec::identity(1)
    }
    pub fn x() -> UnitarySpec {
        m2(cr(0.0), cr(1.0), cr(1.0), cr(0.0))
    }
    pub fn y() -> UnitarySpec {
        m2(cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0))
    }
    pub fn z() -> UnitarySpec {
        m2(cr(1.0), cr(0.0), cr(0.0), cr(-1.0))
    }
    pub fn h() -> UnitarySpec {
        let s = cr(FRAC_1_SQRT_2);
        m2(s, s, s, -s)
    }
    pub fn s() -> UnitarySpec {
        phase(PI / 2.0)
    }
    pub fn sdg() -> UnitarySpec {
        phase(-PI / 2.0)
    }
    pub fn t() -> UnitarySpec {
        phase(PI / 4.0)
    }
    pub fn tdg() -> UnitarySpec {
        phase(-PI / 4.0)
    }
    /// `diag(1, e^{iθ})`.
    pub fn phase(theta: f64) -> UnitarySpec {
        m2(cr(1.0), cr(0.0), cr(0.0), C64::from_polar(1.0, theta))
    }
    /// `R_k = diag(1, e^{2πi/2^k})`.
    pub fn rk(k: u32) -> UnitarySpec {
        phase(2.0 * PI / f64::powi(2.0, k as i32))
    }
    pub fn ry(theta: f64) -> UnitarySpec {
        let (s, co) = (theta / 2.0).sin_cos();
        m2(cr(co), cr(-s), cr(s), cr(co))
    }
    pub fn rz(theta: f64) -> UnitarySpec {
        m2(
            C64::from_polar(1.0, -theta / 2.0),
            cr(0.0),
            cr(0.0),
            C64::from_polar(1.0, theta / 2.0),
        )
    }
    /// Controlled-Z; symmetric in its two targets.
    pub fn cz() -> UnitarySpec {
        let mut m = identity(4);
        m[(3, 3)] = cr(-1.0);
        UnitarySpec::new_unchecked(m)
    }
    /// CNOT with `targets[0]` as control and `targets[1]` as target.
    pub fn cnot() -> UnitarySpec {
        let mut m = Matrix::zeros(4, 4);
        // index = q0 + 2 q1; control q0 flips q1.
        for idx in 0..4usize {
            let out = if idx & 1 == 1 { idx ^ 2 } else { idx };
            m[(out, idx)] = cr(1.0);
        }
        UnitarySpec::new_unchecked(m)
    }
    pub fn swap() -> UnitarySpec {
        let mut m = Matrix::zeros(4, 4);
        for idx in 0..4usize {
            let out = ((idx & 1) << 1) | (idx >> 1);
            m[(out, idx)] = cr(1.0);
        }
        UnitarySpec::new_unchecked(m)
    }

    /// Looks a gate up by its lowercase name.
    pub fn by_name(name: &str) -> Option<UnitarySpec> {
        Some(match name {
            "i" | "id" => i(),
            "x" => x(),
            "y" => y(),
            "z" => z(),
            "h" => h(),
            "s" => s(),
            "sdg" => sdg(),
            "t" => t(),
            "tdg" => tdg(),
            "cz" => cz(),
            "cnot" | "cx" => cnot(),
            "swap" => swap(),
            _ => return None,
        })
    }

    pub const NAMES: &[&str] = &[
        "i", "x", "y", "z", "h", "s", "sdg", "t", "tdg", "cz", "cnot", "swap",
    ];
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::distance_mod_phase;
    use rand::SeedableRng;

    #[test]
    fn rejects_non_unitary() {
        let m = Matrix::from_element(2, 2, cr(1.0));
        assert!(matches!(
            UnitarySpec::new(m),
            Err(QscError::NotUnitary { .. })
        ));
        let m = Matrix::identity(3, 3);
        assert!(matches!(
            UnitarySpec::new(m),
            Err(QscError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn random_is_unitary() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for arity in 1..=3 {
            let u = UnitarySpec::random(arity, &mut rng);
            assert!(UnitarySpec::new(u.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn sdg_is_z_times_s() {
        let zs = gates::z().compose(&gates::s()).unwrap();
        assert!(distance_mod_phase(zs.matrix(), gates::sdg().matrix()) < 1e-12);
    }

    #[test]
    fn gate_set_symmetry() {
        for g in [gates::h(), gates::s(), gates::t(), gates::cz()] {
            assert!(g.is_symmetric(1e-15));
        }
        assert!(!gates::y().is_symmetric(1e-15));
    }

    #[test]
    fn cnot_flips_high_when_low_set() {
        let m = gates::cnot();
        // |q0=1, q1=0> = index 1 -> index 3
        assert_eq!(m.matrix()[(3, 1)], cr(1.0));
        assert_eq!(m.matrix()[(2, 2)], cr(1.0));
    }
}
