//! Lindblad generator on column-stacked density matrices.
//!
//! `vec(X)[i + j·d] = X[i, j]`, so `vec(A·X·B) = (Bᵀ ⊗ A)·vec(X)`.
//! This is also nalgebra's native column-major layout.

use nalgebra::DVector;
use num_complex::Complex64;

use super::operators::{build_hamiltonian, CMatrix, Ladder, Operator};
use super::params::{HilbertSpec, SystemParams};
use crate::error::{Error, Result};

pub type CVector = DVector<Complex64>;

/// A linear map on vectorized `dim × dim` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: CMatrix,
}

impl Superoperator {
    pub fn from_matrix(dim: usize, matrix: CMatrix) -> Result<Self> {
        let d2 = dim * dim;
        if matrix.nrows() != d2 || matrix.ncols() != d2 {
            return Err(Error::DimensionMismatch {
                expected: d2,
                found: matrix.nrows(),
            });
        }
        Ok(Superoperator { dim, matrix })
    }

    pub fn zeros(dim: usize) -> Self {
        let d2 = dim * dim;
        Superoperator {
            dim,
            matrix: CMatrix::zeros(d2, d2),
        }
    }

    /// Hilbert-space dimension the generator acts on.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Liouville-space dimension (`dim²`).
    pub fn dim2(&self) -> usize {
        self.dim * self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn apply_vec(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }

    /// `L[X]` for a `dim × dim` matrix.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.nrows(),
            });
        }
        Ok(unvec(&self.apply_vec(&vec_of(x)), self.dim))
    }

    /// Unitary part `−i[H, ·]`.
    pub fn commutator(h: &Operator) -> Self {
        let dim = h.dim();
        let id = CMatrix::identity(dim, dim);
        let m = (id.kronecker(h.matrix()) - h.matrix().transpose().kronecker(&id))
            * Complex64::new(0.0, -1.0);
        Superoperator { dim, matrix: m }
    }

    /// `rate·(c·X·c† − {c†c, X}/2)`.
    pub fn dissipator(c: &Operator, rate: f64) -> Self {
        let dim = c.dim();
        let id = CMatrix::identity(dim, dim);
        let cm = c.matrix();
        let cdc = cm.adjoint() * cm;
        let jump = cm.conjugate().kronecker(cm);
        let anti = id.kronecker(&cdc) + cdc.transpose().kronecker(&id);
        let m = (jump - anti.scale(0.5)).scale(rate);
        Superoperator { dim, matrix: m }
    }

    pub fn add(&self, rhs: &Superoperator) -> Self {
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix + &rhs.matrix,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Superoperator {
            dim: self.dim,
            matrix: self.matrix.scale(s),
        }
    }

    /// Maximum absolute row sum; bounds the spectral radius.
    pub(crate) fn inf_norm(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

pub fn vec_of(x: &CMatrix) -> CVector {
    CVector::from_column_slice(x.as_slice())
}

pub fn unvec(v: &CVector, dim: usize) -> CMatrix {
    CMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// Generator of
///
/// dρ/dt = −i[H, ρ] + κ D[a]ρ + γ* D[σ₊σ₋]ρ + γ D[σ₋]ρ
///
/// with `D[c]ρ = cρc† − {c†c, ρ}/2` and κ the total cavity loss.
pub fn build_liouvillian(params: &SystemParams, spec: HilbertSpec) -> Result<Superoperator> {
    params.validate()?;
    let h = build_hamiltonian(params, spec)?;
    let ops = Ladder::new(spec);
    let mut l = Superoperator::commutator(&h);
    for (c, rate) in [
        (ops.a.clone(), params.kappa()),
        (ops.excited_projector(), params.gamma_star),
        (ops.sigma_minus.clone(), params.gamma),
    ] {
        if rate > 0.0 {
            l = l.add(&Superoperator::dissipator(&c, rate));
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::ghz_to_rad;

    fn random_hermitian(dim: usize, seed: u64) -> CMatrix {
        // Small LCG; avoids pulling an RNG into unit tests.
        let mut s = seed;
        let mut next = || {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = CMatrix::from_fn(dim, dim, |_, _| Complex64::new(next(), next()));
        &a + a.adjoint()
    }

    #[test]
    fn zero_rates_zero_generator() {
        let p = SystemParams::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0).unwrap();
        let l = build_liouvillian(&p, HilbertSpec::new(2).unwrap()).unwrap();
        assert!(l.matrix().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn vectorization_matches_matrix_products() {
        let spec = HilbertSpec::new(1).unwrap();
        let p = SystemParams::new(0.3, 0.5, 0.1, 0.2, 0.4, 0.7, 1.0).unwrap();
        let l = build_liouvillian(&p, spec).unwrap();
        let ops = Ladder::new(spec);
        let h = build_hamiltonian(&p, spec).unwrap();
        let x = random_hermitian(spec.dim(), 7);
        let i = Complex64::new(0.0, 1.0);
        let d = |c: &CMatrix, x: &CMatrix| {
            let cdc = c.adjoint() * c;
            c * x * c.adjoint() - (&cdc * x + x * &cdc).scale(0.5)
        };
        let direct = (h.matrix() * &x - &x * h.matrix()) * (-i)
            + d(ops.a.matrix(), &x).scale(p.kappa())
            + d(ops.excited_projector().matrix(), &x).scale(p.gamma_star)
            + d(ops.sigma_minus.matrix(), &x).scale(p.gamma);
        let via = l.apply(&x).unwrap();
        assert!((direct - via).norm() < 1e-13);
    }

    #[test]
    fn generator_is_traceless() {
        let spec = HilbertSpec::new(3).unwrap();
        let p = SystemParams::new(0.7, 1.0, 0.2, 0.01, 0.1, -0.3, 1.0).unwrap();
        let l = build_liouvillian(&p, spec).unwrap();
        for seed in 0..10 {
            let x = random_hermitian(spec.dim(), seed);
            let tr = l.apply(&x).unwrap().trace().norm();
            assert!(tr <= 1e-9 * x.norm(), "{tr}");
        }
    }

    #[test]
    fn generator_is_traceless_in_si_units() {
        // Round-off scales with the generator norm once rates are in rad/s.
        let spec = HilbertSpec::new(3).unwrap();
        let p = SystemParams::new(
            ghz_to_rad(7.0),
            ghz_to_rad(10.0),
            ghz_to_rad(2.0),
            ghz_to_rad(0.1),
            ghz_to_rad(1.0),
            ghz_to_rad(-3.0),
            1e15,
        )
        .unwrap();
        let l = build_liouvillian(&p, spec).unwrap();
        for seed in 0..10 {
            let x = random_hermitian(spec.dim(), seed);
            let tr = l.apply(&x).unwrap().trace().norm();
            assert!(tr <= 1e-9 * x.norm() * l.inf_norm(), "{tr}");
        }
    }
}
