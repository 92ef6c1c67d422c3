use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::operators::{CMatrix, Operator};
use super::params::HilbertSpec;
use crate::error::{Error, Result};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Deviations of a state from the density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub trace_error: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.trace_error <= TRACE_TOL
            && self.hermiticity_error <= HERMITICITY_TOL
            && self.min_eigenvalue >= -POSITIVITY_TOL
    }
}

/// A normalized, Hermitian, positive semidefinite state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Validates and wraps a matrix.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let rho = DensityMatrix(m);
        let report = rho.invariants();
        if !report.holds() {
            return Err(Error::InvariantViolation(format!("{report:?}")));
        }
        Ok(rho)
    }

    /// Wraps without checking; used for propagated states that are checked
    /// separately.
    pub(crate) fn new_unchecked(m: CMatrix) -> Self {
        DensityMatrix(m)
    }

    /// Projector onto a basis state `|s, n⟩`.
    pub fn basis(spec: HilbertSpec, excited: bool, n: usize) -> Self {
        let dim = spec.dim();
        let k = spec.index(excited, n);
        let mut m = CMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        DensityMatrix(m)
    }

    /// `|e, 0⟩⟨e, 0|`: excited emitter, empty cavity.
    pub fn excited_emitter(spec: HilbertSpec) -> Self {
        Self::basis(spec, true, 0)
    }

    /// Normalized projector onto `psi`.
    pub fn pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::invalid("psi", "zero vector"));
        }
        let psi = psi / Complex64::new(norm, 0.0);
        Ok(DensityMatrix(&psi * psi.adjoint()))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn invariants(&self) -> InvariantReport {
        let herm = Operator(self.0.clone()).hermiticity_error();
        // Eigenvalues of the Hermitian part; the anti-Hermitian residue is
        // reported separately.
        let sym: DMatrix<Complex64> = (&self.0 + self.0.adjoint()).scale(0.5);
        let min_eig = sym
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        InvariantReport {
            trace_error: (self.trace() - Complex64::new(1.0, 0.0)).norm(),
            hermiticity_error: herm,
            min_eigenvalue: min_eig,
        }
    }
}

/// `tr(op · ρ)`.
pub fn expectation(op: &Operator, rho: &DensityMatrix) -> Result<Complex64> {
    trace_product(op.matrix(), rho.matrix())
}

/// `tr(A · B)` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
    if a.nrows() != b.nrows() || a.ncols() != b.nrows() || b.ncols() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: b.nrows(),
            found: a.nrows(),
        });
    }
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    Ok(acc)
}
