use nalgebra::DMatrix;
use num_complex::Complex64;

use super::params::{HilbertSpec, SystemParams};
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A linear operator on the truncated emitter ⊗ Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator(pub CMatrix);

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Operator(CMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Operator(CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Operator(self.0.adjoint())
    }

    /// Operator product `self · rhs`.
    pub fn mul(&self, rhs: &Operator) -> Self {
        Operator(&self.0 * &rhs.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Operator(self.0.scale(s))
    }

    pub fn add(&self, rhs: &Operator) -> Self {
        Operator(&self.0 + &rhs.0)
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.0;
        let n = m.nrows();
        let mut worst = 0.0_f64;
        for j in 0..n {
            for i in 0..n {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

/// The standard operators of the emitter-cavity system.
#[derive(Debug, Clone)]
pub struct Ladder {
    pub spec: HilbertSpec,
    /// Cavity annihilation `a`.
    pub a: Operator,
    /// Emitter lowering `σ₋ = |g⟩⟨e|`.
    pub sigma_minus: Operator,
}

impl Ladder {
    pub fn new(spec: HilbertSpec) -> Self {
        let dim = spec.dim();
        let mut a = CMatrix::zeros(dim, dim);
        let mut sm = CMatrix::zeros(dim, dim);
        for excited in [false, true] {
            for n in 1..=spec.n_max() {
                a[(spec.index(excited, n - 1), spec.index(excited, n))] =
                    Complex64::new((n as f64).sqrt(), 0.0);
            }
        }
        for n in 0..=spec.n_max() {
            sm[(spec.index(false, n), spec.index(true, n))] = ONE;
        }
        Ladder {
            spec,
            a: Operator(a),
            sigma_minus: Operator(sm),
        }
    }

    pub fn a_dag(&self) -> Operator {
        self.a.adjoint()
    }

    pub fn sigma_plus(&self) -> Operator {
        self.sigma_minus.adjoint()
    }

    /// Photon number `a†a`.
    pub fn photon_number(&self) -> Operator {
        self.a_dag().mul(&self.a)
    }

    /// Excited-state projector `σ₊σ₋`.
    pub fn excited_projector(&self) -> Operator {
        self.sigma_plus().mul(&self.sigma_minus)
    }

    /// Total excitation `a†a + σ₊σ₋`.
    pub fn excitation(&self) -> Operator {
        self.photon_number().add(&self.excited_projector())
    }
}

/// Jaynes–Cummings Hamiltonian divided by ħ (rad/s), in the frame rotating
/// at the emitter frequency:
///
/// H/ħ = g(σ₋a† + σ₊a) + δ_ca·a†a
pub fn build_hamiltonian(params: &SystemParams, spec: HilbertSpec) -> Result<Operator> {
    if spec.n_max() < 1 {
        return Err(Error::invalid("n_max", "must be >= 1"));
    }
    let ops = Ladder::new(spec);
    let exchange = ops
        .sigma_minus
        .mul(&ops.a_dag())
        .add(&ops.sigma_plus().mul(&ops.a));
    Ok(exchange
        .scale(params.g)
        .add(&ops.photon_number().scale(params.delta_ca)))
}
