//! Exact propagators for small generators.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operators::CMatrix;

/// Largest Liouville-space dimension for which dense exponentials are used.
pub const MAX_EXPM_DIM: usize = 100;

/// `exp(m)` by scaling and squaring with a Padé approximant.
pub fn expm(m: &CMatrix) -> CMatrix {
    m.clone().exp()
}

/// `exp(L·h)` together with `∫₀^h exp(L·s) ds`, both from one exponential
/// of the block matrix `[[L·h, h·I], [0, 0]]`.
#[derive(Debug, Clone)]
pub struct StepPropagator {
    pub step: f64,
    pub exp: CMatrix,
    pub integral: CMatrix,
}

impl StepPropagator {
    pub fn new(l: &CMatrix, h: f64) -> Self {
        let n = l.nrows();
        let mut block = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
        block.view_mut((0, 0), (n, n)).copy_from(&l.scale(h));
        for i in 0..n {
            block[(i, n + i)] = Complex64::new(h, 0.0);
        }
        let e = expm(&block);
        StepPropagator {
            step: h,
            exp: e.view((0, 0), (n, n)).into_owned(),
            integral: e.view((0, n), (n, n)).into_owned(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_decay_integral() {
        let l = CMatrix::from_element(1, 1, Complex64::new(-2.0, 0.0));
        let p = StepPropagator::new(&l, 0.7);
        assert!((p.exp[(0, 0)].re - (-1.4f64).exp()).abs() < 1e-14);
        let exact = (1.0 - (-1.4f64).exp()) / 2.0;
        assert!((p.integral[(0, 0)].re - exact).abs() < 1e-14);
    }

    #[test]
    fn rotation_integral() {
        // d/dt x = i·w·x: integral = (e^{iwh} − 1)/(iw)
        let w = 3.0;
        let h = 0.4;
        let l = CMatrix::from_element(1, 1, Complex64::new(0.0, w));
        let p = StepPropagator::new(&l, h);
        let i = Complex64::new(0.0, 1.0);
        let exact = ((i * w * h).exp() - 1.0) / (i * w);
        assert!((p.integral[(0, 0)] - exact).norm() < 1e-14);
    }
}
