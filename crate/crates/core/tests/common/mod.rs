//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls into the library's generator or propagators: operators
//! are assembled from explicit Kronecker products and matrix exponentials
//! use a scaled Taylor series.
#![allow(dead_code)]

use std::f64::consts::PI;

use cqed_core::SynthSpec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type M = DMatrix<Complex64>;
pub type V = DVector<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn kron(a: &M, b: &M) -> M {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    M::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn eye(n: usize) -> M {
    M::identity(n, n)
}

/// Rates in rad/s (or any consistent unit).
#[derive(Clone, Copy, Debug)]
pub struct Rates {
    pub g: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub gamma_star: f64,
    pub delta: f64,
}

/// Emitter ⊗ Fock(n_max) operators, emitter index 0 = ground.
pub struct Ops {
    pub a: M,
    pub sm: M,
    pub dim: usize,
}

impl Ops {
    pub fn new(n_max: usize) -> Self {
        let nf = n_max + 1;
        let mut a = M::zeros(nf, nf);
        for n in 1..nf {
            a[(n - 1, n)] = c((n as f64).sqrt());
        }
        let mut sm = M::zeros(2, 2);
        sm[(0, 1)] = c(1.0);
        Ops {
            a: kron(&eye(2), &a),
            sm: kron(&sm, &eye(nf)),
            dim: 2 * nf,
        }
    }

    pub fn num(&self) -> M {
        self.a.adjoint() * &self.a
    }

    pub fn pe(&self) -> M {
        self.sm.adjoint() * &self.sm
    }

    /// |e, 0⟩⟨e, 0|.
    pub fn excited(&self) -> M {
        let nf = self.dim / 2;
        let mut rho = M::zeros(self.dim, self.dim);
        rho[(nf, nf)] = c(1.0);
        rho
    }
}

/// Row-major vectorisation: vec(A X B) = (A ⊗ Bᵀ) vec(X).
pub fn vec_rm(x: &M) -> V {
    let n = x.nrows();
    V::from_fn(n * n, |k, _| x[(k / n, k % n)])
}

pub fn unvec_rm(v: &V, n: usize) -> M {
    M::from_fn(n, n, |i, j| v[i * n + j])
}

pub fn liouvillian(ops: &Ops, r: &Rates) -> M {
    let i = Complex64::new(0.0, 1.0);
    let id = eye(ops.dim);
    let h =
        (&ops.sm.adjoint() * &ops.a + &ops.a.adjoint() * &ops.sm) * c(r.g) + ops.num() * c(r.delta);
    let mut l = (kron(&h, &id) - kron(&id, &h.transpose())) * (-i);
    for (op, rate) in [
        (&ops.a, r.kappa),
        (&ops.pe(), r.gamma_star),
        (&ops.sm, r.gamma),
    ] {
        if rate == 0.0 {
            continue;
        }
        let cdc = op.adjoint() * op;
        let d = kron(op, &op.conjugate())
            - kron(&cdc, &id) * c(0.5)
            - kron(&id, &cdc.transpose()) * c(0.5);
        l += d * c(rate);
    }
    l
}

/// e^{M} by scaling and squaring around a 30-term Taylor series.
pub fn expm_taylor(m: &M) -> M {
    let norm = m.iter().map(|z| z.norm()).fold(0.0, f64::max) * m.nrows() as f64;
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = m * c(scale);
    let n = m.nrows();
    let mut term = eye(n);
    let mut sum = eye(n);
    for k in 1..=30 {
        term = &term * &a * c(1.0 / k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn trace(m: &M) -> Complex64 {
    (0..m.nrows()).map(|k| m[(k, k)]).sum()
}

pub fn expect(op: &M, rho: &M) -> Complex64 {
    trace(&(op * rho))
}

/// ⟨a†(t+τ) a(t)⟩ from explicit exponentials.
pub fn correlator(ops: &Ops, l: &M, rho0: &M, t: f64, tau: f64) -> Complex64 {
    let n = ops.dim;
    let rho_t = unvec_rm(&(expm_taylor(&(l * c(t))) * vec_rm(rho0)), n);
    let x = &ops.a * rho_t;
    let x_tau = unvec_rm(&(expm_taylor(&(l * c(tau))) * vec_rm(&x)), n);
    expect(&ops.a.adjoint(), &x_tau)
}

/// Brute-force I on a uniform (t, τ) grid with step `h` up to `horizon`,
/// trapezoid in both variables.
pub fn indistinguishability_uniform(r: &Rates, n_max: usize, h: f64, horizon: f64) -> f64 {
    let ops = Ops::new(n_max);
    let l = liouvillian(&ops, r);
    let p = expm_taylor(&(&l * c(h)));
    let steps = (horizon / h).round() as usize;
    let mut states = Vec::with_capacity(steps + 1);
    let mut v = vec_rm(&ops.excited());
    for _ in 0..=steps {
        states.push(v.clone());
        v = &p * v;
    }
    let n = ops.dim;
    let num_op = ops.num();
    let ad = ops.a.adjoint();
    let pop: Vec<f64> = states
        .iter()
        .map(|s| expect(&num_op, &unvec_rm(s, n)).re)
        .collect();
    let w = |k: usize, len: usize| if k == 0 || k + 1 == len { 0.5 } else { 1.0 };
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, s) in states.iter().enumerate() {
        let len = steps + 1 - j;
        if len < 2 {
            continue;
        }
        let mut x = vec_rm(&(&ops.a * unvec_rm(s, n)));
        let mut row_num = 0.0;
        let mut row_den = 0.0;
        for k in 0..len {
            let corr = expect(&ad, &unvec_rm(&x, n));
            row_num += w(k, len) * corr.norm_sqr();
            row_den += w(k, len) * pop[j + k] * pop[j];
            x = &p * x;
        }
        num += w(j, steps + 1) * row_num;
        den += w(j, steps + 1) * row_den;
    }
    num / den
}

/// Left Riemann-free trapezoid of ⟨op⟩(t) over a uniform grid.
pub fn integrate_expectation(
    r: &Rates,
    n_max: usize,
    op: impl Fn(&Ops) -> M,
    h: f64,
    horizon: f64,
) -> f64 {
    let ops = Ops::new(n_max);
    let l = liouvillian(&ops, r);
    let p = expm_taylor(&(&l * c(h)));
    let steps = (horizon / h).round() as usize;
    let o = op(&ops);
    let mut v = vec_rm(&ops.excited());
    let mut total = 0.0;
    for k in 0..=steps {
        let val = expect(&o, &unvec_rm(&v, ops.dim)).re;
        total += if k == 0 || k == steps { 0.5 * val } else { val };
        v = &p * v;
    }
    total * h
}

/// Midpoint sum of the closed-form synthetic mode on an `r`-times finer grid.
pub fn refined_volume(spec: &SynthSpec, r: usize) -> f64 {
    let g = spec.geometry();
    let h = g.spacing.map(|s| s / r as f64);
    let eps_d = spec.eps_dielectric;
    let (mut sum, mut peak) = (0.0f64, 0.0f64);
    for k in 0..g.dims[2] * r {
        for j in 0..g.dims[1] * r {
            for i in 0..g.dims[0] * r {
                let p = [i, j, k];
                let x = [0, 1, 2]
                    .map(|a| g.origin[a] - 0.5 * g.spacing[a] + (p[a] as f64 + 0.5) * h[a]);
                let in_beam =
                    x[1].abs() <= 0.5 * spec.beam_width && x[2].abs() <= 0.5 * spec.beam_thickness;
                let in_hole = spec.holes.is_some_and(|b| {
                    let a = spec.lattice_period;
                    let xr = x[0] - a * (x[0] / a).round();
                    let ay = x[1].abs();
                    ay > b.bridge_half_width
                        && ay <= b.extent
                        && xr.abs() < b.taper * (ay - b.bridge_half_width)
                });
                let env: f64 = (0..3)
                    .filter(|&a| spec.sigma[a].is_finite())
                    .map(|a| x[a] * x[a] / (2.0 * spec.sigma[a] * spec.sigma[a]))
                    .sum();
                let f = (PI * x[0] / spec.lattice_period).cos() * (-env).exp();
                let u = if in_beam && !in_hole {
                    eps_d * f * f
                } else {
                    f * f / (eps_d * eps_d)
                };
                sum += u;
                peak = peak.max(u);
            }
        }
    }
    sum * h[0] * h[1] * h[2] / peak
}

/// Hazen percentile by direct sort and interpolation.
pub fn sort_percentile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = (p / 100.0 * v.len() as f64 - 0.5).clamp(0.0, (v.len() - 1) as f64);
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Weighted midpoint-rank percentile by linear scan.
pub fn scan_percentile(samples: &[(f64, f64)], p: f64) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = v.iter().map(|s| s.1).sum();
    let mut mids = Vec::new();
    let mut acc = 0.0;
    for s in &v {
        mids.push((acc + s.1 / 2.0) / total);
        acc += s.1;
    }
    let q = p / 100.0;
    if q <= mids[0] {
        return v[0].0;
    }
    for k in 1..v.len() {
        if q <= mids[k] {
            let t = (q - mids[k - 1]) / (mids[k] - mids[k - 1]);
            return v[k - 1].0 + t * (v[k].0 - v[k - 1].0);
        }
    }
    v[v.len() - 1].0
}
