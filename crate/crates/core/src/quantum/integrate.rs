//! Time evolution of `dρ/dt = L[ρ]`.
//!
//! Two backends: an adaptive Dormand–Prince 5(4) scheme with dense output at
//! the requested times, and exact propagation by dense matrix exponentials
//! (Liouville dimension up to [`MAX_EXPM_DIM`]).

use std::collections::HashMap;

use num_complex::Complex64;

use super::expm::{expm, MAX_EXPM_DIM};
use super::liouvillian::{unvec, vec_of, CVector, Superoperator};
use super::operators::{CMatrix, Operator};
use super::state::{expectation, DensityMatrix, HERMITICITY_TOL, TRACE_TOL};
use crate::error::{Error, Result};
use crate::numeric::is_strictly_increasing;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    RungeKutta,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Local error tolerance (absolute and relative) per step.
    pub tol: f64,
    pub backend: Backend,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            tol: 1e-10,
            backend: Backend::RungeKutta,
            max_steps: 5_000_000,
        }
    }
}

impl EvolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        EvolveOptions {
            tol,
            ..Default::default()
        }
    }

    pub fn exponential() -> Self {
        EvolveOptions {
            backend: Backend::Exponential,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1e-3) {
            return Err(Error::invalid(
                "tol",
                format!("must lie in (0, 1e-3], got {}", self.tol),
            ));
        }
        Ok(())
    }
}

/// States at each requested time; `states[k]` belongs to `times[k]`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    /// `tr(op·ρ(t))` at every output time.
    pub fn expectations(&self, op: &Operator) -> Result<Vec<Complex64>> {
        self.states.iter().map(|rho| expectation(op, rho)).collect()
    }
}

/// Evolve `rho0` (the state at `times[0]`) with the default adaptive scheme.
pub fn evolve(
    l: &Superoperator,
    rho0: &DensityMatrix,
    times: &[f64],
    tol: f64,
) -> Result<Trajectory> {
    evolve_with(l, rho0, times, &EvolveOptions::with_tol(tol))
}

pub fn evolve_with(
    l: &Superoperator,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch {
            expected: l.dim(),
            found: rho0.dim(),
        });
    }
    let report = rho0.invariants();
    if !report.holds() {
        return Err(Error::InvariantViolation(format!(
            "initial state: {report:?}"
        )));
    }
    let vecs = propagate(l, &vec_of(rho0.matrix()), times, opts)?;
    let tr0 = rho0.trace();
    let mut states = Vec::with_capacity(vecs.len());
    for (t, v) in times.iter().zip(vecs) {
        let rho = DensityMatrix::new_unchecked(unvec(&v, l.dim()));
        let drift = (rho.trace() - tr0).norm();
        let herm = Operator(rho.matrix().clone()).hermiticity_error();
        if drift > 10.0 * TRACE_TOL || herm > 10.0 * HERMITICITY_TOL {
            return Err(Error::InvariantViolation(format!(
                "at t = {t:e}: trace drift {drift:e}, hermiticity error {herm:e}"
            )));
        }
        states.push(rho);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
    })
}

/// Propagate an arbitrary vectorized operator through `times`, where `v0`
/// is the value at `times[0]`. No density-matrix invariants are assumed.
pub fn propagate(
    l: &Superoperator,
    v0: &CVector,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<CVector>> {
    opts.validate()?;
    if v0.len() != l.dim2() {
        return Err(Error::DimensionMismatch {
            expected: l.dim2(),
            found: v0.len(),
        });
    }
    if times.is_empty() {
        return Err(Error::invalid("times", "empty time grid"));
    }
    if !is_strictly_increasing(times) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid(
            "times",
            "grid must be finite and strictly increasing",
        ));
    }
    match opts.backend {
        Backend::RungeKutta => dopri5(l, v0, times, opts),
        Backend::Exponential => exponential(l, v0, times),
    }
}

fn exponential(l: &Superoperator, v0: &CVector, times: &[f64]) -> Result<Vec<CVector>> {
    if l.dim2() > MAX_EXPM_DIM {
        return Err(Error::invalid(
            "backend",
            format!(
                "exponential propagation limited to Liouville dimension {MAX_EXPM_DIM}, got {}",
                l.dim2()
            ),
        ));
    }
    let mut cache: HashMap<u64, CMatrix> = HashMap::new();
    let mut out = Vec::with_capacity(times.len());
    let mut v = v0.clone();
    out.push(v.clone());
    for w in times.windows(2) {
        let dt = w[1] - w[0];
        let u = cache
            .entry(dt.to_bits())
            .or_insert_with(|| expm(&l.matrix().scale(dt)));
        v = &*u * &v;
        out.push(v.clone());
    }
    Ok(out)
}

// Dormand–Prince 5(4) tableau. The generator is autonomous, so the nodes
// c_i never enter.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Dense output (Hairer, Nørsett & Wanner).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy(acc: &mut CVector, a: f64, x: &CVector) {
    acc.axpy(Complex64::new(a, 0.0), x, Complex64::new(1.0, 0.0));
}

fn lincomb(base: &CVector, h: f64, terms: &[(f64, &CVector)]) -> CVector {
    let mut out = base.clone();
    for (c, k) in terms {
        if *c != 0.0 {
            axpy(&mut out, h * c, k);
        }
    }
    out
}

fn error_norm(err: &CVector, y0: &CVector, y1: &CVector, tol: f64) -> f64 {
    let n = err.len() as f64;
    let sum: f64 = err
        .iter()
        .zip(y0.iter().zip(y1.iter()))
        .map(|(e, (a, b))| {
            let sc = tol + tol * a.norm().max(b.norm());
            (e.norm() / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

fn dopri5(
    gen: &Superoperator,
    v0: &CVector,
    times: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<CVector>> {
    let mut out = Vec::with_capacity(times.len());
    out.push(v0.clone());
    if times.len() == 1 {
        return Ok(out);
    }
    let l = gen.matrix();
    let norm_l = gen.inf_norm();
    let t_end = *times.last().unwrap();
    if norm_l == 0.0 {
        out.extend(std::iter::repeat_n(v0.clone(), times.len() - 1));
        return Ok(out);
    }
    let time_scale = 1.0 / norm_l;
    let mut t = times[0];
    let mut y = v0.clone();
    let mut k1 = l * &y;
    let mut h = (0.5 * opts.tol.powf(0.2) * time_scale).min(t_end - t);
    let mut next_out = 1;
    let mut steps = 0usize;
    let mut rejected_last = false;

    while next_out < times.len() {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::TooManySteps {
                max_steps: opts.max_steps,
                t_end,
            });
        }
        if h < 8.0 * f64::EPSILON * t.abs().max(time_scale) {
            return Err(Error::StepUnderflow { t, step: h });
        }
        let h_step = h.min(t_end - t);

        let k2 = l * lincomb(&y, h_step, &[(A21, &k1)]);
        let k3 = l * lincomb(&y, h_step, &[(A31, &k1), (A32, &k2)]);
        let k4 = l * lincomb(&y, h_step, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k5 = l * lincomb(
            &y,
            h_step,
            &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
        );
        let k6 = l * lincomb(
            &y,
            h_step,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let y_new = lincomb(
            &y,
            h_step,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = l * &y_new;
        let err = lincomb(
            &CVector::zeros(y.len()),
            h_step,
            &[
                (E1, &k1),
                (E3, &k3),
                (E4, &k4),
                (E5, &k5),
                (E6, &k6),
                (E7, &k7),
            ],
        );
        let err_norm = error_norm(&err, &y, &y_new, opts.tol);

        if err_norm <= 1.0 {
            let t_new = if h_step == t_end - t {
                t_end
            } else {
                t + h_step
            };
            // Dense output for every requested time inside (t, t_new].
            if next_out < times.len() && times[next_out] <= t_new {
                let r2 = &y_new - &y;
                let r3 = k1.scale(h_step) - &r2;
                let r4 = &r2 - k7.scale(h_step) - &r3;
                let r5 = lincomb(
                    &CVector::zeros(y.len()),
                    h_step,
                    &[
                        (D1, &k1),
                        (D3, &k3),
                        (D4, &k4),
                        (D5, &k5),
                        (D6, &k6),
                        (D7, &k7),
                    ],
                );
                while next_out < times.len() && times[next_out] <= t_new {
                    let tq = times[next_out];
                    let v = if tq == t_new {
                        y_new.clone()
                    } else {
                        let th = (tq - t) / h_step;
                        let th1 = 1.0 - th;
                        let c = |x: f64| Complex64::new(x, 0.0);
                        let inner = &r4 + r5.scale(th1);
                        let inner = &r3 + inner * c(th);
                        let inner = &r2 + inner * c(th1);
                        &y + inner * c(th)
                    };
                    out.push(v);
                    next_out += 1;
                }
            }
            t = t_new;
            y = y_new;
            k1 = k7;
            let fac = if err_norm == 0.0 {
                10.0
            } else {
                (0.9 * err_norm.powf(-0.2)).clamp(0.2, 10.0)
            };
            h = if rejected_last {
                h_step * fac.min(1.0)
            } else {
                h_step * fac
            };
            rejected_last = false;
        } else {
            let fac = (0.9 * err_norm.powf(-0.2)).clamp(0.2, 1.0);
            h = h_step * fac;
            rejected_last = true;
        }
    }
    Ok(out)
}
