//! Spontaneous emission from `|e, 0⟩` into the cavity.
//!
//! Time is made dimensionless with the largest rate of the problem, so the
//! figures of merit are invariant under a joint rescaling of all rates.
//! Populations are advanced with exact step propagators `e^{L·h}`; the
//! photon and emitter integrals over each step come from the same block
//! exponential and carry no quadrature error. The two-time integrals of the
//! indistinguishability use the trapezoidal rule on a grid whose step follows
//! the local time scale `‖L·v‖ / ‖L²·v‖` of the propagated states, so steps
//! coarsen geometrically once the fast transients have decayed.

use std::collections::HashMap;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quantum::expm::{StepPropagator, MAX_EXPM_DIM};
use crate::quantum::liouvillian::{build_liouvillian, unvec, vec_of, CVector};
use crate::quantum::operators::{CMatrix, Ladder, Operator};
use crate::quantum::{DensityMatrix, HilbertSpec, SystemParams};

use super::cooperativity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FomNumerics {
    /// Integration stops once `tr[(a†a + σ₊σ₋)ρ]` falls below this.
    pub residual_threshold: f64,
    /// Residual excitation tolerated at the horizon cap before failing.
    pub convergence_limit: f64,
    /// Horizon cap in units of `1 / min(κ, γ)`.
    pub horizon_factor: f64,
    /// Quadrature step as a fraction of the local time scale.
    pub step_factor: f64,
}

impl Default for FomNumerics {
    fn default() -> Self {
        FomNumerics {
            residual_threshold: 1e-6,
            convergence_limit: 1e-4,
            horizon_factor: 50.0,
            step_factor: 0.05,
        }
    }
}

impl FomNumerics {
    /// Same settings with the quadrature step divided by `factor`.
    pub fn refined(&self, factor: f64) -> Self {
        FomNumerics {
            step_factor: self.step_factor / factor,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.residual_threshold > 0.0 && self.residual_threshold < 1.0) {
            return Err(Error::invalid("residual_threshold", "must lie in (0, 1)"));
        }
        if !(self.convergence_limit >= self.residual_threshold) {
            return Err(Error::invalid(
                "convergence_limit",
                "must be >= residual_threshold",
            ));
        }
        if !(self.horizon_factor > 0.0) {
            return Err(Error::invalid("horizon_factor", "must be > 0"));
        }
        if !(self.step_factor > 0.0 && self.step_factor <= 0.5) {
            return Err(Error::invalid("step_factor", "must lie in (0, 0.5]"));
        }
        Ok(())
    }
}

/// Where the initial excitation went.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmissionBudget {
    /// `∫⟨a†a⟩dt` in seconds.
    pub photon_integral: f64,
    /// `∫⟨σ₊σ₋⟩dt` in seconds.
    pub emitter_integral: f64,
    /// Excitation left at the end of the integration.
    pub residual: f64,
    /// Integration horizon in seconds.
    pub horizon: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FomResult {
    /// Cavity efficiency with the total cavity loss.
    pub beta: f64,
    /// Fraction into the waveguide, `(κ_wg/κ)·β`.
    pub beta_wg: f64,
    pub indist: f64,
    /// `None` when κ or γ vanish.
    pub cooperativity: Option<f64>,
    pub params: SystemParams,
    pub numerics: FomNumerics,
    pub horizon: f64,
    pub residual: f64,
}

/// β = κ∫₀^∞⟨a†a⟩dt for the initial state `|e, 0⟩`.
pub fn cavity_efficiency(
    params: &SystemParams,
    spec: HilbertSpec,
    numerics: &FomNumerics,
) -> Result<f64> {
    let budget = emission_budget(params, spec, numerics)?;
    checked_unit("beta", params.kappa() * budget.photon_integral)
}

/// Two-photon indistinguishability
///
/// I = ∫∫|⟨a†(t+τ)a(t)⟩|² dt dτ / ∫∫⟨a†a⟩(t+τ)⟨a†a⟩(t) dt dτ
pub fn indistinguishability(
    params: &SystemParams,
    spec: HilbertSpec,
    numerics: &FomNumerics,
) -> Result<f64> {
    let mut solver = EmissionSolver::new(params, spec, numerics)?;
    let run = solver.run()?;
    solver.indistinguishability(&run)
}

/// The kappa/gamma split of the emitted excitation.
pub fn emission_budget(
    params: &SystemParams,
    spec: HilbertSpec,
    numerics: &FomNumerics,
) -> Result<EmissionBudget> {
    let mut solver = EmissionSolver::new(params, spec, numerics)?;
    Ok(solver.run()?.budget)
}

/// β, β_wg, I and C in a single pass.
pub fn emission_figures(
    params: &SystemParams,
    spec: HilbertSpec,
    numerics: &FomNumerics,
) -> Result<FomResult> {
    let mut solver = EmissionSolver::new(params, spec, numerics)?;
    let run = solver.run()?;
    let beta = checked_unit("beta", params.kappa() * run.budget.photon_integral)?;
    let indist = solver.indistinguishability(&run)?;
    let kappa = params.kappa();
    Ok(FomResult {
        beta,
        beta_wg: if kappa > 0.0 {
            params.kappa_wg / kappa * beta
        } else {
            0.0
        },
        indist,
        cooperativity: cooperativity(params).ok(),
        params: *params,
        numerics: *numerics,
        horizon: run.budget.horizon,
        residual: run.budget.residual,
    })
}

fn checked_unit(name: &str, raw: f64) -> Result<f64> {
    if !(-1e-6..=1.0 + 1e-6).contains(&raw) {
        return Err(Error::InvariantViolation(format!(
            "{name} = {raw} outside [0, 1] beyond tolerance"
        )));
    }
    Ok(raw.clamp(0.0, 1.0))
}

/// Row vector `w` with `w · vec(X) = tr(A·X)`.
fn trace_functional(a: &Operator) -> CVector {
    vec_of(&a.matrix().transpose())
}

fn dot(w: &CVector, v: &CVector) -> Complex64 {
    w.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
}

struct Run {
    budget: EmissionBudget,
    /// Dimensionless grid times and states of the main trajectory.
    times: Vec<f64>,
    states: Vec<CVector>,
    /// Ladder index of each main-grid step.
    ladder: Vec<i32>,
}

struct EmissionSolver {
    numerics: FomNumerics,
    dim: usize,
    /// Generator divided by `rate_scale`.
    l: CMatrix,
    rate_scale: f64,
    /// Dimensionless horizon cap.
    cap: f64,
    h_min: f64,
    cache: HashMap<i32, StepPropagator>,
    photon: CVector,
    emitter: CVector,
    a_dag: CVector,
    a: CMatrix,
    rho0: CVector,
}

/// Ladder spacing: four step sizes per octave.
const LADDER_PER_OCTAVE: f64 = 4.0;

impl EmissionSolver {
    fn new(params: &SystemParams, spec: HilbertSpec, numerics: &FomNumerics) -> Result<Self> {
        params.validate()?;
        numerics.validate()?;
        if spec.dim() * spec.dim() > MAX_EXPM_DIM {
            return Err(Error::invalid(
                "n_max",
                format!(
                    "emission figures use dense propagators; n_max must be <= 4, got {}",
                    spec.n_max()
                ),
            ));
        }
        let slowest = [params.kappa(), params.gamma]
            .into_iter()
            .filter(|r| *r > 0.0)
            .fold(f64::INFINITY, f64::min);
        if !slowest.is_finite() {
            return Err(Error::invalid(
                "params",
                "no decay channel: kappa and gamma are both zero",
            ));
        }
        let rate_scale = params.max_rate();
        let l = build_liouvillian(params, spec)?
            .matrix()
            .unscale(rate_scale);
        let norm = l
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let ops = Ladder::new(spec);
        Ok(EmissionSolver {
            numerics: *numerics,
            dim: spec.dim(),
            l,
            rate_scale,
            cap: numerics.horizon_factor / slowest * rate_scale,
            h_min: numerics.step_factor / norm,
            cache: HashMap::new(),
            photon: trace_functional(&ops.photon_number()),
            emitter: trace_functional(&ops.excited_projector()),
            a_dag: trace_functional(&ops.a_dag()),
            a: ops.a.matrix().clone(),
            rho0: vec_of(DensityMatrix::excited_emitter(spec).matrix()),
        })
    }

    fn excitation(&self, v: &CVector) -> f64 {
        (dot(&self.photon, v) + dot(&self.emitter, v)).re
    }

    /// Local rate `‖L²v‖ / ‖Lv‖`; zero for stationary vectors.
    fn local_rate(&self, v: &CVector) -> f64 {
        let lv = &self.l * v;
        let n1 = lv.norm();
        if n1 == 0.0 {
            return 0.0;
        }
        (&self.l * lv).norm() / n1
    }

    /// Step from the ladder `h_min·2^{k/4}` not exceeding `step_factor/rate`.
    fn ladder_index(&self, rate: f64, remaining: f64) -> i32 {
        let target = if rate > 0.0 {
            self.numerics.step_factor / rate
        } else {
            f64::INFINITY
        };
        let target = target.min(remaining.max(self.h_min));
        let k = (LADDER_PER_OCTAVE * (target / self.h_min).log2()).floor();
        k.clamp(0.0, 400.0) as i32
    }

    fn propagator(&mut self, k: i32) -> &StepPropagator {
        let h = self.h_min * 2f64.powf(k as f64 / LADDER_PER_OCTAVE);
        let l = &self.l;
        self.cache
            .entry(k)
            .or_insert_with(|| StepPropagator::new(l, h))
    }

    /// Coherence `aρ` seeded by the state `v`.
    fn lowered(&self, v: &CVector) -> CVector {
        vec_of(&(&self.a * unvec(v, self.dim)))
    }

    /// Main grid. Steps resolve both the state and the coherence `aρ` it
    /// seeds, so the same grid serves as the τ grid of every correlation row.
    fn run(&mut self) -> Result<Run> {
        let mut v = self.rho0.clone();
        let mut s = 0.0;
        let mut times = vec![0.0];
        let mut states = vec![v.clone()];
        let mut ladder = Vec::new();
        let mut photon_int = 0.0;
        let mut emitter_int = 0.0;
        let mut residual = self.excitation(&v);
        while residual >= self.numerics.residual_threshold && s < self.cap {
            let rate = self.local_rate(&v).max(self.local_rate(&self.lowered(&v)));
            let k = self.ladder_index(rate, self.cap - s);
            let (h, step_int, next) = {
                let p = self.propagator(k);
                (p.step, &p.integral * &v, &p.exp * &v)
            };
            photon_int += dot(&self.photon, &step_int).re;
            emitter_int += dot(&self.emitter, &step_int).re;
            v = next;
            s += h;
            residual = self.excitation(&v);
            times.push(s);
            states.push(v.clone());
            ladder.push(k);
        }
        let horizon = s / self.rate_scale;
        if residual > self.numerics.convergence_limit {
            return Err(Error::NonConverged { residual, horizon });
        }
        if residual >= self.numerics.residual_threshold {
            warn!(
                "emission horizon cap reached with residual excitation {residual:e} (threshold {:e})",
                self.numerics.residual_threshold
            );
        }
        Ok(Run {
            budget: EmissionBudget {
                photon_integral: photon_int / self.rate_scale,
                emitter_integral: emitter_int / self.rate_scale,
                residual,
                horizon,
                steps: ladder.len(),
            },
            times,
            states,
            ladder,
        })
    }

    /// Row `j` integrates over τ on the main-grid steps following `t_j`, so
    /// `ρ(t_j + τ)` is a stored state and numerator and denominator share
    /// one quadrature. Both integrals are truncated at the main horizon.
    fn indistinguishability(&self, run: &Run) -> Result<f64> {
        let photon_at: Vec<f64> = run.states.iter().map(|v| dot(&self.photon, v).re).collect();
        if photon_at.iter().all(|&n| n <= 0.0) {
            return Err(Error::Undefined(
                "indistinguishability: the cavity is never populated".into(),
            ));
        }
        let props: Vec<&StepPropagator> = run.ladder.iter().map(|k| &self.cache[k]).collect();
        let rows: Vec<(f64, f64)> = run
            .states
            .par_iter()
            .enumerate()
            .map(|(j, rho)| {
                let n_t = photon_at[j];
                let mut x = self.lowered(rho);
                let mut g_prev = dot(&self.a_dag, &x).norm_sqr();
                let mut d_prev = n_t * n_t;
                let (mut num, mut den) = (0.0, 0.0);
                for (m, p) in props[j..].iter().enumerate() {
                    x = &p.exp * &x;
                    let g_next = dot(&self.a_dag, &x).norm_sqr();
                    let d_next = n_t * photon_at[j + m + 1];
                    num += 0.5 * p.step * (g_prev + g_next);
                    den += 0.5 * p.step * (d_prev + d_next);
                    g_prev = g_next;
                    d_prev = d_next;
                }
                (num, den)
            })
            .collect();
        let num_rows: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let den_rows: Vec<f64> = rows.iter().map(|r| r.1).collect();
        let numerator = crate::numeric::trapezoid(&run.times, &num_rows);
        let denominator = crate::numeric::trapezoid(&run.times, &den_rows);
        if !(denominator > 0.0) {
            return Err(Error::Undefined(
                "indistinguishability: no photon emitted".into(),
            ));
        }
        checked_unit("indistinguishability", numerator / denominator)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::ghz_to_rad;

    fn spec() -> HilbertSpec {
        HilbertSpec::new(1).unwrap()
    }

    #[test]
    fn no_coupling_no_efficiency() {
        let p = SystemParams::siv(0.0);
        let beta = cavity_efficiency(&p, spec(), &FomNumerics::default()).unwrap();
        assert_eq!(beta, 0.0);
    }

    #[test]
    fn cavity_only_channel_gives_unit_efficiency() {
        let mut p = SystemParams::siv(ghz_to_rad(3.0));
        p.gamma = 0.0;
        p.gamma_star = 0.0;
        let beta = cavity_efficiency(&p, spec(), &FomNumerics::default()).unwrap();
        assert!((beta - 1.0).abs() < 1e-6, "{beta}");
    }

    #[test]
    fn undefined_indistinguishability_without_coupling() {
        let err = indistinguishability(&SystemParams::siv(0.0), spec(), &FomNumerics::default());
        assert!(matches!(err, Err(Error::Undefined(_))));
    }

    #[test]
    fn no_decay_channel_is_rejected() {
        let p = SystemParams::new(1.0, 0.0, 0.0, 0.0, 0.3, 0.0, 1.0).unwrap();
        assert!(cavity_efficiency(&p, spec(), &FomNumerics::default()).is_err());
    }

    #[test]
    fn short_horizon_reports_non_convergence() {
        let numerics = FomNumerics {
            horizon_factor: 0.5,
            ..Default::default()
        };
        let err = cavity_efficiency(&SystemParams::siv(ghz_to_rad(1.0)), spec(), &numerics);
        assert!(matches!(err, Err(Error::NonConverged { .. })));
    }

    #[test]
    fn large_truncation_rejected() {
        let err = cavity_efficiency(
            &SystemParams::siv(1.0),
            HilbertSpec::new(5).unwrap(),
            &FomNumerics::default(),
        );
        assert!(err.is_err());
    }
}
