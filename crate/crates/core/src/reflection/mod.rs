//! Single-sided cavity reflection with a spin-dependent emitter.
//!
//! Linear input-output response with probe detuning `Δ` (probe − cavity) and
//! emitter detuning `δ_a` (emitter − cavity):
//!
//! r(Δ) = 1 − κ_wg / [iΔ + κ/2 + g² / (i(Δ − δ_a) + γ_tot/2)]
//!
//! `γ_tot = γ + γ*` is the emitter's homogeneous linewidth under the same
//! dephasing convention as the master equation in [`crate::quantum`]
//! (jump operator `σ₊σ₋` at rate γ*, which damps coherences at γ*/2).

mod contrast;
mod drift;

use num_complex::Complex64;
use serde::Serialize;

pub use contrast::{contrast_curve, emitter_like_resonance, ContrastRow, ProbePolicy, ProbeWindow};
pub use drift::{apply_drift, fwhm_to_sigma};

use crate::error::{Error, Result};
use crate::numeric::is_strictly_increasing;
use crate::quantum::SystemParams;

/// Real reflectivity `R = |r|²` on a probe-detuning grid (rad/s).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub probe_detunings: Vec<f64>,
    pub values: Vec<f64>,
}

/// Complex reflection amplitude on a probe-detuning grid (rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSpectrum {
    pub probe_detunings: Vec<f64>,
    pub amplitude: Vec<Complex64>,
}

impl AmplitudeSpectrum {
    pub fn reflectivity(&self) -> Spectrum {
        Spectrum {
            probe_detunings: self.probe_detunings.clone(),
            values: self.amplitude.iter().map(|r| r.norm_sqr()).collect(),
        }
    }
}

impl Spectrum {
    /// Grid index of the smallest reflectivity (first one on ties).
    pub fn argmin(&self) -> Option<usize> {
        self.values
            .iter()
            .enumerate()
            .fold(None, |best: Option<(usize, f64)>, (i, &v)| match best {
                Some((_, b)) if b <= v => best,
                _ => Some((i, v)),
            })
            .map(|(i, _)| i)
    }
}

/// Spin-dependent emitter configuration (all rad/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinConfig {
    /// Spin-up transition minus spin-down transition.
    pub zeeman_split: f64,
    /// Standard deviation of the Gaussian spectral drift.
    pub drift_sigma: f64,
    /// Spin-down transition relative to the emitter frequency set by
    /// `delta_ca`.
    pub spin_down_offset: f64,
}

impl SpinConfig {
    pub fn new(zeeman_split: f64, drift_sigma: f64, spin_down_offset: f64) -> Result<Self> {
        let s = SpinConfig {
            zeeman_split,
            drift_sigma,
            spin_down_offset,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zeeman_split >= 0.0 && self.zeeman_split.is_finite()) {
            return Err(Error::invalid("zeeman_split", "must be finite and >= 0"));
        }
        if !(self.drift_sigma >= 0.0 && self.drift_sigma.is_finite()) {
            return Err(Error::invalid("drift_sigma", "must be finite and >= 0"));
        }
        if !self.spin_down_offset.is_finite() {
            return Err(Error::invalid("spin_down_offset", "must be finite"));
        }
        Ok(())
    }

    /// Emitter-minus-cavity detunings of the (down, up) transitions.
    pub fn transition_detunings(&self, params: &SystemParams) -> (f64, f64) {
        let down = -params.delta_ca + self.spin_down_offset;
        (down, down + self.zeeman_split)
    }
}

/// Full homogeneous emitter linewidth `γ + γ*`.
pub fn emitter_linewidth(params: &SystemParams) -> f64 {
    params.gamma + params.gamma_star
}

/// Reflection amplitude at a single probe detuning.
pub fn reflection_amplitude(params: &SystemParams, atom_detuning: f64, probe: f64) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let emitter = i * (probe - atom_detuning) + 0.5 * emitter_linewidth(params);
    let coupling = if params.g == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        params.g * params.g / emitter
    };
    let denom = i * probe + 0.5 * params.kappa() + coupling;
    Complex64::new(1.0, 0.0) - params.kappa_wg / denom
}

pub fn reflectivity(
    params: &SystemParams,
    atom_detuning: f64,
    probe_grid: &[f64],
) -> Result<AmplitudeSpectrum> {
    params.validate()?;
    if !atom_detuning.is_finite() {
        return Err(Error::invalid("atom_detuning", "must be finite"));
    }
    if probe_grid.is_empty() || !is_strictly_increasing(probe_grid) {
        return Err(Error::invalid(
            "probe_grid",
            "must be nonempty and strictly increasing",
        ));
    }
    Ok(AmplitudeSpectrum {
        probe_detunings: probe_grid.to_vec(),
        amplitude: probe_grid
            .iter()
            .map(|&d| reflection_amplitude(params, atom_detuning, d))
            .collect(),
    })
}

/// Drift-broadened reflectivities `(R↓, R↑)`.
pub fn spin_spectra(
    params: &SystemParams,
    spin: &SpinConfig,
    probe_grid: &[f64],
) -> Result<(Spectrum, Spectrum)> {
    spin.validate()?;
    let (down, up) = spin.transition_detunings(params);
    let r_down = reflectivity(params, down, probe_grid)?.reflectivity();
    let r_up = reflectivity(params, up, probe_grid)?.reflectivity();
    Ok((
        apply_drift(&r_down, spin.drift_sigma)?,
        apply_drift(&r_up, spin.drift_sigma)?,
    ))
}

/// Uniform grid of `n` points over `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && hi > lo);
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| lo + step * k as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::ghz_to_rad;
    use std::f64::consts::PI;

    fn cavity(g: f64, kappa_wg: f64, kappa_sc: f64) -> SystemParams {
        SystemParams::new(g, kappa_wg, kappa_sc, 0.1, 0.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn far_detuned_probe_is_a_mirror() {
        let r = reflection_amplitude(&cavity(1.0, 1.0, 0.3), 0.0, 1e9);
        assert!((r.norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn critical_coupling_dip() {
        let r = reflection_amplitude(&cavity(0.0, 0.5, 0.5), 0.0, 0.0);
        assert!(r.norm_sqr() <= 1e-9);
    }

    #[test]
    fn overcoupled_bare_cavity_flips_phase() {
        let r = reflection_amplitude(&cavity(0.0, 1.0, 0.0), 0.0, 0.0);
        assert!((r.norm_sqr() - 1.0).abs() < 1e-9);
        assert!((r.arg().abs() - PI).abs() < 1e-9);
    }

    #[test]
    fn passive_everywhere() {
        let p = SystemParams::new(
            ghz_to_rad(30.0),
            ghz_to_rad(6.0),
            ghz_to_rad(4.0),
            ghz_to_rad(0.1),
            ghz_to_rad(0.3),
            0.0,
            1.0,
        )
        .unwrap();
        let grid = uniform_grid(ghz_to_rad(-100.0), ghz_to_rad(100.0), 4001);
        let s = reflectivity(&p, ghz_to_rad(2.0), &grid)
            .unwrap()
            .reflectivity();
        assert!(s.values.iter().all(|&r| (0.0..=1.0 + 1e-9).contains(&r)));
    }

    #[test]
    fn equal_spins_give_equal_spectra() {
        let p = cavity(ghz_to_rad(10.0), ghz_to_rad(10.0), 0.0);
        let spin = SpinConfig::new(0.0, ghz_to_rad(0.05), 0.0).unwrap();
        let grid = uniform_grid(ghz_to_rad(-20.0), ghz_to_rad(20.0), 2001);
        let (down, up) = spin_spectra(&p, &spin, &grid).unwrap();
        assert_eq!(down, up);
    }

    #[test]
    fn rejects_unsorted_grid() {
        assert!(reflectivity(&cavity(1.0, 1.0, 0.0), 0.0, &[0.0, -1.0]).is_err());
    }

    #[test]
    fn argmin_first_on_ties() {
        let s = Spectrum {
            probe_detunings: vec![0.0, 1.0, 2.0],
            values: vec![0.5, 0.1, 0.1],
        };
        assert_eq!(s.argmin(), Some(1));
    }
}
