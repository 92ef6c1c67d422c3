use rayon::prelude::*;
use serde::Serialize;

use super::{spin_spectra, SpinConfig};
use crate::error::{Error, Result};
use crate::quantum::SystemParams;

/// Probe grid used for each cavity detuning: `2·half_width/step + 1` points
/// centered on the emitter-like dressed resonance (see
/// [`emitter_like_resonance`]) of the midpoint between the two spin
/// transitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeWindow {
    pub half_width: f64,
    pub step: f64,
}

impl ProbeWindow {
    fn grid(&self, center: f64) -> Result<Vec<f64>> {
        if !(self.step > 0.0 && self.half_width >= self.step) {
            return Err(Error::invalid(
                "probe_window",
                "need 0 < step <= half_width",
            ));
        }
        let n = (self.half_width / self.step).round() as i64;
        Ok((-n..=n).map(|k| center + k as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbePolicy {
    /// Maximize contrast over the probe window.
    Optimize,
    /// Probe at a fixed offset (rad/s) from the spin-down transition.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContrastRow {
    /// Cavity minus emitter detuning (rad/s).
    pub cavity_detuning: f64,
    /// Chosen probe, relative to the cavity (rad/s).
    pub best_probe: f64,
    /// |R↓ − R↑| / (R↓ + R↑) at the chosen probe.
    pub contrast: f64,
    /// |R↓ − R↑| at the chosen probe.
    pub abs_difference: f64,
    pub r_down: f64,
    pub r_up: f64,
}

/// Emitter-like eigenfrequency of the lossless coupled system, relative to
/// the cavity: `δ/2 + sign(δ)·√(δ²/4 + g²)` (upper branch for δ = 0).
pub fn emitter_like_resonance(g: f64, atom_detuning: f64) -> f64 {
    let root = (0.25 * atom_detuning * atom_detuning + g * g).sqrt();
    if atom_detuning < 0.0 {
        0.5 * atom_detuning - root
    } else {
        0.5 * atom_detuning + root
    }
}

/// Contrast versus cavity detuning. Each row is computed independently.
pub fn contrast_curve(
    params: &SystemParams,
    spin: &SpinConfig,
    cavity_detunings: &[f64],
    policy: ProbePolicy,
    window: ProbeWindow,
) -> Result<Vec<ContrastRow>> {
    if cavity_detunings.is_empty() {
        return Err(Error::invalid("cavity_detunings", "empty detuning grid"));
    }
    cavity_detunings
        .par_iter()
        .map(|&delta| {
            contrast_at(
                &SystemParams {
                    delta_ca: delta,
                    ..*params
                },
                spin,
                policy,
                window,
            )
        })
        .collect()
}

fn contrast_at(
    params: &SystemParams,
    spin: &SpinConfig,
    policy: ProbePolicy,
    window: ProbeWindow,
) -> Result<ContrastRow> {
    let (down, up) = spin.transition_detunings(params);
    let center = match policy {
        ProbePolicy::Optimize => emitter_like_resonance(params.g, 0.5 * (down + up)),
        ProbePolicy::Fixed(offset) => down + offset,
    };
    let grid = window.grid(center)?;
    let (r_down, r_up) = spin_spectra(params, spin, &grid)?;
    let row_at = |k: usize| {
        let (a, b) = (r_down.values[k], r_up.values[k]);
        let sum = a + b;
        let diff = (a - b).abs();
        ContrastRow {
            cavity_detuning: params.delta_ca,
            best_probe: grid[k],
            contrast: if sum < 1e-12 {
                0.0
            } else {
                (diff / sum).min(1.0)
            },
            abs_difference: diff,
            r_down: a,
            r_up: b,
        }
    };
    let row = match policy {
        ProbePolicy::Fixed(_) => row_at(grid.len() / 2),
        ProbePolicy::Optimize => {
            let mut best: Option<ContrastRow> = None;
            for k in 0..grid.len() {
                if r_down.values[k] + r_up.values[k] < 1e-12 {
                    continue;
                }
                let cand = row_at(k);
                if best.is_none_or(|b| cand.contrast > b.contrast) {
                    best = Some(cand);
                }
            }
            best.unwrap_or_else(|| ContrastRow {
                contrast: 0.0,
                abs_difference: 0.0,
                ..row_at(grid.len() / 2)
            })
        }
    };
    Ok(row)
}
