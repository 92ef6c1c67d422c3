//! Figures of merit: cooperativity, cavity efficiency β, indistinguishability
//! I and the conversion between mode volume and coupling rate.

mod emission;
mod sweep;

use serde::Serialize;

pub use emission::{
    cavity_efficiency, emission_budget, emission_figures, indistinguishability, EmissionBudget,
    FomNumerics, FomResult,
};
pub use sweep::{fom_sweep, SweepAxis, SweepRow};

use crate::error::{Error, Result};
use crate::quantum::SystemParams;
use crate::units::{DEBYE, EPSILON_0, HBAR};

/// C = 4g²/(κγ) with κ the total cavity loss.
pub fn cooperativity(params: &SystemParams) -> Result<f64> {
    let kappa = params.kappa();
    if kappa <= 0.0 {
        return Err(Error::Undefined(
            "cooperativity with zero cavity loss".into(),
        ));
    }
    if params.gamma <= 0.0 {
        return Err(Error::Undefined(
            "cooperativity with zero emitter decay".into(),
        ));
    }
    Ok(4.0 * params.g * params.g / (kappa * params.gamma))
}

/// How the dipole is projected on the local field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "policy", content = "axis")]
pub enum Orientation {
    /// Dipole parallel to the local field: `|μ·E| = μ|E|`.
    AlignedWithField,
    /// Fixed unit vector (e.g. a ⟨111⟩ axis).
    FixedAxis([f64; 3]),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DipoleSpec {
    /// Transition dipole moment (C·m).
    pub mu: f64,
    pub orientation: Orientation,
    /// Emitter-mode overlap factor in (0, 1].
    pub overlap_xi: f64,
}

impl DipoleSpec {
    pub fn new(mu: f64, orientation: Orientation, overlap_xi: f64) -> Result<Self> {
        let d = DipoleSpec {
            mu,
            orientation,
            overlap_xi,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn from_debye(mu_debye: f64, orientation: Orientation, overlap_xi: f64) -> Result<Self> {
        Self::new(mu_debye * DEBYE, orientation, overlap_xi)
    }

    /// Silicon-vacancy dipole of 2.31 D, aligned with the field, full overlap.
    pub fn siv() -> Self {
        DipoleSpec {
            mu: 2.31 * DEBYE,
            orientation: Orientation::AlignedWithField,
            overlap_xi: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::invalid(
                "mu",
                format!("must be > 0, got {}", self.mu),
            ));
        }
        if !(self.overlap_xi > 0.0 && self.overlap_xi <= 1.0) {
            return Err(Error::invalid(
                "overlap_xi",
                format!("must lie in (0, 1], got {}", self.overlap_xi),
            ));
        }
        if let Orientation::FixedAxis(axis) = self.orientation {
            let norm = axis.iter().map(|c| c * c).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(
                    "axis",
                    format!("must be a unit vector, norm {norm}"),
                ));
            }
        }
        Ok(())
    }
}

/// Vacuum coupling at the field maximum:
/// `g = ξ·μ·√(ω / (2ε₀ħV))` in rad/s, for `V` in m³.
pub fn g_from_mode_volume(volume: f64, dipole: &DipoleSpec, omega: f64) -> Result<f64> {
    dipole.validate()?;
    if !(volume.is_finite() && volume > 0.0) {
        return Err(Error::invalid(
            "volume",
            format!("must be > 0, got {volume}"),
        ));
    }
    if !(omega > 0.0) {
        return Err(Error::invalid("omega", "must be > 0"));
    }
    Ok(dipole.overlap_xi * dipole.mu * (omega / (2.0 * EPSILON_0 * HBAR * volume)).sqrt())
}

/// Inverse of [`g_from_mode_volume`]: the mode volume (m³) giving coupling `g`.
pub fn mode_volume_from_g(g: f64, dipole: &DipoleSpec, omega: f64) -> Result<f64> {
    dipole.validate()?;
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::invalid("g", format!("must be > 0, got {g}")));
    }
    let amp = dipole.overlap_xi * dipole.mu;
    Ok(omega * amp * amp / (2.0 * EPSILON_0 * HBAR * g * g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{cubic_wavelength, ghz_to_rad, rad_to_ghz, wavelength_to_omega};

    fn rates(g: f64, kappa: f64, gamma: f64) -> SystemParams {
        SystemParams::new(g, kappa, 0.0, gamma, 0.0, 0.0, 1.0).unwrap()
    }

    #[test]
    fn cooperativity_unit_case() {
        assert_eq!(cooperativity(&rates(1.0, 4.0, 1.0)).unwrap(), 1.0);
    }

    #[test]
    fn cooperativity_siv_case() {
        let c = cooperativity(&rates(ghz_to_rad(10.0), ghz_to_rad(10.0), ghz_to_rad(0.1))).unwrap();
        assert!((c - 400.0).abs() < 1e-9, "{c}");
    }

    #[test]
    fn cooperativity_is_quadratic() {
        let p = rates(0.37, 1.3, 0.021);
        let c1 = cooperativity(&p).unwrap();
        let c2 = cooperativity(&p.with_g(2.0 * p.g)).unwrap();
        assert_eq!(c2, 4.0 * c1);
    }

    #[test]
    fn cooperativity_requires_losses() {
        assert!(cooperativity(&rates(1.0, 0.0, 1.0)).is_err());
        assert!(cooperativity(&rates(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn volume_scaling() {
        let d = DipoleSpec::siv();
        let w = wavelength_to_omega(737e-9);
        let v = 0.5 * cubic_wavelength(737e-9, 2.4);
        let g1 = g_from_mode_volume(v, &d, w).unwrap();
        let g2 = g_from_mode_volume(v / 100.0, &d, w).unwrap();
        assert!((g2 / g1 - 10.0).abs() < 1e-12);
        let back = mode_volume_from_g(g1, &d, w).unwrap();
        assert!((back / v - 1.0).abs() < 1e-12);
        assert!(rad_to_ghz(g1) > 10.0 && rad_to_ghz(g1) < 12.5);
    }

    #[test]
    fn rejects_bad_dipoles_and_volumes() {
        assert!(DipoleSpec::from_debye(-1.0, Orientation::AlignedWithField, 1.0).is_err());
        assert!(DipoleSpec::from_debye(1.0, Orientation::AlignedWithField, 0.0).is_err());
        assert!(DipoleSpec::from_debye(1.0, Orientation::FixedAxis([1.0, 1.0, 0.0]), 1.0).is_err());
        assert!(g_from_mode_volume(0.0, &DipoleSpec::siv(), 1.0).is_err());
    }
}
