use serde::Serialize;

use crate::error::{Error, Result};
use crate::units;

/// Rates of a single emitter coupled to one cavity mode. All values in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    /// Coherent emitter-cavity coupling.
    pub g: f64,
    /// Loss into the collection waveguide.
    pub kappa_wg: f64,
    /// Intrinsic (scattering) cavity loss.
    pub kappa_sc: f64,
    /// Emitter radiative decay.
    pub gamma: f64,
    /// Pure optical dephasing.
    pub gamma_star: f64,
    /// Cavity minus emitter frequency (signed).
    pub delta_ca: f64,
    /// Optical carrier angular frequency.
    pub omega: f64,
}

impl SystemParams {
    pub fn new(
        g: f64,
        kappa_wg: f64,
        kappa_sc: f64,
        gamma: f64,
        gamma_star: f64,
        delta_ca: f64,
        omega: f64,
    ) -> Result<Self> {
        let p = SystemParams {
            g,
            kappa_wg,
            kappa_sc,
            gamma,
            gamma_star,
            delta_ca,
            omega,
        };
        p.validate()?;
        Ok(p)
    }

    /// Silicon-vacancy defaults: κ = κ_wg = 2π·10 GHz, γ = 2π·100 MHz,
    /// γ* = 2π·50 MHz, resonant, λ = 737 nm.
    pub fn siv(g: f64) -> Self {
        SystemParams {
            g,
            kappa_wg: units::ghz_to_rad(10.0),
            kappa_sc: 0.0,
            gamma: units::mhz_to_rad(100.0),
            gamma_star: units::mhz_to_rad(50.0),
            delta_ca: 0.0,
            omega: units::wavelength_to_omega(units::SIV_WAVELENGTH),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("g", self.g),
            ("kappa_wg", self.kappa_wg),
            ("kappa_sc", self.kappa_sc),
            ("gamma", self.gamma),
            ("gamma_star", self.gamma_star),
        ];
        for (name, v) in rates {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(
                    name,
                    format!("must be finite and >= 0, got {v}"),
                ));
            }
        }
        if !self.delta_ca.is_finite() {
            return Err(Error::invalid("delta_ca", "must be finite"));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::invalid(
                "omega",
                format!("must be > 0, got {}", self.omega),
            ));
        }
        Ok(())
    }

    /// Total cavity loss κ = κ_wg + κ_sc.
    pub fn kappa(&self) -> f64 {
        self.kappa_wg + self.kappa_sc
    }

    /// Loaded quality factor ω/κ.
    pub fn quality_factor(&self) -> f64 {
        units::quality_factor(self.omega, self.kappa())
    }

    /// Multiply every rate (not the carrier) by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        SystemParams {
            g: self.g * s,
            kappa_wg: self.kappa_wg * s,
            kappa_sc: self.kappa_sc * s,
            gamma: self.gamma * s,
            gamma_star: self.gamma_star * s,
            delta_ca: self.delta_ca * s,
            omega: self.omega,
        }
    }

    pub fn with_g(&self, g: f64) -> Self {
        SystemParams { g, ..*self }
    }

    /// Largest rate in the problem, used to scale time steps.
    pub(crate) fn max_rate(&self) -> f64 {
        [
            self.g,
            self.kappa(),
            self.gamma,
            self.gamma_star,
            self.delta_ca.abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Truncated Hilbert space of a two-level emitter and a Fock ladder.
///
/// Basis ordering: `|s, n⟩` with `s ∈ {ground = 0, excited = 1}` and
/// `n ∈ 0..=n_max`, stored at index `s·(n_max + 1) + n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HilbertSpec {
    n_max: usize,
}

impl HilbertSpec {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::invalid(
                "n_max",
                "at least one photon state is required",
            ));
        }
        Ok(HilbertSpec { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.fock_dim()
    }

    /// Index of `|excited, n⟩` (`excited = true`) or `|ground, n⟩`.
    pub fn index(&self, excited: bool, n: usize) -> usize {
        assert!(n <= self.n_max, "Fock index {n} above n_max {}", self.n_max);
        usize::from(excited) * self.fock_dim() + n
    }
}

impl Default for HilbertSpec {
    fn default() -> Self {
        HilbertSpec { n_max: 1 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_negative_rates() {
        let err = SystemParams::new(1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("kappa_wg"));
    }

    #[test]
    fn rejects_zero_carrier() {
        assert!(SystemParams::new(1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn kappa_is_sum_of_channels() {
        let p = SystemParams::new(1.0, 3.0, 1.5, 0.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(p.kappa(), 4.5);
    }

    #[test]
    fn hilbert_requires_a_photon() {
        assert!(HilbertSpec::new(0).is_err());
        let h = HilbertSpec::new(2).unwrap();
        assert_eq!(h.dim(), 6);
        assert_eq!(h.index(true, 1), 4);
        assert_eq!(h.index(false, 2), 2);
    }
}
