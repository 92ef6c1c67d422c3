//! Physical constants and unit conversions.
//!
//! Rates are stored as angular frequencies (rad/s) throughout the crate.
//! "Frequency" inputs such as `10 GHz` are ordinary frequencies (the rate
//! divided by 2π) and are multiplied by 2π on ingest.

use std::f64::consts::TAU;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant (J·s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity (F/m), CODATA 2018.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// One Debye in C·m.
pub const DEBYE: f64 = 3.335_64e-30;

/// Zero-phonon line of the silicon-vacancy center (m).
pub const SIV_WAVELENGTH: f64 = 737e-9;
/// Refractive index of diamond used for (λ/n)³ reporting.
pub const DIAMOND_INDEX: f64 = 2.40;

pub fn hz_to_rad(f: f64) -> f64 {
    TAU * f
}

pub fn ghz_to_rad(f: f64) -> f64 {
    TAU * f * 1e9
}

pub fn mhz_to_rad(f: f64) -> f64 {
    TAU * f * 1e6
}

pub fn rad_to_hz(w: f64) -> f64 {
    w / TAU
}

pub fn rad_to_ghz(w: f64) -> f64 {
    w / TAU * 1e-9
}

pub fn debye_to_si(d: f64) -> f64 {
    d * DEBYE
}

/// Angular optical frequency for a vacuum wavelength.
pub fn wavelength_to_omega(lambda: f64) -> f64 {
    TAU * SPEED_OF_LIGHT / lambda
}

/// The natural mode-volume unit (λ/n)³ in m³.
pub fn cubic_wavelength(lambda: f64, n: f64) -> f64 {
    (lambda / n).powi(3)
}

/// Loaded quality factor Q = ω/κ.
pub fn quality_factor(omega: f64, kappa: f64) -> f64 {
    omega / kappa
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ghz_round_trip() {
        let w = ghz_to_rad(10.0);
        assert!((w - TAU * 1e10).abs() < 1e-3);
        assert!((rad_to_ghz(w) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn siv_quality_factor() {
        let q = quality_factor(wavelength_to_omega(SIV_WAVELENGTH), ghz_to_rad(10.0));
        assert!(q > 40_000.0 && q < 41_000.0, "{q}");
    }
}
