//! Shared fixtures for the criterion benches.

use cqed_core::units::ghz_to_rad;
use cqed_core::SystemParams;

/// SiV parameters at coupling `g_ghz` (ordinary frequency).
pub fn siv(g_ghz: f64) -> SystemParams {
    SystemParams::siv(ghz_to_rad(g_ghz))
}

/// `n` equally spaced times over `[0, t_end]`.
pub fn time_grid(t_end: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| t_end * k as f64 / (n - 1) as f64).collect()
}
