use rayon::prelude::*;
use serde::Serialize;

use super::grid::{field_norm_sqr, FieldGrid, ScalarField};
use crate::error::{Error, Result};
use crate::fom::{g_from_mode_volume, DipoleSpec, Orientation};
use crate::numeric::pairwise_sum;
use crate::units::cubic_wavelength;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeVolume {
    /// Mode volume (m³).
    pub volume: f64,
    /// Mode volume in units of (λ/n)³.
    pub normalized: f64,
    /// Voxel index of the energy-density maximum (first on ties).
    pub argmax: [usize; 3],
    /// Position of that voxel (m).
    pub argmax_position: [f64; 3],
    /// Peak `ε|E|²`, in the grid's field units squared.
    pub max_energy_density: f64,
}

/// `V = Σ ε|E|² dV / max ε|E|²`, midpoint rule over voxel centers.
pub fn mode_volume(grid: &FieldGrid) -> Result<ModeVolume> {
    let geometry = grid.geometry();
    let density: Vec<f64> = grid
        .eps()
        .par_iter()
        .zip(grid.efield().par_iter())
        .map(|(e, f)| e * field_norm_sqr(f))
        .collect();
    let (argmax, peak) =
        density
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            });
    if !(peak > 0.0) {
        return Err(Error::invalid("efield", "field vanishes everywhere"));
    }
    let volume = pairwise_sum(&density) * geometry.voxel_volume() / peak;
    let ijk = geometry.coords(argmax);
    Ok(ModeVolume {
        volume,
        normalized: volume / cubic_wavelength(grid.wavelength(), grid.n_ref()),
        argmax: ijk,
        argmax_position: geometry.position(ijk),
        max_energy_density: peak,
    })
}

/// Spatial coupling map `g(r) = ξ·|μ·E(r)|/|E_max|·√(ω/(2ε₀ħV))` (rad/s).
///
/// `|E_max|` is the largest field magnitude anywhere on the grid, so the map
/// peaks at `g_from_mode_volume(V)` exactly where `|E|` is globally largest.
pub fn g_field(grid: &FieldGrid, dipole: &DipoleSpec, omega: f64) -> Result<ScalarField> {
    dipole.validate()?;
    let mv = mode_volume(grid)?;
    let g0 = g_from_mode_volume(mv.volume, dipole, omega)?;
    let e_max = grid
        .efield()
        .iter()
        .map(field_norm_sqr)
        .fold(0.0, f64::max)
        .sqrt();
    let values = grid
        .efield()
        .par_iter()
        .map(|f| {
            let projection = match dipole.orientation {
                Orientation::AlignedWithField => field_norm_sqr(f).sqrt(),
                Orientation::FixedAxis(axis) => {
                    (f[0] * axis[0] + f[1] * axis[1] + f[2] * axis[2]).norm()
                }
            };
            g0 * projection / e_max
        })
        .collect();
    ScalarField::new(*grid.geometry(), values, grid.dielectric_mask())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridGeometry;
    use crate::units::{wavelength_to_omega, EPSILON_0, HBAR};
    use num_complex::Complex64;

    const ZERO: Complex64 = Complex64::new(0.0, 0.0);

    fn grid_with(eps: Vec<f64>, efield: Vec<[Complex64; 3]>) -> FieldGrid {
        let geometry = GridGeometry::centered([3, 3, 3], [2e-8, 3e-8, 5e-8]);
        FieldGrid::new(geometry, 737e-9, 2.4, eps, efield).unwrap()
    }

    fn y_field(values: &[f64]) -> Vec<[Complex64; 3]> {
        values
            .iter()
            .map(|&v| [ZERO, Complex64::new(v, 0.0), ZERO])
            .collect()
    }

    #[test]
    fn uniform_grid_volume_is_box() {
        let g = grid_with(vec![5.7; 27], y_field(&[0.3; 27]));
        let mv = mode_volume(&g).unwrap();
        assert_eq!(mv.volume, 27.0 * 2e-8 * 3e-8 * 5e-8);
    }

    #[test]
    fn single_voxel_volume() {
        let mut v = vec![0.0; 27];
        v[13] = 2.0;
        let g = grid_with(vec![5.7; 27], y_field(&v));
        let mv = mode_volume(&g).unwrap();
        assert_eq!(mv.volume, 2e-8 * 3e-8 * 5e-8);
        assert_eq!(mv.argmax, [1, 1, 1]);
        assert_eq!(mv.argmax_position, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn g_at_dielectric_maximum() {
        let mut v = vec![0.1; 27];
        v[13] = 1.0;
        v[0] = 0.0;
        let g = grid_with(vec![5.7; 27], y_field(&v));
        let omega = wavelength_to_omega(737e-9);
        let dip = DipoleSpec::siv();
        let map = g_field(&g, &dip, omega).unwrap();
        let vol = mode_volume(&g).unwrap().volume;
        let expect = dip.mu * (omega / (2.0 * EPSILON_0 * HBAR * vol)).sqrt();
        assert!((map.values[13] - expect).abs() <= 1e-12 * expect);
        assert_eq!(map.values[0], 0.0);
        assert_eq!(map.dielectric_argmax(), Some(13));
    }

    #[test]
    fn orthogonal_fixed_axis_gives_zero() {
        let g = grid_with(vec![5.7; 27], y_field(&[0.7; 27]));
        let dip = DipoleSpec::new(1e-29, Orientation::FixedAxis([1.0, 0.0, 0.0]), 1.0).unwrap();
        let map = g_field(&g, &dip, 2.5e15).unwrap();
        assert!(map.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn air_maximum_caps_dielectric_peak() {
        let mut v = vec![0.2; 27];
        v[0] = 1.0;
        v[13] = 0.5;
        let mut eps = vec![4.0; 27];
        eps[0] = 1.0;
        let g = grid_with(eps, y_field(&v));
        let dip = DipoleSpec::siv();
        let map = g_field(&g, &dip, 2.5e15).unwrap();
        let peak = map.values[map.dielectric_argmax().unwrap()];
        assert!(peak < map.values[0]);
        assert!((peak / map.values[0] - 0.5).abs() < 1e-12);
    }
}
