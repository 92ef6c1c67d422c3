use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Voxels with `eps > 1 + DIELECTRIC_THRESHOLD` count as dielectric.
pub const DIELECTRIC_THRESHOLD: f64 = 1e-6;

/// Regular voxel grid. `origin` is the center of voxel `(0, 0, 0)`; voxels
/// are stored x-fastest: `index = i + nx·(j + ny·k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridGeometry {
    pub dims: [usize; 3],
    /// Voxel spacing (m).
    pub spacing: [f64; 3],
    /// Position of the first voxel center (m).
    pub origin: [f64; 3],
}

impl GridGeometry {
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn voxel_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn coords(&self, index: usize) -> [usize; 3] {
        let nx = self.dims[0];
        let ny = self.dims[1];
        [index % nx, (index / nx) % ny, index / (nx * ny)]
    }

    pub fn position(&self, ijk: [usize; 3]) -> [f64; 3] {
        [0, 1, 2].map(|a| self.origin[a] + ijk[a] as f64 * self.spacing[a])
    }

    /// Geometry with `n` voxels per axis, centered on the origin.
    pub fn centered(dims: [usize; 3], spacing: [f64; 3]) -> Self {
        let origin = [0, 1, 2].map(|a| -0.5 * (dims[a] as f64 - 1.0) * spacing[a]);
        GridGeometry {
            dims,
            spacing,
            origin,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.dims.contains(&0) {
            return Err(Error::invalid("dims", "every grid dimension must be >= 1"));
        }
        if self.spacing.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::invalid("spacing", "spacings must be finite and > 0"));
        }
        if self.origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::invalid("origin", "must be finite"));
        }
        Ok(())
    }
}

/// Relative permittivity and complex vector field on a voxel grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    geometry: GridGeometry,
    /// Vacuum wavelength (m).
    wavelength: f64,
    /// Reference index for (λ/n)³ reporting.
    n_ref: f64,
    eps: Vec<f64>,
    efield: Vec<[Complex64; 3]>,
}

impl FieldGrid {
    pub fn new(
        geometry: GridGeometry,
        wavelength: f64,
        n_ref: f64,
        eps: Vec<f64>,
        efield: Vec<[Complex64; 3]>,
    ) -> Result<Self> {
        geometry.validate()?;
        let n = geometry.len();
        if eps.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: eps.len(),
            });
        }
        if efield.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: efield.len(),
            });
        }
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::invalid("wavelength", "must be > 0"));
        }
        if !(n_ref.is_finite() && n_ref > 0.0) {
            return Err(Error::invalid("n_ref", "must be > 0"));
        }
        if let Some(bad) = eps.iter().position(|e| !e.is_finite() || *e < 1.0 - 1e-9) {
            return Err(Error::invalid(
                "eps",
                format!(
                    "voxel {bad}: permittivity must be finite and >= 1, got {}",
                    eps[bad]
                ),
            ));
        }
        if let Some(bad) = efield
            .iter()
            .position(|e| e.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())))
        {
            return Err(Error::invalid(
                "efield",
                format!("voxel {bad}: non-finite field"),
            ));
        }
        let grid = FieldGrid {
            geometry,
            wavelength,
            n_ref,
            eps,
            efield,
        };
        if grid.energy_density().iter().all(|&u| u <= 0.0) {
            return Err(Error::invalid("efield", "field vanishes everywhere"));
        }
        Ok(grid)
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn n_ref(&self) -> f64 {
        self.n_ref
    }

    pub fn eps(&self) -> &[f64] {
        &self.eps
    }

    pub fn efield(&self) -> &[[Complex64; 3]] {
        &self.efield
    }

    /// `ε|E|²` per voxel.
    pub fn energy_density(&self) -> Vec<f64> {
        self.eps
            .iter()
            .zip(&self.efield)
            .map(|(e, f)| e * field_norm_sqr(f))
            .collect()
    }

    pub fn dielectric_mask(&self) -> Vec<bool> {
        self.eps
            .iter()
            .map(|&e| e > 1.0 + DIELECTRIC_THRESHOLD)
            .collect()
    }

    /// Same grid with every field value multiplied by `c`.
    pub fn scaled_field(&self, c: f64) -> Self {
        FieldGrid {
            efield: self.efield.iter().map(|f| f.map(|z| z * c)).collect(),
            ..self.clone()
        }
    }
}

pub(crate) fn field_norm_sqr(f: &[Complex64; 3]) -> f64 {
    f.iter().map(|c| c.norm_sqr()).sum()
}

/// Real values on a voxel grid with the dielectric mask of the source grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalarField {
    pub geometry: GridGeometry,
    pub values: Vec<f64>,
    pub dielectric: Vec<bool>,
}

impl ScalarField {
    pub fn new(geometry: GridGeometry, values: Vec<f64>, dielectric: Vec<bool>) -> Result<Self> {
        geometry.validate()?;
        for len in [values.len(), dielectric.len()] {
            if len != geometry.len() {
                return Err(Error::DimensionMismatch {
                    expected: geometry.len(),
                    found: len,
                });
            }
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid(
                "values",
                "scalar field must be finite and >= 0",
            ));
        }
        Ok(ScalarField {
            geometry,
            values,
            dielectric,
        })
    }

    /// Index of the largest value among dielectric voxels (first on ties).
    pub fn dielectric_argmax(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, (&v, &d)) in self.values.iter().zip(&self.dielectric).enumerate() {
            if d && best.is_none_or(|b| v > self.values[b]) {
                best = Some(i);
            }
        }
        best
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> GridGeometry {
        GridGeometry::centered([3, 2, 2], [1.0, 1.0, 1.0])
    }

    fn unit_field(n: usize) -> Vec<[Complex64; 3]> {
        vec![
            [
                Complex64::new(1.0, 0.0),
                Complex64::default(),
                Complex64::default()
            ];
            n
        ]
    }

    #[test]
    fn index_round_trip() {
        let g = geom();
        for idx in 0..g.len() {
            let [i, j, k] = g.coords(idx);
            assert_eq!(g.index(i, j, k), idx);
        }
        assert_eq!(g.position([0, 0, 0]), [-1.0, -0.5, -0.5]);
    }

    #[test]
    fn rejects_sub_vacuum_permittivity() {
        let err = FieldGrid::new(geom(), 1e-6, 1.0, vec![0.5; 12], unit_field(12));
        assert!(err.is_err());
    }

    #[test]
    fn rejects_zero_field() {
        let zero = vec![[Complex64::default(); 3]; 12];
        assert!(FieldGrid::new(geom(), 1e-6, 1.0, vec![1.0; 12], zero).is_err());
    }

    #[test]
    fn rejects_non_finite_field() {
        let mut f = unit_field(12);
        f[3][1] = Complex64::new(f64::NAN, 0.0);
        assert!(FieldGrid::new(geom(), 1e-6, 1.0, vec![1.0; 12], f).is_err());
    }

    #[test]
    fn mask_threshold() {
        let mut eps = vec![1.0; 12];
        eps[0] = 1.0 + 2e-6;
        eps[1] = 1.0 + 5e-7;
        let g = FieldGrid::new(geom(), 1e-6, 1.0, eps, unit_field(12)).unwrap();
        let mask = g.dielectric_mask();
        assert!(mask[0] && !mask[1] && !mask[2]);
    }
}
