//! Coupling statistics over a lateral implantation-uncertainty disk.
//!
//! The depth axis is z. A sample is every dielectric voxel of the selected
//! lateral plane whose center lies within `D/2` of the region center, each
//! weighted by its lateral area `dx·dy`.

mod percentile;

pub use percentile::{weighted_percentile, Summary};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Which lateral slice of the map is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Plane {
    /// Fixed z index.
    Depth(usize),
    /// Per (x, y) column, the largest value among dielectric voxels.
    MaxProjection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImplantRegion {
    /// Lateral voxel index `(i, j)` of the disk center.
    pub center: [usize; 2],
    /// Disk diameter D (m).
    pub diameter: f64,
    pub plane: Plane,
}

impl ImplantRegion {
    /// Disk centered on the dielectric maximum of `gmap`, in its depth plane.
    pub fn at_maximum(gmap: &ScalarField, diameter: f64) -> Result<Self> {
        let idx = gmap
            .dielectric_argmax()
            .ok_or_else(|| Error::Empty("map has no dielectric voxel".into()))?;
        let [i, j, k] = gmap.geometry.coords(idx);
        let region = ImplantRegion {
            center: [i, j],
            diameter,
            plane: Plane::Depth(k),
        };
        region.validate(gmap)?;
        Ok(region)
    }

    pub fn with_diameter(self, diameter: f64) -> Self {
        ImplantRegion { diameter, ..self }
    }

    pub fn validate(&self, gmap: &ScalarField) -> Result<()> {
        if !(self.diameter >= 0.0 && self.diameter.is_finite()) {
            return Err(Error::invalid(
                "diameter",
                format!("must be finite and >= 0, got {}", self.diameter),
            ));
        }
        let dims = gmap.geometry.dims;
        if self.center[0] >= dims[0] || self.center[1] >= dims[1] {
            return Err(Error::invalid("center", "outside the grid"));
        }
        if let Plane::Depth(k) = self.plane {
            if k >= dims[2] {
                return Err(Error::invalid(
                    "plane",
                    format!("depth index {k} >= nz {}", dims[2]),
                ));
            }
        }
        let plane = LateralPlane::extract(gmap, self.plane);
        if !plane.mask[plane.index(self.center)] {
            return Err(Error::invalid("center", "not inside the dielectric"));
        }
        Ok(())
    }
}

/// Dielectric-masked lateral slice, indexed `i + nx·j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LateralPlane {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl LateralPlane {
    pub fn extract(gmap: &ScalarField, plane: Plane) -> Self {
        let [nx, ny, nz] = gmap.geometry.dims;
        let mut values = vec![0.0; nx * ny];
        let mut mask = vec![false; nx * ny];
        let layers = match plane {
            Plane::Depth(k) => k..k + 1,
            Plane::MaxProjection => 0..nz,
        };
        for k in layers {
            for j in 0..ny {
                for i in 0..nx {
                    let src = gmap.geometry.index(i, j, k);
                    let dst = i + nx * j;
                    if gmap.dielectric[src] && (!mask[dst] || gmap.values[src] > values[dst]) {
                        values[dst] = gmap.values[src];
                        mask[dst] = true;
                    }
                }
            }
        }
        LateralPlane {
            nx,
            ny,
            values,
            mask,
        }
    }

    pub fn index(&self, [i, j]: [usize; 2]) -> usize {
        i + self.nx * j
    }
}

/// Weighted sample of g values (rad/s) over a region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GDistribution {
    /// `(g, weight)` in grid order.
    pub samples: Vec<(f64, f64)>,
    pub summary: Summary,
}

impl GDistribution {
    pub fn from_samples(samples: Vec<(f64, f64)>) -> Result<Self> {
        let summary = Summary::of(&samples)?;
        Ok(GDistribution { samples, summary })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.samples.iter().map(|s| s.1).sum()
    }

    /// Weight fraction of samples strictly below `x`.
    pub fn fraction_below(&self, x: f64) -> f64 {
        let below: f64 = self.samples.iter().filter(|s| s.0 < x).map(|s| s.1).sum();
        below / self.total_weight()
    }
}

pub fn implant_distribution(gmap: &ScalarField, region: &ImplantRegion) -> Result<GDistribution> {
    region.validate(gmap)?;
    let plane = LateralPlane::extract(gmap, region.plane);
    let [dx, dy, _] = gmap.geometry.spacing;
    let [nx, ny] = [gmap.geometry.dims[0], gmap.geometry.dims[1]];
    let r2 = 0.25 * region.diameter * region.diameter;
    let weight = dx * dy;
    let mut samples = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let idx = plane.index([i, j]);
            if !plane.mask[idx] {
                continue;
            }
            let ox = (i as f64 - region.center[0] as f64) * dx;
            let oy = (j as f64 - region.center[1] as f64) * dy;
            if ox * ox + oy * oy <= r2 {
                samples.push((plane.values[idx], weight));
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::Empty("no dielectric voxel inside the region".into()));
    }
    GDistribution::from_samples(samples)
}

/// Weighted percentiles for each `p` in `[0, 100]`.
pub fn percentile_stats(dist: &GDistribution, ps: &[f64]) -> Result<Vec<f64>> {
    let sorted = percentile::sorted(&dist.samples)?;
    ps.iter().map(|&p| percentile::at(&sorted, p)).collect()
}

/// Histogram density plus box-and-whisker fields for a violin plot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolinTable {
    pub bin_centers: Vec<f64>,
    pub bin_width: f64,
    /// Weight density per unit g; `Σ density·bin_width = 1`.
    pub density: Vec<f64>,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    /// `max(min, p25 − 1.5·IQR)`.
    pub whisker_low: f64,
    /// `min(max, p75 + 1.5·IQR)`.
    pub whisker_high: f64,
    pub min: f64,
    pub max: f64,
}

/// `n_bins` equal bins over `[min, max]`; the last bin is closed. A
/// single-valued distribution yields one bin of unit width at that value.
pub fn violin_export(dist: &GDistribution, n_bins: usize) -> Result<ViolinTable> {
    if n_bins < 2 {
        return Err(Error::invalid(
            "n_bins",
            format!("need at least 2, got {n_bins}"),
        ));
    }
    let s = &dist.summary;
    let total = dist.total_weight();
    let (bin_centers, bin_width, density) = if s.max > s.min {
        let width = (s.max - s.min) / n_bins as f64;
        let mut mass = vec![0.0; n_bins];
        for &(g, w) in &dist.samples {
            let b = (((g - s.min) / width) as usize).min(n_bins - 1);
            mass[b] += w;
        }
        let centers = (0..n_bins)
            .map(|b| s.min + (b as f64 + 0.5) * width)
            .collect();
        let density = mass.iter().map(|m| m / (total * width)).collect();
        (centers, width, density)
    } else {
        (vec![s.min], 1.0, vec![1.0])
    };
    let iqr = s.p75 - s.p25;
    Ok(ViolinTable {
        bin_centers,
        bin_width,
        density,
        p25: s.p25,
        median: s.median,
        p75: s.p75,
        whisker_low: (s.p25 - 1.5 * iqr).max(s.min),
        whisker_high: (s.p75 + 1.5 * iqr).min(s.max),
        min: s.min,
        max: s.max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub diameter: f64,
    pub median: f64,
    pub p40: f64,
    pub p60: f64,
    pub samples: usize,
}

/// Median and 40/60 band versus disk diameter, rows in input order.
pub fn median_vs_d_curve(
    gmap: &ScalarField,
    region: &ImplantRegion,
    diameters: &[f64],
) -> Result<Vec<CurveRow>> {
    if diameters.is_empty() {
        return Err(Error::Empty("diameter list".into()));
    }
    diameters
        .par_iter()
        .map(|&d| {
            let dist = implant_distribution(gmap, &region.with_diameter(d))?;
            Ok(CurveRow {
                diameter: d,
                median: dist.summary.median,
                p40: dist.summary.p40,
                p60: dist.summary.p60,
                samples: dist.len(),
            })
        })
        .collect()
}
