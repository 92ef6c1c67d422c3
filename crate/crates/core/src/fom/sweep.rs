use rayon::prelude::*;
use serde::Serialize;

use super::{
    emission_figures, g_from_mode_volume, mode_volume_from_g, DipoleSpec, FomNumerics, FomResult,
};
use crate::error::{Error, Result};
use crate::quantum::{HilbertSpec, SystemParams};

/// The swept quantity.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepAxis {
    /// Coupling rates in rad/s.
    Coupling(Vec<f64>),
    /// Mode volumes in m³; needs a dipole to map onto couplings.
    ModeVolume(Vec<f64>),
}

impl SweepAxis {
    fn len(&self) -> usize {
        match self {
            SweepAxis::Coupling(v) | SweepAxis::ModeVolume(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    /// Coupling in rad/s.
    pub g: f64,
    /// Mode volume in m³, when a dipole is known.
    pub mode_volume: Option<f64>,
    pub result: std::result::Result<FomResult, String>,
}

/// One independent evaluation per sweep point, in input order. Per-point
/// failures are recorded in the row instead of aborting the sweep.
pub fn fom_sweep(
    base: &SystemParams,
    axis: &SweepAxis,
    dipole: Option<&DipoleSpec>,
    spec: HilbertSpec,
    numerics: &FomNumerics,
) -> Result<Vec<SweepRow>> {
    if axis.len() == 0 {
        return Err(Error::invalid("sweep", "empty sweep list"));
    }
    let points: Vec<(f64, Option<f64>)> = match axis {
        SweepAxis::Coupling(gs) => gs
            .iter()
            .map(|&g| {
                let v = dipole.and_then(|d| mode_volume_from_g(g, d, base.omega).ok());
                (g, v)
            })
            .collect(),
        SweepAxis::ModeVolume(vs) => {
            let d = dipole.ok_or_else(|| {
                Error::invalid("dipole", "a mode-volume sweep needs a dipole specification")
            })?;
            vs.iter()
                .map(|&v| g_from_mode_volume(v, d, base.omega).map(|g| (g, Some(v))))
                .collect::<Result<_>>()?
        }
    };
    Ok(points
        .par_iter()
        .map(|&(g, mode_volume)| SweepRow {
            g,
            mode_volume,
            result: emission_figures(&base.with_g(g), spec, numerics).map_err(|e| e.to_string()),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::ghz_to_rad;

    #[test]
    fn empty_sweep_rejected() {
        let err = fom_sweep(
            &SystemParams::siv(1.0),
            &SweepAxis::Coupling(vec![]),
            None,
            HilbertSpec::default(),
            &FomNumerics::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn volume_sweep_needs_dipole() {
        let err = fom_sweep(
            &SystemParams::siv(1.0),
            &SweepAxis::ModeVolume(vec![1e-20]),
            None,
            HilbertSpec::default(),
            &FomNumerics::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn failing_point_does_not_abort() {
        let rows = fom_sweep(
            &SystemParams::siv(1.0),
            &SweepAxis::Coupling(vec![0.0, ghz_to_rad(5.0)]),
            Some(&DipoleSpec::siv()),
            HilbertSpec::default(),
            &FomNumerics::default(),
        )
        .unwrap();
        assert!(rows[0].result.is_err());
        assert!(rows[0].mode_volume.is_none());
        assert!(rows[1].result.is_ok());
        assert!(rows[1].mode_volume.is_some());
    }
}
