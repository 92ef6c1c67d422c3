use super::Spectrum;
use crate::error::{Error, Result};

/// σ of a Gaussian with the given full width at half maximum.
pub fn fwhm_to_sigma(fwhm: f64) -> f64 {
    fwhm / (8.0 * std::f64::consts::LN_2).sqrt()
}

/// Kernel support in standard deviations.
const KERNEL_HALF_WIDTH: f64 = 8.0;

/// Convolve a reflectivity spectrum with a Gaussian of standard deviation
/// `sigma` (rad/s). The discrete kernel is renormalized at every output point
/// over the samples that fall inside the grid, so constants are preserved up
/// to the edges.
pub fn apply_drift(spectrum: &Spectrum, sigma: f64) -> Result<Spectrum> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("drift_sigma", "must be finite and >= 0"));
    }
    if sigma == 0.0 {
        return Ok(spectrum.clone());
    }
    let x = &spectrum.probe_detunings;
    if x.len() < 2 {
        return Err(Error::invalid(
            "probe_grid",
            "need at least two points to convolve",
        ));
    }
    let spacing = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    let uniform = x
        .windows(2)
        .all(|w| ((w[1] - w[0]) - spacing).abs() <= 1e-6 * spacing);
    if !uniform || spacing <= 0.0 {
        return Err(Error::invalid(
            "probe_grid",
            "drift convolution needs a uniform grid",
        ));
    }
    if sigma < 2.0 * spacing {
        return Err(Error::GridTooCoarse { sigma, spacing });
    }
    let half = (KERNEL_HALF_WIDTH * sigma / spacing).ceil() as isize;
    let kernel: Vec<f64> = (-half..=half)
        .map(|m| {
            let d = m as f64 * spacing / sigma;
            (-0.5 * d * d).exp()
        })
        .collect();
    let n = x.len() as isize;
    let r = &spectrum.values;
    let values = (0..n)
        .map(|i| {
            let lo = (-half).max(-i);
            let hi = half.min(n - 1 - i);
            let (mut acc, mut norm) = (0.0, 0.0);
            for m in lo..=hi {
                let w = kernel[(m + half) as usize];
                acc += w * r[(i + m) as usize];
                norm += w;
            }
            acc / norm
        })
        .collect();
    Ok(Spectrum {
        probe_detunings: x.clone(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reflection::uniform_grid;

    fn spectrum(values: impl Fn(f64) -> f64) -> Spectrum {
        let x = uniform_grid(-10.0, 10.0, 401);
        let v = x.iter().map(|&d| values(d)).collect();
        Spectrum {
            probe_detunings: x,
            values: v,
        }
    }

    #[test]
    fn zero_sigma_is_identity() {
        let s = spectrum(|d| d.sin());
        assert_eq!(apply_drift(&s, 0.0).unwrap(), s);
    }

    #[test]
    fn constants_survive() {
        let s = spectrum(|_| 0.37);
        let out = apply_drift(&s, 0.5).unwrap();
        assert!(out.values.iter().all(|v| (v - 0.37).abs() < 1e-15));
    }

    #[test]
    fn coarse_grid_rejected() {
        let s = spectrum(|_| 1.0);
        assert!(matches!(
            apply_drift(&s, 0.05),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn nonuniform_grid_rejected() {
        let s = Spectrum {
            probe_detunings: vec![0.0, 1.0, 3.0],
            values: vec![1.0; 3],
        };
        assert!(apply_drift(&s, 5.0).is_err());
    }

    #[test]
    fn dip_fills_in() {
        let s = spectrum(|d| 1.0 - 1.0 / (1.0 + d * d));
        let out = apply_drift(&s, 0.5).unwrap();
        assert!(out.values[200] > s.values[200]);
    }

    #[test]
    fn fwhm_conversion() {
        assert!((fwhm_to_sigma(2.354_820_045) - 1.0).abs() < 1e-9);
    }
}
