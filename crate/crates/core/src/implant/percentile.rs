//! Weighted percentiles.
//!
//! Samples are sorted by value (stable, so ties keep grid order). Sample `i`
//! sits at cumulative position `c_i = (W_{i−1} + w_i/2) / W`, where `W_{i−1}`
//! is the weight of all earlier samples and `W` the total. The `p`-th
//! percentile interpolates linearly in `c` and clamps to the extreme samples
//! outside `[c_0, c_{n−1}]`. With equal weights this is the Hazen rule, which
//! is then evaluated on integer ranks (`p/100·n − 1/2`) so that, for
//! example, the median of an odd-sized sample is exactly its middle element.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub min: f64,
    pub p25: f64,
    pub p40: f64,
    pub median: f64,
    pub p60: f64,
    pub p75: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(samples: &[(f64, f64)]) -> Result<Self> {
        let s = sorted(samples)?;
        Ok(Summary {
            min: s.values[0],
            p25: at(&s, 25.0)?,
            p40: at(&s, 40.0)?,
            median: at(&s, 50.0)?,
            p60: at(&s, 60.0)?,
            p75: at(&s, 75.0)?,
            max: s.values[s.values.len() - 1],
        })
    }
}

pub(crate) struct Sorted {
    values: Vec<f64>,
    positions: Vec<f64>,
    equal_weights: bool,
}

pub(crate) fn sorted(samples: &[(f64, f64)]) -> Result<Sorted> {
    if samples.is_empty() {
        return Err(Error::Empty("distribution has no samples".into()));
    }
    if samples
        .iter()
        .any(|&(g, w)| !g.is_finite() || !(w >= 0.0 && w.is_finite()))
    {
        return Err(Error::invalid(
            "samples",
            "values must be finite, weights finite and >= 0",
        ));
    }
    let mut order: Vec<&(f64, f64)> = samples.iter().filter(|s| s.1 > 0.0).collect();
    if order.is_empty() {
        return Err(Error::invalid("samples", "total weight must be > 0"));
    }
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let equal_weights = order.iter().all(|s| s.1 == order[0].1);
    let total: f64 = order.iter().map(|s| s.1).sum();
    let mut before = 0.0;
    let mut positions = Vec::with_capacity(order.len());
    for s in &order {
        positions.push((before + 0.5 * s.1) / total);
        before += s.1;
    }
    Ok(Sorted {
        values: order.iter().map(|s| s.0).collect(),
        positions,
        equal_weights,
    })
}

pub(crate) fn at(s: &Sorted, p: f64) -> Result<f64> {
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::invalid(
            "percentile",
            format!("must lie in [0, 100], got {p}"),
        ));
    }
    let q = p / 100.0;
    let last = s.values.len() - 1;
    if s.equal_weights {
        let rank = q * s.values.len() as f64 - 0.5;
        if rank <= 0.0 {
            return Ok(s.values[0]);
        }
        if rank >= last as f64 {
            return Ok(s.values[last]);
        }
        let lo = rank.floor() as usize;
        let t = rank - lo as f64;
        return Ok(if t == 0.0 {
            s.values[lo]
        } else {
            s.values[lo] + t * (s.values[lo + 1] - s.values[lo])
        });
    }
    if q <= s.positions[0] {
        return Ok(s.values[0]);
    }
    if q >= s.positions[last] {
        return Ok(s.values[last]);
    }
    let hi = s.positions.partition_point(|&c| c < q);
    let lo = hi - 1;
    let t = (q - s.positions[lo]) / (s.positions[hi] - s.positions[lo]);
    Ok(s.values[lo] + t * (s.values[hi] - s.values[lo]))
}

/// Single weighted percentile of `(value, weight)` pairs.
pub fn weighted_percentile(samples: &[(f64, f64)], p: f64) -> Result<f64> {
    at(&sorted(samples)?, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sample() {
        for p in [0.0, 13.0, 50.0, 100.0] {
            assert_eq!(weighted_percentile(&[(7.5, 2.0)], p).unwrap(), 7.5);
        }
    }

    #[test]
    fn two_equal_weights_midpoint() {
        let s = [(3.0, 1.0), (1.0, 1.0)];
        assert_eq!(weighted_percentile(&s, 50.0).unwrap(), 2.0);
        assert_eq!(weighted_percentile(&s, 0.0).unwrap(), 1.0);
        assert_eq!(weighted_percentile(&s, 100.0).unwrap(), 3.0);
    }

    #[test]
    fn heavy_sample_dominates() {
        let s = [(1.0, 1.0), (2.0, 8.0), (3.0, 1.0)];
        assert_eq!(weighted_percentile(&s, 50.0).unwrap(), 2.0);
        let p10 = weighted_percentile(&s, 10.0).unwrap();
        assert!((p10 - (1.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(weighted_percentile(&[], 50.0).is_err());
        assert!(weighted_percentile(&[(1.0, 1.0)], 101.0).is_err());
        assert!(weighted_percentile(&[(1.0, 0.0)], 50.0).is_err());
        assert!(weighted_percentile(&[(f64::NAN, 1.0)], 50.0).is_err());
    }

    #[test]
    fn monotone_summary() {
        let samples: Vec<(f64, f64)> = (0..37)
            .map(|i| (((i * 17) % 37) as f64, 1.0 + (i % 3) as f64))
            .collect();
        let s = Summary::of(&samples).unwrap();
        let chain = [s.min, s.p25, s.p40, s.median, s.p60, s.p75, s.max];
        assert!(chain.windows(2).all(|w| w[0] <= w[1]));
    }
}
