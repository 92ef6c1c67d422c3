//! Two-time correlations by the quantum regression theorem:
//!
//! G(t, τ) = tr[left · e^{Lτ}(right · ρ(t))]

use num_complex::Complex64;

use super::integrate::{evolve_with, propagate, EvolveOptions};
use super::liouvillian::{unvec, vec_of, Superoperator};
use super::operators::Operator;
use super::state::{trace_product, DensityMatrix};
use crate::error::{Error, Result};

/// `values[i][j] = G(t[i], tau[j])`.
#[derive(Debug, Clone)]
pub struct CorrGrid {
    pub t: Vec<f64>,
    pub tau: Vec<f64>,
    pub values: Vec<Vec<Complex64>>,
}

impl CorrGrid {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i][j]
    }
}

pub fn two_time_correlation(
    l: &Superoperator,
    rho0: &DensityMatrix,
    left: &Operator,
    right: &Operator,
    t_grid: &[f64],
    tau_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<CorrGrid> {
    for (name, grid) in [("t_grid", t_grid), ("tau_grid", tau_grid)] {
        if grid.first() != Some(&0.0) {
            return Err(Error::invalid(name, "grid must start at 0"));
        }
    }
    for op in [left, right] {
        if op.dim() != l.dim() {
            return Err(Error::DimensionMismatch {
                expected: l.dim(),
                found: op.dim(),
            });
        }
    }
    let traj = evolve_with(l, rho0, t_grid, opts)?;
    let mut values = Vec::with_capacity(t_grid.len());
    for rho in &traj.states {
        let x0 = right.matrix() * rho.matrix();
        let row = propagate(l, &vec_of(&x0), tau_grid, opts)?
            .iter()
            .map(|v| trace_product(left.matrix(), &unvec(v, l.dim())))
            .collect::<Result<Vec<_>>>()?;
        values.push(row);
    }
    Ok(CorrGrid {
        t: t_grid.to_vec(),
        tau: tau_grid.to_vec(),
        values,
    })
}
