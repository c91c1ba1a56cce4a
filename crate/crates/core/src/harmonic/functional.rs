//! The functional `F[U](r) = U(r) ∫_0^r s^{1-N} U(s)^{-2} ∫_0^s τ^{N-1} U(τ)^2 dτ ds`
//! and finite-difference residuals of the radial equation.

use super::{HarmonicError, HarmonicProfile};
use crate::grid::RadialGrid;
use crate::potential::PotentialSpec;
use crate::quad::log_mean_step;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalProfile {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub derivative: Vec<f64>,
}

pub fn f_of_u(profile: &HarmonicProfile) -> Result<FunctionalProfile, HarmonicError> {
    let grid = &profile.grid;
    let r = grid.nodes();
    let u = &profile.values;
    if let Some(i) = u.iter().position(|&v| !(v > 0.0)) {
        return Err(HarmonicError::NonPositive { radius: r[i] });
    }
    let n = profile.dimension as f64;
    let a = profile.near_zero_exponent;
    let m = n + 2.0 * a;
    if !(m > 0.0) {
        return Err(HarmonicError::NonIntegrable { exponent: a });
    }
    let h = grid.log_step();
    let r0 = r[0];
    // closures of both integrals over (0, r_min] under U = U(r_min) (r / r_min)^a
    let inner_f: Vec<f64> = (0..r.len()).map(|i| r[i].powf(n) * u[i] * u[i]).collect();
    let mut inner = vec![u[0] * u[0] * r0.powf(n) / m; r.len()];
    for i in 1..r.len() {
        inner[i] = inner[i - 1] + log_mean_step(inner_f[i - 1], inner_f[i], h);
    }
    let outer_f: Vec<f64> = (0..r.len())
        .map(|i| r[i].powf(2.0 - n) * inner[i] / (u[i] * u[i]))
        .collect();
    let mut outer = vec![r0 * r0 / (2.0 * m); r.len()];
    for i in 1..r.len() {
        outer[i] = outer[i - 1] + log_mean_step(outer_f[i - 1], outer_f[i], h);
    }
    let values: Vec<f64> = (0..r.len()).map(|i| u[i] * outer[i]).collect();
    let derivative: Vec<f64> = (0..r.len())
        .map(|i| profile.derivative[i] * outer[i] + u[i] * outer_f[i] / r[i])
        .collect();
    Ok(FunctionalProfile {
        grid: grid.clone(),
        values,
        derivative,
    })
}

/// Centered-difference residual of `f'' + (N-1)/r f' - V f - source` at interior
/// nodes, relative to `scale` at each node. Returns `(r_i, residual_i)`.
pub fn radial_residual(
    grid: &RadialGrid,
    f: &[f64],
    spec: &PotentialSpec,
    source: Option<&[f64]>,
    scale: &[f64],
) -> Vec<(f64, f64)> {
    let h = grid.log_step();
    let r = grid.nodes();
    let m = spec.dimension as f64 - 2.0;
    (1..r.len() - 1)
        .map(|i| {
            let fxx = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
            let fx = (f[i + 1] - f[i - 1]) / (2.0 * h);
            let lhs = (fxx + m * fx - spec.r2v(r[i]) * f[i]) / (r[i] * r[i]);
            let src = source.map_or(0.0, |s| s[i]);
            (r[i], (lhs - src) / scale[i].abs())
        })
        .collect()
}

/// Max relative ODE residual of `U` over nodes inside `range`.
pub fn ode_residual(profile: &HarmonicProfile, spec: &PotentialSpec, range: (f64, f64)) -> f64 {
    radial_residual(&profile.grid, &profile.values, spec, None, &profile.values_over_r2())
        .into_iter()
        .filter(|(r, _)| *r >= range.0 && *r <= range.1)
        .map(|(_, e)| e.abs())
        .fold(0.0, f64::max)
}
