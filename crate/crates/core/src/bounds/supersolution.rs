//! Discrete check of `∂_t w ≥ Δw - V w` for `w = ζ(s) [U - κ s^{-1} F[U]]`.

use super::{BoundsError, Zeta};
use crate::harmonic::{FunctionalProfile, HarmonicProfile};
use crate::potential::PotentialSpec;
use serde::{Deserialize, Serialize};

const RICHARDSON_SAFETY: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupersolutionRegion {
    pub r_range: (f64, f64),
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupersolutionReport {
    /// Minimum of the residual divided by `ζ(s) U / s`.
    pub min_residual: f64,
    pub argmin: (f64, f64),
    /// Discretization error bound from comparing steps `h` and `2h`.
    pub tol_disc: f64,
    pub passes: bool,
    pub points: usize,
    /// Grid points where `w ≤ 0`.
    pub nonpositive_w: usize,
    pub first_nonpositive: Option<(f64, f64)>,
}

/// Residual of the supersolution inequality on the grid nodes of `u` inside
/// `region.r_range` at each time in `region.times`: radial Laplacian by centered
/// differences in `ln r`, `∂_t` from the closed form of `ζ`.
pub fn verify_supersolution(
    u: &HarmonicProfile,
    fu: &FunctionalProfile,
    zeta: Zeta,
    kappa: f64,
    spec: &PotentialSpec,
    region: &SupersolutionRegion,
) -> Result<SupersolutionReport, BoundsError> {
    if fu.values.len() != u.values.len() || fu.grid.r_min() != u.grid.r_min() {
        return Err(BoundsError::Invalid("F[U] must live on the grid of U".into()));
    }
    if !(kappa > 0.0) {
        return Err(BoundsError::Invalid(format!("kappa must be positive, got {kappa}")));
    }
    if region.times.iter().any(|&s| !(s > 0.0)) {
        return Err(BoundsError::Invalid("times must be positive".into()));
    }
    let r = u.grid.nodes();
    let h = u.grid.log_step();
    let m = u.dimension as f64 - 2.0;
    let lap = |f: &[f64], i: usize, k: usize| -> f64 {
        let kh = k as f64 * h;
        let fxx = (f[i + k] - 2.0 * f[i] + f[i - k]) / (kh * kh);
        let fx = (f[i + k] - f[i - k]) / (2.0 * kh);
        (fxx + m * fx - spec.r2v(r[i]) * f[i]) / (r[i] * r[i])
    };
    let nodes: Vec<usize> = (2..r.len().saturating_sub(2))
        .filter(|&i| r[i] >= region.r_range.0 && r[i] <= region.r_range.1)
        .collect();
    if nodes.is_empty() || region.times.is_empty() {
        return Err(BoundsError::Empty("verification region contains no interior grid points".into()));
    }
    let mut min_residual = f64::INFINITY;
    let mut argmin = (0.0, 0.0);
    let mut err: f64 = 0.0;
    let mut nonpositive_w = 0;
    let mut first_nonpositive = None;
    for &s in &region.times {
        let g = zeta.log_derivative(s);
        for &i in &nodes {
            let (ui, fi) = (u.values[i], fu.values[i]);
            let ratio = kappa * fi / (s * ui);
            let normalized = |k: usize| {
                g * (1.0 - ratio) + ratio - s * lap(&u.values, i, k) / ui + kappa * lap(&fu.values, i, k) / ui
            };
            let fine = normalized(1);
            let coarse = normalized(2);
            err = err.max((fine - coarse).abs() / 3.0);
            if fine < min_residual {
                min_residual = fine;
                argmin = (r[i], s);
            }
            if ui - kappa * fi / s <= 0.0 {
                nonpositive_w += 1;
                first_nonpositive.get_or_insert((r[i], s));
            }
        }
    }
    if nonpositive_w > 0 {
        log::warn!("w <= 0 at {nonpositive_w} points of the verification region");
    }
    let tol_disc = RICHARDSON_SAFETY * err;
    Ok(SupersolutionReport {
        min_residual,
        argmin,
        tol_disc,
        passes: min_residual >= -tol_disc,
        points: nodes.len() * region.times.len(),
        nonpositive_w,
        first_nonpositive,
    })
}
