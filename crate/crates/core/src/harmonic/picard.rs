//! Successive approximation of the regular solution near the origin.

use super::HarmonicError;
use crate::grid::RadialGrid;
use crate::potential::{exponents, PotentialSpec};
use crate::quad::{cumulative_log_mean, exponential_tail};
use serde::{Deserialize, Serialize};

/// Ratio of consecutive increments above which the iteration is declared
/// non-contracting.
pub const CONTRACTION_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicardDiagnostics {
    pub iterations: usize,
    /// Sup-norm of `F_{n+1} - F_n` per iteration.
    pub increments: Vec<f64>,
    pub r_cut: f64,
}

/// Solution on `[r_min, r_cut]`, ready to be continued outward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialProfile {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub derivative: Vec<f64>,
    /// Leading exponent at the origin.
    pub exponent: f64,
    /// `U / r^exponent - 1` on the grid; empty for seeded profiles.
    pub correction: Vec<f64>,
    pub diagnostics: PicardDiagnostics,
}

impl PartialProfile {
    /// Wraps externally supplied data (for instance a seed on the singular branch).
    pub fn from_seed(grid: RadialGrid, values: Vec<f64>, derivative: Vec<f64>, exponent: f64) -> Self {
        assert_eq!(grid.len(), values.len());
        assert_eq!(grid.len(), derivative.len());
        let r_cut = grid.r_max();
        Self {
            grid,
            values,
            derivative,
            exponent,
            correction: Vec::new(),
            diagnostics: PicardDiagnostics {
                iterations: 0,
                increments: Vec::new(),
                r_cut,
            },
        }
    }
}

/// Iterates `U_{n+1} = u(1 + F_n)` with
/// `F_n(r) = ∫_0^r s^{1-N} u^{-2} ∫_0^s τ^{N-1} u^2 V_{λ1} (1 + F_{n-1}) dτ ds`
/// on the part of `grid` below `r_cut`, where `u = r^{A+(λ1)}`.
pub fn picard_near_zero(
    spec: &PotentialSpec,
    grid: &RadialGrid,
    r_cut: f64,
    tol: f64,
    max_iter: usize,
) -> Result<PartialProfile, HarmonicError> {
    let grid = grid.truncated(r_cut);
    let ex = exponents(spec.dimension, spec.lambda1)?;
    let a = ex.a_plus;
    let sd = ex.discriminant.sqrt();
    let h = grid.log_step();
    let r = grid.nodes();
    let g: Vec<f64> = r.iter().map(|&x| spec.r2_residual(x, spec.lambda1)).collect();
    let up: Vec<f64> = r.iter().map(|&x| x.powf(sd)).collect();

    let mut f = vec![0.0; r.len()];
    let mut inner = vec![0.0; r.len()];
    let mut increments = Vec::new();
    let mut converged = false;
    for it in 1..=max_iter {
        let integrand: Vec<f64> = (0..r.len()).map(|i| up[i] * g[i] * (1.0 + f[i])).collect();
        inner = cumulative_log_mean(&integrand, h, exponential_tail(integrand[0], integrand[1], h));
        let outer: Vec<f64> = (0..r.len()).map(|i| inner[i] / up[i]).collect();
        let next = cumulative_log_mean(&outer, h, exponential_tail(outer[0], outer[1], h));
        let incr = next
            .iter()
            .zip(&f)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        f = next;
        increments.push(incr);
        if !incr.is_finite() {
            return Err(HarmonicError::RCutTooLarge {
                r_cut,
                iteration: it,
                ratio: f64::INFINITY,
            });
        }
        if incr <= tol {
            converged = true;
            break;
        }
        if it >= 2 {
            let prev = increments[it - 2];
            if incr > CONTRACTION_LIMIT * prev {
                return Err(HarmonicError::RCutTooLarge {
                    r_cut,
                    iteration: it,
                    ratio: incr / prev,
                });
            }
        }
    }
    if !converged {
        return Err(HarmonicError::PicardMaxIter {
            max_iter,
            last_increment: *increments.last().unwrap_or(&f64::NAN),
        });
    }

    let values: Vec<f64> = (0..r.len()).map(|i| r[i].powf(a) * (1.0 + f[i])).collect();
    // U' = r^{a-1} (a (1 + F) + dF/dx) with dF/dx = r^{-sd} I
    let derivative: Vec<f64> = (0..r.len())
        .map(|i| r[i].powf(a - 1.0) * (a * (1.0 + f[i]) + inner[i] / up[i]))
        .collect();
    log::debug!("picard converged in {} iterations on [{:e}, {:e}]", increments.len(), r[0], grid.r_max());
    Ok(PartialProfile {
        diagnostics: PicardDiagnostics {
            iterations: increments.len(),
            increments,
            r_cut: grid.r_max(),
        },
        grid,
        values,
        derivative,
        exponent: a,
        correction: f,
    })
}

/// Fitted power of `|F|` near the origin, or `None` when the correction vanishes.
pub(crate) fn correction_exponent(grid: &RadialGrid, correction: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = grid
        .nodes()
        .iter()
        .zip(correction)
        .filter(|(_, f)| f.abs() > 1e-280)
        .map(|(r, f)| (r.ln(), f.abs().ln()))
        .collect();
    if pts.len() < 3 || pts.len() * 2 < correction.len() {
        return None;
    }
    let take = (pts.len() / 2).max(3);
    Some(super::slope(&pts[..take]))
}
