//! The distinguished positive solution `U` of `U'' + (N-1)/r U' - V U = 0`,
//! normalized by `U ~ r^{A+(λ1)}` at the origin.

mod functional;
mod outward;
mod picard;
mod tail;

pub use functional::{f_of_u, ode_residual, radial_residual, FunctionalProfile};
pub use outward::{extend_outward, MAX_SUBSTEPS, OVERFLOW_LIMIT};
pub use picard::{picard_near_zero, PartialProfile, PicardDiagnostics, CONTRACTION_LIMIT};
pub use tail::{fit_tail, TailFit, MIN_BASIS_SPREAD};

use crate::error::ErrorKind;
use crate::grid::{interp_log_x, lagrange4, GridError, RadialGrid};
use crate::potential::{PotentialError, PotentialSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarmonicError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("r_cut too large: Picard increments not contracting (ratio {ratio:.3} at iteration {iteration}, r_cut = {r_cut:e})")]
    RCutTooLarge { r_cut: f64, iteration: usize, ratio: f64 },
    #[error("Picard iteration did not converge in {max_iter} iterations (last increment {last_increment:e})")]
    PicardMaxIter { max_iter: usize, last_increment: f64 },
    #[error("solution overflowed before r_max (blow-up near r = {radius:e})")]
    Overflow { radius: f64 },
    #[error("step size underflow near r = {radius:e} (stiff region)")]
    Stiffness { radius: f64 },
    #[error("tail basis ill-conditioned on [{r_lo:e}, {r_hi:e}] (basis ratio spread {spread:.3}); widen the window")]
    Conditioning { r_lo: f64, r_hi: f64, spread: f64 },
    #[error("window [{r_lo:e}, {r_hi:e}] outside grid [{r_min:e}, {r_max:e}]")]
    WindowOutsideGrid { r_lo: f64, r_hi: f64, r_min: f64, r_max: f64 },
    #[error("profile is not positive at r = {radius:e}")]
    NonPositive { radius: f64 },
    #[error("r^(N-1) U^2 is not integrable at the origin for exponent {exponent}")]
    NonIntegrable { exponent: f64 },
}

impl HarmonicError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            HarmonicError::RCutTooLarge { .. }
            | HarmonicError::PicardMaxIter { .. }
            | HarmonicError::Overflow { .. }
            | HarmonicError::Stiffness { .. } => ErrorKind::Convergence,
            _ => ErrorKind::Validation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HarmonicConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub points_per_decade: usize,
    pub r_cut: f64,
    pub picard_tol: f64,
    pub max_iter: usize,
    pub outward_tol: f64,
    /// Defaults to `[r_max / 100, r_max]`.
    pub tail_window: Option<(f64, f64)>,
    /// Largest accepted relative tail residual.
    pub tail_threshold: f64,
}

impl Default for HarmonicConfig {
    fn default() -> Self {
        Self {
            r_min: 1e-6,
            r_max: 1e6,
            points_per_decade: 64,
            r_cut: 1e-2,
            picard_tol: 1e-14,
            max_iter: 200,
            outward_tol: 1e-10,
            tail_window: None,
            tail_threshold: 1e-3,
        }
    }
}

impl HarmonicConfig {
    pub fn window(&self) -> (f64, f64) {
        self.tail_window.unwrap_or((self.r_max / 100.0, self.r_max))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicDiagnostics {
    pub picard: PicardDiagnostics,
    pub outward_substeps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicProfile {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    pub derivative: Vec<f64>,
    pub dimension: u32,
    pub near_zero_exponent: f64,
    pub correction_exponent: Option<f64>,
    pub tail: Option<TailFit>,
    pub diagnostics: Option<HarmonicDiagnostics>,
}

/// Runs the full pipeline: Picard near the origin (shrinking `r_cut` tenfold while
/// the iteration fails to contract), outward continuation, tail fit.
pub fn harmonic_profile(spec: &PotentialSpec, cfg: &HarmonicConfig) -> Result<HarmonicProfile, HarmonicError> {
    let grid = RadialGrid::log_spaced(cfg.r_min, cfg.r_max, cfg.points_per_decade)?;
    let mut r_cut = cfg.r_cut.min(cfg.r_max);
    let partial = loop {
        match picard_near_zero(spec, &grid, r_cut, cfg.picard_tol, cfg.max_iter) {
            Err(HarmonicError::RCutTooLarge { .. }) if r_cut / 10.0 > cfg.r_min * 10.0 => {
                log::info!("Picard not contracting at r_cut = {r_cut:e}; retrying with r_cut / 10");
                r_cut /= 10.0;
            }
            other => break other?,
        }
    };
    let mut profile = continue_profile(&partial, spec, cfg.r_max, cfg.outward_tol)?;
    match fit_tail(&profile, spec, cfg.window()) {
        Ok(fit) => profile.tail = Some(fit),
        Err(e) => log::warn!("tail fit skipped: {e}"),
    }
    Ok(profile)
}

/// Outward continuation of a partial profile into a full profile (no tail fit).
pub fn continue_profile(
    partial: &PartialProfile,
    spec: &PotentialSpec,
    r_max: f64,
    tol: f64,
) -> Result<HarmonicProfile, HarmonicError> {
    let (grid, values, derivative, substeps) = extend_outward(partial, spec, r_max, tol)?;
    let correction_exponent = if partial.correction.is_empty() {
        None
    } else {
        picard::correction_exponent(&partial.grid, &partial.correction)
    };
    let near_zero_exponent = if partial.correction.is_empty() {
        partial.exponent
    } else {
        near_zero_slope(&grid, &values, partial.exponent)
    };
    Ok(HarmonicProfile {
        grid,
        values,
        derivative,
        dimension: spec.dimension,
        near_zero_exponent,
        correction_exponent,
        tail: None,
        diagnostics: Some(HarmonicDiagnostics {
            picard: partial.diagnostics.clone(),
            outward_substeps: substeps,
        }),
    })
}

/// Least-squares slope of `ln U` against `ln r` over the first nodes.
fn near_zero_slope(grid: &RadialGrid, values: &[f64], fallback: f64) -> f64 {
    let take = 16.min(values.len());
    let pts: Vec<(f64, f64)> = grid.nodes()[..take]
        .iter()
        .zip(&values[..take])
        .filter(|(_, u)| **u > 0.0)
        .map(|(r, u)| (r.ln(), u.ln()))
        .collect();
    if pts.len() < 3 {
        fallback
    } else {
        slope(&pts)
    }
}

pub(crate) fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let xm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - xm).powi(2)).sum();
    sxy / sxx
}

impl HarmonicProfile {
    /// `r^a` on `grid`.
    pub fn power_law(dimension: u32, a: f64, grid: &RadialGrid) -> Self {
        let values = grid.nodes().iter().map(|r| r.powf(a)).collect();
        let derivative = grid.nodes().iter().map(|r| a * r.powf(a - 1.0)).collect();
        Self {
            grid: grid.clone(),
            values,
            derivative,
            dimension,
            near_zero_exponent: a,
            correction_exponent: None,
            tail: None,
            diagnostics: None,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    /// `U(r)`: cubic interpolation of `ln U` (or `U` if it changes sign) in `ln r`,
    /// power-law extrapolation outside the grid.
    pub fn eval(&self, r: f64) -> f64 {
        let g = &self.grid;
        if r < g.r_min() {
            return self.values[0] * (r / g.r_min()).powf(self.near_zero_exponent);
        }
        if r > g.r_max() {
            let n = self.values.len() - 1;
            let k = g.r_max() * self.derivative[n] / self.values[n];
            return self.values[n] * (r / g.r_max()).powf(k);
        }
        let n = g.len();
        if n < 4 {
            return interp_log_x(g, &self.values, r);
        }
        let s = g.locate(r).saturating_sub(1).min(n - 4);
        let x = (r / g.nodes()[s]).ln() / g.log_step();
        let w = &self.values[s..s + 4];
        if w.iter().all(|&v| v > 0.0) {
            lagrange4(&[w[0].ln(), w[1].ln(), w[2].ln(), w[3].ln()], x).exp()
        } else {
            lagrange4(w, x)
        }
    }

    /// `|U| / r^2` per node; the natural scale of the ODE residual.
    pub fn values_over_r2(&self) -> Vec<f64> {
        self.grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(r, u)| u.abs() / (r * r))
            .collect()
    }
}

/// `ŵ(s) = s^{2-N} w(1/s)` on the reflected grid.
pub fn kelvin(profile: &HarmonicProfile) -> HarmonicProfile {
    let n = profile.dimension as f64;
    let grid = profile.grid.reflected();
    let len = grid.len();
    let mut values = Vec::with_capacity(len);
    let mut derivative = Vec::with_capacity(len);
    for (j, &s) in grid.nodes().iter().enumerate() {
        let i = len - 1 - j;
        let w = profile.values[i];
        let dw = profile.derivative[i];
        values.push(s.powf(2.0 - n) * w);
        derivative.push((2.0 - n) * s.powf(1.0 - n) * w - s.powf(-n) * dw);
    }
    let near_zero_exponent = near_zero_slope(&grid, &values, 0.0);
    HarmonicProfile {
        grid,
        values,
        derivative,
        dimension: profile.dimension,
        near_zero_exponent,
        correction_exponent: None,
        tail: None,
        diagnostics: None,
    }
}

/// Smallest radius where `U` changes sign, refined by bisection on the cubic
/// Hermite interpolant of `(U, U')` in `ln r`.
pub fn positivity_scan(profile: &HarmonicProfile) -> Option<f64> {
    let r = profile.grid.nodes();
    let u = &profile.values;
    let i = (0..u.len() - 1).find(|&i| u[i] != 0.0 && (u[i + 1] == 0.0 || u[i].signum() != u[i + 1].signum()))?;
    if u[i + 1] == 0.0 {
        return Some(r[i + 1]);
    }
    let (x0, x1) = (r[i].ln(), r[i + 1].ln());
    let h = x1 - x0;
    let (y0, y1) = (u[i], u[i + 1]);
    let (d0, d1) = (r[i] * profile.derivative[i] * h, r[i + 1] * profile.derivative[i + 1] * h);
    let hermite = |t: f64| {
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if hermite(mid).signum() == y0.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((x0 + 0.5 * (lo + hi) * h).exp())
}
