//! Two-term fit of the solution at infinity.

use super::{HarmonicError, HarmonicProfile};
use crate::potential::{exponents, PotentialSpec};
use serde::{Deserialize, Serialize};

/// Minimal spread of the ratio of the two basis functions over the window.
pub const MIN_BASIS_SPREAD: f64 = 2.5;

/// `U ≈ c1 b⁺ + c2 b⁻` on the window, with `b± = r^{A±(λ2)}`, or
/// `b⁺ = r^{-(N-2)/2} ln r`, `b⁻ = r^{-(N-2)/2}` when `λ2` is the Hardy constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub c1: f64,
    pub c2: f64,
    /// Relative least-squares residual on the window.
    pub residual: f64,
    pub window: (f64, f64),
    pub log_basis: bool,
    pub a_plus: f64,
    pub a_minus: f64,
}

impl TailFit {
    pub fn basis_plus(&self, r: f64) -> f64 {
        if self.log_basis {
            r.powf(self.a_plus) * r.ln()
        } else {
            r.powf(self.a_plus)
        }
    }

    pub fn basis_minus(&self, r: f64) -> f64 {
        r.powf(self.a_minus)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.c1 * self.basis_plus(r) + self.c2 * self.basis_minus(r)
    }
}

pub fn fit_tail(profile: &HarmonicProfile, spec: &PotentialSpec, window: (f64, f64)) -> Result<TailFit, HarmonicError> {
    let (lo, hi) = window;
    let grid = &profile.grid;
    let slack = 1.0 + 1e-9;
    if !(lo > 0.0 && hi > lo && lo * slack >= grid.r_min() && hi <= grid.r_max() * slack) {
        return Err(HarmonicError::WindowOutsideGrid {
            r_lo: lo,
            r_hi: hi,
            r_min: grid.r_min(),
            r_max: grid.r_max(),
        });
    }
    let ex = exponents(spec.dimension, spec.lambda2)?;
    let log_basis = ex.discriminant == 0.0;
    let sd = ex.discriminant.sqrt();
    if !log_basis {
        let spread = (hi / lo).powf(sd);
        if spread < MIN_BASIS_SPREAD {
            return Err(HarmonicError::Conditioning {
                r_lo: lo,
                r_hi: hi,
                spread,
            });
        }
    }
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for (&r, &u) in grid.nodes().iter().zip(&profile.values) {
        if r * slack < lo || r > hi * slack {
            continue;
        }
        let y = u / r.powf(ex.a_plus);
        let t = if log_basis { r.ln() } else { r.powf(-sd) };
        ts.push(t);
        ys.push(y);
    }
    if ts.len() < 3 {
        return Err(HarmonicError::Conditioning {
            r_lo: lo,
            r_hi: hi,
            spread: 0.0,
        });
    }
    let n = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let stt: f64 = ts.iter().map(|t| (t - tm).powi(2)).sum();
    let sty: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
    let slope = sty / stt;
    let intercept = ym - slope * tm;
    let ss_res: f64 = ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| (y - intercept - slope * t).powi(2))
        .sum();
    let ss: f64 = ys.iter().map(|y| y * y).sum();
    let residual = if ss > 0.0 { (ss_res / ss).sqrt() } else { f64::INFINITY };
    let (c1, c2) = if log_basis { (slope, intercept) } else { (intercept, slope) };
    Ok(TailFit {
        c1,
        c2,
        residual,
        window,
        log_basis,
        a_plus: ex.a_plus,
        a_minus: ex.a_minus,
    })
}
