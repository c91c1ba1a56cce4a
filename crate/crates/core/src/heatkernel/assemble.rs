//! Zonal assembly of mode kernels and the ground-state transform.

use super::{KernelError, ModeKernel};
use crate::harmonic::HarmonicProfile;
use crate::quad::gauss_kronrod;
use crate::special::zonal_harmonics;
use serde::{Deserialize, Serialize};

/// Relative size of the last mode above which assembly warns.
pub const TRUNCATION_WARN: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub r: f64,
    pub rho: f64,
    pub cos_theta: f64,
    pub t: f64,
    pub p: f64,
    /// Relative magnitude of the last mode included.
    pub truncation: f64,
}

impl KernelSample {
    /// `|x - y|` by the law of cosines.
    pub fn distance(&self) -> f64 {
        (self.r * self.r + self.rho * self.rho - 2.0 * self.r * self.rho * self.cos_theta)
            .max(0.0)
            .sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct KernelSlice {
    pub samples: Vec<KernelSample>,
    /// Requested samples that could not be resolved and were left out.
    pub excluded: usize,
}

impl KernelSlice {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// `p(x, y, t) = Σ_l p_l(|x|, |y|, t) Z_l(cos θ)` from modes `0..=l_max` of one
/// source radius `|y|`.
pub fn assemble(modes: &[ModeKernel], r: f64, cos_theta: f64, t: f64) -> Result<KernelSample, KernelError> {
    let first = modes.first().ok_or(KernelError::MissingMode { l: 0, available: 0 })?;
    for (l, m) in modes.iter().enumerate() {
        if m.l != l {
            return Err(KernelError::MissingMode {
                l,
                available: modes.len(),
            });
        }
    }
    let dimension = first.dimension;
    let z = zonal_harmonics(dimension, modes.len() - 1, cos_theta);
    let mut sum = 0.0;
    let mut last = 0.0;
    for (m, zl) in modes.iter().zip(&z) {
        last = m.eval(r, t)? * zl;
        sum += last;
    }
    let truncation = (last / sum).abs();
    if truncation > TRUNCATION_WARN {
        log::warn!("truncation indicator {truncation:e} at r = {r}, cos = {cos_theta}, t = {t}; increase l_max");
    }
    Ok(KernelSample {
        r,
        rho: first.source_radius,
        cos_theta,
        t,
        p: sum,
        truncation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformedSample {
    pub r: f64,
    pub rho: f64,
    pub cos_theta: f64,
    pub t: f64,
    /// `G = p / (U(|x|) U(|y|))`
    pub g: f64,
}

pub fn ground_state_transform(slice: &KernelSlice, u: &HarmonicProfile) -> Vec<TransformedSample> {
    slice
        .samples
        .iter()
        .map(|s| TransformedSample {
            r: s.r,
            rho: s.rho,
            cos_theta: s.cos_theta,
            t: s.t,
            g: s.p / (u.eval(s.r) * u.eval(s.rho)),
        })
        .collect()
}

/// `∫ G(x, y, t) ω(y) dy = U(r)^{-1} ∫_0^∞ p_0(r, ρ, t) U(ρ) ρ^{N-1} dρ`, with
/// `p0(ρ)` the radial mode-zero kernel from `|x| = r`.
pub fn weighted_conservation<F: Fn(f64) -> f64>(p0: F, u: &HarmonicProfile, r: f64, t: f64) -> f64 {
    let n = u.dimension as f64;
    let s = t.sqrt();
    let f = |x: f64| {
        let rho = x.exp();
        p0(rho) * u.eval(rho) * rho.powf(n)
    };
    let lo = 1e-8 * r.min(s);
    let mut cuts = vec![lo, (r - 6.0 * s).max(lo), r, r + 6.0 * s, r + 40.0 * s];
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs());
    let total: f64 = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gauss_kronrod(&f, w[0].ln(), w[1].ln(), 1e-12))
        .sum();
    total / u.eval(r)
}
