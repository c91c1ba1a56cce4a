//! Weighted ball masses and A₂ diagnostics for `ω = U²`.

use crate::error::ErrorKind;
use crate::harmonic::HarmonicProfile;
use crate::quad::{adaptive_simpson, gauss_kronrod};
use crate::special::unit_sphere_area;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance of the polar-angle quadrature.
pub const ANGLE_TOL: f64 = 1e-8;
/// Relative tolerance of the radial quadrature.
pub const RADIAL_TOL: f64 = 1e-10;
/// Distance from `±N` below which a power counts as on the A₂ boundary.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightError {
    #[error("ball B(|x| = {center}, r = {radius}) leaves the grid (outer radius {outer:e} > r_max {r_max:e})")]
    Domain {
        center: f64,
        radius: f64,
        outer: f64,
        r_max: f64,
    },
    #[error("invalid ball: center distance {center}, radius {radius}")]
    InvalidBall { center: f64, radius: f64 },
    #[error("weight is not positive at r = {0:e}")]
    NonPositive(f64),
}

impl WeightError {
    pub fn kind(&self) -> ErrorKind {
        ErrorKind::Validation
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightProfile {
    pub base: HarmonicProfile,
    /// Power of `ω` at the origin.
    pub near_zero_power: f64,
    /// Range of the local power `d ln ω / d ln r` over the tail window, when a tail
    /// fit is available.
    pub tail_power_bounds: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum A2Verdict {
    IsA2,
    NotA2,
    Inconclusive,
}

impl WeightProfile {
    pub fn new(base: HarmonicProfile) -> Result<Self, WeightError> {
        if let Some(i) = base.values.iter().position(|&u| !(u > 0.0)) {
            return Err(WeightError::NonPositive(base.grid.nodes()[i]));
        }
        let tail_power_bounds = base.tail.as_ref().map(|fit| {
            let (lo, hi) = fit.window;
            base.grid
                .nodes()
                .iter()
                .enumerate()
                .filter(|(_, &r)| r >= lo * (1.0 - 1e-9) && r <= hi * (1.0 + 1e-9))
                .map(|(i, &r)| 2.0 * r * base.derivative[i] / base.values[i])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p), b.max(p)))
        });
        Ok(Self {
            near_zero_power: 2.0 * base.near_zero_exponent,
            tail_power_bounds,
            base,
        })
    }

    pub fn dimension(&self) -> u32 {
        self.base.dimension
    }

    pub fn eval(&self, r: f64) -> f64 {
        let u = self.base.eval(r);
        u * u
    }

    /// `∫_{B(x, r)} ω` with `|x| = center`.
    pub fn ball_mass(&self, center: f64, radius: f64) -> Result<f64, WeightError> {
        self.ball_integral(center, radius, 1.0)
    }

    /// `∫_{B(x, r)} ω^power`, split into the part of the ball made of whole spheres
    /// around the origin and the part made of caps.
    fn ball_integral(&self, center: f64, radius: f64, power: f64) -> Result<f64, WeightError> {
        if !(center >= 0.0 && radius > 0.0 && center.is_finite() && radius.is_finite()) {
            return Err(WeightError::InvalidBall { center, radius });
        }
        let outer = center + radius;
        let r_max = self.base.grid.r_max();
        if outer > r_max * (1.0 + 1e-12) {
            return Err(WeightError::Domain {
                center,
                radius,
                outer,
                r_max,
            });
        }
        let n = self.dimension();
        let nf = n as f64;
        let full_area = unit_sphere_area(n);
        let cap_area = if n >= 2 { unit_sphere_area(n - 1) } else { 0.0 };
        let r_min = self.base.grid.r_min();
        let q = power * self.near_zero_power;
        let f = |rho: f64| -> f64 {
            let u = self.base.eval(rho);
            (u * u).powf(power)
        };
        // log-variable integrand: f(ρ) S(ρ) ρ
        let full = |x: f64| -> f64 {
            let rho = x.exp();
            f(rho) * full_area * rho.powf(nf)
        };
        let partial = |x: f64| -> f64 {
            let rho = x.exp();
            let c = ((rho * rho + center * center - radius * radius) / (2.0 * rho * center)).clamp(-1.0, 1.0);
            f(rho) * cap_area * cap_angle_integral(n, c) * rho.powf(nf)
        };
        let mut total = 0.0;
        let inner = radius - center;
        if inner > 0.0 {
            // whole spheres on [0, inner]
            if nf + q <= 0.0 {
                return Ok(f64::INFINITY);
            }
            let lo = r_min.min(inner);
            total += full_area * f(lo) * lo.powf(nf) / (nf + q);
            total += integrate_split(&full, lo.ln(), inner.ln(), r_min.ln());
        }
        if center > 0.0 {
            let lo = (center - radius).abs();
            if lo == 0.0 {
                // the ball touches the origin: caps on (0, 2r] behave like the full region
                let tiny = r_min.min(outer) * 1e-3;
                if nf + q <= 0.0 {
                    return Ok(f64::INFINITY);
                }
                let c0 = ((tiny * tiny) / (2.0 * tiny * center)).clamp(-1.0, 1.0);
                total += cap_area * cap_angle_integral(n, c0) * f(tiny) * tiny.powf(nf) / (nf + q);
                total += integrate_split(&partial, tiny.ln(), outer.ln(), r_min.ln());
            } else {
                total += integrate_split(&partial, lo.ln(), outer.ln(), r_min.ln());
            }
        }
        Ok(total)
    }

    /// `(⨍_E ω)(⨍_E ω^{-1})` on one ball, averages normalized by the numerically
    /// integrated volume.
    pub fn a2_ratio(&self, center: f64, radius: f64) -> Result<f64, WeightError> {
        let vol = self.ball_integral(center, radius, 0.0)?;
        let m = self.ball_integral(center, radius, 1.0)?;
        let inv = self.ball_integral(center, radius, -1.0)?;
        Ok((m / vol) * (inv / vol))
    }
}

fn integrate_split<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, split: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if split > a && split < b {
        gauss_kronrod(f, a, split, RADIAL_TOL) + gauss_kronrod(f, split, b, RADIAL_TOL)
    } else {
        gauss_kronrod(f, a, b, RADIAL_TOL)
    }
}

/// `∫_0^{ψ0} sin^{N-2} ψ dψ` with `cos ψ0 = c`.
fn cap_angle_integral(n: u32, c: f64) -> f64 {
    let psi0 = c.clamp(-1.0, 1.0).acos();
    match n {
        2 => psi0,
        3 => 1.0 - c,
        _ => adaptive_simpson(&|p: f64| p.sin().powi(n as i32 - 2), 0.0, psi0, ANGLE_TOL),
    }
}

/// Quick A₂ test from the power behaviour at both ends: `|x|^p` is A₂ on `R^N`
/// iff `-N < p < N`.
pub fn a2_quick_test(weight: &WeightProfile, dimension: u32) -> A2Verdict {
    let n = dimension as f64;
    let inside = |p: f64| p > -n + BOUNDARY_TOL && p < n - BOUNDARY_TOL;
    if !inside(weight.near_zero_power) {
        return A2Verdict::NotA2;
    }
    match weight.tail_power_bounds {
        None => A2Verdict::Inconclusive,
        Some((lo, hi)) if inside(lo) && inside(hi) => A2Verdict::IsA2,
        Some(_) => A2Verdict::NotA2,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A2Estimate {
    /// Max over evaluated balls; a lower bound for the A₂ constant.
    pub value: f64,
    pub samples: Vec<(f64, f64, f64)>,
    pub skipped: Vec<(f64, f64)>,
}

pub fn a2_constant(weight: &WeightProfile, balls: &[(f64, f64)]) -> A2Estimate {
    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    for &(c, r) in balls {
        match weight.a2_ratio(c, r) {
            Ok(v) => samples.push((c, r, v)),
            Err(e) => {
                log::warn!("skipping ball ({c}, {r}): {e}");
                skipped.push((c, r));
            }
        }
    }
    let value = samples.iter().map(|s| s.2).fold(f64::NEG_INFINITY, f64::max);
    A2Estimate { value, samples, skipped }
}
