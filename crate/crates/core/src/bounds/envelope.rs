//! Envelopes `C K(x, y, t) exp(-|x - y|² / (C t))` and their fitted constants.

use super::BoundsError;
use crate::criticality::Verdict;
use crate::harmonic::HarmonicProfile;
use crate::heatkernel::{KernelSample, KernelSlice};
use crate::potential::{exponents, PotentialSpec};
use crate::weights::WeightProfile;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    /// `C U(x) U(y) / sqrt(ω(B(x, √t)) ω(B(y, √t))) exp(-d² / (C t))`
    WeightedTwoSided,
    /// `C t^{-N/2} U(min(|x|, √t)) U(min(|y|, √t)) / U(√t)² exp(-d² / (C t))`
    GlobalPower,
    /// Same form as `GlobalPower`, for `V ≥ 0` and `U ≍ |x|^α` with `α ≥ 0`.
    Polynomial,
    /// Weighted prefactor with the rate `exp(-d² / ((4 + ε) t))`.
    WeightedGaussianRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy)]
pub struct Envelope<'a> {
    pub kind: EnvelopeKind,
    pub profile: &'a HarmonicProfile,
    pub weight: Option<&'a WeightProfile>,
    pub epsilon: f64,
}

/// Allowed mismatch between the local power of `U` at the end of the grid and its
/// power at the origin for the polynomial envelope.
const POLYNOMIAL_POWER_TOL: f64 = 1e-3;

impl<'a> Envelope<'a> {
    pub fn two_sided(weight: &'a WeightProfile) -> Self {
        Self {
            kind: EnvelopeKind::WeightedTwoSided,
            profile: &weight.base,
            weight: Some(weight),
            epsilon: 0.0,
        }
    }

    /// Requires `H ≥ 0`, and `A⁻(λ₂) > -N/2` when `H` is critical.
    pub fn global(profile: &'a HarmonicProfile, spec: &PotentialSpec, verdict: Verdict) -> Result<Self, BoundsError> {
        match verdict {
            Verdict::Supercritical => {
                return Err(BoundsError::Hypothesis("H is not nonnegative (supercritical)".into()));
            }
            Verdict::Critical => {
                let e = exponents(spec.dimension, spec.lambda2)?;
                let half = -0.5 * spec.dimension as f64;
                if e.a_minus <= half {
                    return Err(BoundsError::Hypothesis(format!(
                        "critical H needs A-(lambda2) > -N/2; A-({}) = {} <= {half}",
                        spec.lambda2, e.a_minus
                    )));
                }
            }
            Verdict::Subcritical => {}
        }
        Ok(Self {
            kind: EnvelopeKind::GlobalPower,
            profile,
            weight: None,
            epsilon: 0.0,
        })
    }

    pub fn polynomial(profile: &'a HarmonicProfile, spec: &PotentialSpec) -> Result<Self, BoundsError> {
        if !spec.is_nonnegative() {
            return Err(BoundsError::Hypothesis("polynomial envelope needs V >= 0".into()));
        }
        let alpha = profile.near_zero_exponent;
        let n = profile.values.len() - 1;
        let far = profile.grid.r_max() * profile.derivative[n] / profile.values[n];
        if alpha < -POLYNOMIAL_POWER_TOL || (far - alpha).abs() > POLYNOMIAL_POWER_TOL {
            return Err(BoundsError::Hypothesis(format!(
                "U is not comparable to |x|^alpha with alpha >= 0 (power {alpha} at 0, {far} at infinity)"
            )));
        }
        Ok(Self {
            kind: EnvelopeKind::Polynomial,
            profile,
            weight: None,
            epsilon: 0.0,
        })
    }

    pub fn gaussian_rate(weight: &'a WeightProfile, epsilon: f64) -> Result<Self, BoundsError> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(BoundsError::Invalid(format!("epsilon must be nonnegative, got {epsilon}")));
        }
        Ok(Self {
            kind: EnvelopeKind::WeightedGaussianRate,
            profile: &weight.base,
            weight: Some(weight),
            epsilon,
        })
    }

    /// `ln K(x, y, t)`: the envelope prefactor without `C`.
    pub fn ln_prefactor(&self, r: f64, rho: f64, t: f64) -> Result<f64, BoundsError> {
        if !(r > 0.0 && rho > 0.0 && t > 0.0) {
            return Err(BoundsError::Invalid(format!("need r, rho, t > 0, got ({r}, {rho}, {t})")));
        }
        let u = |x: f64| self.profile.eval(x).ln();
        let s = t.sqrt();
        match self.kind {
            EnvelopeKind::WeightedTwoSided | EnvelopeKind::WeightedGaussianRate => {
                let w = self
                    .weight
                    .ok_or_else(|| BoundsError::Invalid("weighted envelope without a weight".into()))?;
                let bx = w.ball_mass(r, s)?;
                let by = w.ball_mass(rho, s)?;
                Ok(u(r) + u(rho) - 0.5 * (bx.ln() + by.ln()))
            }
            EnvelopeKind::GlobalPower | EnvelopeKind::Polynomial => {
                let n = self.profile.dimension as f64;
                Ok(-0.5 * n * t.ln() + u(r.min(s)) + u(rho.min(s)) - 2.0 * u(s))
            }
        }
    }

    /// `ln envelope` given `ln K` and `q = |x - y|² / t`.
    fn ln_value(&self, ln_k: f64, q: f64, c: f64) -> f64 {
        let rate = match self.kind {
            EnvelopeKind::WeightedGaussianRate => 4.0 + self.epsilon,
            _ => c,
        };
        c.ln() + ln_k - q / rate
    }

    /// `ln envelope(C)` at `(|x|, |y|, cos θ, t)`.
    pub fn ln_eval(&self, r: f64, rho: f64, cos_theta: f64, t: f64, c: f64) -> Result<f64, BoundsError> {
        if !(c > 0.0) {
            return Err(BoundsError::Invalid(format!("envelope constant must be positive, got {c}")));
        }
        let d2 = (r * r + rho * rho - 2.0 * r * rho * cos_theta.clamp(-1.0, 1.0)).max(0.0);
        let ln_k = self.ln_prefactor(r, rho, t)?;
        Ok(self.ln_value(ln_k, d2 / t, c))
    }

    /// The envelope value; may underflow to zero far from the diagonal, where
    /// [`Envelope::ln_eval`] stays accurate.
    pub fn eval(&self, r: f64, rho: f64, cos_theta: f64, t: f64, c: f64) -> Result<f64, BoundsError> {
        Ok(self.ln_eval(r, rho, cos_theta, t, c)?.exp())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub min: f64,
    pub max: f64,
    pub median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub kind: EnvelopeKind,
    pub side: Side,
    pub fitted_constant: f64,
    /// The sample that pins the constant.
    pub worst_sample: KernelSample,
    /// Kernel-to-envelope ratios at the fitted constant.
    pub ratio_stats: RatioStats,
    pub samples: usize,
    pub excluded: usize,
}

struct Prepared {
    ln_p: f64,
    ln_k: f64,
    q: f64,
}

fn prepare(slice: &KernelSlice, env: &Envelope) -> Result<Vec<Prepared>, BoundsError> {
    if slice.is_empty() {
        return Err(BoundsError::Empty("kernel slice has no samples".into()));
    }
    slice
        .samples
        .iter()
        .map(|s| {
            if !(s.p > 0.0) {
                return Err(BoundsError::NonPositiveSample {
                    r: s.r,
                    rho: s.rho,
                    t: s.t,
                    p: s.p,
                });
            }
            let d = s.distance();
            Ok(Prepared {
                ln_p: s.p.ln(),
                ln_k: env.ln_prefactor(s.r, s.rho, s.t)?,
                q: d * d / s.t,
            })
        })
        .collect()
}

const FIT_MAX_ITER: usize = 400;
const FIT_REL_WIDTH: f64 = 1e-13;

/// Minimal `C` with `p ≤ envelope(C)` (upper) or maximal `C` with
/// `p ≥ envelope(C)` (lower) at every sample, by bisection in `ln C`.
pub fn fit_constant(
    slice: &KernelSlice,
    env: &Envelope,
    side: Side,
    bracket: (f64, f64),
) -> Result<FitReport, BoundsError> {
    let (c_lo, c_hi) = bracket;
    if !(c_lo > 0.0 && c_hi > c_lo && c_hi.is_finite()) {
        return Err(BoundsError::Invalid(format!("bad bracket [{c_lo}, {c_hi}]")));
    }
    let pts = prepare(slice, env)?;
    let feasible = |c: f64| -> bool {
        pts.iter().all(|s| {
            let e = env.ln_value(s.ln_k, s.q, c);
            match side {
                Side::Upper => s.ln_p <= e,
                Side::Lower => s.ln_p >= e,
            }
        })
    };
    let bracket_error = |detail: &str| BoundsError::Bracket {
        side,
        c_lo,
        c_hi,
        detail: detail.into(),
    };
    // feasible side of the bracket after bisection
    let (mut bad, mut good) = match side {
        Side::Upper => (c_lo.ln(), c_hi.ln()),
        Side::Lower => (c_hi.ln(), c_lo.ln()),
    };
    if !feasible(good.exp()) {
        return Err(bracket_error(match side {
            Side::Upper => "kernel exceeds the envelope even at the upper end",
            Side::Lower => "kernel falls below the envelope even at the lower end",
        }));
    }
    if feasible(bad.exp()) {
        return Err(bracket_error(match side {
            Side::Upper => "bound already holds at the lower end; widen the bracket downwards",
            Side::Lower => "bound still holds at the upper end; widen the bracket upwards",
        }));
    }
    for _ in 0..FIT_MAX_ITER {
        if (good - bad).abs() <= FIT_REL_WIDTH * (1.0 + good.abs()) {
            break;
        }
        let mid = 0.5 * (good + bad);
        if feasible(mid.exp()) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    let c = good.exp();
    let ratios: Vec<f64> = pts.iter().map(|s| (s.ln_p - env.ln_value(s.ln_k, s.q, c)).exp()).collect();
    let pick = match side {
        Side::Upper => ratios.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)),
        Side::Lower => ratios.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)),
    };
    let worst = pick.map(|(i, _)| i).unwrap_or(0);
    Ok(FitReport {
        kind: env.kind,
        side,
        fitted_constant: c,
        worst_sample: slice.samples[worst],
        ratio_stats: ratio_stats(&ratios),
        samples: pts.len(),
        excluded: slice.excluded,
    })
}

fn ratio_stats(ratios: &[f64]) -> RatioStats {
    let mut sorted = ratios.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    RatioStats {
        min: sorted[0],
        max: sorted[n - 1],
        median,
    }
}

/// Far-field window in `q = |x - y|² / t`; only samples with both radii `≥ √t`
/// are used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarField {
    pub q_min: f64,
    pub q_max: f64,
}

impl Default for FarField {
    fn default() -> Self {
        Self {
            q_min: 10.0,
            q_max: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    /// Least-squares slope of `-ln(p / K)` against `q`.
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_error: f64,
    pub threshold: f64,
    pub epsilon: f64,
    pub samples: usize,
    pub q_range: (f64, f64),
    pub passes: bool,
}

const FILTER_SLACK: f64 = 1e-9;

/// Measures the exponential rate of `p` in the far field and compares it with
/// `1 / (4 + ε)`. The normalizer `K` is the prefactor of `env`.
pub fn gaussian_rate(
    slice: &KernelSlice,
    env: &Envelope,
    filter: FarField,
    epsilon: f64,
) -> Result<RateReport, BoundsError> {
    if !(epsilon >= 0.0) {
        return Err(BoundsError::Invalid(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    let lo = filter.q_min * (1.0 - FILTER_SLACK);
    let hi = filter.q_max * (1.0 + FILTER_SLACK);
    let mut pts = Vec::new();
    for s in &slice.samples {
        let root = s.t.sqrt();
        let d = s.distance();
        let q = d * d / s.t;
        if q < lo || q > hi || s.r < root || s.rho < root || !(s.p > 0.0) {
            continue;
        }
        let ln_k = env.ln_prefactor(s.r, s.rho, s.t)?;
        pts.push((q, -(s.p.ln() - ln_k)));
    }
    let q_min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let q_max = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    let span = if pts.is_empty() { 0.0 } else { q_max / q_min };
    if pts.len() < 3 || span < 10.0 * (1.0 - 1e-6) {
        return Err(BoundsError::Coverage {
            found: pts.len(),
            span,
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts
        .iter()
        .map(|p| {
            let e = p.1 - intercept - slope * p.0;
            e * e
        })
        .sum();
    let slope_error = if pts.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let threshold = 1.0 / (4.0 + epsilon);
    Ok(RateReport {
        slope,
        intercept,
        slope_error,
        threshold,
        epsilon,
        samples: pts.len(),
        q_range: (q_min, q_max),
        passes: slope >= threshold,
    })
}
