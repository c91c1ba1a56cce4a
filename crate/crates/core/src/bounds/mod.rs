//! Envelope formulas for heat kernels, constant fitting, the far-field Gaussian
//! rate, the `ζ`/`κ` relation and the supersolution check, and the CKN exponent.

mod envelope;
mod supersolution;
#[cfg(test)]
mod tests;

pub use envelope::{
    fit_constant, gaussian_rate, Envelope, EnvelopeKind, FarField, FitReport, RateReport, RatioStats, Side,
};
pub use supersolution::{verify_supersolution, SupersolutionRegion, SupersolutionReport};

use crate::criticality::Verdict;
use crate::error::ErrorKind;
use crate::potential::{exponents, PotentialError, PotentialSpec, HARDY_TOL};
use crate::weights::WeightError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("{side:?} fit: bracket [{c_lo:e}, {c_hi:e}] does not straddle feasibility ({detail})")]
    Bracket {
        side: Side,
        c_lo: f64,
        c_hi: f64,
        detail: String,
    },
    #[error("far-field coverage: {found} samples spanning a factor {span:.3} in |x-y|^2/t (need >= 3 samples over a decade)")]
    Coverage { found: usize, span: f64 },
    #[error("zeta precondition: {0}")]
    Precondition(String),
    #[error("CKN exponent undefined: need N > 2 + 2 alpha, got N = {dimension}, alpha = {alpha}")]
    Domain { dimension: u32, alpha: f64 },
    #[error("hypothesis not met: {0}")]
    Hypothesis(String),
    #[error("kernel sample not positive: p = {p:e} at r = {r}, rho = {rho}, t = {t}")]
    NonPositiveSample { r: f64, rho: f64, t: f64, p: f64 },
    #[error("empty input: {0}")]
    Empty(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

impl BoundsError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            BoundsError::Bracket { .. } => ErrorKind::Convergence,
            BoundsError::Weight(e) => e.kind(),
            _ => ErrorKind::Validation,
        }
    }
}

/// `p₀ = 2(N - 2α) / (N - 2 - 2α)`, defined for `N > 2 + 2α`.
pub fn ckn_p0(dimension: u32, alpha: f64) -> Result<f64, BoundsError> {
    let n = dimension as f64;
    if !alpha.is_finite() || n <= 2.0 + 2.0 * alpha {
        return Err(BoundsError::Domain { dimension, alpha });
    }
    Ok(2.0 * (n - 2.0 * alpha) / (n - 2.0 - 2.0 * alpha))
}

/// `ζ(s) = s^{γ₁} [log(c + s)]^{γ₂}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zeta {
    pub gamma1: f64,
    pub gamma2: f64,
    pub c: f64,
}

impl Zeta {
    pub fn new(gamma1: f64, gamma2: f64, c: f64) -> Result<Self, BoundsError> {
        if !(c > 1.0 && c.is_finite() && gamma1.is_finite() && gamma2.is_finite()) {
            return Err(BoundsError::Invalid(format!(
                "zeta needs finite exponents and c > 1, got ({gamma1}, {gamma2}, {c})"
            )));
        }
        Ok(Self { gamma1, gamma2, c })
    }

    /// The choice used for the upper bound at the origin: `d = A⁺(λ₂)` for
    /// subcritical `H`, `A⁻(λ₂)` for critical `H`, and an extra `[log(2 + s)]^{-1}`
    /// when `λ₂ = λ*` and `H` is subcritical.
    pub fn for_operator(spec: &PotentialSpec, verdict: Verdict) -> Result<Self, BoundsError> {
        let e = exponents(spec.dimension, spec.lambda2)?;
        let at_hardy = (spec.lambda2 - spec.hardy()).abs() <= HARDY_TOL;
        let (d, gamma2) = match verdict {
            Verdict::Subcritical => (e.a_plus, if at_hardy { -1.0 } else { 0.0 }),
            Verdict::Critical => (e.a_minus, 0.0),
            Verdict::Supercritical => {
                return Err(BoundsError::Hypothesis("H is supercritical; no positive harmonic function".into()))
            }
        };
        Self::new(-0.5 * (spec.dimension as f64 + d), gamma2, 2.0)
    }

    pub fn eval(&self, s: f64) -> f64 {
        s.powf(self.gamma1) * (self.c + s).ln().powf(self.gamma2)
    }

    /// `s ζ'(s) / ζ(s)`.
    pub fn log_derivative(&self, s: f64) -> f64 {
        self.gamma1 + self.gamma2 * s / ((self.c + s) * (self.c + s).ln())
    }

    pub fn derivative(&self, s: f64) -> f64 {
        self.eval(s) * self.log_derivative(s) / s
    }
}

/// Upper end of the probe grid for `zeta_kappa`.
const PROBE_S_MAX: f64 = 1e12;
const PROBE_PER_DECADE: usize = 64;

/// `κ = sup_{s > T} [-s ζ'(s) / ζ(s)]`, after checking on a probe grid that `ζ`
/// decreases on `(T, ∞)`.
pub fn zeta_kappa(gamma1: f64, gamma2: f64, c: f64, t_start: f64) -> Result<f64, BoundsError> {
    let zeta = Zeta::new(gamma1, gamma2, c)?;
    if !(0.0..PROBE_S_MAX).contains(&t_start) {
        return Err(BoundsError::Invalid(format!("T must lie in [0, {PROBE_S_MAX:e}), got {t_start}")));
    }
    let phi = |s: f64| -zeta.log_derivative(s);
    let s0 = if t_start > 0.0 { t_start } else { 1e-12 };
    let decades = (PROBE_S_MAX / s0).log10();
    let m = (decades * PROBE_PER_DECADE as f64).ceil() as usize;
    let probe: Vec<f64> = (0..=m).map(|k| s0 * 10f64.powf(decades * k as f64 / m as f64)).collect();
    let values: Vec<f64> = probe.iter().map(|&s| phi(s)).collect();
    let at_infinity = -gamma1;
    if let Some(k) = values.iter().position(|&v| !(v > 0.0)) {
        return Err(BoundsError::Precondition(format!(
            "zeta is not decreasing near s = {:e} (-s zeta'/zeta = {:e})",
            probe[k], values[k]
        )));
    }
    if at_infinity < 0.0 {
        return Err(BoundsError::Precondition(format!(
            "zeta eventually increases (-s zeta'/zeta -> {at_infinity:e})"
        )));
    }
    let (k, &best) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("probe grid is not empty");
    let mut kappa = best.max(at_infinity).max(phi(s0));
    if k > 0 && k < m {
        let refined = golden_max(&|x: f64| phi(x.exp()), probe[k - 1].ln(), probe[k + 1].ln());
        kappa = kappa.max(refined);
    }
    Ok(kappa)
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if b - a < 1e-12 * (1.0 + a.abs()) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}
