//! Subcritical / critical / supercritical classification and the coupling
//! threshold of a compactly supported well.

use crate::error::ErrorKind;
use crate::harmonic::{fit_tail, harmonic_profile, positivity_scan, HarmonicConfig, HarmonicError, HarmonicProfile, TailFit};
use crate::potential::{Bump, PotentialError, PotentialSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Required dominance of one tail branch over the other at `r_max`.
pub const SEPARATION: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriticalityError {
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("unclassifiable at this r_max = {r_max:e}: tail residual {residual:e} exceeds {threshold:e}; enlarge the domain")]
    Unclassifiable { r_max: f64, residual: f64, threshold: f64 },
    #[error("bracket [{mu_lo}, {mu_hi}] does not straddle the threshold (zero found at both ends: {lo_has_zero}/{hi_has_zero})")]
    Bracket {
        mu_lo: f64,
        mu_hi: f64,
        lo_has_zero: bool,
        hi_has_zero: bool,
    },
    #[error("zero-crossing predicate is not monotone in mu near {mu}")]
    NonMonotone { mu: f64 },
    #[error("invalid threshold search parameter: {0}")]
    InvalidParameter(String),
}

impl CriticalityError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            CriticalityError::Harmonic(e) => e.kind(),
            CriticalityError::Unclassifiable { .. } | CriticalityError::NonMonotone { .. } => ErrorKind::Convergence,
            _ => ErrorKind::Validation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Subcritical,
    Critical,
    Supercritical,
}

/// Asymptotic regime of `U` at infinity: `r^{A+}` (a), `r^{A-}` (b),
/// `r^{-(N-2)/2} log r` (c), `r^{-(N-2)/2}` (d).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    A,
    B,
    C,
    D,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    Tail(TailFit),
    FirstZero(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityReport {
    pub verdict: Verdict,
    pub evidence: Evidence,
    pub case_label: CaseLabel,
    pub r_max: f64,
}

pub fn classify_operator(spec: &PotentialSpec, cfg: &HarmonicConfig) -> Result<CriticalityReport, CriticalityError> {
    let profile = harmonic_profile(spec, cfg)?;
    classify_profile(&profile, spec, cfg)
}

pub fn classify_profile(
    profile: &HarmonicProfile,
    spec: &PotentialSpec,
    cfg: &HarmonicConfig,
) -> Result<CriticalityReport, CriticalityError> {
    let r_max = profile.grid.r_max();
    if let Some(r0) = positivity_scan(profile) {
        return Ok(CriticalityReport {
            verdict: Verdict::Supercritical,
            evidence: Evidence::FirstZero(r0),
            case_label: CaseLabel::None,
            r_max,
        });
    }
    let fit = fit_tail(profile, spec, cfg.window())?;
    if !(fit.residual <= cfg.tail_threshold) {
        return Err(CriticalityError::Unclassifiable {
            r_max,
            residual: fit.residual,
            threshold: cfg.tail_threshold,
        });
    }
    let plus = fit.c1.abs() * fit.basis_plus(r_max).abs();
    let minus = fit.c2.abs() * fit.basis_minus(r_max).abs();
    let subcritical = plus > SEPARATION * minus;
    let (verdict, case_label) = match (subcritical, fit.log_basis) {
        (true, false) => (Verdict::Subcritical, CaseLabel::A),
        (false, false) => (Verdict::Critical, CaseLabel::B),
        (true, true) => (Verdict::Subcritical, CaseLabel::C),
        (false, true) => (Verdict::Critical, CaseLabel::D),
    };
    Ok(CriticalityReport {
        verdict,
        evidence: Evidence::Tail(fit),
        case_label,
        r_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuStarResult {
    pub mu_star: f64,
    pub bracket: (f64, f64),
    pub bracket_width: f64,
    pub iterations: usize,
    pub verdicts_at_bracket: (CriticalityReport, CriticalityReport),
    /// Every evaluated `(mu, has_zero)` in evaluation order.
    pub trace: Vec<(f64, bool)>,
}

fn has_zero(spec: &PotentialSpec, bump: Bump, mu: f64, cfg: &HarmonicConfig) -> Result<bool, CriticalityError> {
    let perturbed = spec.perturbed(-mu, bump)?;
    Ok(positivity_scan(&harmonic_profile(&perturbed, cfg)?).is_some())
}

/// Bisection for the coupling at which `spec - mu W` first loses positivity.
pub fn find_mu_star(
    spec: &PotentialSpec,
    bump: Bump,
    bracket: (f64, f64),
    tol: f64,
    cfg: &HarmonicConfig,
) -> Result<MuStarResult, CriticalityError> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi && tol > 0.0) {
        return Err(CriticalityError::InvalidParameter(format!(
            "need mu_lo < mu_hi and tol > 0, got [{lo}, {hi}], tol {tol}"
        )));
    }
    bump.validate()?;
    let mut trace = Vec::new();
    let lo_zero = has_zero(spec, bump, lo, cfg)?;
    let hi_zero = has_zero(spec, bump, hi, cfg)?;
    trace.push((lo, lo_zero));
    trace.push((hi, hi_zero));
    if lo_zero || !hi_zero {
        return Err(CriticalityError::Bracket {
            mu_lo: lo,
            mu_hi: hi,
            lo_has_zero: lo_zero,
            hi_has_zero: hi_zero,
        });
    }
    let mut iterations = 0;
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        let z = has_zero(spec, bump, mid, cfg)?;
        trace.push((mid, z));
        iterations += 1;
        if z {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    check_monotone(&trace)?;
    let below = classify_operator(&spec.perturbed(-lo, bump)?, cfg)?;
    let above = classify_operator(&spec.perturbed(-hi, bump)?, cfg)?;
    log::info!("mu* in [{lo}, {hi}] after {iterations} bisections");
    Ok(MuStarResult {
        mu_star: 0.5 * (lo + hi),
        bracket: (lo, hi),
        bracket_width: hi - lo,
        iterations,
        verdicts_at_bracket: (below, above),
        trace,
    })
}

fn check_monotone(trace: &[(f64, bool)]) -> Result<(), CriticalityError> {
    let mut sorted = trace.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in sorted.windows(2) {
        if w[0].1 && !w[1].1 {
            return Err(CriticalityError::NonMonotone { mu: w[1].0 });
        }
    }
    Ok(())
}
