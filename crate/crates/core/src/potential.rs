//! Radial potentials `V(|x|)` with inverse-square asymptotics at the origin and at
//! infinity, and the characteristic exponents of the Euler equation.

use crate::grid::RadialGrid;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Absolute tolerance for comparing a coupling against the Hardy constant.
pub const HARDY_TOL: f64 = 1e-12;

/// Margin above the Hardy constant required by [`hardy_floor`].
pub const HARDY_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PotentialError {
    #[error("supercritical inverse-square coefficient: lambda = {lambda} < {hardy} for N = {dimension}")]
    Supercritical {
        dimension: u32,
        lambda: f64,
        hardy: f64,
    },
    #[error("dimension must be at least 2, got {0}")]
    Dimension(u32),
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("asymptotic hypothesis violated {limit}: weighted residual {value:e} at r = {radius:e}")]
    AsymptoticViolation {
        limit: AsymptoticLimit,
        radius: f64,
        value: f64,
    },
    #[error("cannot add a bump to a {0} profile")]
    UnsupportedPerturbation(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticLimit {
    NearZero,
    NearInfinity,
}

impl std::fmt::Display for AsymptoticLimit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AsymptoticLimit::NearZero => write!(f, "as r -> 0"),
            AsymptoticLimit::NearInfinity => write!(f, "as r -> infinity"),
        }
    }
}

/// The Hardy constant `-(N-2)^2/4`.
pub fn hardy_constant(dimension: u32) -> f64 {
    let m = dimension as f64 - 2.0;
    -0.25 * m * m
}

/// Roots of `a^2 + (N-2) a - lambda = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub a_plus: f64,
    pub a_minus: f64,
    /// `(N-2)^2 + 4 lambda`
    pub discriminant: f64,
    /// `-a_plus`
    pub sigma: f64,
}

pub fn exponents(dimension: u32, lambda: f64) -> Result<Exponents, PotentialError> {
    if dimension < 2 {
        return Err(PotentialError::Dimension(dimension));
    }
    let hardy = hardy_constant(dimension);
    if !(lambda >= hardy - HARDY_TOL) || !lambda.is_finite() {
        return Err(PotentialError::Supercritical {
            dimension,
            lambda,
            hardy,
        });
    }
    let m = dimension as f64 - 2.0;
    if (lambda - hardy).abs() <= HARDY_TOL {
        let root = -0.5 * m;
        return Ok(Exponents {
            a_plus: root,
            a_minus: root,
            discriminant: 0.0,
            sigma: -root,
        });
    }
    let discriminant = (m * m + 4.0 * lambda).max(0.0);
    let sq = discriminant.sqrt();
    // The root of larger magnitude first; the other from the product -lambda.
    let (a_plus, a_minus) = if m + sq == 0.0 {
        (0.0, 0.0)
    } else {
        let a_minus = -0.5 * (m + sq);
        (-lambda / a_minus, a_minus)
    };
    Ok(Exponents {
        a_plus,
        a_minus,
        discriminant,
        sigma: -a_plus,
    })
}

/// Non-negative, continuous, compactly supported radial bump built from cosine
/// ramps of half-width `width` centred at `inner` and `outer`. With `inner == 0`
/// the bump covers the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub amplitude: f64,
    pub inner: f64,
    pub outer: f64,
    pub width: f64,
}

impl Bump {
    /// Mollified indicator of the ball of radius `radius`.
    pub fn ball(radius: f64, width: f64) -> Self {
        Self {
            amplitude: 1.0,
            inner: 0.0,
            outer: radius,
            width,
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.amplitude *= factor;
        self
    }

    pub fn validate(&self) -> Result<(), PotentialError> {
        let ok = self.amplitude > 0.0
            && self.width > 0.0
            && self.inner >= 0.0
            && self.outer - self.width > self.inner + if self.inner > 0.0 { self.width } else { 0.0 }
            && (self.inner == 0.0 || self.inner >= self.width);
        if ok {
            Ok(())
        } else {
            Err(PotentialError::InvalidParameter(format!("malformed bump {self:?}")))
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let down = ramp((self.outer + self.width - r) / (2.0 * self.width));
        let up = if self.inner > 0.0 {
            ramp((r - self.inner + self.width) / (2.0 * self.width))
        } else {
            1.0
        };
        self.amplitude * down * up
    }

    /// Upper end of the support.
    pub fn support_end(&self) -> f64 {
        self.outer + self.width
    }
}

fn ramp(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        0.5 * (1.0 - (PI * s).cos())
    }
}

/// The four shipped potential families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Profile {
    /// `V = 0`
    Zero,
    /// `V = lambda / r^2`
    InverseSquare { lambda: f64 },
    /// `V = (lambda1 + (lambda2 - lambda1) s(r)) / r^2` with the switch
    /// `s(r) = r^q / (1 + r^q)`.
    Blended { lambda1: f64, lambda2: f64, rate: f64 },
    /// `V = lambda / r^2 + coupling * W(r)`
    InverseSquareBump {
        lambda: f64,
        coupling: f64,
        bump: Bump,
    },
}

/// Rate of the blended switch relative to the declared decay rate; the weighted
/// residuals then decay like `r^{±1.5 theta}`.
pub const BLEND_RATE_FACTOR: f64 = 2.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub dimension: u32,
    pub lambda1: f64,
    pub lambda2: f64,
    pub theta: f64,
    pub profile: Profile,
}

impl PotentialSpec {
    /// Checks the structural invariants (dimension, Hardy bounds, `theta > 0`,
    /// finite profile parameters). Asymptotic consistency is checked separately by
    /// [`validate_asymptotics`].
    pub fn new(
        dimension: u32,
        lambda1: f64,
        lambda2: f64,
        theta: f64,
        profile: Profile,
    ) -> Result<Self, PotentialError> {
        if dimension < 2 {
            return Err(PotentialError::Dimension(dimension));
        }
        exponents(dimension, lambda1)?;
        exponents(dimension, lambda2)?;
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(PotentialError::InvalidParameter(format!("theta must be positive, got {theta}")));
        }
        match &profile {
            Profile::Zero => {}
            Profile::InverseSquare { lambda } => {
                exponents(dimension, *lambda)?;
            }
            Profile::Blended { lambda1, lambda2, rate } => {
                exponents(dimension, *lambda1)?;
                exponents(dimension, *lambda2)?;
                if !(*rate > 0.0) {
                    return Err(PotentialError::InvalidParameter(format!("blend rate must be positive, got {rate}")));
                }
            }
            Profile::InverseSquareBump { lambda, coupling, bump } => {
                exponents(dimension, *lambda)?;
                bump.validate()?;
                if !coupling.is_finite() {
                    return Err(PotentialError::InvalidParameter("non-finite coupling".into()));
                }
            }
        }
        Ok(Self {
            dimension,
            lambda1,
            lambda2,
            theta,
            profile,
        })
    }

    pub fn zero(dimension: u32) -> Result<Self, PotentialError> {
        Self::new(dimension, 0.0, 0.0, 1.0, Profile::Zero)
    }

    pub fn pure(dimension: u32, lambda: f64) -> Result<Self, PotentialError> {
        Self::new(dimension, lambda, lambda, 1.0, Profile::InverseSquare { lambda })
    }

    /// Blended profile whose switch rate is `BLEND_RATE_FACTOR * theta`.
    pub fn blended(dimension: u32, lambda1: f64, lambda2: f64, theta: f64) -> Result<Self, PotentialError> {
        Self::new(
            dimension,
            lambda1,
            lambda2,
            theta,
            Profile::Blended {
                lambda1,
                lambda2,
                rate: BLEND_RATE_FACTOR * theta,
            },
        )
    }

    /// `lambda / r^2 + coupling * W(r)`; the declared decay rate is 1, which the
    /// bump satisfies at both ends.
    pub fn with_bump(dimension: u32, lambda: f64, coupling: f64, bump: Bump) -> Result<Self, PotentialError> {
        Self::new(
            dimension,
            lambda,
            lambda,
            1.0,
            Profile::InverseSquareBump { lambda, coupling, bump },
        )
    }

    /// The Hardy constant for this dimension.
    pub fn hardy(&self) -> f64 {
        hardy_constant(self.dimension)
    }

    /// `self + coupling * bump`, available for the inverse-square families.
    pub fn perturbed(&self, coupling: f64, bump: Bump) -> Result<Self, PotentialError> {
        match &self.profile {
            Profile::Zero => Self::with_bump(self.dimension, 0.0, coupling, bump),
            Profile::InverseSquare { lambda } => Self::with_bump(self.dimension, *lambda, coupling, bump),
            Profile::InverseSquareBump {
                lambda,
                coupling: c0,
                bump: b0,
            } if *b0 == bump => Self::with_bump(self.dimension, *lambda, c0 + coupling, bump),
            Profile::InverseSquareBump { .. } => Err(PotentialError::UnsupportedPerturbation("different-bump")),
            Profile::Blended { .. } => Err(PotentialError::UnsupportedPerturbation("blended")),
        }
    }

    /// `V(r)`.
    pub fn eval(&self, r: f64) -> Result<f64, PotentialError> {
        check_radius(r)?;
        Ok(self.v(r))
    }

    /// `V(r) - lambda / r^2`.
    pub fn residual(&self, r: f64, lambda: f64) -> Result<f64, PotentialError> {
        check_radius(r)?;
        Ok(self.r2_residual(r, lambda) / (r * r))
    }

    /// `V(r)` without the radius check; callers guarantee `r > 0`.
    pub(crate) fn v(&self, r: f64) -> f64 {
        match &self.profile {
            Profile::Zero => 0.0,
            Profile::InverseSquare { lambda } => lambda / (r * r),
            Profile::Blended { lambda1, lambda2, rate } => {
                (lambda1 + (lambda2 - lambda1) * switch(r, *rate)) / (r * r)
            }
            Profile::InverseSquareBump { lambda, coupling, bump } => lambda / (r * r) + coupling * bump.eval(r),
        }
    }

    /// `r^2 V(r) - lambda`, evaluated without cancellation for the built-in families.
    pub(crate) fn r2_residual(&self, r: f64, lambda: f64) -> f64 {
        match &self.profile {
            Profile::Zero => -lambda,
            Profile::InverseSquare { lambda: l } => l - lambda,
            Profile::Blended { lambda1, lambda2, rate } => {
                let s = switch(r, *rate);
                if s < 0.5 {
                    (lambda1 - lambda) + (lambda2 - lambda1) * s
                } else {
                    (lambda2 - lambda) + (lambda1 - lambda2) * complement_switch(r, *rate)
                }
            }
            Profile::InverseSquareBump { lambda: l, coupling, bump } => (l - lambda) + coupling * bump.eval(r) * r * r,
        }
    }

    /// `r^2 V(r)`.
    pub(crate) fn r2v(&self, r: f64) -> f64 {
        self.r2_residual(r, 0.0)
    }

    /// Whether `V >= 0` everywhere (known analytically for the shipped families).
    pub fn is_nonnegative(&self) -> bool {
        match &self.profile {
            Profile::Zero => true,
            Profile::InverseSquare { lambda } => *lambda >= 0.0,
            Profile::Blended { lambda1, lambda2, .. } => *lambda1 >= 0.0 && *lambda2 >= 0.0,
            Profile::InverseSquareBump { lambda, coupling, .. } => *lambda >= 0.0 && *coupling >= 0.0,
        }
    }

    /// Upper end of the region where `V` differs from `lambda2 / r^2` by more than
    /// the asymptotic tail; used to choose fit windows.
    pub fn is_pure_near_infinity(&self, r: f64) -> bool {
        match &self.profile {
            Profile::Zero | Profile::InverseSquare { .. } => true,
            Profile::InverseSquareBump { bump, .. } => r > bump.support_end(),
            Profile::Blended { .. } => false,
        }
    }
}

fn switch(r: f64, rate: f64) -> f64 {
    let lr = rate * r.ln();
    if lr < 0.0 {
        let p = lr.exp();
        p / (1.0 + p)
    } else {
        1.0 / (1.0 + (-lr).exp())
    }
}

fn complement_switch(r: f64, rate: f64) -> f64 {
    switch(1.0 / r, rate)
}

fn check_radius(r: f64) -> Result<(), PotentialError> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(PotentialError::NonPositiveRadius(r))
    }
}

/// Probe layout for [`validate_asymptotics`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeWindows {
    /// Decades `[hi, lo]` of the near-zero probe, e.g. `(-4, -8)` for `1e-4 .. 1e-8`.
    pub near_zero_decades: (i32, i32),
    /// Decades `[lo, hi]` of the near-infinity probe.
    pub near_infinity_decades: (i32, i32),
    pub points_per_decade: usize,
}

impl Default for ProbeWindows {
    fn default() -> Self {
        Self {
            near_zero_decades: (-4, -8),
            near_infinity_decades: (4, 8),
            points_per_decade: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub tol: f64,
    /// `(r, r^{-theta} |r^2 V - lambda1|)` along a decreasing grid.
    pub near_zero: Vec<(f64, f64)>,
    /// `(r, r^{theta} |r^2 V - lambda2|)` along an increasing grid.
    pub near_infinity: Vec<(f64, f64)>,
}

/// Numerically checks the declared limits of `r^2 V` at zero and infinity with the
/// declared decay rate.
pub fn validate_asymptotics(spec: &PotentialSpec, tol: f64) -> Result<AsymptoticReport, PotentialError> {
    validate_asymptotics_with(spec, tol, &ProbeWindows::default())
}

pub fn validate_asymptotics_with(
    spec: &PotentialSpec,
    tol: f64,
    windows: &ProbeWindows,
) -> Result<AsymptoticReport, PotentialError> {
    let probe = |from: i32, to: i32| -> Vec<f64> {
        let steps = ((to - from).unsigned_abs() as usize) * windows.points_per_decade;
        let dir = if to >= from { 1.0 } else { -1.0 };
        (0..=steps)
            .map(|k| 10f64.powf(from as f64 + dir * k as f64 / windows.points_per_decade as f64))
            .collect()
    };
    let near_zero: Vec<(f64, f64)> = probe(windows.near_zero_decades.0, windows.near_zero_decades.1)
        .into_iter()
        .map(|r| (r, r.powf(-spec.theta) * spec.r2_residual(r, spec.lambda1).abs()))
        .collect();
    let near_infinity: Vec<(f64, f64)> = probe(windows.near_infinity_decades.0, windows.near_infinity_decades.1)
        .into_iter()
        .map(|r| (r, r.powf(spec.theta) * spec.r2_residual(r, spec.lambda2).abs()))
        .collect();
    check_decay(&near_zero, tol, AsymptoticLimit::NearZero)?;
    check_decay(&near_infinity, tol, AsymptoticLimit::NearInfinity)?;
    Ok(AsymptoticReport {
        tol,
        near_zero,
        near_infinity,
    })
}

fn check_decay(seq: &[(f64, f64)], tol: f64, limit: AsymptoticLimit) -> Result<(), PotentialError> {
    let (r_last, last) = *seq.last().expect("probe grid is non-empty");
    let first = seq[0].1;
    let non_finite = seq.iter().find(|(_, v)| !v.is_finite());
    if let Some(&(radius, value)) = non_finite {
        return Err(PotentialError::AsymptoticViolation { limit, radius, value });
    }
    // decreasing trend: never rises materially above the running minimum
    let mut running = f64::INFINITY;
    for &(radius, value) in seq {
        if value > running * (1.0 + 1e-9) + 1e-300 && value > tol {
            return Err(PotentialError::AsymptoticViolation { limit, radius, value });
        }
        running = running.min(value);
    }
    if last > tol || (last > first && last > 0.0) {
        return Err(PotentialError::AsymptoticViolation {
            limit,
            radius: r_last,
            value: last,
        });
    }
    Ok(())
}

/// Sufficient certificate of subcriticality: `inf r^2 V > lambda_*` with a
/// positive margin on the grid. `false` is inconclusive.
pub fn hardy_floor(spec: &PotentialSpec, grid: &RadialGrid) -> bool {
    let inf = grid
        .nodes()
        .iter()
        .map(|&r| spec.r2v(r))
        .fold(f64::INFINITY, f64::min);
    inf > spec.hardy() + HARDY_MARGIN
}
