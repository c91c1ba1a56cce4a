//! Heat kernel of `∂_t u = Δu - V(|x|) u` by spherical-harmonic mode
//! decomposition: radial mode solver, Bessel oracle, zonal assembly.

mod assemble;
mod oracle;
mod solver;

pub use assemble::{
    assemble, ground_state_transform, weighted_conservation, KernelSample, KernelSlice, TransformedSample,
    TRUNCATION_WARN,
};
pub use oracle::{bessel_order, oracle_kernel, oracle_mode, OracleValue, MAX_CANCELLATION};
pub use solver::{solve_mode, solve_modes, Boundary, ModeDiagnostics, ModeKernel, SolverConfig};

use crate::error::ErrorKind;
use crate::grid::GridError;
use crate::potential::{PotentialError, PotentialSpec};
use crate::weights::WeightError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error("invalid kernel sample r = {r}, rho = {rho}, t = {t}")]
    InvalidSample { r: f64, rho: f64, t: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("mode {l}: near-origin exponent {exponent} <= -N/2, kernel not locally integrable")]
    NonIntegrableMode { l: usize, exponent: f64 },
    #[error("truncation error: mass {outflow:e} left through r_max = {r_max} before t = {t}; enlarge r_max")]
    Truncation { outflow: f64, r_max: f64, t: f64 },
    #[error("mode {l} missing from the kernel set (have {available})")]
    MissingMode { l: usize, available: usize },
    #[error("radius {r} outside the solver grid [{r_min}, {r_max}]")]
    OutsideGrid { r: f64, r_min: f64, r_max: f64 },
    #[error("time {t} was not requested from the solver")]
    UnknownTime { t: f64 },
}

impl KernelError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            KernelError::Truncation { .. } => ErrorKind::Convergence,
            _ => ErrorKind::Validation,
        }
    }
}

/// Effective radial potential `V(r) + l(l+N-2)/r²` of mode `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModePotential {
    pub spec: PotentialSpec,
    pub l: usize,
    /// `l(l+N-2)`
    pub barrier: f64,
}

impl ModePotential {
    pub fn eval(&self, r: f64) -> f64 {
        self.spec.v(r) + self.barrier / (r * r)
    }

    /// Inverse-square coefficients `(λ1 + ω_l, λ2 + ω_l)` of the mode potential.
    pub fn coefficients(&self) -> (f64, f64) {
        (self.spec.lambda1 + self.barrier, self.spec.lambda2 + self.barrier)
    }
}

pub fn mode_potential(spec: &PotentialSpec, l: usize) -> ModePotential {
    let lf = l as f64;
    ModePotential {
        spec: spec.clone(),
        l,
        barrier: lf * (lf + spec.dimension as f64 - 2.0),
    }
}
