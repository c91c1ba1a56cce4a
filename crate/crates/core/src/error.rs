use crate::bounds::BoundsError;
use crate::criticality::CriticalityError;
use crate::grid::GridError;
use crate::harmonic::HarmonicError;
use crate::heatkernel::KernelError;
use crate::potential::PotentialError;
use crate::weights::WeightError;
use thiserror::Error;

/// Coarse classification used by front-ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Convergence,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
    #[error(transparent)]
    Criticality(#[from] CriticalityError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io(_) => ErrorKind::Io,
            Error::Grid(_) | Error::Potential(_) => ErrorKind::Validation,
            Error::Harmonic(e) => e.kind(),
            Error::Criticality(e) => e.kind(),
            Error::Weight(e) => e.kind(),
            Error::Kernel(e) => e.kind(),
            Error::Bounds(e) => e.kind(),
        }
    }
}
