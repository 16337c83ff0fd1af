//! Certified bounds on stationary moments and distributions of chemical
//! master equations.

pub mod birthdeath;
pub mod lyapunov;
pub mod model;
pub mod moments;
pub mod polyalg;
pub mod ssa;
pub mod statebounds;

pub use cmebound_opt as opt;

pub type Rational = num_rational::BigRational;
pub type Poly = polyalg::Polynomial<Rational>;
pub type RatFn = polyalg::RationalFunction<Rational>;

use birthdeath::BirthDeathError;
use model::ModelError;
use moments::MomentError;
use polyalg::PolyError;
use ssa::SsaError;
use statebounds::StateBoundsError;

/// Coarse error classes; the command line maps them to exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input parameters, files or options.
    Config,
    /// A solver failed or reported infeasibility.
    Solver,
    /// The network violates a modelling premise.
    Model,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Config => 2,
            ErrorClass::Solver => 3,
            ErrorClass::Model => 4,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Moments(#[from] MomentError),
    #[error(transparent)]
    BirthDeath(#[from] BirthDeathError),
    #[error(transparent)]
    StateBounds(#[from] StateBoundsError),
    #[error(transparent)]
    Ssa(#[from] SsaError),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Solver(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use ErrorClass::*;
        match self {
            Error::Model(_) => Model,
            Error::Poly(_) | Error::Moments(_) | Error::Config(_) | Error::Io(_) => Config,
            Error::Solver(_) => Solver,
            Error::BirthDeath(e) => match e {
                BirthDeathError::ZeroDeathRate { .. } | BirthDeathError::BadRate { .. } | BirthDeathError::NotSummable { .. } => Model,
                _ => Config,
            },
            Error::StateBounds(e) => match e {
                StateBoundsError::Model(_) => Model,
                StateBoundsError::Infeasible { .. } | StateBoundsError::Solver { .. } => Solver,
                _ => Config,
            },
            Error::Ssa(e) => match e {
                SsaError::Model(_) | SsaError::BadRate { .. } => Model,
                SsaError::EventCap { .. } => Solver,
                _ => Config,
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.class().exit_code()
    }
}
