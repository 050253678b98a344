//! Certified arithmetic progressions of primitive lengths: prime progressions,
//! lcm gluing, denominator clearing, witness construction and verification.

mod build;
mod primes;
mod verify;
mod witness;

use thiserror::Error;

use crate::exact::ExactError;
use crate::filtration::FiltrationError;
use crate::geodesics::GeodesicError;
use crate::quad::QuadError;

pub use build::{
    build_progression, build_progression_containing, clear_denominator, glue_constant,
    prime_power_family, a1_element, BuildOptions, FamilyMember,
};
pub use primes::{prime_ap_search, prime_density_report, DensityReport, PrimeAp};
pub use verify::{trace_by_recurrence, verify_witness, Check, VerificationReport};
pub use witness::{ContainsBlock, ProgressionWitness, TransferBlock, WitnessTerm};

#[derive(Debug, Error)]
pub enum ProgressionError {
    #[error("gamma is not absolutely primitive (unit exponent {0})")]
    NotAbsolutelyPrimitive(u64),
    #[error("gamma is not primitive")]
    NotPrimitive,
    #[error("no {k}-term progression of admissible primes up to {bound}")]
    NoPrimeProgression { k: usize, bound: u64 },
    #[error("{0}")]
    InvalidInput(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Geodesic(#[from] GeodesicError),
    #[error(transparent)]
    Filtration(#[from] FiltrationError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

impl ProgressionError {
    /// Whether the failure came from a search or size cap rather than bad input.
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            ProgressionError::CapExceeded(_)
                | ProgressionError::NoPrimeProgression { .. }
                | ProgressionError::Filtration(FiltrationError::CapExceeded { .. })
                | ProgressionError::Filtration(FiltrationError::NotStable { .. })
                | ProgressionError::Filtration(FiltrationError::Overflow(_))
                | ProgressionError::Filtration(FiltrationError::Exact(ExactError::ModulusTooLarge { .. }))
        )
    }
}
