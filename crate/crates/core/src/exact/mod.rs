//! Exact matrix arithmetic over `Z` and `Z/p^r`, characteristic polynomials
//! and the symmetric-function polynomial `Q`.

pub mod arith;
mod matrix;
mod poly;
mod residue;

use thiserror::Error;

pub use matrix::{IntMatrix, MAX_DIM};
pub use poly::{q_poly, MonicPoly, SymmetricInput};
pub use residue::{PrimePower, ResidueMatrix, MAX_MODULUS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("dimension mismatch: {left}x{left} against {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("unsupported dimension {0} (must be between 2 and 8)")]
    InvalidDimension(usize),
    #[error("malformed matrix: {0}")]
    Parse(String),
    #[error("invalid modulus {0}: must be a prime power >= 2")]
    InvalidModulus(u64),
    #[error("modulus {p}^{r} exceeds the supported range")]
    ModulusTooLarge { p: u64, r: u32 },
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("no inputs")]
    EmptyInput,
    #[error("not in O_K[z]: coefficient of z^{power} is {value}")]
    NotIntegral { power: usize, value: String },
}
