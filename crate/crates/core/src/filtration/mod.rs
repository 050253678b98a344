//! Admissible diagonal elements, the function `n(gamma, eta^r)`, orders in
//! `SL(n, Z/p^r)` and the kernel-layer lemmas.

mod admissible;
mod kernel;
mod nfun;
mod stability;

use num_bigint::BigInt;
use thiserror::Error;

use crate::exact::ExactError;

pub(crate) use admissible::entries_divisible;
pub use admissible::{build_admissible, conjugate_product, conjugate_scaled, is_admissible, AdmissibleElement, GroupType, ScaledMatrix};
pub use kernel::{kernel_order_check, KernelMode, KernelReport};
pub use nfun::{n_of, n_of_brute, order_mod, DirectN, NFunction};
pub use stability::{stability_radius, StabilityReport, DEFAULT_STABILITY_CAP, DEFAULT_WINDOW};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiltrationError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("entry pair ({0}, {1}) is on the diagonal")]
    DiagonalPair(usize, usize),
    #[error("index pair ({k}, {k2}) out of range for dimension {n}")]
    IndexOutOfRange { k: usize, k2: usize, n: usize },
    #[error("recipe for {group} does not apply: {reason}")]
    Recipe { group: String, reason: String },
    #[error("gamma is {got}x{got} but eta acts on dimension {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("gamma must have determinant 1, got {0}")]
    NotUnimodular(BigInt),
    #[error("no j <= {cap} satisfies the congruence conditions")]
    CapExceeded { cap: u64 },
    #[error("n-values did not stabilize for r <= {cap}")]
    NotStable { cap: u32 },
    #[error("stability cap must be at least 2, got {0}")]
    InvalidCap(u32),
    #[error("exhaustive kernel check needs n = 2, p <= 3, i <= 2")]
    ExhaustiveTooLarge,
    #[error("{0} overflows 64 bits")]
    Overflow(&'static str),
    #[error(transparent)]
    Exact(#[from] ExactError),
}
