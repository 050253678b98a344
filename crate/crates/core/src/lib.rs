//! Exact arithmetic for primitive closed geodesics on the modular surface:
//! hyperbolic classification, congruence filtrations, and certified
//! arithmetic progressions in the primitive length spectrum.

pub mod cli;
mod error;
pub mod exact;
pub mod filtration;
pub mod geodesics;
pub mod numeric;
pub mod progressions;
pub mod quad;
pub mod ramsey;

pub use error::Error;
