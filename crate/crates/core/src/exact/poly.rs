use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::ExactError;

/// Monic polynomial with integer coefficients, highest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MonicPoly {
    coeffs: Vec<BigInt>,
}

impl MonicPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self, ExactError> {
        match coeffs.first() {
            Some(c) if c.is_one() => Ok(MonicPoly { coeffs }),
            _ => Err(ExactError::NotMonic),
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `z^k`.
    pub fn coeff(&self, k: usize) -> &BigInt {
        &self.coeffs[self.degree() - k]
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::one)
    }
}

impl fmt::Display for MonicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let deg = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            let power = deg - i;
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            let show_coeff = !mag.is_one() || power == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match power {
                0 => {}
                1 => f.write_str("z")?,
                _ => write!(f, "z^{power}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Values that can be fed to [`q_poly`]: elements of a commutative ring
/// containing the integers, with a test for membership in `Z`.
pub trait SymmetricInput:
    Clone + Add<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn one_like(&self) -> Self;
    fn zero_like(&self) -> Self;
    /// `Some(n)` when the value is the rational integer `n`.
    fn as_integer(&self) -> Option<BigInt>;
    fn describe(&self) -> String;
}

impl SymmetricInput for BigInt {
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn as_integer(&self) -> Option<BigInt> {
        Some(self.clone())
    }
    fn describe(&self) -> String {
        self.to_string()
    }
}

/// `prod (z - x_i)` expanded: the coefficient of `z^{n-k}` is `(-1)^k e_k(x)`.
/// Fails when some coefficient is not a rational integer.
pub fn q_poly<T: SymmetricInput>(xs: &[T]) -> Result<MonicPoly, ExactError> {
    let first = xs.first().ok_or(ExactError::EmptyInput)?;
    let mut elem = vec![first.zero_like(); xs.len() + 1];
    elem[0] = first.one_like();
    for x in xs {
        for k in (1..=xs.len()).rev() {
            elem[k] = elem[k].clone() + elem[k - 1].clone() * x.clone();
        }
    }
    let mut coeffs = Vec::with_capacity(elem.len());
    for (k, e) in elem.into_iter().enumerate() {
        let signed = if k % 2 == 1 { -e } else { e };
        match signed.as_integer() {
            Some(c) => coeffs.push(c),
            None => {
                return Err(ExactError::NotIntegral {
                    power: xs.len() - k,
                    value: signed.describe(),
                })
            }
        }
    }
    MonicPoly::new(coeffs)
}
