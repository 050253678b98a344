//! Fixed-point logarithms at a requested number of decimal digits.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::quad::QuadInt;

/// Default number of digits after the decimal point for reported lengths.
pub const LENGTH_DIGITS: u32 = 50;

const GUARD_DIGITS: u32 = 12;

/// A real number `value / 10^digits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixed {
    value: BigInt,
    digits: u32,
}

impl Fixed {
    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn scaled(&self) -> &BigInt {
        &self.value
    }

    pub fn mul_u64(&self, m: u64) -> Fixed {
        Fixed {
            value: &self.value * m,
            digits: self.digits,
        }
    }

    /// Round half away from zero to fewer digits.
    pub fn round_to(&self, digits: u32) -> Fixed {
        if digits >= self.digits {
            return Fixed {
                value: &self.value * pow10(digits - self.digits),
                digits,
            };
        }
        let div = pow10(self.digits - digits);
        let half: BigInt = &div / 2;
        let mag = self.value.abs();
        let rounded: BigInt = (mag + half) / div;
        Fixed {
            value: if self.value.is_negative() { -rounded } else { rounded },
            digits,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_string().parse().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = pow10(self.digits);
        let (int, frac) = self.value.abs().div_rem(&scale);
        let sign = if self.value.is_negative() { "-" } else { "" };
        if self.digits == 0 {
            return write!(f, "{sign}{int}");
        }
        write!(f, "{sign}{int}.{:0>width$}", frac.to_string(), width = self.digits as usize)
    }
}

fn pow10(e: u32) -> BigInt {
    BigInt::from(10u32).pow(e)
}

/// `atanh(z / S)` scaled by `S`, for `0 <= z/S <= 1/3`.
fn atanh_fixed(z: &BigInt, scale: &BigInt) -> BigInt {
    let z2 = z * z / scale;
    let mut term = z.clone();
    let mut sum = BigInt::zero();
    let mut k = 1u64;
    while !term.is_zero() {
        sum += &term / k;
        term = &term * &z2 / scale;
        k += 2;
    }
    sum
}

fn ln2_fixed(scale: &BigInt) -> BigInt {
    atanh_fixed(&(scale / 3), scale) * 2
}

/// `ln(y / S)` scaled by `S`, for `y > 0`.
fn ln_fixed(y: &BigInt, scale: &BigInt) -> BigInt {
    assert!(y.is_positive(), "logarithm of a non-positive number");
    // bring y/S into [1, 2) by a power of two
    let mut k = y.bits() as i64 - scale.bits() as i64;
    let mut m = if k >= 0 { y >> k as u64 } else { y << (-k) as u64 };
    while &m < scale {
        m <<= 1;
        k -= 1;
    }
    let two_s = scale * 2;
    while m >= two_s {
        m >>= 1;
        k += 1;
    }
    let z = (&m - scale) * scale / (&m + scale);
    atanh_fixed(&z, scale) * 2 + ln2_fixed(scale) * k
}

/// Natural log of a positive real quadratic integer `(a + b sqrt(D0))/2`.
pub fn ln_quad(x: &QuadInt, digits: u32) -> Fixed {
    // enough working digits that the integer part does not eat the precision
    let int_digits = (x.a().bits().max(x.b().bits()) as f64 * std::f64::consts::LOG10_2).ceil() as u32;
    let work = digits + GUARD_DIGITS + int_digits;
    let scale = pow10(work);
    let sqrt_d = (BigInt::from(x.d0()) * &scale * &scale).sqrt();
    let y = (x.a() * &scale + x.b() * sqrt_d) / 2;
    Fixed {
        value: ln_fixed(&y, &scale),
        digits: work,
    }
    .round_to(digits + GUARD_DIGITS)
}

/// `m * 2 ln(u)` rounded to `digits` decimal places.
pub fn scaled_double_log(u: &QuadInt, m: u64, digits: u32) -> Fixed {
    let extra = (m as f64).log10().ceil() as u32 + 1;
    ln_quad(u, digits + extra).mul_u64(m.checked_mul(2).expect("multiplier below 2^63")).round_to(digits)
}

/// Natural log of a positive integer.
pub fn ln_integer(n: &BigInt, digits: u32) -> Fixed {
    let work = digits + GUARD_DIGITS;
    let scale = pow10(work);
    Fixed {
        value: ln_fixed(&(n * &scale), &scale),
        digits: work,
    }
    .round_to(digits)
}

/// Parse a decimal string such as `"1.9248"` into a [`Fixed`].
pub fn parse_fixed(s: &str) -> Option<Fixed> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() || !int.bytes().chain(frac.bytes()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let value: BigInt = format!("{int}{frac}").parse().ok()?;
    let value = if neg { -value } else { value };
    Some(Fixed {
        value,
        digits: frac.len() as u32,
    })
}

/// `|a - b|` is at most one unit in the last place of the coarser of the two.
pub fn agrees(a: &Fixed, b: &Fixed) -> bool {
    let d = a.digits.min(b.digits);
    let (ra, rb) = (a.round_to(d), b.round_to(d));
    (&ra.value - &rb.value).abs() <= BigInt::one()
}

pub fn to_f64_lossy(x: &Fixed) -> f64 {
    x.value.to_f64().unwrap_or(f64::NAN) / 10f64.powi(x.digits as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{fundamental_unit, norm_one_generator};

    // reference digits computed with mpmath at 80 digits
    const LN2: &str = "0.69314718055994530941723212145817656807550013436025525412068";
    const LN10: &str = "2.30258509299404568401799145468436420760110148862877297603333";
    const FOUR_LN_PHI: &str = "1.92484730023841378999103565369747369254073733754264";

    #[test]
    fn constants() {
        let ln2 = ln_integer(&BigInt::from(2), 50);
        assert!(agrees(&ln2, &parse_fixed(LN2).unwrap()), "{ln2}");
        let ln10 = ln_integer(&BigInt::from(10), 55);
        assert!(agrees(&ln10, &parse_fixed(LN10).unwrap()), "{ln10}");
        assert_eq!(ln_integer(&BigInt::from(1), 20).to_string(), "0.00000000000000000000");
    }

    #[test]
    fn golden_ratio_length() {
        let u = norm_one_generator(5).unwrap();
        let len = scaled_double_log(u.as_int(), 1, 50);
        assert_eq!(len.to_string(), FOUR_LN_PHI);
        let phi = fundamental_unit(5).unwrap();
        let four = ln_quad(phi.as_int(), 60).mul_u64(4).round_to(50);
        assert!(agrees(&four, &len));
    }

    #[test]
    fn multiples_stay_exact() {
        let u = norm_one_generator(5).unwrap();
        let base = scaled_double_log(u.as_int(), 1, 50);
        let big = scaled_double_log(u.as_int(), 1260, 50);
        let direct = scaled_double_log(&u.as_int().pow(1260), 1, 50);
        assert!(agrees(&big, &direct));
        assert!(agrees(&big, &ln_quad(u.as_int(), 60).mul_u64(2520)));
        assert!((to_f64_lossy(&big) - 1260.0 * to_f64_lossy(&base)).abs() < 1e-9);
    }

    #[test]
    fn rounding_and_parsing() {
        let x = parse_fixed("-1.2345").unwrap();
        assert_eq!(x.round_to(2).to_string(), "-1.23");
        assert_eq!(x.round_to(3).to_string(), "-1.235");
        assert_eq!(x.round_to(6).to_string(), "-1.234500");
        assert!(parse_fixed("1.2.3").is_none());
        assert!(parse_fixed("abc").is_none());
        assert!((x.to_f64() + 1.2345).abs() < 1e-12);
    }
}
