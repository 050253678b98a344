//! Units of real quadratic maximal orders.
//!
//! Elements of the maximal order of `Q(sqrt(D0))` are written `(a + b sqrt(D0)) / 2`
//! with `a = b * D0 (mod 2)`; this covers both `D0 = 1 (mod 4)` and
//! `D0 = 0 (mod 4)` uniformly. Fundamental units come from the continued
//! fraction expansion of the order's generator.

use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::exact::arith::{exact_sqrt, fundamental_part, is_fundamental_discriminant};
use crate::exact::SymmetricInput;

/// Trial division bound when extracting the field of `t^2 - 4`; exact for
/// `|t|` up to roughly `2.8e9`.
pub const DISCRIMINANT_TRIAL_LIMIT: u64 = 2_000_000;

const MAX_CF_STEPS: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("{0} is not a positive fundamental discriminant")]
    NotFundamental(i64),
    #[error("({a} + {b}*sqrt({d0}))/2 is not in the maximal order")]
    NotIntegral { d0: u64, a: BigInt, b: BigInt },
    #[error("element has norm {0}, expected +1 or -1")]
    NotAUnit(BigInt),
    #[error("unit must have norm +1")]
    NotNormOne,
    #[error("unit must exceed 1 in the real embedding")]
    NotGreaterThanOne,
    #[error("unit is not a power of the norm-one generator for D0 = {0}")]
    NotAPower(u64),
    #[error("trace {0} does not give a hyperbolic eigenvalue")]
    NotHyperbolicTrace(BigInt),
    #[error("trace {0} is too large to factor t^2 - 4; supply the field discriminant")]
    TraceTooLarge(BigInt),
    #[error("t^2 - 4 for trace {t} is not a square multiple of {d0}")]
    FieldMismatch { t: BigInt, d0: u64 },
    #[error("k must be positive")]
    ZeroRoot,
    #[error("continued fraction expansion did not close")]
    ExpansionCap,
}

/// Element `(a + b sqrt(d0)) / 2` of a real quadratic maximal order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt {
    d0: u64,
    a: BigInt,
    b: BigInt,
}

impl QuadInt {
    pub fn new(d0: u64, a: BigInt, b: BigInt) -> Result<Self, QuadError> {
        if (&a - &b * BigInt::from(d0)).is_odd() {
            return Err(QuadError::NotIntegral { d0, a, b });
        }
        Ok(QuadInt { d0, a, b })
    }

    pub fn from_integer(d0: u64, n: BigInt) -> Self {
        QuadInt {
            d0,
            a: n * 2,
            b: BigInt::zero(),
        }
    }

    pub fn d0(&self) -> u64 {
        self.d0
    }

    /// Coefficient `a` of `(a + b sqrt(D0))/2`; equals the trace.
    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn trace(&self) -> &BigInt {
        &self.a
    }

    pub fn norm(&self) -> BigInt {
        (&self.a * &self.a - &self.b * &self.b * BigInt::from(self.d0)) / 4
    }

    pub fn conj(&self) -> QuadInt {
        QuadInt {
            d0: self.d0,
            a: self.a.clone(),
            b: -&self.b,
        }
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a == BigInt::from(2)
    }

    pub fn pow(&self, e: u64) -> QuadInt {
        let mut acc = QuadInt::from_integer(self.d0, BigInt::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// Natural log of the absolute value of the real embedding, in `f64`.
    pub fn ln_abs(&self) -> f64 {
        let d = (self.d0 as f64).sqrt();
        if self.a.bits() < 900 && self.b.bits() < 900 {
            let v = (self.a.to_f64().unwrap() + self.b.to_f64().unwrap() * d) / 2.0;
            return v.abs().ln();
        }
        // Large elements: the dominant term decides.
        let a_ln = ln_big(&self.a);
        let b_ln = ln_big(&self.b) + d.ln();
        let (hi, lo) = if a_ln >= b_ln { (a_ln, b_ln) } else { (b_ln, a_ln) };
        let same_sign = self.a.sign() == self.b.sign() || self.b.is_zero() || self.a.is_zero();
        let ratio = (lo - hi).exp();
        let combined = if same_sign { hi + ratio.ln_1p() } else { hi + (-ratio).ln_1p() };
        combined - std::f64::consts::LN_2
    }
}

/// `ln |x|` for a big integer, accurate to double precision.
pub(crate) fn ln_big(x: &BigInt) -> f64 {
    let mag = x.magnitude();
    let bits = mag.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return mag.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (mag >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

impl Add for QuadInt {
    type Output = QuadInt;
    fn add(self, rhs: QuadInt) -> QuadInt {
        debug_assert_eq!(self.d0, rhs.d0);
        QuadInt {
            d0: self.d0,
            a: self.a + rhs.a,
            b: self.b + rhs.b,
        }
    }
}

impl Mul for QuadInt {
    type Output = QuadInt;
    fn mul(self, rhs: QuadInt) -> QuadInt {
        debug_assert_eq!(self.d0, rhs.d0);
        let d = BigInt::from(self.d0);
        let a = (&self.a * &rhs.a + &self.b * &rhs.b * d) / 2;
        let b = (&self.a * &rhs.b + &self.b * &rhs.a) / 2;
        QuadInt { d0: self.d0, a, b }
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt {
            d0: self.d0,
            a: -self.a,
            b: -self.b,
        }
    }
}

impl SymmetricInput for QuadInt {
    fn one_like(&self) -> Self {
        QuadInt::from_integer(self.d0, BigInt::one())
    }
    fn zero_like(&self) -> Self {
        QuadInt::from_integer(self.d0, BigInt::zero())
    }
    fn as_integer(&self) -> Option<BigInt> {
        self.b.is_zero().then(|| &self.a / 2)
    }
    fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_negative() {
            write!(f, "({} - {}*sqrt({}))/2", self.a, -&self.b, self.d0)
        } else {
            write!(f, "({} + {}*sqrt({}))/2", self.a, self.b, self.d0)
        }
    }
}

/// A unit (norm `+1` or `-1`) of a real quadratic maximal order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadUnit(QuadInt);

impl QuadUnit {
    pub fn new(d0: u64, a: BigInt, b: BigInt) -> Result<Self, QuadError> {
        QuadUnit::from_int(QuadInt::new(d0, a, b)?)
    }

    pub fn from_int(x: QuadInt) -> Result<Self, QuadError> {
        let n = x.norm();
        if n.abs().is_one() {
            Ok(QuadUnit(x))
        } else {
            Err(QuadError::NotAUnit(n))
        }
    }

    /// The eigenvalue `> 1` of a hyperbolic element with trace `t`, i.e.
    /// `(|t| + f sqrt(D0))/2` where `t^2 - 4 = f^2 D0`. Requires the field.
    pub fn from_trace_in_field(t: &BigInt, d0: u64) -> Result<Self, QuadError> {
        let t_abs = t.abs();
        if t_abs <= BigInt::from(2) {
            return Err(QuadError::NotHyperbolicTrace(t.clone()));
        }
        let disc: BigInt = &t_abs * &t_abs - BigInt::from(4);
        let (q, r) = disc.div_rem(&BigInt::from(d0));
        let f = if r.is_zero() { exact_sqrt(&q) } else { None };
        let f = f.ok_or_else(|| QuadError::FieldMismatch { t: t.clone(), d0 })?;
        QuadUnit::new(d0, t_abs, f)
    }

    /// As [`QuadUnit::from_trace_in_field`], determining the field by
    /// factoring `t^2 - 4`.
    pub fn from_trace(t: &BigInt) -> Result<Self, QuadError> {
        let t_abs = t.abs();
        if t_abs <= BigInt::from(2) {
            return Err(QuadError::NotHyperbolicTrace(t.clone()));
        }
        let disc: BigUint = (&t_abs * &t_abs - BigInt::from(4)).to_biguint().expect("positive");
        let (d0, _) = fundamental_part(&disc, DISCRIMINANT_TRIAL_LIMIT)
            .ok_or_else(|| QuadError::TraceTooLarge(t.clone()))?;
        QuadUnit::from_trace_in_field(t, d0)
    }

    pub fn as_int(&self) -> &QuadInt {
        &self.0
    }

    pub fn d0(&self) -> u64 {
        self.0.d0
    }

    pub fn trace(&self) -> &BigInt {
        &self.0.a
    }

    pub fn norm(&self) -> i8 {
        if self.0.norm().is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn inverse(&self) -> QuadUnit {
        let c = self.0.conj();
        QuadUnit(if self.norm() == 1 { c } else { -c })
    }

    pub fn mul(&self, other: &QuadUnit) -> QuadUnit {
        QuadUnit(self.0.clone() * other.0.clone())
    }

    pub fn pow(&self, e: u64) -> QuadUnit {
        QuadUnit(self.0.pow(e))
    }

    /// `true` for units `> 1`; for a unit this is exactly `a > 0 and b > 0`.
    pub fn exceeds_one(&self) -> bool {
        self.0.a.is_positive() && self.0.b.is_positive()
    }

    pub fn ln(&self) -> f64 {
        self.0.ln_abs()
    }
}

impl fmt::Display for QuadUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Serialize, Deserialize)]
struct QuadUnitRepr {
    d0: u64,
    a: String,
    b: String,
}

impl Serialize for QuadUnit {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        QuadUnitRepr {
            d0: self.0.d0,
            a: self.0.a.to_string(),
            b: self.0.b.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QuadUnit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = QuadUnitRepr::deserialize(deserializer)?;
        let a = r.a.parse().map_err(de::Error::custom)?;
        let b = r.b.parse().map_err(de::Error::custom)?;
        QuadUnit::new(r.d0, a, b).map_err(de::Error::custom)
    }
}

fn check_discriminant(d0: i64) -> Result<u64, QuadError> {
    if is_fundamental_discriminant(d0) {
        Ok(d0 as u64)
    } else {
        Err(QuadError::NotFundamental(d0))
    }
}

/// Smallest unit `> 1` of the maximal order of `Q(sqrt(d0))`.
///
/// Expands `x = (-1 + sqrt(D0))/2` (or `sqrt(D0/4)`) as a continued fraction;
/// the first convergent `s/y` whose associated element `s + y*omega` is a unit
/// gives the fundamental unit.
pub fn fundamental_unit(d0: i64) -> Result<QuadUnit, QuadError> {
    let d0 = check_discriminant(d0)?;
    let one_mod_four = d0 % 4 == 1;
    let radicand = BigInt::from(if one_mod_four { d0 } else { d0 / 4 });
    let root = radicand.sqrt();
    let (mut p, mut q) = if one_mod_four {
        (BigInt::from(-1), BigInt::from(2))
    } else {
        (BigInt::zero(), BigInt::one())
    };
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let big_d0 = BigInt::from(d0);
    for _ in 0..MAX_CF_STEPS {
        debug_assert!(q.is_positive());
        let digit = (&p + &root).div_floor(&q);
        let h_next = &digit * &h + &h_prev;
        let k_next = &digit * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        if k.is_positive() {
            let (a, b) = if one_mod_four {
                (&h * 2 + &k, k.clone())
            } else {
                (&h * 2, k.clone())
            };
            let norm4: BigInt = &a * &a - &b * &b * &big_d0;
            if norm4.abs() == BigInt::from(4) {
                return QuadUnit::new(d0, a, b);
            }
        }
        p = &digit * &q - &p;
        q = (&radicand - &p * &p) / &q;
    }
    Err(QuadError::ExpansionCap)
}

/// Smallest unit `> 1` of norm `+1`.
pub fn norm_one_generator(d0: i64) -> Result<QuadUnit, QuadError> {
    let eps = fundamental_unit(d0)?;
    Ok(if eps.norm() == 1 { eps } else { eps.pow(2) })
}

/// The exponent `m` with `lambda = u^m`, `u` the norm-one generator.
pub fn unit_exponent(lambda: &QuadUnit) -> Result<u64, QuadError> {
    if lambda.norm() != 1 {
        return Err(QuadError::NotNormOne);
    }
    if !lambda.exceeds_one() {
        return Err(QuadError::NotGreaterThanOne);
    }
    let u = norm_one_generator(lambda.d0() as i64)?;
    let estimate = (lambda.ln() / u.ln()).round().max(1.0) as u64;
    for m in estimate.saturating_sub(1).max(1)..=estimate + 1 {
        if u.pow(m) == *lambda {
            return Ok(m);
        }
    }
    Err(QuadError::NotAPower(lambda.d0()))
}

/// The norm-one unit `mu > 1` with `mu^k = lambda`, when it exists.
pub fn kth_root_unit(lambda: &QuadUnit, k: u64) -> Result<Option<QuadUnit>, QuadError> {
    if k == 0 {
        return Err(QuadError::ZeroRoot);
    }
    let m = unit_exponent(lambda)?;
    if m % k != 0 {
        return Ok(None);
    }
    let u = norm_one_generator(lambda.d0() as i64)?;
    Ok(Some(u.pow(m / k)))
}
