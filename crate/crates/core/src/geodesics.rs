//! Hyperbolic elements of `SL(2, Z)`, their length classes, and primitivity.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::exact::arith::{fundamental_part, prime_divisors};
use crate::exact::{q_poly, IntMatrix};
use crate::numeric::{scaled_double_log, Fixed};
use crate::quad::{
    fundamental_unit, norm_one_generator, unit_exponent, QuadError, QuadUnit,
    DISCRIMINANT_TRIAL_LIMIT,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeodesicError {
    #[error("expected a 2x2 matrix, got {0}x{0}")]
    NotTwoByTwo(usize),
    #[error("determinant is {0}, expected 1")]
    DetNotOne(BigInt),
    #[error("matrix is not hyperbolic (trace {0})")]
    NotHyperbolic(BigInt),
    #[error("trace {0} is too large to factor t^2 - 4; classify within a known field instead")]
    TraceTooLarge(BigInt),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// A 2x2 integer matrix of determinant 1 with `|trace| > 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperbolicElement {
    matrix: IntMatrix,
    trace: BigInt,
    d0: u64,
    f: BigInt,
    lambda: QuadUnit,
}

impl HyperbolicElement {
    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> &BigInt {
        &self.trace
    }

    /// Fundamental discriminant of `t^2 - 4`.
    pub fn d0(&self) -> u64 {
        self.d0
    }

    /// `f` with `t^2 - 4 = f^2 D0`.
    pub fn conductor(&self) -> &BigInt {
        &self.f
    }

    /// Eigenvalue of `+-gamma` greater than one.
    pub fn lambda(&self) -> &QuadUnit {
        &self.lambda
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Elliptic,
    Parabolic,
    Hyperbolic(HyperbolicElement),
}

impl Classification {
    pub fn name(&self) -> &'static str {
        match self {
            Classification::Elliptic => "elliptic",
            Classification::Parabolic => "parabolic",
            Classification::Hyperbolic(_) => "hyperbolic",
        }
    }
}

fn check_sl2(a: &IntMatrix) -> Result<BigInt, GeodesicError> {
    if a.dim() != 2 {
        return Err(GeodesicError::NotTwoByTwo(a.dim()));
    }
    let det = a.det();
    if !det.is_one() {
        return Err(GeodesicError::DetNotOne(det));
    }
    Ok(a.trace())
}

pub fn classify(a: &IntMatrix) -> Result<Classification, GeodesicError> {
    let t = check_sl2(a)?;
    let two = BigInt::from(2);
    if t.abs() < two {
        return Ok(Classification::Elliptic);
    }
    if t.abs() == two {
        return Ok(Classification::Parabolic);
    }
    let disc = (&t * &t - 4u32).to_biguint().expect("|t| > 2");
    let (d0, _) = fundamental_part(&disc, DISCRIMINANT_TRIAL_LIMIT)
        .ok_or_else(|| GeodesicError::TraceTooLarge(t.clone()))?;
    Ok(Classification::Hyperbolic(hyperbolic_in_field(a, t, d0)?))
}

/// Classify a matrix already known to live over `Q(sqrt(d0))`, with no
/// factoring. Used for the very large elements produced by progressions.
pub fn classify_in_field(a: &IntMatrix, d0: u64) -> Result<HyperbolicElement, GeodesicError> {
    let t = check_sl2(a)?;
    if t.abs() <= BigInt::from(2) {
        return Err(GeodesicError::NotHyperbolic(t));
    }
    hyperbolic_in_field(a, t, d0)
}

fn hyperbolic_in_field(a: &IntMatrix, t: BigInt, d0: u64) -> Result<HyperbolicElement, GeodesicError> {
    let lambda = QuadUnit::from_trace_in_field(&t, d0)?;
    Ok(HyperbolicElement {
        matrix: a.clone(),
        f: lambda.as_int().b().clone(),
        trace: t,
        d0,
        lambda,
    })
}

pub fn hyperbolic(a: &IntMatrix) -> Result<HyperbolicElement, GeodesicError> {
    match classify(a)? {
        Classification::Hyperbolic(h) => Ok(h),
        _ => Err(GeodesicError::NotHyperbolic(a.trace())),
    }
}

/// Exact length `multiplier * 2 log(u)` where `u` is the norm-one generator
/// of `Q(sqrt(d0))` and `base_trace` its trace.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LengthClass {
    pub d0: u64,
    pub base_trace: BigInt,
    pub multiplier: u64,
}

impl LengthClass {
    pub fn numeric(&self, digits: u32) -> Fixed {
        let u = norm_one_generator(self.d0 as i64).expect("length class built from a valid field");
        scaled_double_log(u.as_int(), self.multiplier, digits)
    }
}

pub fn length_class(h: &HyperbolicElement) -> Result<LengthClass, GeodesicError> {
    let u = norm_one_generator(h.d0 as i64)?;
    Ok(LengthClass {
        d0: h.d0,
        base_trace: u.trace().clone(),
        multiplier: unit_exponent(&h.lambda)?,
    })
}

#[derive(Serialize, Deserialize)]
struct LengthClassRepr {
    d0: u64,
    base_trace: serde_json::Value,
    multiplier: String,
}

impl Serialize for LengthClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let base_trace = match self.base_trace.to_i64() {
            Some(v) => serde_json::Value::from(v),
            None => serde_json::Value::from(self.base_trace.to_string()),
        };
        LengthClassRepr {
            d0: self.d0,
            base_trace,
            multiplier: self.multiplier.to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LengthClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = LengthClassRepr::deserialize(deserializer)?;
        let base_trace = match &r.base_trace {
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(BigInt::from)
                .ok_or_else(|| de::Error::custom("base_trace must be an integer"))?,
            serde_json::Value::String(s) => s.parse().map_err(de::Error::custom)?,
            _ => return Err(de::Error::custom("base_trace must be an integer")),
        };
        Ok(LengthClass {
            d0: r.d0,
            base_trace,
            multiplier: r.multiplier.parse().map_err(de::Error::custom)?,
        })
    }
}

/// `U_k` for the Lucas sequence `U_0 = 0, U_1 = 1, U_{k+1} = t U_k - U_{k-1}`.
pub fn lucas_u(t: &BigInt, k: u64) -> BigInt {
    if k == 0 {
        return BigInt::zero();
    }
    let c = companion(t);
    // companion^k = [[U_{k+1}, -U_k], [U_k, -U_{k-1}]]
    c.pow(k).get(1, 0).clone()
}

/// Trace of `companion(t)^k`: `V_0 = 2, V_1 = t, V_{k+1} = t V_k - V_{k-1}`.
pub fn lucas_v(t: &BigInt, k: u64) -> BigInt {
    companion(t).pow(k).trace()
}

/// `[[t, -1], [1, 0]]`, the companion matrix of `z^2 - t z + 1`.
pub fn companion(t: &BigInt) -> IntMatrix {
    IntMatrix::new(2, vec![t.clone(), -BigInt::one(), BigInt::one(), BigInt::zero()])
        .expect("2x2")
}

/// A root `mu` in `SL(2, Z)` with `mu^d = gamma` for the smallest prime `d`
/// that admits one.
///
/// Any root of a regular semisimple 2x2 matrix commutes with it, so lies in
/// `Q[gamma]`; with `lambda = u^m` and eigenvalue `u^{m/d}` the unique
/// candidate is `(U_{m - m/d} I + U_{m/d} gamma) / U_m`.
pub fn find_root(h: &HyperbolicElement) -> Result<Option<(IntMatrix, u64)>, GeodesicError> {
    let m = unit_exponent(&h.lambda)?;
    let u = norm_one_generator(h.d0 as i64)?;
    let negative = h.trace.is_negative();
    let positive_part = if negative { h.matrix.neg() } else { h.matrix.clone() };
    let u_m = lucas_u(u.trace(), m);
    for d in prime_divisors(m) {
        if negative && d % 2 == 0 {
            // mu^d would have a negative real eigenvalue
            continue;
        }
        let q = m / d;
        let x = lucas_u(u.trace(), m - q);
        let y = lucas_u(u.trace(), q);
        let numerator = IntMatrix::identity(2)
            .scale(&x)
            .add(&positive_part.scale(&y))
            .expect("2x2");
        if let Some(root) = numerator.div_exact(&u_m) {
            let root = if negative { root.neg() } else { root };
            return Ok(Some((root, d)));
        }
    }
    Ok(None)
}

pub fn is_primitive(h: &HyperbolicElement) -> Result<bool, GeodesicError> {
    Ok(find_root(h)?.is_none())
}

/// For 2x2 matrices this holds exactly when `lambda` generates the norm-one units.
pub fn is_absolutely_primitive(h: &HyperbolicElement) -> Result<bool, GeodesicError> {
    Ok(unit_exponent(&h.lambda)? == 1)
}

/// Decide absolute primitivity from the definition: no `k >= 2` has
/// `Q(lambda^{1/k}, lambda^{-1/k})` equal to a characteristic polynomial of
/// a hyperbolic element. Only roots inside the field can give rational
/// coefficients, and those are the powers of the fundamental unit.
pub fn is_absolutely_primitive_by_definition(h: &HyperbolicElement) -> Result<bool, GeodesicError> {
    let eps = fundamental_unit(h.d0 as i64)?;
    let m = unit_exponent(&h.lambda)?;
    // lambda = eps^e
    let e = if eps.norm() == 1 { m } else { 2 * m };
    for k in 2..=e {
        if e % k != 0 {
            continue;
        }
        let nu = eps.pow(e / k);
        debug_assert_eq!(nu.pow(k), h.lambda);
        let nu_inv = nu.inverse();
        if let Ok(poly) = q_poly(&[nu.as_int().clone(), nu_inv.as_int().clone()]) {
            let t = -poly.coeff(1).clone();
            if poly.constant_term().is_one() && poly_in_p(&t) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `(mu, m)` with `mu` absolutely primitive and `lambda_gamma = lambda_mu^m`.
pub fn abs_prim_root(h: &HyperbolicElement) -> Result<(HyperbolicElement, u64), GeodesicError> {
    let u = norm_one_generator(h.d0 as i64)?;
    let m = unit_exponent(&h.lambda)?;
    let mu = classify_in_field(&companion(u.trace()), h.d0)?;
    Ok((mu, m))
}

/// `z^2 - t z + 1` is the characteristic polynomial of a hyperbolic element
/// of `SL(2, Z)`.
pub fn poly_in_p(t: &BigInt) -> bool {
    t.abs() > BigInt::from(2)
}
