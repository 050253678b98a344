use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use super::poly::MonicPoly;
use super::residue::{PrimePower, ResidueMatrix};
use super::ExactError;

/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

/// Square matrix of arbitrary-precision integers, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(n: usize, entries: Vec<BigInt>) -> Result<Self, ExactError> {
        if !(2..=MAX_DIM).contains(&n) {
            return Err(ExactError::InvalidDimension(n));
        }
        if entries.len() != n * n {
            return Err(ExactError::Parse(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            )));
        }
        Ok(IntMatrix { n, entries })
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self, ExactError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(ExactError::Parse("matrix rows must all have length n".into()));
        }
        let entries = rows.iter().flat_map(|r| r.iter().cloned().map(Into::into)).collect();
        IntMatrix::new(n, entries)
    }

    /// 2x2 matrix from four machine integers, row-major.
    pub fn two_by_two(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMatrix {
            n: 2,
            entries: vec![a.into(), b.into(), c.into(), d.into()],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigInt::one();
        }
        IntMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[BigInt]> {
        self.entries.chunks(self.n)
    }

    pub fn map_entries(&self, f: impl Fn(usize, usize, &BigInt) -> BigInt) -> IntMatrix {
        let n = self.n;
        let entries = self
            .entries
            .iter()
            .enumerate()
            .map(|(k, x)| f(k / n, k % n, x))
            .collect();
        IntMatrix { n, entries }
    }

    /// Exact product.
    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, ExactError> {
        if self.n != other.n {
            return Err(ExactError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &IntMatrix) -> IntMatrix {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigInt::zero();
                for k in 0..n {
                    acc += self.get(i, k) * other.get(k, j);
                }
                entries.push(acc);
            }
        }
        IntMatrix { n, entries }
    }

    /// `self^e` by repeated squaring.
    pub fn pow(&self, e: u64) -> IntMatrix {
        let mut acc = IntMatrix::identity(self.n);
        if e == 0 {
            return acc;
        }
        let mut base = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul_unchecked(&base);
        }
        acc
    }

    /// Reduction of `self^e` modulo a prime power.
    pub fn pow_mod(&self, e: u64, modulus: PrimePower) -> ResidueMatrix {
        ResidueMatrix::from_int(self, modulus).pow(e)
    }

    /// Like [`IntMatrix::pow_mod`] but for a raw modulus, which must be a prime power.
    pub fn pow_mod_checked(&self, e: u64, modulus: u64) -> Result<ResidueMatrix, ExactError> {
        Ok(self.pow_mod(e, PrimePower::from_modulus(modulus)?))
    }

    /// Entries reduced into `[0, m)` for an arbitrary positive modulus.
    pub fn reduce(&self, m: &BigInt) -> IntMatrix {
        self.map_entries(|_, _, x| x.mod_floor(m))
    }

    /// `self^e` with entries reduced modulo an arbitrary positive integer.
    /// Used for congruence checks at composite levels, where no group
    /// structure of the residue ring is needed.
    pub fn pow_reduced(&self, e: u64, m: &BigInt) -> IntMatrix {
        let mut acc = IntMatrix::identity(self.n).reduce(m);
        let mut base = self.reduce(m);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base).reduce(m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base).reduce(m);
            }
        }
        acc
    }

    pub fn trace(&self) -> BigInt {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> BigInt {
        let n = self.n;
        if n == 2 {
            return self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0);
        }
        let mut m: Vec<Vec<BigInt>> = self.rows().map(|r| r.to_vec()).collect();
        let mut negate = false;
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(i, k);
                        negate = !negate;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        let d = m[n - 1][n - 1].clone();
        if negate {
            -d
        } else {
            d
        }
    }

    /// Characteristic polynomial `det(zI - A)` via Faddeev-LeVerrier; every
    /// division in the recurrence is exact over the integers.
    pub fn char_poly(&self) -> MonicPoly {
        let n = self.n;
        let mut coeffs = vec![BigInt::one()];
        let mut m = IntMatrix::identity(n);
        for k in 1..=n {
            let am = self.mul_unchecked(&m);
            let c = -am.trace() / BigInt::from(k);
            coeffs.push(c.clone());
            m = am;
            for i in 0..n {
                m.entries[i * n + i] += &c;
            }
        }
        MonicPoly::new(coeffs).expect("leading coefficient is one by construction")
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == &BigInt::from((i == j) as u8)))
    }

    pub fn neg(&self) -> IntMatrix {
        self.map_entries(|_, _, x| -x)
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix, ExactError> {
        if self.n != other.n {
            return Err(ExactError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self.map_entries(|i, j, x| x + other.get(i, j)))
    }

    pub fn scale(&self, s: &BigInt) -> IntMatrix {
        self.map_entries(|_, _, x| x * s)
    }

    /// Exact division of every entry by `d`, or `None` if some entry is not divisible.
    pub fn div_exact(&self, d: &BigInt) -> Option<IntMatrix> {
        if d.is_zero() {
            return None;
        }
        let mut entries = Vec::with_capacity(self.entries.len());
        for x in &self.entries {
            let (q, r) = x.div_rem(d);
            if !r.is_zero() {
                return None;
            }
            entries.push(q);
        }
        Some(IntMatrix { n: self.n, entries })
    }

    /// Number of decimal digits of the largest entry (rough size indicator).
    pub fn max_digits(&self) -> usize {
        self.entries
            .iter()
            .map(|x| x.abs().to_str_radix(10).len())
            .max()
            .unwrap_or(0)
    }

    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        self.rows().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

/// Parses the row-major `"a,b;c,d"` form.
impl FromStr for IntMatrix {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows: Vec<Vec<BigInt>> = s
            .trim()
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<BigInt>()
                            .map_err(|_| ExactError::Parse(format!("bad matrix entry {x:?} in {s:?}")))
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        IntMatrix::from_rows(&rows)
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_string_rows().serialize(serializer)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Text(String),
    Int(i64),
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<EntryRepr>> = Vec::deserialize(deserializer)?;
        let rows: Vec<Vec<BigInt>> = rows
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|e| match e {
                        EntryRepr::Int(v) => Ok(BigInt::from(v)),
                        EntryRepr::Text(s) => s
                            .parse::<BigInt>()
                            .map_err(|_| de::Error::custom(format!("bad matrix entry {s:?}"))),
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        IntMatrix::from_rows(&rows).map_err(de::Error::custom)
    }
}
