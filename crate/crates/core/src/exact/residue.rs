use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::arith::{as_prime_power, factor_u64, is_prime, mul_mod_u64};
use super::matrix::IntMatrix;
use super::ExactError;

/// Largest modulus a residue matrix may carry; products are formed in `u128`.
pub const MAX_MODULUS: u64 = 1 << 62;

/// A prime power `p^r` with `r >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PrimePower {
    p: u64,
    r: u32,
    modulus: u64,
}

impl PrimePower {
    pub fn new(p: u64, r: u32) -> Result<Self, ExactError> {
        if !is_prime(p) || r == 0 {
            return Err(ExactError::InvalidModulus(p.checked_pow(r).unwrap_or(0)));
        }
        match p.checked_pow(r) {
            Some(m) if m <= MAX_MODULUS => Ok(PrimePower { p, r, modulus: m }),
            _ => Err(ExactError::ModulusTooLarge { p, r }),
        }
    }

    pub fn from_modulus(m: u64) -> Result<Self, ExactError> {
        let (p, r) = as_prime_power(m).ok_or(ExactError::InvalidModulus(m))?;
        PrimePower::new(p, r)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.r
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `p^s` for a different level `s >= 1`.
    pub fn with_exponent(&self, s: u32) -> Result<PrimePower, ExactError> {
        PrimePower::new(self.p, s)
    }
}

/// Square matrix over `Z/p^r`, entries in `[0, p^r)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueMatrix {
    n: usize,
    modulus: PrimePower,
    entries: Vec<u64>,
}

impl ResidueMatrix {
    pub fn from_int(a: &IntMatrix, modulus: PrimePower) -> Self {
        let m = BigInt::from(modulus.modulus);
        let entries = a
            .entries()
            .iter()
            .map(|x| x.mod_floor(&m).to_u64().expect("residue below modulus"))
            .collect();
        ResidueMatrix {
            n: a.dim(),
            modulus,
            entries,
        }
    }

    pub fn from_entries(n: usize, modulus: PrimePower, entries: Vec<u64>) -> Self {
        assert_eq!(entries.len(), n * n);
        let m = modulus.modulus;
        ResidueMatrix {
            n,
            modulus,
            entries: entries.into_iter().map(|x| x % m).collect(),
        }
    }

    pub fn identity(n: usize, modulus: PrimePower) -> Self {
        let mut entries = vec![0u64; n * n];
        for i in 0..n {
            entries[i * n + i] = 1 % modulus.modulus;
        }
        ResidueMatrix { n, modulus, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> PrimePower {
        self.modulus
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.n + j]
    }

    pub fn mul(&self, other: &ResidueMatrix) -> ResidueMatrix {
        debug_assert_eq!(self.n, other.n);
        debug_assert_eq!(self.modulus, other.modulus);
        let n = self.n;
        let m = self.modulus.modulus as u128;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc: u128 = 0;
                for k in 0..n {
                    acc += self.get(i, k) as u128 * other.get(k, j) as u128;
                    // at most 8 terms of < 2^124 each would overflow, so fold eagerly
                    acc %= m;
                }
                entries.push(acc as u64);
            }
        }
        ResidueMatrix {
            n,
            modulus: self.modulus,
            entries,
        }
    }

    pub fn pow(&self, mut e: u64) -> ResidueMatrix {
        let mut acc = ResidueMatrix::identity(self.n, self.modulus);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn pow_big(&self, e: &BigUint) -> ResidueMatrix {
        let mut acc = ResidueMatrix::identity(self.n, self.modulus);
        for bit in (0..e.bits()).rev() {
            acc = acc.mul(&acc);
            if e.bit(bit) {
                acc = acc.mul(self);
            }
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        let one = 1 % self.modulus.modulus;
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == if i == j { one } else { 0 }))
    }

    /// Image under reduction to a lower level `p^s`, `1 <= s <= r`.
    pub fn reduce_to(&self, s: u32) -> ResidueMatrix {
        assert!(s >= 1 && s <= self.modulus.r, "can only reduce to a lower level");
        let modulus = self.modulus.with_exponent(s).expect("lower level of a valid prime power");
        ResidueMatrix::from_entries(self.n, modulus, self.entries.clone())
    }

    /// Lift to an integer matrix with entries in `[0, p^r)`.
    pub fn to_int(&self) -> IntMatrix {
        IntMatrix::new(self.n, self.entries.iter().map(|&x| BigInt::from(x)).collect())
            .expect("dimension already validated")
    }

    pub fn det(&self) -> u64 {
        let m = BigInt::from(self.modulus.modulus);
        self.to_int().det().mod_floor(&m).to_u64().expect("below modulus")
    }

    /// Multiplicative order, assuming the matrix is invertible (e.g. lies in
    /// `SL(n, Z/p^r)`). The order modulo `p` is found by stripping prime
    /// factors from `|GL(n, F_p)|`; the remaining factor is a power of `p`
    /// because the kernel of reduction mod `p` is a `p`-group.
    pub fn order(&self) -> u64 {
        let p = self.modulus.p;
        let base = self.reduce_to(1);
        let (group_order, factors) = gl_order_factored(self.n, p);
        let mut exponent = group_order;
        for (q, e) in factors {
            let bq = BigUint::from(q);
            for _ in 0..e {
                let (cand, rem) = exponent.div_rem(&bq);
                debug_assert!(rem == BigUint::from(0u32));
                if base.pow_big(&cand).is_identity() {
                    exponent = cand;
                } else {
                    break;
                }
            }
        }
        let mut order = exponent.to_u64().expect("order modulo p fits in u64");
        let mut h = self.pow(order);
        while !h.is_identity() {
            h = h.pow(p);
            order = order.checked_mul(p).expect("element order fits in u64");
        }
        order
    }

    /// Order by direct iteration; test oracle for [`ResidueMatrix::order`].
    pub fn order_brute(&self, cap: u64) -> Option<u64> {
        let mut acc = self.clone();
        for j in 1..=cap {
            if acc.is_identity() {
                return Some(j);
            }
            acc = acc.mul(self);
        }
        None
    }

    pub fn is_zero_mod(&self, i: usize, j: usize, d: u64) -> bool {
        self.get(i, j) % d == 0
    }

    /// `self * (scalar)` with the scalar reduced mod the modulus.
    pub fn scale(&self, s: u64) -> ResidueMatrix {
        let m = self.modulus.modulus;
        ResidueMatrix {
            n: self.n,
            modulus: self.modulus,
            entries: self.entries.iter().map(|&x| mul_mod_u64(x, s % m, m)).collect(),
        }
    }
}

/// `|GL(n, F_p)| = p^{n(n-1)/2} * prod_{i=1..n} (p^i - 1)` together with its
/// factorization.
fn gl_order_factored(n: usize, p: u64) -> (BigUint, Vec<(u64, u32)>) {
    let mut factors: std::collections::BTreeMap<u64, u32> = Default::default();
    let mut order = BigUint::one();
    let p_exp = (n * (n - 1) / 2) as u32;
    if p_exp > 0 {
        *factors.entry(p).or_default() += p_exp;
        order *= BigUint::from(p).pow(p_exp);
    }
    for i in 1..=n as u32 {
        let term = p.checked_pow(i).expect("p^n fits in u64 for supported sizes") - 1;
        order *= BigUint::from(term);
        for (q, e) in factor_u64(term) {
            *factors.entry(q).or_default() += e;
        }
    }
    (order, factors.into_iter().collect())
}

impl fmt::Display for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.entries.chunks(self.n).enumerate() {
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
        write!(f, " (mod {})", self.modulus.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_validation() {
        assert!(PrimePower::new(5, 2).is_ok());
        assert!(PrimePower::new(6, 1).is_err());
        assert!(PrimePower::new(5, 0).is_err());
        assert!(matches!(PrimePower::new(3, 60), Err(ExactError::ModulusTooLarge { .. })));
        assert_eq!(PrimePower::from_modulus(81).unwrap().exponent(), 4);
    }

    #[test]
    fn fibonacci_orders() {
        let g: IntMatrix = "2,1;1,1".parse().unwrap();
        let at = |p, r| ResidueMatrix::from_int(&g, PrimePower::new(p, r).unwrap());
        assert_eq!(at(5, 1).order(), 10);
        assert_eq!(at(5, 2).order(), 50);
        assert_eq!(ResidueMatrix::identity(2, PrimePower::new(7, 3).unwrap()).order(), 1);
    }

    #[test]
    fn order_matches_brute_force() {
        let mats = ["2,1;1,1", "3,-1;1,0", "5,3;3,2", "2,1;7,4", "1,1;0,1", "0,-1;1,1"];
        for s in mats {
            let g: IntMatrix = s.parse().unwrap();
            for p in [2u64, 3, 5, 7, 11] {
                for r in 1..=3 {
                    let a = ResidueMatrix::from_int(&g, PrimePower::new(p, r).unwrap());
                    assert_eq!(Some(a.order()), a.order_brute(1_000_000), "{s} mod {p}^{r}");
                }
            }
        }
        let h: IntMatrix = "1,1,0;0,1,1;1,1,1".parse().unwrap();
        assert_eq!(h.det(), BigInt::from(1));
        for p in [2u64, 3, 5] {
            let a = ResidueMatrix::from_int(&h, PrimePower::new(p, 2).unwrap());
            assert_eq!(Some(a.order()), a.order_brute(10_000_000));
        }
    }
}
