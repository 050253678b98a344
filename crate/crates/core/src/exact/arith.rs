//! Small integer number theory used across the crate: primality, sieving,
//! factorization of machine-sized integers, Jacobi/Kronecker symbols and
//! square-free decomposition of big integers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// All primes `<= bound` by the sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Prime factorization by trial division, ascending primes.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor_u64(n).into_iter().map(|(p, _)| p).collect()
}

/// Positive divisors in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factor_u64(n) {
        let len = divs.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Returns `(p, r)` when `m = p^r` with `p` prime and `r >= 1`.
pub fn as_prime_power(m: u64) -> Option<(u64, u32)> {
    match factor_u64(m).as_slice() {
        [(p, r)] => Some((*p, *r)),
        _ => None,
    }
}

pub fn lcm_u64(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / a.gcd(&b)).checked_mul(b)
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> i32 {
    assert!(n % 2 == 1, "Jacobi symbol needs an odd modulus");
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut result = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Kronecker symbol `(d/p)` for a prime `p`.
pub fn kronecker_prime(d: i64, p: u64) -> i32 {
    if p == 2 {
        if d % 2 == 0 {
            0
        } else {
            match d.rem_euclid(8) {
                1 | 7 => 1,
                _ => -1,
            }
        }
    } else {
        jacobi(d, p)
    }
}

fn is_squarefree_u64(m: u64) -> bool {
    factor_u64(m).iter().all(|&(_, e)| e == 1)
}

/// `true` when `d` is the discriminant of a real quadratic field.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d <= 1 {
        return false;
    }
    let d = d as u64;
    match d % 4 {
        1 => is_squarefree_u64(d),
        0 => {
            let m = d / 4;
            (m % 4 == 2 || m % 4 == 3) && is_squarefree_u64(m)
        }
        _ => false,
    }
}

/// Writes a positive non-square `n` as `f^2 * d0` with `d0` a fundamental
/// discriminant. Trial division is capped at `trial_limit`; the result is
/// exact whenever `n` has no more than two prime factors above the cap
/// (guaranteed if `n < trial_limit^3`). Returns `None` past that range or
/// when `n` is a perfect square.
pub fn fundamental_part(n: &BigUint, trial_limit: u64) -> Option<(u64, BigUint)> {
    if n.is_zero() {
        return None;
    }
    let cap = BigUint::from(trial_limit);
    if n > &(&cap * &cap * &cap) {
        return None;
    }
    let mut rest = n.clone();
    let mut kernel = BigUint::one();
    let mut square = BigUint::one();
    let mut p = 2u64;
    while p <= trial_limit {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0u32;
        loop {
            let (q, r) = rest.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            if e % 2 == 1 {
                kernel *= &bp;
            }
            square *= bp.pow(e / 2);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // Whatever is left has no prime factor <= trial_limit, hence at most two
    // prime factors: it is 1, prime, p*q, or p^2.
    if !rest.is_one() {
        let root = rest.sqrt();
        if &root * &root == rest {
            square *= root;
        } else {
            kernel *= rest;
        }
    }
    if kernel.is_one() {
        return None;
    }
    let kernel = kernel.to_u64()?;
    if kernel % 4 == 1 {
        Some((kernel, square))
    } else {
        // f^2 k = (f/2)^2 (4k); the square part must be even for k = 2,3 mod 4
        // since n = t^2 - 4 forces it, but callers may pass arbitrary n.
        if square.is_even() {
            Some((kernel.checked_mul(4)?, square / 2u32))
        } else {
            None
        }
    }
}

/// Exact integer square root when `n` is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.sign() == num_bigint::Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miller_rabin_matches_sieve() {
        let sieve = primes_up_to(10_000);
        let mr: Vec<u64> = (0..=10_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, mr);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn factorization_and_divisors() {
        assert_eq!(factor_u64(1260), vec![(2, 2), (3, 2), (5, 1), (7, 1)]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(as_prime_power(125), Some((5, 3)));
        assert_eq!(as_prime_power(12), None);
        assert_eq!(as_prime_power(1), None);
    }

    #[test]
    fn kronecker_small_cases() {
        // 5 is a square mod p iff p = +-1 mod 5
        for p in primes_up_to(200) {
            let expected = match p % 5 {
                0 => 0,
                1 | 4 => 1,
                _ => -1,
            };
            assert_eq!(kronecker_prime(5, p), expected, "p = {p}");
        }
        assert_eq!(kronecker_prime(8, 7), 1);
        assert_eq!(kronecker_prime(8, 3), -1);
    }

    #[test]
    fn fundamental_discriminants() {
        let fundamental: Vec<i64> = (2..=60).filter(|&d| is_fundamental_discriminant(d)).collect();
        assert_eq!(
            fundamental,
            vec![5, 8, 12, 13, 17, 21, 24, 28, 29, 33, 37, 40, 41, 44, 53, 56, 57, 60]
        );
        assert!(!is_fundamental_discriminant(1));
        assert!(!is_fundamental_discriminant(-3));
    }

    #[test]
    fn fundamental_part_of_trace_discriminants() {
        // t = 3: 5 ; t = 7: 45 = 3^2 * 5 ; t = 4: 12 ; t = 6: 32 = 2^2 * 8
        let fp = |n: u64| fundamental_part(&BigUint::from(n), 1000);
        assert_eq!(fp(5), Some((5, BigUint::from(1u32))));
        assert_eq!(fp(45), Some((5, BigUint::from(3u32))));
        assert_eq!(fp(12), Some((12, BigUint::from(1u32))));
        assert_eq!(fp(32), Some((8, BigUint::from(2u32))));
        assert_eq!(fp(49), None);
        // remainder above the trial bound is a product of two large primes
        let n = 1_000_003u64 * 1_000_033; // = 3 mod 4
        assert_eq!(
            fundamental_part(&BigUint::from(4 * n), 20_000),
            Some((4 * n, BigUint::from(1u32)))
        );
        assert_eq!(fundamental_part(&BigUint::from(4 * n), 1000), None);
    }
}
