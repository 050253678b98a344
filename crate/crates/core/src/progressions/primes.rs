use std::collections::BTreeSet;

use serde::Serialize;

use super::ProgressionError;
use crate::exact::arith::{is_fundamental_discriminant, kronecker_prime, primes_up_to};

/// `k` primes `p_i = a i + b`, `i = 1..k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeAp {
    pub a: u64,
    pub b: i64,
    pub k: usize,
    pub primes: Vec<u64>,
}

/// First `k`-term progression of primes up to `bound` avoiding `exclude`,
/// ordered by first term and then by difference. For `k = 1` the difference
/// is taken to be 1.
pub fn prime_ap_search(k: usize, bound: u64, exclude: &BTreeSet<u64>) -> Result<PrimeAp, ProgressionError> {
    if k == 0 {
        return Err(ProgressionError::InvalidInput("k must be at least 1".into()));
    }
    if bound < 3 {
        return Err(ProgressionError::InvalidInput("prime bound must be at least 3".into()));
    }
    let primes: Vec<u64> = primes_up_to(bound).into_iter().filter(|p| !exclude.contains(p)).collect();
    let allowed: BTreeSet<u64> = primes.iter().copied().collect();
    for &p1 in &primes {
        if k == 1 {
            return Ok(PrimeAp { a: 1, b: p1 as i64 - 1, k, primes: vec![p1] });
        }
        let max_a = (bound - p1) / (k as u64 - 1);
        for a in 1..=max_a {
            let terms: Vec<u64> = (0..k as u64).map(|t| p1 + a * t).collect();
            if terms.iter().all(|p| allowed.contains(p)) {
                return Ok(PrimeAp {
                    a,
                    b: p1 as i64 - a as i64,
                    k,
                    primes: terms,
                });
            }
        }
    }
    Err(ProgressionError::NoPrimeProgression { k, bound })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    pub d0: i64,
    pub bound: u64,
    pub primes: usize,
    pub split: usize,
    pub inert: usize,
    pub ramified: usize,
    /// `split / primes`.
    pub proportion: f64,
}

/// Share of primes up to `bound` that split in `Q(sqrt(d0))`.
pub fn prime_density_report(d0: i64, bound: u64) -> Result<DensityReport, ProgressionError> {
    if d0 <= 1 || !is_fundamental_discriminant(d0) {
        return Err(ProgressionError::InvalidInput(format!(
            "{d0} is not a positive fundamental discriminant"
        )));
    }
    if bound < 100 {
        return Err(ProgressionError::InvalidInput("density bound must be at least 100".into()));
    }
    let ps = primes_up_to(bound);
    let (mut split, mut inert, mut ramified) = (0, 0, 0);
    for &p in &ps {
        match kronecker_prime(d0, p) {
            1 => split += 1,
            -1 => inert += 1,
            _ => ramified += 1,
        }
    }
    Ok(DensityReport {
        d0,
        bound,
        primes: ps.len(),
        split,
        inert,
        ramified,
        proportion: split as f64 / ps.len() as f64,
    })
}
