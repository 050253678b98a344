//! Van der Waerden search and the transfer of progressions across a
//! commensurability, simulated by a coloring with divisor pairs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::arith::divisors;
use crate::filtration::NFunction;
use crate::progressions::{
    build_progression, build_progression_containing, BuildOptions, ProgressionError, ProgressionWitness,
    TransferBlock,
};

#[derive(Debug, Error)]
pub enum RamseyError {
    #[error("invalid transfer map: {0}")]
    InvalidMap(String),
    #[error("no monochromatic {k}-term progression for N <= {cap}")]
    CapExceeded { k: usize, cap: usize },
    #[error("k must be at least 1")]
    InvalidLength,
    #[error("transferred multiplier is not an integer: {0}")]
    NotIntegral(String),
    #[error(transparent)]
    Build(#[from] ProgressionError),
}

impl RamseyError {
    pub fn is_cap(&self) -> bool {
        match self {
            RamseyError::CapExceeded { .. } => true,
            RamseyError::Build(e) => e.is_cap(),
            _ => false,
        }
    }
}

/// Least `(start, difference)`, 1-based and ordered by start then difference,
/// of a `k`-term progression on which `colors` is constant. For `k = 1` the
/// difference is reported as 1.
pub fn find_mono_ap(colors: &[usize], k: usize) -> Option<(usize, usize)> {
    if k == 0 || colors.is_empty() {
        return None;
    }
    let n = colors.len();
    if k == 1 {
        return Some((1, 1));
    }
    for start in 0..n {
        let mut diff = 1;
        while start + (k - 1) * diff < n {
            let c = colors[start];
            if (1..k).all(|t| colors[start + t * diff] == c) {
                return Some((start + 1, diff));
            }
            diff += 1;
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VdwOutcome {
    /// `W(r, k) = n`; `certificate` colors `1..n-1` with no monochromatic progression.
    Exact { n: usize, certificate: Vec<usize> },
    /// Some coloring of `1..cap` avoids monochromatic progressions.
    AboveCap { cap: usize, certificate: Vec<usize> },
}

/// Does coloring position `pos` with the last entry of `colors` close a
/// monochromatic `k`-term progression ending there?
fn closes_ap(colors: &[usize], k: usize) -> bool {
    let pos = colors.len() - 1;
    let c = colors[pos];
    let mut diff = 1;
    while (k - 1) * diff <= pos {
        if (1..k).all(|t| colors[pos - t * diff] == c) {
            return true;
        }
        diff += 1;
    }
    false
}

/// Exhaustive search for the Van der Waerden number `W(r, k)` up to `cap`.
/// Colors are assigned in canonical order (a new color only after all smaller
/// ones appeared), so the certificate is the lexicographically least longest
/// good coloring.
pub fn vdw_number(r: usize, k: usize, cap: usize) -> Result<VdwOutcome, RamseyError> {
    if r == 0 || k == 0 {
        return Err(RamseyError::InvalidLength);
    }
    if k == 1 {
        return Ok(VdwOutcome::Exact {
            n: 1,
            certificate: Vec::new(),
        });
    }
    let mut best: Vec<usize> = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    // iterative DFS; each frame holds the next color to try at that depth
    let mut next: Vec<usize> = vec![0];
    while let Some(&c) = next.last() {
        let used = cur.iter().copied().max().map_or(0, |m| m + 1);
        if c >= r || c > used {
            next.pop();
            cur.pop();
            continue;
        }
        *next.last_mut().expect("frame") += 1;
        cur.push(c);
        if closes_ap(&cur, k) {
            cur.pop();
            continue;
        }
        if cur.len() > best.len() {
            best = cur.clone();
            if best.len() >= cap {
                return Ok(VdwOutcome::AboveCap { cap, certificate: best });
            }
        }
        next.push(0);
    }
    let n = best.len() + 1;
    if n > cap {
        return Ok(VdwOutcome::AboveCap { cap, certificate: best });
    }
    Ok(VdwOutcome::Exact { n, certificate: best })
}

/// Divisor-pair assignment standing in for "lift to the common cover, project
/// to the other orbifold". Term `i` (1-based) receives `pairs[(i - 1) % len]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferMap {
    #[serde(default)]
    pub d_m: u64,
    #[serde(default)]
    pub d_mp: u64,
    /// `l = d' l' / d` relates the two base lengths.
    pub d: u64,
    pub d_prime: u64,
    pub pairs: Vec<(u64, u64)>,
}

impl TransferMap {
    pub fn identity() -> Self {
        TransferMap {
            d_m: 1,
            d_mp: 1,
            d: 1,
            d_prime: 1,
            pairs: vec![(1, 1)],
        }
    }

    pub fn validate(&self) -> Result<(), RamseyError> {
        let bad = |m: &str| Err(RamseyError::InvalidMap(m.to_string()));
        if self.d_m == 0 || self.d_mp == 0 {
            return bad("cover degrees must be positive");
        }
        if self.d == 0 || self.d_m % self.d != 0 {
            return bad("d must divide d_M");
        }
        if self.d_prime == 0 || self.d_mp % self.d_prime != 0 {
            return bad("d' must divide d_M'");
        }
        if self.pairs.is_empty() {
            return bad("no divisor pairs");
        }
        for &(p, q) in &self.pairs {
            if p == 0 || q == 0 || self.d_m % p != 0 || self.d_mp % q != 0 {
                return Err(RamseyError::InvalidMap(format!("pair ({p}, {q}) does not divide the degrees")));
            }
        }
        Ok(())
    }

    /// `D = prod_{d | d_M} d * prod_{d' | d_M'} d'`.
    pub fn big_d(&self) -> Result<u64, RamseyError> {
        let prod = |x: u64| divisors(x).iter().try_fold(1u64, |acc, d| acc.checked_mul(*d));
        prod(self.d_m)
            .zip(prod(self.d_mp))
            .and_then(|(a, b)| a.checked_mul(b))
            .ok_or_else(|| RamseyError::InvalidMap("D overflows 64 bits".into()))
    }

    /// Colors of terms `1..=n`: equal pairs share a color.
    pub fn coloring(&self, n: usize) -> Vec<usize> {
        (0..n)
            .map(|i| {
                let pair = self.pairs[i % self.pairs.len()];
                self.pairs.iter().position(|&x| x == pair).expect("pair is listed")
            })
            .collect()
    }
}

/// Grow `N` until the coloring of `1..N` has a monochromatic `k`-term
/// progression `a' i + b'`, then obtain an `N`-term witness whose `C` is a
/// multiple of `D` from `extend(N, D)` and rescale the chosen terms to
/// `C' D d' p / (q d) (a (a' i + b') + b)`.
pub fn transfer_progression(
    extend: &mut dyn FnMut(usize, u64) -> Result<ProgressionWitness, ProgressionError>,
    tm: &TransferMap,
    k: usize,
    n_cap: usize,
) -> Result<ProgressionWitness, RamseyError> {
    if k == 0 {
        return Err(RamseyError::InvalidLength);
    }
    tm.validate()?;
    let big_d = tm.big_d()?;
    let (n, (start, diff), colors) = (k..=n_cap)
        .find_map(|n| {
            let colors = tm.coloring(n);
            find_mono_ap(&colors, k).map(|ap| (n, ap, colors))
        })
        .ok_or(RamseyError::CapExceeded { k, cap: n_cap })?;
    let mut w = extend(n, big_d)?;
    if w.k != n || w.c % big_d != 0 {
        return Err(RamseyError::Build(ProgressionError::Inconsistent(format!(
            "extended witness has {} terms and C = {}, wanted {n} terms and D = {big_d} | C",
            w.k, w.c
        ))));
    }
    let (p, q) = tm.pairs[colors[start - 1]];
    let num = w.c as u128 * tm.d_prime as u128 * p as u128;
    let den = q as u128 * tm.d as u128;
    if num % den != 0 {
        return Err(RamseyError::NotIntegral(format!("{num} / {den}")));
    }
    let scale = num / den;
    let indices: Vec<usize> = (0..k).map(|t| start + t * diff).collect();
    let multipliers: Vec<u64> = indices
        .iter()
        .map(|&i| {
            u64::try_from(scale * w.primes[i - 1] as u128)
                .map_err(|_| RamseyError::NotIntegral("multiplier overflows 64 bits".into()))
        })
        .collect::<Result<_, _>>()?;
    w.transfer = Some(TransferBlock {
        d_m: tm.d_m,
        d_mp: tm.d_mp,
        d: tm.d,
        d_prime: tm.d_prime,
        p,
        q,
        big_d,
        a_prime: diff as u64,
        b_prime: start as i64 - diff as i64,
        k,
        indices,
        multipliers,
        pairs: tm.pairs.clone(),
        coloring: colors,
    });
    Ok(w)
}

/// Transfer starting from an existing witness, rebuilding it from its own
/// generator (the `contains` element when present) as `N` grows.
pub fn transfer_witness(
    nf: &dyn NFunction,
    w: &ProgressionWitness,
    tm: &TransferMap,
    k: usize,
    n_cap: usize,
    opts: &BuildOptions,
) -> Result<ProgressionWitness, RamseyError> {
    let mut extend = |n: usize, big_d: u64| {
        let o = BuildOptions {
            extra_divisor: opts.extra_divisor.saturating_mul(big_d),
            max_k: opts.max_k.max(n),
            ..opts.clone()
        };
        match &w.contains {
            Some(c) => build_progression_containing(nf, &c.gamma, n, &o),
            None => build_progression(nf, &w.gamma_abs, n, &o),
        }
    };
    transfer_progression(&mut extend, tm, k, n_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::IntMatrix;
    use crate::filtration::DirectN;
    use crate::progressions::verify_witness;
    use proptest::prelude::*;

    /// Every k-AP in 1..=n, checked without shortcuts.
    fn mono_aps(colors: &[usize], k: usize) -> Vec<(usize, usize)> {
        let n = colors.len();
        let mut out = Vec::new();
        for s in 1..=n {
            for d in 1..=n {
                let idx: Vec<usize> = (0..k).map(|t| s + t * d).collect();
                if idx.iter().all(|&i| i <= n) && idx.iter().all(|&i| colors[i - 1] == colors[s - 1]) {
                    out.push((s, d));
                }
            }
        }
        out
    }

    #[test]
    fn mono_ap_examples() {
        assert_eq!(find_mono_ap(&[0; 4], 3), Some((1, 1)));
        assert_eq!(find_mono_ap(&[0, 1, 0, 1, 0, 1, 0, 1], 3), Some((1, 2)));
        assert_eq!(find_mono_ap(&[0, 0, 1, 1, 0, 0, 1, 1], 3), None);
        assert_eq!(find_mono_ap(&[], 3), None);
    }

    #[test]
    fn vdw_values() {
        let t = std::time::Instant::now();
        match vdw_number(2, 3, 20).unwrap() {
            VdwOutcome::Exact { n, certificate } => {
                assert_eq!(n, 9);
                assert_eq!(certificate, [0, 0, 1, 1, 0, 0, 1, 1]);
                assert!(mono_aps(&certificate, 3).is_empty());
            }
            other => panic!("{other:?}"),
        }
        assert!(t.elapsed().as_secs_f64() < 1.0);
        for k in 1..6 {
            assert!(matches!(vdw_number(1, k, k).unwrap(), VdwOutcome::Exact { n, .. } if n == k));
        }
        assert!(matches!(vdw_number(2, 2, 5).unwrap(), VdwOutcome::Exact { n: 3, .. }));
        assert!(matches!(vdw_number(2, 3, 8).unwrap(), VdwOutcome::AboveCap { cap: 8, .. }));
        assert!(matches!(vdw_number(3, 3, 20).unwrap(), VdwOutcome::AboveCap { .. }));
    }

    proptest! {
        #[test]
        fn mono_ap_agrees_with_enumeration(colors in prop::collection::vec(0usize..3, 0..24), k in 1usize..5) {
            let all = mono_aps(&colors, k);
            match find_mono_ap(&colors, k) {
                Some(ap) => {
                    prop_assert!(all.contains(&ap) || (k == 1 && !colors.is_empty()));
                    prop_assert!(all.iter().all(|&x| x >= ap));
                }
                None => prop_assert!(all.is_empty()),
            }
        }
    }

    fn base() -> ProgressionWitness {
        let g: IntMatrix = "2,1;1,1".parse().unwrap();
        build_progression(&DirectN, &g, 3, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn identity_transfer_returns_the_progression() {
        let w = base();
        let t = transfer_witness(&DirectN, &w, &TransferMap::identity(), 3, 20, &BuildOptions::default()).unwrap();
        let block = t.transfer.as_ref().unwrap();
        assert_eq!(block.multipliers, w.multipliers());
        assert_eq!(t.terms, w.terms);
        assert!(verify_witness(&t).passed());
    }

    #[test]
    fn constant_map_doubles() {
        let tm = TransferMap {
            d_m: 2,
            d_mp: 1,
            d: 1,
            d_prime: 1,
            pairs: vec![(2, 1)],
        };
        let t = transfer_witness(&DirectN, &base(), &tm, 3, 20, &BuildOptions::default()).unwrap();
        let block = t.transfer.as_ref().unwrap();
        assert_eq!(block.indices, [1, 2, 3]);
        let doubled: Vec<u64> = t.multipliers().iter().map(|m| 2 * m).collect();
        assert_eq!(block.multipliers, doubled);
        assert!(verify_witness(&t).passed());
    }

    #[test]
    fn period_two_map() {
        let tm = TransferMap {
            d_m: 2,
            d_mp: 3,
            d: 2,
            d_prime: 3,
            pairs: vec![(1, 1), (2, 3)],
        };
        let t = transfer_witness(&DirectN, &base(), &tm, 3, 20, &BuildOptions::default()).unwrap();
        let block = t.transfer.as_ref().unwrap();
        assert_eq!(block.big_d, 6);
        assert_eq!(block.indices, [1, 3, 5]);
        assert_eq!(t.c % 6, 0);
        let m = &block.multipliers;
        assert_eq!(m[1] - m[0], m[2] - m[1]);
        // C' D d' p / (q d) with p = q = 1, d = 2, d' = 3
        assert_eq!(m[0], t.c * 3 / 2 * t.primes[0]);
        assert!(verify_witness(&t).passed());
    }

    #[test]
    fn bad_maps_are_rejected() {
        let mut tm = TransferMap::identity();
        tm.pairs = vec![(2, 1)];
        assert!(matches!(
            transfer_witness(&DirectN, &base(), &tm, 3, 20, &BuildOptions::default()),
            Err(RamseyError::InvalidMap(_))
        ));
        let tm = TransferMap {
            d_m: 2,
            d_mp: 3,
            d: 1,
            d_prime: 1,
            pairs: vec![(1, 1), (2, 3)],
        };
        let e = transfer_witness(&DirectN, &base(), &tm, 3, 4, &BuildOptions::default()).unwrap_err();
        assert!(e.is_cap());
    }
}
