use num_traits::One;

use super::admissible::AdmissibleElement;
use super::FiltrationError;
use crate::exact::arith::factor_u64;
use crate::exact::{IntMatrix, PrimePower, ResidueMatrix};

/// Source of values `n(gamma, eta^r)`; lets callers put a cache in front of
/// the computation.
pub trait NFunction: Sync {
    fn n_value(&self, gamma: &IntMatrix, eta: &AdmissibleElement, r: u32) -> Result<u64, FiltrationError>;
}

/// Computes every value directly with [`n_of`].
#[derive(Clone, Copy, Debug, Default)]
pub struct DirectN;

impl NFunction for DirectN {
    fn n_value(&self, gamma: &IntMatrix, eta: &AdmissibleElement, r: u32) -> Result<u64, FiltrationError> {
        n_of(gamma, eta, r)
    }
}

fn check_gamma(gamma: &IntMatrix, eta: &AdmissibleElement) -> Result<(), FiltrationError> {
    if gamma.dim() != eta.dim() {
        return Err(FiltrationError::DimensionMismatch {
            got: gamma.dim(),
            want: eta.dim(),
        });
    }
    let det = gamma.det();
    if !det.is_one() {
        return Err(FiltrationError::NotUnimodular(det));
    }
    // orders below rely on |GL(n, F_v)| fitting comfortably in 64 bits
    if eta.v().checked_pow(eta.dim() as u32).is_none() {
        return Err(FiltrationError::Overflow("v^n"));
    }
    Ok(())
}

fn level_modulus(eta: &AdmissibleElement, r: u32) -> Result<PrimePower, FiltrationError> {
    Ok(PrimePower::new(eta.v(), (r * eta.max_beta()).max(1))?)
}

/// The congruence conditions at level `r` on a residue matrix whose modulus
/// is at least `v^{r max beta}`.
fn satisfies(g: &ResidueMatrix, eta: &AdmissibleElement, r: u32) -> bool {
    let v = eta.v();
    eta.positive_set()
        .iter()
        .all(|&(i, j)| g.is_zero_mod(i, j, v.pow(r * eta.beta_at(i, j) as u32)))
}

/// Multiplicative order of `A` in `SL(n, Z/p^r)`.
pub fn order_mod(a: &IntMatrix, p: u64, r: u32) -> Result<u64, FiltrationError> {
    let det = a.det();
    if !det.is_one() {
        return Err(FiltrationError::NotUnimodular(det));
    }
    if p.checked_pow(a.dim() as u32).is_none() {
        return Err(FiltrationError::Overflow("p^n"));
    }
    Ok(ResidueMatrix::from_int(a, PrimePower::new(p, r)?).order())
}

/// Least `j >= 1` with `v^{r beta_ij} | (gamma^j)_ij` on `T`, by iterating
/// `gamma` modulo `v^{r max beta}`. Without an explicit cap the search is
/// bounded by the order of `gamma` at that modulus, where it must succeed.
pub fn n_of_brute(
    gamma: &IntMatrix,
    eta: &AdmissibleElement,
    r: u32,
    cap: Option<u64>,
) -> Result<u64, FiltrationError> {
    check_gamma(gamma, eta)?;
    if r == 0 {
        return Ok(1);
    }
    let base = ResidueMatrix::from_int(gamma, level_modulus(eta, r)?);
    let cap = match cap {
        Some(c) => c,
        None => base.order(),
    };
    let mut acc = base.clone();
    for j in 1..=cap {
        if satisfies(&acc, eta, r) {
            return Ok(j);
        }
        acc = acc.mul(&base);
    }
    Err(FiltrationError::CapExceeded { cap })
}

/// Smallest `e >= 1` with `g^e` satisfying level `r`. The exponents that work
/// form a subgroup `e_0 Z` containing the order of `g`, so `e_0` is found by
/// stripping prime factors off the order.
fn least_exponent(g: &ResidueMatrix, eta: &AdmissibleElement, r: u32) -> u64 {
    if satisfies(g, eta, r) {
        return 1;
    }
    let mut e = g.order();
    for (q, mult) in factor_u64(e) {
        for _ in 0..mult {
            if satisfies(&g.pow(e / q), eta, r) {
                e /= q;
            } else {
                break;
            }
        }
    }
    e
}

/// `n(gamma, eta^r)`, lifted level by level: `n_{s+1} = n_s * e` where `e` is
/// the least exponent making `(gamma^{n_s})^e` satisfy level `s + 1`.
pub fn n_of(gamma: &IntMatrix, eta: &AdmissibleElement, r: u32) -> Result<u64, FiltrationError> {
    check_gamma(gamma, eta)?;
    let mut n = 1u64;
    for level in 1..=r {
        let g = ResidueMatrix::from_int(gamma, level_modulus(eta, level)?).pow(n);
        let e = least_exponent(&g, eta, level);
        n = n.checked_mul(e).ok_or(FiltrationError::Overflow("n(gamma, eta^r)"))?;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{build_admissible, conjugate_scaled, GroupType};
    use proptest::prelude::*;

    fn m(s: &str) -> IntMatrix {
        s.parse().unwrap()
    }

    fn a1(v: u64) -> AdmissibleElement {
        build_admissible(GroupType::A1, 2, v, (1, 2)).unwrap()
    }

    #[test]
    fn fibonacci_examples() {
        let g = m("2,1;1,1");
        assert_eq!(n_of_brute(&g, &a1(5), 1, None).unwrap(), 5);
        assert_eq!(n_of_brute(&g, &a1(5), 2, None).unwrap(), 25);
        assert_eq!(n_of_brute(&g, &a1(11), 1, None).unwrap(), 5);
        assert_eq!(n_of(&g, &a1(5), 1).unwrap(), 5);
        assert_eq!(n_of(&g, &a1(5), 2).unwrap(), 25);
        assert_eq!(n_of(&g, &a1(11), 1).unwrap(), 5);
        assert!(matches!(
            n_of_brute(&g, &a1(5), 2, Some(10)),
            Err(FiltrationError::CapExceeded { cap: 10 })
        ));
    }

    #[test]
    fn known_tables() {
        // independent values from a direct search in Python
        let g = m("2,1;1,1");
        let table: &[(u64, [u64; 4])] = &[
            (2, [3, 3, 3, 6]),
            (3, [2, 6, 18, 54]),
            (5, [5, 25, 125, 625]),
            (7, [4, 28, 196, 1372]),
            (11, [5, 55, 605, 6655]),
            (13, [7, 91, 1183, 15379]),
            (17, [9, 153, 2601, 44217]),
            (23, [12, 276, 6348, 146004]),
            (29, [7, 203, 5887, 170723]),
        ];
        for (p, row) in table {
            for (r, want) in row.iter().enumerate() {
                assert_eq!(n_of(&g, &a1(*p), r as u32 + 1).unwrap(), *want, "p = {p}, r = {}", r + 1);
            }
        }
        let h = m("2,1;7,4");
        let got: Vec<u64> = (1..=5).map(|r| n_of(&h, &a1(7), r).unwrap()).collect();
        assert_eq!(got, [1, 3, 21, 147, 1029]);
    }

    #[test]
    fn orders() {
        let g = m("2,1;1,1");
        assert_eq!(order_mod(&g, 5, 1).unwrap(), 10);
        assert_eq!(order_mod(&g, 5, 2).unwrap(), 50);
        assert_eq!(order_mod(&IntMatrix::identity(3), 7, 2).unwrap(), 1);
        assert!(order_mod(&m("2,0;0,1"), 5, 1).is_err());
    }

    #[test]
    fn higher_rank() {
        let eta = build_admissible(GroupType::InnerA, 3, 3, (1, 3)).unwrap();
        let g = m("1,1,0;0,1,1;1,1,1");
        for r in 1..=3 {
            let n = n_of(&g, &eta, r).unwrap();
            assert_eq!(n, n_of_brute(&g, &eta, r, None).unwrap());
            let scaled = conjugate_scaled(&eta, r, &g.pow(n)).unwrap();
            assert!(scaled.is_integral());
        }
    }

    fn sl2() -> impl Strategy<Value = IntMatrix> {
        prop::collection::vec(0u8..4, 1..10).prop_map(|word| {
            let gens = [m("1,1;0,1"), m("1,-1;0,1"), m("1,0;1,1"), m("1,0;-1,1")];
            word.iter()
                .fold(IntMatrix::identity(2), |acc, &g| acc.mul(&gens[g as usize]).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fast_path_matches_brute(g in sl2(), pi in 0usize..5, r in 1u32..4) {
            let p = [2u64, 3, 5, 7, 11][pi];
            let eta = a1(p);
            prop_assert_eq!(n_of(&g, &eta, r).unwrap(), n_of_brute(&g, &eta, r, None).unwrap());
        }

        #[test]
        fn subgroup_law(g in sl2(), pi in 0usize..4, r in 1u32..3) {
            let p = [2u64, 3, 5, 7][pi];
            let eta = a1(p);
            let n = n_of(&g, &eta, r).unwrap();
            prop_assume!(n <= 400);
            for j in 1..=2 * n {
                let ok = conjugate_scaled(&eta, r, &g.pow(j)).unwrap().is_integral();
                prop_assert_eq!(ok, j % n == 0, "j = {}", j);
            }
            if g.trace().magnitude() > &2u32.into() {
                let img = conjugate_scaled(&eta, r, &g.pow(n)).unwrap().to_int().unwrap();
                prop_assert!(img.det().is_one());
                prop_assert!(img.trace().magnitude() > &2u32.into());
            }
        }

        #[test]
        fn order_ratio_is_one_or_p(g in sl2(), pi in 0usize..5, r in 1u32..4) {
            let p = [2u64, 3, 5, 7, 11][pi];
            let lo = order_mod(&g, p, r).unwrap();
            let hi = order_mod(&g, p, r + 1).unwrap();
            prop_assert_eq!(hi % lo, 0);
            prop_assert!(hi / lo == 1 || hi / lo == p);
        }
    }
}
