use std::collections::BTreeSet;

use log::debug;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use super::primes::prime_ap_search;
use super::witness::{ContainsBlock, ProgressionWitness, WitnessTerm};
use super::ProgressionError;
use crate::exact::arith::{factor_u64, prime_divisors};
use crate::exact::IntMatrix;
use crate::filtration::{
    build_admissible, conjugate_product, entries_divisible, n_of_brute, stability_radius, AdmissibleElement,
    GroupType, NFunction,
};
use crate::geodesics::{
    abs_prim_root, classify_in_field, hyperbolic, is_absolutely_primitive, is_primitive, length_class,
};
use crate::quad::unit_exponent;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    /// Search bound for the prime progression.
    pub prime_bound: u64,
    pub max_k: usize,
    /// Largest level tried when looking for a common `R`.
    pub radius_cap: u32,
    pub window: u32,
    /// How far past `R + z` a denominator exponent may be raised.
    pub denominator_cap: u32,
    /// Refuse to build terms whose matrices would exceed this many digits.
    pub max_digits: u64,
    /// Extra factor forced into `C`; its primes are kept out of the progression.
    pub extra_divisor: u64,
    /// Recompute every n-value by plain iteration as well.
    pub brute_check: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            prime_bound: 10_000,
            max_k: 6,
            radius_cap: 8,
            window: 3,
            denominator_cap: 12,
            max_digits: 200_000,
            extra_divisor: 1,
            brute_check: true,
        }
    }
}

/// The `A1` element `diag(v^{1/2}, v^{-1/2})` that the progression builder
/// uses at every prime.
pub fn a1_element(v: u64) -> Result<AdmissibleElement, ProgressionError> {
    Ok(build_admissible(GroupType::A1, 2, v, (1, 2))?)
}

fn lcm_checked(a: u64, b: u64) -> Result<u64, ProgressionError> {
    let g = a.gcd(&b);
    (a / g)
        .checked_mul(b)
        .ok_or_else(|| ProgressionError::CapExceeded("lcm of n-values overflows 64 bits".into()))
}

/// `lcm` of `n(gamma, eta^r)` over the given pairs.
pub fn glue_constant(
    nf: &dyn NFunction,
    gamma: &IntMatrix,
    etas: &[(&AdmissibleElement, u32)],
) -> Result<u64, ProgressionError> {
    let mut c = 1;
    for (eta, r) in etas {
        c = lcm_checked(c, nf.n_value(gamma, eta, *r)?)?;
    }
    Ok(c)
}

/// For each `u^z || j` pick the least `r_u >= radius + z` such that `u^z`
/// divides `lcm(base, n(gamma, zeta_u^{r_u}))`. Returns `(u, r_u)`.
pub fn clear_denominator(
    nf: &dyn NFunction,
    gamma: &IntMatrix,
    base: u64,
    j: u64,
    radius: u32,
    cap: u32,
) -> Result<Vec<(u64, u32)>, ProgressionError> {
    if j == 0 {
        return Err(ProgressionError::InvalidInput("denominator must be positive".into()));
    }
    let mut out = Vec::new();
    for (u, z) in factor_u64(j) {
        let zeta = a1_element(u)?;
        let need = u.pow(z);
        let mut r = radius + z;
        loop {
            let n = nf.n_value(gamma, &zeta, r)?;
            if lcm_checked(base, n)? % need == 0 {
                break;
            }
            r += 1;
            if r > radius + z + cap {
                return Err(ProgressionError::CapExceeded(format!(
                    "no exponent up to {} clears {u}^{z}",
                    radius + z + cap
                )));
            }
        }
        out.push((u, r));
    }
    Ok(out)
}

struct Plan {
    radius: u32,
    c: u64,
    zetas: Vec<(u64, u32)>,
}

impl Plan {
    fn exponents(&self, primes: &[u64], i: usize) -> Vec<(u64, u32)> {
        let mut ex: Vec<(u64, u32)> = primes
            .iter()
            .enumerate()
            .map(|(t, &p)| (p, if t == i { self.radius + 1 } else { self.radius }))
            .chain(self.zetas.iter().copied())
            .collect();
        ex.sort_unstable();
        ex
    }
}

fn plan_at(
    nf: &dyn NFunction,
    gamma: &IntMatrix,
    primes: &[u64],
    etas: &[AdmissibleElement],
    j: u64,
    radius: u32,
    opts: &BuildOptions,
) -> Result<Option<Plan>, ProgressionError> {
    let lo: Vec<u64> = etas.iter().map(|e| nf.n_value(gamma, e, radius)).collect::<Result<_, _>>()?;
    let hi: Vec<u64> = etas.iter().map(|e| nf.n_value(gamma, e, radius + 1)).collect::<Result<_, _>>()?;
    let mut base = 1;
    for &n in &lo {
        base = lcm_checked(base, n)?;
    }
    let zetas = clear_denominator(nf, gamma, base, j, radius, opts.denominator_cap)?;
    let mut zeta_lcm = 1;
    for &(u, r) in &zetas {
        zeta_lcm = lcm_checked(zeta_lcm, nf.n_value(gamma, &a1_element(u)?, r)?)?;
    }
    let c = lcm_checked(base, zeta_lcm)?;
    for (i, &p) in primes.iter().enumerate() {
        let mut n_i = zeta_lcm;
        for (t, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            n_i = lcm_checked(n_i, if t == i { h } else { l })?;
        }
        if Some(n_i) != c.checked_mul(p) {
            debug!("R = {radius}: term {} has n = {n_i}, want {c} * {p}", i + 1);
            return Ok(None);
        }
    }
    Ok(Some(Plan { radius, c, zetas }))
}

/// Certified `k`-term progression `C (a i + b) l` of primitive lengths over
/// the base length `l` of the absolutely primitive `gamma_abs`.
pub fn build_progression(
    nf: &dyn NFunction,
    gamma_abs: &IntMatrix,
    k: usize,
    opts: &BuildOptions,
) -> Result<ProgressionWitness, ProgressionError> {
    let h = hyperbolic(gamma_abs)?;
    if !is_absolutely_primitive(&h)? {
        return Err(ProgressionError::NotAbsolutelyPrimitive(unit_exponent(h.lambda())?));
    }
    if k == 0 {
        return Err(ProgressionError::InvalidInput("k must be at least 1".into()));
    }
    if k > opts.max_k {
        return Err(ProgressionError::CapExceeded(format!("k = {k} exceeds the limit {}", opts.max_k)));
    }
    let j = opts.extra_divisor;
    if j == 0 {
        return Err(ProgressionError::InvalidInput("extra divisor must be positive".into()));
    }
    let base = length_class(&h)?;
    let mut exclude: BTreeSet<u64> = prime_divisors(j).into_iter().collect();
    exclude.insert(2);
    let ap = prime_ap_search(k, opts.prime_bound, &exclude)?;
    debug!("prime progression {:?}", ap.primes);
    let etas: Vec<AdmissibleElement> = ap.primes.iter().map(|&p| a1_element(p)).collect::<Result<_, _>>()?;

    // denominator primes only need divisibility, so they do not raise R
    let mut radius = 1;
    for eta in &etas {
        let rep = stability_radius(nf, gamma_abs, eta, opts.radius_cap, opts.window)?;
        radius = radius.max(rep.radius);
    }
    let plan = loop {
        if radius > opts.radius_cap {
            return Err(ProgressionError::CapExceeded(format!(
                "no common level up to {} realizes every term",
                opts.radius_cap
            )));
        }
        if let Some(plan) = plan_at(nf, gamma_abs, &ap.primes, &etas, j, radius, opts)? {
            break plan;
        }
        radius += 1;
    };
    if plan.c % j != 0 {
        return Err(ProgressionError::Inconsistent(format!("{j} does not divide C = {}", plan.c)));
    }

    let multipliers: Vec<u64> = ap
        .primes
        .iter()
        .map(|&p| {
            plan.c
                .checked_mul(p)
                .ok_or_else(|| ProgressionError::CapExceeded("multiplier overflows 64 bits".into()))
        })
        .collect::<Result<_, _>>()?;
    let u_digits = base_digits_per_step(&base.base_trace);
    let largest = *multipliers.last().expect("k >= 1") as f64;
    let scale_digits: f64 = plan
        .exponents(&ap.primes, k - 1)
        .iter()
        .map(|&(p, r)| r as f64 * (p as f64).log10())
        .sum();
    let estimate = largest * u_digits + scale_digits;
    if estimate > opts.max_digits as f64 {
        return Err(ProgressionError::CapExceeded(format!(
            "terms would need about {estimate:.0} digits (limit {})",
            opts.max_digits
        )));
    }

    if opts.brute_check {
        let mut pairs: Vec<(u64, u32)> = plan.zetas.clone();
        for &p in &ap.primes {
            pairs.push((p, plan.radius));
            pairs.push((p, plan.radius + 1));
        }
        pairs.par_iter().try_for_each(|&(p, r)| -> Result<(), ProgressionError> {
            let eta = a1_element(p)?;
            let fast = nf.n_value(gamma_abs, &eta, r)?;
            let slow = n_of_brute(gamma_abs, &eta, r, None)?;
            if fast != slow {
                return Err(ProgressionError::Inconsistent(format!(
                    "n at ({p}, {r}) is {fast}, iteration gives {slow}"
                )));
            }
            Ok(())
        })?;
    }

    let d0 = base.d0;
    let terms: Vec<WitnessTerm> = (0..k)
        .into_par_iter()
        .map(|i| {
            let exponents = plan.exponents(&ap.primes, i);
            let theta = realize_term(gamma_abs, multipliers[i], &exponents, d0)?;
            Ok(WitnessTerm {
                multiplier: multipliers[i],
                theta,
                exponents,
            })
        })
        .collect::<Result<_, ProgressionError>>()?;

    Ok(ProgressionWitness {
        base,
        gamma_abs: gamma_abs.clone(),
        c: plan.c,
        a: ap.a,
        b: ap.b,
        k,
        primes: ap.primes,
        radius: plan.radius,
        terms,
        contains: None,
        transfer: None,
    })
}

/// Digits added to the entries per unit of multiplier: `log10(u)`, `u` the
/// norm-one generator.
fn base_digits_per_step(trace: &BigInt) -> f64 {
    let t = crate::quad::ln_big(trace) / std::f64::consts::LN_10;
    // u ~ t for large traces, u = (t + sqrt(t^2 - 4)) / 2 otherwise
    let tf = 10f64.powf(t.min(300.0));
    if t < 300.0 {
        ((tf + (tf * tf - 4.0).max(0.0).sqrt()) / 2.0).log10()
    } else {
        t
    }
}

/// `theta = eta^{-1} gamma^m eta` for the product `eta` of the given prime powers,
/// checked to be integral, hyperbolic, minimal in `m` and primitive.
fn realize_term(gamma: &IntMatrix, m: u64, exponents: &[(u64, u32)], d0: u64) -> Result<IntMatrix, ProgressionError> {
    let elems: Vec<(AdmissibleElement, u32)> = exponents
        .iter()
        .map(|&(p, r)| Ok((a1_element(p)?, r)))
        .collect::<Result<_, ProgressionError>>()?;
    let factors: Vec<(&AdmissibleElement, u32)> = elems.iter().map(|(e, r)| (e, *r)).collect();
    let theta = conjugate_product(&factors, &gamma.pow(m))?
        .to_int()
        .ok_or_else(|| ProgressionError::Inconsistent(format!("conjugate of gamma^{m} is not integral")))?;
    let modulus: BigInt = elems
        .iter()
        .map(|(e, r)| BigInt::from(e.v()).pow(r * e.max_beta()))
        .product();
    for q in prime_divisors(m) {
        let g = gamma.pow_reduced(m / q, &modulus);
        if elems.iter().all(|(e, r)| entries_divisible(e, *r, |i, j| g.get(i, j).clone())) {
            return Err(ProgressionError::Inconsistent(format!("gamma^{} already satisfies the conditions", m / q)));
        }
    }
    if !theta.det().is_one() {
        return Err(ProgressionError::Inconsistent("theta does not have determinant 1".into()));
    }
    let h = classify_in_field(&theta, d0)?;
    if !is_primitive(&h)? {
        return Err(ProgressionError::Inconsistent(format!("term with multiplier {m} is not primitive")));
    }
    Ok(theta)
}

/// Progression containing the length of a primitive `gamma`: built over the
/// absolutely primitive root `mu` with `l_gamma = j l_mu` forced to divide `C`.
pub fn build_progression_containing(
    nf: &dyn NFunction,
    gamma: &IntMatrix,
    k: usize,
    opts: &BuildOptions,
) -> Result<ProgressionWitness, ProgressionError> {
    let h = hyperbolic(gamma)?;
    if !is_primitive(&h)? {
        return Err(ProgressionError::NotPrimitive);
    }
    let (mu, j) = abs_prim_root(&h)?;
    if j == 1 {
        return build_progression(nf, gamma, k, opts);
    }
    let extra = opts
        .extra_divisor
        .checked_mul(j)
        .ok_or_else(|| ProgressionError::CapExceeded("divisor overflows 64 bits".into()))?;
    let inner = BuildOptions {
        extra_divisor: extra,
        ..opts.clone()
    };
    let mut w = build_progression(nf, mu.matrix(), k, &inner)?;
    w.contains = Some(ContainsBlock {
        gamma: gamma.clone(),
        length: length_class(&h)?,
        j,
        multipliers: w.terms.iter().map(|t| t.multiplier / j).collect(),
    });
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyMember {
    pub r: u32,
    pub n: u64,
    pub theta: IntMatrix,
    pub primitive: bool,
}

/// `theta_r = eta^{-r} gamma^{n_r} eta^r` for `r = 1..=r_max` at a single prime `v`.
pub fn prime_power_family(
    nf: &dyn NFunction,
    gamma: &IntMatrix,
    v: u64,
    r_max: u32,
) -> Result<Vec<FamilyMember>, ProgressionError> {
    let h = hyperbolic(gamma)?;
    let eta = a1_element(v)?;
    (1..=r_max)
        .map(|r| {
            let n = nf.n_value(gamma, &eta, r)?;
            let theta = conjugate_product(&[(&eta, r)], &gamma.pow(n))?
                .to_int()
                .ok_or_else(|| ProgressionError::Inconsistent(format!("conjugate at r = {r} is not integral")))?;
            let primitive = is_primitive(&classify_in_field(&theta, h.d0())?)?;
            Ok(FamilyMember { r, n, theta, primitive })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{n_of_brute, DirectN};

    fn m(s: &str) -> IntMatrix {
        s.parse().unwrap()
    }

    #[test]
    fn single_prime_family() {
        let fam = prime_power_family(&DirectN, &m("2,1;1,1"), 5, 3).unwrap();
        let ns: Vec<u64> = fam.iter().map(|f| f.n).collect();
        assert_eq!(ns, [5, 25, 125]);
        assert_eq!(fam[0].theta, m("89,275;11,34"));
        assert!(fam.iter().all(|f| f.primitive && f.theta.det().is_one()));
    }

    #[test]
    fn five_term_progression() {
        let g = m("2,1;1,1");
        let w = build_progression(&DirectN, &g, 5, &BuildOptions::default()).unwrap();
        assert_eq!(w.primes, [5, 11, 17, 23, 29]);
        assert_eq!((w.a, w.b, w.radius), (6, -1, 1));
        // lcm of the n-values 5, 5, 9, 12, 7 at r = 1 (brute force)
        let brute: Vec<u64> = w
            .primes
            .iter()
            .map(|&p| n_of_brute(&g, &a1_element(p).unwrap(), 1, None).unwrap())
            .collect();
        let c = brute.iter().fold(1u64, |acc, &n| acc.lcm(&n));
        assert_eq!(w.c, c);
        assert_eq!(w.c, 1260);
        assert_eq!(w.multipliers(), [6300, 13860, 21420, 28980, 36540]);
        assert_eq!(w.terms[0].exponents, [(5, 2), (11, 1), (17, 1), (23, 1), (29, 1)]);
    }

    #[test]
    fn denominators_are_cleared() {
        let g = m("2,1;1,1");
        let zs = clear_denominator(&DirectN, &g, 5, 2, 1, 8).unwrap();
        assert_eq!(zs, [(2, 4)]);
        let w = build_progression(
            &DirectN,
            &g,
            3,
            &BuildOptions {
                extra_divisor: 6,
                ..BuildOptions::default()
            },
        )
        .unwrap();
        assert_eq!(w.primes, [5, 11, 17]);
        // n at r = 1: 5, 5, 9; zeta_3^2 gives 6, zeta_2^4 gives 6
        assert_eq!(w.c, 90);
        assert_eq!(w.terms[0].exponents, [(2, 4), (3, 2), (5, 2), (11, 1), (17, 1)]);
    }

    #[test]
    fn containing_a_non_absolutely_primitive_element() {
        let g = m("6,1;5,1");
        let w = build_progression_containing(&DirectN, &g, 3, &BuildOptions::default()).unwrap();
        let block = w.contains.as_ref().unwrap();
        assert_eq!(block.j, 2);
        assert_eq!(w.c % 2, 0);
        assert_eq!(w.gamma_abs, m("3,-1;1,0"));
        for (t, over) in w.terms.iter().zip(&block.multipliers) {
            assert_eq!(t.multiplier, over * 2);
        }
        // gamma absolutely primitive: same as the plain builder
        let f = m("2,1;1,1");
        let a = build_progression_containing(&DirectN, &f, 3, &BuildOptions::default()).unwrap();
        let b = build_progression(&DirectN, &f, 3, &BuildOptions::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn preconditions() {
        let opts = BuildOptions::default();
        assert!(matches!(
            build_progression(&DirectN, &m("6,1;5,1"), 3, &opts),
            Err(ProgressionError::NotAbsolutelyPrimitive(2))
        ));
        // the square of an absolutely primitive element is not primitive
        assert!(matches!(
            build_progression_containing(&DirectN, &m("5,3;3,2"), 3, &opts),
            Err(ProgressionError::NotPrimitive)
        ));
        assert!(build_progression(&DirectN, &m("2,1;1,1"), 0, &opts).is_err());
        let tight = BuildOptions {
            max_digits: 1000,
            ..opts
        };
        let e = build_progression(&DirectN, &m("2,1;1,1"), 5, &tight).unwrap_err();
        assert!(e.is_cap(), "{e}");
    }
}
