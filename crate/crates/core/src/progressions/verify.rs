use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use super::witness::{ContainsBlock, ProgressionWitness, TransferBlock};
use crate::exact::arith::{divisors, is_prime};
use crate::exact::IntMatrix;
use crate::geodesics::{abs_prim_root, classify_in_field, hyperbolic, is_primitive, length_class};
use crate::quad::unit_exponent;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    fn record(&mut self, name: impl Into<String>, outcome: Result<String, String>) {
        let (pass, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail,
        });
    }
}

/// `V_m(t)` by the recurrence `V_{s+1} = t V_s - V_{s-1}`, `V_0 = 2`, `V_1 = t`.
pub fn trace_by_recurrence(t: &BigInt, m: u64) -> BigInt {
    let mut prev = BigInt::from(2);
    let mut cur = t.clone();
    if m == 0 {
        return prev;
    }
    for _ in 1..m {
        let next = t * &cur - &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

fn ensure(cond: bool, ok: impl Into<String>, err: impl Into<String>) -> Result<String, String> {
    if cond {
        Ok(ok.into())
    } else {
        Err(err.into())
    }
}

/// Re-check a witness from scratch, without reusing anything the builder computed.
pub fn verify_witness(w: &ProgressionWitness) -> VerificationReport {
    let mut rep = VerificationReport::default();
    rep.record("base", check_base(w));
    rep.record("primes", check_primes(w));
    rep.record("multipliers", check_multipliers(w));
    let base_trace = w.gamma_abs.trace();
    for (i, term) in w.terms.iter().enumerate() {
        let idx = i + 1;
        let th = &term.theta;
        let sl2 = th.dim() == 2 && th.det().is_one() && th.trace().abs() > BigInt::from(2);
        rep.record(
            format!("term {idx}: det 1 and hyperbolic"),
            ensure(sl2, "ok", format!("det {} trace digits {}", th.det(), th.trace().to_string().len())),
        );
        rep.record(format!("term {idx}: trace"), {
            let want = trace_by_recurrence(&base_trace, term.multiplier);
            ensure(th.trace() == want, "matches the recurrence", "trace differs from V_m of the base")
        });
        rep.record(format!("term {idx}: exponents"), check_exponents(w, i));
        rep.record(format!("term {idx}: primitive"), check_term_primitive(th, w.base.d0, term.multiplier, sl2));
    }
    if let Some(c) = &w.contains {
        rep.record("contains", check_contains(w, c));
    }
    if let Some(t) = &w.transfer {
        rep.record("transfer", check_transfer(w, t));
    }
    rep
}

fn check_base(w: &ProgressionWitness) -> Result<String, String> {
    let h = hyperbolic(&w.gamma_abs).map_err(|e| e.to_string())?;
    let m = unit_exponent(h.lambda()).map_err(|e| e.to_string())?;
    if m != 1 {
        return Err(format!("gamma_abs has unit exponent {m}"));
    }
    let lc = length_class(&h).map_err(|e| e.to_string())?;
    ensure(lc == w.base, format!("d0 = {}", lc.d0), "recorded base length differs")
}

fn check_primes(w: &ProgressionWitness) -> Result<String, String> {
    if w.k == 0 || w.primes.len() != w.k || w.terms.len() != w.k {
        return Err(format!("k = {} with {} primes and {} terms", w.k, w.primes.len(), w.terms.len()));
    }
    for (i, &p) in w.primes.iter().enumerate() {
        let want = w.a as i128 * (i as i128 + 1) + w.b as i128;
        if want != p as i128 {
            return Err(format!("p_{} = {p}, expected {want}", i + 1));
        }
        if !is_prime(p) || p == 2 {
            return Err(format!("{p} is not an odd prime"));
        }
    }
    Ok(format!("{:?}", w.primes))
}

fn check_multipliers(w: &ProgressionWitness) -> Result<String, String> {
    for (t, &p) in w.terms.iter().zip(&w.primes) {
        if Some(t.multiplier) != w.c.checked_mul(p) {
            return Err(format!("multiplier {} is not C * {p}", t.multiplier));
        }
    }
    let m = w.multipliers();
    let diffs_ok = m.windows(2).all(|x| x[1].checked_sub(x[0]) == w.c.checked_mul(w.a));
    ensure(diffs_ok, format!("C = {}", w.c), "multipliers are not in progression")
}

fn check_exponents(w: &ProgressionWitness, i: usize) -> Result<String, String> {
    let ex = &w.terms[i].exponents;
    for (t, &p) in w.primes.iter().enumerate() {
        let want = if t == i { w.radius + 1 } else { w.radius };
        if !ex.contains(&(p, want)) {
            return Err(format!("expected exponent {want} at {p}"));
        }
    }
    ensure(
        ex.iter().all(|&(p, r)| is_prime(p) && r >= 1),
        "ok",
        "exponent list has a non-prime or zero entry",
    )
}

fn check_term_primitive(theta: &IntMatrix, d0: u64, m: u64, sl2: bool) -> Result<String, String> {
    if !sl2 {
        return Err("not an element of SL(2, Z) with |trace| > 2".into());
    }
    let h = classify_in_field(theta, d0).map_err(|e| e.to_string())?;
    let exp = unit_exponent(h.lambda()).map_err(|e| e.to_string())?;
    if exp != m {
        return Err(format!("length is {exp} times the base, recorded {m}"));
    }
    ensure(is_primitive(&h).map_err(|e| e.to_string())?, "primitive", "theta is a proper power")
}

fn check_contains(w: &ProgressionWitness, c: &ContainsBlock) -> Result<String, String> {
    let h = hyperbolic(&c.gamma).map_err(|e| e.to_string())?;
    if !is_primitive(&h).map_err(|e| e.to_string())? {
        return Err("gamma is not primitive".into());
    }
    let (_, j) = abs_prim_root(&h).map_err(|e| e.to_string())?;
    if j != c.j || h.d0() != w.base.d0 {
        return Err(format!("gamma has length {j} times the base of Q(sqrt({})), recorded {}", h.d0(), c.j));
    }
    if length_class(&h).map_err(|e| e.to_string())? != c.length {
        return Err("recorded length of gamma differs".into());
    }
    if w.c % j != 0 {
        return Err(format!("{j} does not divide C"));
    }
    let ok = c.multipliers.len() == w.terms.len()
        && c.multipliers.iter().zip(&w.terms).all(|(o, t)| o.checked_mul(j) == Some(t.multiplier));
    ensure(ok, format!("j = {j}"), "multipliers over gamma are not multiplier / j")
}

fn check_transfer(w: &ProgressionWitness, t: &TransferBlock) -> Result<String, String> {
    let prod = |x: u64| divisors(x).iter().try_fold(1u64, |acc, d| acc.checked_mul(*d));
    let big_d = prod(t.d_m)
        .zip(prod(t.d_mp))
        .and_then(|(a, b)| a.checked_mul(b))
        .ok_or("D overflows")?;
    if big_d != t.big_d {
        return Err(format!("D = {big_d}, recorded {}", t.big_d));
    }
    if w.c % big_d != 0 {
        return Err(format!("D = {big_d} does not divide C"));
    }
    if t.d == 0 || t.d_m % t.d != 0 || t.d_prime == 0 || t.d_mp % t.d_prime != 0 {
        return Err("d or d' does not divide its degree".into());
    }
    if t.pairs.is_empty() || t.pairs.iter().any(|&(p, q)| p == 0 || q == 0 || t.d_m % p != 0 || t.d_mp % q != 0) {
        return Err("a divisor pair does not divide the degrees".into());
    }
    let cyclic = t.coloring.iter().enumerate().all(|(i, &c)| {
        let pair = t.pairs[i % t.pairs.len()];
        t.pairs.iter().position(|&x| x == pair) == Some(c)
    });
    if t.coloring.len() != w.k || !cyclic {
        return Err("coloring is not the cyclic assignment of pairs".into());
    }
    if t.indices.len() != t.k || t.multipliers.len() != t.k || t.k == 0 {
        return Err("transfer length mismatch".into());
    }
    for (s, &idx) in t.indices.iter().enumerate() {
        if idx as i64 != t.a_prime as i64 * (s as i64 + 1) + t.b_prime || idx == 0 || idx > w.k {
            return Err(format!("index {idx} is not a' i + b'"));
        }
        let colour = t.coloring[idx - 1];
        if t.pairs[colour] != (t.p, t.q) {
            return Err(format!("term {idx} is coloured with another pair"));
        }
    }
    // C' D d' p / (q d) (a (a' i + b') + b)
    let num = (w.c as u128) * t.d_prime as u128 * t.p as u128;
    let den = t.q as u128 * t.d as u128;
    if num % den != 0 {
        return Err("scale factor is not an integer".into());
    }
    let scale = num / den;
    for (s, &idx) in t.indices.iter().enumerate() {
        let want = scale * w.primes[idx - 1] as u128;
        if want != t.multipliers[s] as u128 {
            return Err(format!("transferred multiplier {} should be {want}", t.multipliers[s]));
        }
    }
    let m = &t.multipliers;
    let ap = m.windows(2).all(|x| x[1] > x[0] && x[1] - x[0] == m[1] - m[0]);
    ensure(ap, format!("{} terms", t.k), "transferred multipliers are not in progression")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::DirectN;
    use crate::geodesics::lucas_v;
    use crate::progressions::{build_progression, build_progression_containing, BuildOptions};

    fn five_terms() -> ProgressionWitness {
        let g: IntMatrix = "2,1;1,1".parse().unwrap();
        build_progression(&DirectN, &g, 5, &BuildOptions::default()).unwrap()
    }

    fn failed(rep: &VerificationReport) -> Vec<String> {
        rep.failures().map(|c| c.name.clone()).collect()
    }

    #[test]
    fn built_witness_verifies_and_round_trips() {
        let w = five_terms();
        let rep = verify_witness(&w);
        assert!(rep.passed(), "{:?}", failed(&rep));
        let back = ProgressionWitness::from_json(&w.to_json()).unwrap();
        assert_eq!(back, w);
        let v: serde_json::Value = serde_json::from_str(&w.to_json()).unwrap();
        assert_eq!(v["C"], "1260");
        assert_eq!(v["terms"][0]["multiplier"], "6300");
    }

    #[test]
    fn tampering_is_caught() {
        let w = five_terms();
        let mut bad = w.clone();
        let th = &bad.terms[0].theta;
        bad.terms[0].theta = th.map_entries(|i, j, x| if (i, j) == (0, 0) { x + 1 } else { x.clone() });
        let f = failed(&verify_witness(&bad));
        assert!(f.contains(&"term 1: det 1 and hyperbolic".to_string()), "{f:?}");

        let mut sq = w.clone();
        sq.terms[0].theta = sq.terms[0].theta.mul(&sq.terms[0].theta).unwrap();
        let f = failed(&verify_witness(&sq));
        assert!(f.contains(&"term 1: primitive".to_string()), "{f:?}");
        assert!(f.contains(&"term 1: trace".to_string()), "{f:?}");

        let mut c = w.clone();
        c.c += 1;
        assert!(failed(&verify_witness(&c)).contains(&"multipliers".to_string()));

        let mut p = w;
        p.primes[2] = 19;
        assert!(failed(&verify_witness(&p)).contains(&"primes".to_string()));
    }

    #[test]
    fn contains_block_verifies() {
        let g: IntMatrix = "6,1;5,1".parse().unwrap();
        let w = build_progression_containing(&DirectN, &g, 3, &BuildOptions::default()).unwrap();
        assert!(verify_witness(&w).passed());
        let mut bad = w.clone();
        bad.contains.as_mut().unwrap().j = 3;
        assert!(failed(&verify_witness(&bad)).contains(&"contains".to_string()));
    }

    #[test]
    fn recurrence_matches_lucas() {
        for t in [3i64, 4, 7, -3] {
            let t = BigInt::from(t);
            for m in [0u64, 1, 2, 5, 17] {
                assert_eq!(trace_by_recurrence(&t, m), lucas_v(&t, m));
            }
        }
    }
}
