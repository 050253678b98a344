//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use apgeo_core::cli::run_with;
use apgeo_core::exact::IntMatrix;
use apgeo_core::filtration::{
    kernel_order_check, n_of, n_of_brute, stability_radius, DirectN, KernelMode, DEFAULT_WINDOW,
};
use apgeo_core::geodesics::{abs_prim_root, hyperbolic, is_absolutely_primitive, is_primitive};
use apgeo_core::progressions::{
    a1_element, build_progression_containing, prime_density_report, prime_power_family, verify_witness,
    BuildOptions, ProgressionWitness,
};
use apgeo_core::quad::unit_exponent;
use apgeo_core::ramsey::{find_mono_ap, transfer_witness, vdw_number, TransferMap, VdwOutcome};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

type Outcome = Result<String, String>;

fn m(s: &str) -> IntMatrix {
    s.parse().unwrap()
}

macro_rules! check {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Hyperbolic matrices with entries in `[-bound, bound]`, enumerated by `(a, d, b)`.
fn corpus(bound: i64) -> Vec<IntMatrix> {
    let mut out = Vec::new();
    for a in -bound..=bound {
        for d in -bound..=bound {
            if (a + d).abs() <= 2 {
                continue;
            }
            let bc = a * d - 1;
            for b in -bound..=bound {
                if b != 0 && bc % b == 0 && (bc / b).abs() <= bound {
                    out.push(IntMatrix::two_by_two(a, b, bc / b, d));
                }
            }
        }
    }
    out
}

fn ac1() -> Outcome {
    let all: Vec<IntMatrix> = corpus(8)
        .into_iter()
        .filter(|g| g.trace().abs() <= BigInt::from(20))
        .collect();
    let step = (all.len() / 40).max(1);
    let picked: Vec<IntMatrix> = all.iter().step_by(step).take(40).cloned().collect();
    check!(picked.len() >= 20, "corpus has only {} elements", picked.len());
    let mut from_one = 0;
    let mut pairs = 0;
    let mut max_r = 0;
    for g in &picked {
        for p in [3u64, 5, 7, 11, 13] {
            let eta = a1_element(p).unwrap();
            let ns: Vec<u64> = (1..=6).map(|r| n_of(g, &eta, r).unwrap()).collect();
            for r in 1..=5u32 {
                let brute = n_of_brute(g, &eta, r, None).unwrap();
                check!(brute == ns[r as usize - 1], "{g} at {p}^{r}: fast {} brute {brute}", ns[r as usize - 1]);
            }
            let rep = stability_radius(&DirectN, g, &eta, 4, DEFAULT_WINDOW)
                .map_err(|e| format!("{g} at {p}: {e}"))?;
            max_r = max_r.max(rep.radius);
            for r in rep.radius..=5 {
                let (lo, hi) = (ns[r as usize - 1], ns[r as usize]);
                check!(hi == lo || hi == p * lo, "{g} at {p}: n_{} / n_{r} = {hi}/{lo}", r + 1);
            }
            if (1..=5).all(|r| ns[r] == ns[r - 1] || ns[r] == p * ns[r - 1]) {
                from_one += 1;
            }
            pairs += 1;
        }
    }
    Ok(format!(
        "{} elements, {pairs} pairs, max R = {max_r}, ratio law from r = 1 in {from_one}/{pairs}",
        picked.len()
    ))
}

fn ac2() -> Outcome {
    for i in [1, 2] {
        let r = kernel_order_check(2, 3, i, KernelMode::Exhaustive).map_err(|e| e.to_string())?;
        check!(r.passed(), "exhaustive (2, 3, {i}): {:?} {:?}", r.order_violations, r.power_violations);
    }
    let r = kernel_order_check(2, 2, 1, KernelMode::Exhaustive).map_err(|e| e.to_string())?;
    let witness = "3,0;0,3 (mod 8)".to_string();
    check!(r.excluded_case_witnesses.contains(&witness), "3I not among the (2, 1) witnesses");
    let three = IntMatrix::two_by_two(3, 0, 0, 3);
    let sq = three.mul(&three).unwrap().reduce(&BigInt::from(8));
    check!(sq.is_identity(), "(3I)^2 is not I mod 8");
    for (n, p, i) in [(2, 5, 1), (3, 3, 1), (2, 3, 2)] {
        let r = kernel_order_check(n, p, i, KernelMode::Sampled { count: 600, seed: 7 }).map_err(|e| e.to_string())?;
        check!(r.checked >= 500 && r.passed(), "sampled ({n}, {p}, {i}) failed");
    }
    Ok("exhaustive i = 1, 2; 3I witnessed; sampled x3".into())
}

fn ac3() -> Outcome {
    let g = m("2,1;1,1");
    let fam = prime_power_family(&DirectN, &g, 5, 3).map_err(|e| e.to_string())?;
    let ns: Vec<u64> = fam.iter().map(|f| f.n).collect();
    check!(ns == [5, 25, 125], "n-values {ns:?}");
    let eta = a1_element(5).unwrap();
    for f in &fam {
        check!(n_of_brute(&g, &eta, f.r, None).unwrap() == f.n, "brute disagrees at r = {}", f.r);
        check!(f.theta.det().is_one() && f.primitive, "theta_{} not a primitive SL2 element", f.r);
    }
    check!(fam[0].theta == m("89,275;11,34"), "theta_1 = {}", fam[0].theta);
    Ok("n = (5, 25, 125), theta_1 = [[89,275],[11,34]]".into())
}

fn ac4() -> Outcome {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(
        ["apgeo", "--no-cache", "progression", "--k", "5", "--gamma", "2,1;1,1"],
        &mut out,
        &mut err,
    );
    check!(code == 0, "exit {code}: {}", String::from_utf8_lossy(&err));
    let w = ProgressionWitness::from_json(&String::from_utf8(out).unwrap()).map_err(|e| e.to_string())?;
    check!(w.primes == [5, 11, 17, 23, 29], "primes {:?}", w.primes);
    // oracle: lcm of brute n-values at the common level
    let g = m("2,1;1,1");
    let c = w
        .primes
        .iter()
        .map(|&p| n_of_brute(&g, &a1_element(p).unwrap(), w.radius, None).unwrap())
        .fold(1u64, |acc, n| acc.lcm(&n));
    check!(w.c == c && c == 1260 && w.radius == 1, "C = {} at R = {}, oracle {c}", w.c, w.radius);
    let want: Vec<u64> = w.primes.iter().map(|p| c * p).collect();
    check!(w.multipliers() == want, "multipliers {:?}", w.multipliers());
    check!(want.windows(2).all(|x| x[1] - x[0] == 6 * c), "difference is not 6C");
    let rep = verify_witness(&w);
    check!(rep.passed(), "verify: {:?}", rep.failures().collect::<Vec<_>>());
    let digits = w.terms.last().unwrap().theta.max_digits();
    Ok(format!("C = 1260, multipliers {want:?}, largest entry {digits} digits"))
}

fn ac5() -> Outcome {
    let g = m("6,1;5,1");
    let w = build_progression_containing(&DirectN, &g, 3, &BuildOptions::default()).map_err(|e| e.to_string())?;
    let block = w.contains.as_ref().ok_or("no contains block")?;
    let base = unit_exponent(hyperbolic(&g).unwrap().lambda()).unwrap();
    check!(block.j == 2 && base == 2 && w.c % 2 == 0, "j = {}, C = {}", block.j, w.c);
    check!(w.multipliers().iter().all(|x| x % base == 0), "multipliers not multiples of {base}");
    check!(verify_witness(&w).passed(), "verification failed");
    Ok(format!("C = {}, multipliers over gamma {:?}", w.c, block.multipliers))
}

fn ac6() -> Outcome {
    let w = apgeo_core::progressions::build_progression(&DirectN, &m("2,1;1,1"), 3, &BuildOptions::default())
        .map_err(|e| e.to_string())?;
    let tm = TransferMap {
        d_m: 2,
        d_mp: 3,
        d: 2,
        d_prime: 3,
        pairs: vec![(1, 1), (2, 3)],
    };
    let t = transfer_witness(&DirectN, &w, &tm, 3, 40, &BuildOptions::default()).map_err(|e| e.to_string())?;
    let block = t.transfer.as_ref().ok_or("no transfer block")?;
    let colors: Vec<usize> = block.indices.iter().map(|&i| block.coloring[i - 1]).collect();
    check!(colors.iter().all(|&c| c == colors[0]), "not monochromatic");
    let ms = &block.multipliers;
    check!(ms.len() == 3 && ms[1] - ms[0] == ms[2] - ms[1] && ms[0] > 0, "not a 3-term AP: {ms:?}");
    // recompute each multiplier as an exact rational and insist on integrality
    let c_prime = t.c / block.big_d;
    for (s, &i) in block.indices.iter().enumerate() {
        let num = c_prime as u128 * block.big_d as u128 * block.d_prime as u128 * block.p as u128 * t.primes[i - 1] as u128;
        let den = block.q as u128 * block.d as u128;
        check!(num % den == 0 && num / den == ms[s] as u128, "term {i} is {num}/{den}");
    }
    check!(verify_witness(&t).passed(), "verification failed");
    Ok(format!("D = {}, N = {}, multipliers {ms:?}", block.big_d, t.k))
}

fn ac7() -> Outcome {
    let start = Instant::now();
    let outcome = vdw_number(2, 3, 20).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let VdwOutcome::Exact { n, certificate } = outcome else {
        return Err("no value below the cap".into());
    };
    check!(n == 9, "W(2,3) = {n}");
    check!(certificate == [0, 0, 1, 1, 0, 0, 1, 1], "certificate {certificate:?}");
    check!(find_mono_ap(&certificate, 3).is_none(), "certificate has a monochromatic 3-AP");
    check!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("W(2,3) = 9 in {elapsed:?}"))
}

fn ac8() -> Outcome {
    let r = prime_density_report(5, 100_000).map_err(|e| e.to_string())?;
    check!((r.proportion - 0.5).abs() <= 0.02, "proportion {}", r.proportion);
    Ok(format!("{} of {} primes split ({:.4})", r.split, r.primes, r.proportion))
}

fn ac9() -> Outcome {
    let all = corpus(30);
    let mut abs_count = 0;
    for a in &all {
        let g = hyperbolic(a).map_err(|e| e.to_string())?;
        let abs = is_absolutely_primitive(&g).unwrap();
        if abs {
            abs_count += 1;
            check!(is_primitive(&g).unwrap(), "{a} absolutely primitive but not primitive");
        }
        for k in [2, 3] {
            let p = hyperbolic(&a.pow(k)).unwrap();
            check!(!is_primitive(&p).unwrap(), "{a}^{k} reported primitive");
        }
        let (mu, j) = abs_prim_root(&g).unwrap();
        check!(unit_exponent(mu.lambda()).unwrap() == 1, "{a}: root not absolutely primitive");
        check!(&mu.lambda().pow(j) == g.lambda(), "{a}: lambda_mu^{j} != lambda");
    }
    Ok(format!("{} matrices, {abs_count} absolutely primitive", all.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("AC1 lifting law and stability radius", ac1, 60),
        ("AC2 kernel-order lemmas", ac2, 30),
        ("AC3 single-prime family at 5", ac3, 30),
        ("AC4 five-term progression end to end", ac4, 120),
        ("AC5 progression containing [[6,1],[5,1]]", ac5, 120),
        ("AC6 transfer across a commensurability", ac6, 120),
        ("AC7 Van der Waerden W(2,3)", ac7, 1),
        ("AC8 split-prime density for D0 = 5", ac8, 30),
        ("AC9 geodesic invariants, entries <= 30", ac9, 120),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let res = match res {
            Ok(d) if secs > limit as f64 => Err(format!("{d}; took {secs:.2}s, limit {limit}s")),
            other => other,
        };
        match res {
            Ok(detail) => println!("PASS {name} ({secs:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} ({secs:.2}s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
