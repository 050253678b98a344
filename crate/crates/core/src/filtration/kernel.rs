use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::FiltrationError;
use crate::exact::arith::{is_prime, pow_mod_u64};
use crate::exact::{PrimePower, ResidueMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

/// Outcome of checking the kernel-layer lemmas on `SL(n, Z/p^{i+2})`.
#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub n: usize,
    pub p: u64,
    pub i: u32,
    pub mode: KernelMode,
    /// Elements `B = I mod p^i` examined.
    pub checked: usize,
    /// Those whose image mod `p^{i+1}` is not the identity.
    pub nontrivial: usize,
    /// Images mod `p^{i+1}` whose order is not 1 or `p`.
    pub order_violations: Vec<String>,
    /// Nontrivial elements with `B^p = I mod p^{i+2}` outside the excluded case.
    pub power_violations: Vec<String>,
    /// For `(p, i) = (2, 1)`: nontrivial elements with `B^2 = I mod 8`.
    pub excluded_case_witnesses: Vec<String>,
}

impl KernelReport {
    pub fn passed(&self) -> bool {
        self.order_violations.is_empty() && self.power_violations.is_empty()
    }
}

const MAX_RECORDED: usize = 16;

fn push_capped(list: &mut Vec<String>, item: impl FnOnce() -> String) {
    if list.len() < MAX_RECORDED {
        list.push(item());
    }
}

fn det_is_one(b: &ResidueMatrix) -> bool {
    b.det() == 1 % b.modulus().modulus()
}

/// Check every kernel element (exhaustive) or random products of kernel
/// generators (sampled).
pub fn kernel_order_check(n: usize, p: u64, i: u32, mode: KernelMode) -> Result<KernelReport, FiltrationError> {
    if !is_prime(p) {
        return Err(FiltrationError::NotPrime(p));
    }
    if !(2..=crate::exact::MAX_DIM).contains(&n) {
        return Err(crate::exact::ExactError::InvalidDimension(n).into());
    }
    if i == 0 {
        return Err(FiltrationError::Recipe {
            group: "kernel".into(),
            reason: "layer index i must be at least 1".into(),
        });
    }
    let top = PrimePower::new(p, i + 2)?;
    let mut report = KernelReport {
        n,
        p,
        i,
        mode,
        checked: 0,
        nontrivial: 0,
        order_violations: Vec::new(),
        power_violations: Vec::new(),
        excluded_case_witnesses: Vec::new(),
    };
    match mode {
        KernelMode::Exhaustive => {
            if n != 2 || p > 3 || i > 2 {
                return Err(FiltrationError::ExhaustiveTooLarge);
            }
            // B = I + p^i C with C running over M_2(Z/p^2)
            let pi = p.pow(i);
            let c_range = p * p;
            let total = c_range.pow(4);
            for code in 0..total {
                let mut c = code;
                let mut entries = Vec::with_capacity(4);
                for k in 0..4 {
                    let x = c % c_range;
                    c /= c_range;
                    entries.push(x * pi + u64::from(k == 0 || k == 3));
                }
                let b = ResidueMatrix::from_entries(2, top, entries);
                if det_is_one(&b) {
                    examine(&b, &mut report);
                }
            }
        }
        KernelMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let b = random_kernel_element(n, p, i, top, &mut rng);
                debug_assert!(det_is_one(&b));
                examine(&b, &mut report);
            }
        }
    }
    Ok(report)
}

fn random_kernel_element(n: usize, p: u64, i: u32, top: PrimePower, rng: &mut ChaCha8Rng) -> ResidueMatrix {
    let m = top.modulus();
    let pi = p.pow(i);
    let mut acc = ResidueMatrix::identity(n, top);
    let factors = rng.gen_range(1..=4);
    for _ in 0..factors {
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let x = rng.gen_range(0..p * p);
        let g = if rng.gen_bool(0.3) {
            // diag(1 + p^i x, (1 + p^i x)^{-1}) on coordinates a, b
            let d = (1 + pi * x) % m;
            let d_inv = inverse_mod(d, top);
            let mut e = ResidueMatrix::identity(n, top).entries().to_vec();
            e[a * n + a] = d;
            e[b * n + b] = d_inv;
            ResidueMatrix::from_entries(n, top, e)
        } else {
            // transvection I + p^i x e_ab
            let mut e = ResidueMatrix::identity(n, top).entries().to_vec();
            e[a * n + b] = (pi * x) % m;
            ResidueMatrix::from_entries(n, top, e)
        };
        acc = acc.mul(&g);
    }
    acc
}

/// Inverse of a unit modulo `p^k` by Euler's theorem.
fn inverse_mod(x: u64, modulus: PrimePower) -> u64 {
    let p = modulus.prime();
    let m = modulus.modulus();
    let phi = m / p * (p - 1);
    pow_mod_u64(x, phi - 1, m)
}

fn examine(b: &ResidueMatrix, report: &mut KernelReport) {
    let (p, i) = (report.p, report.i);
    report.checked += 1;
    let mid = b.reduce_to(i + 1);
    if mid.is_identity() {
        return;
    }
    report.nontrivial += 1;
    // order in the kernel layer must be p
    if !mid.pow(p).is_identity() {
        push_capped(&mut report.order_violations, || format!("{mid}: order is not p"));
    }
    let bp_trivial = b.pow(p).is_identity();
    if bp_trivial {
        if (p, i) == (2, 1) {
            push_capped(&mut report.excluded_case_witnesses, || b.to_string());
        } else {
            push_capped(&mut report.power_violations, || format!("{b}: B^{p} = I"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odd_prime_layers() {
        let r = kernel_order_check(2, 5, 1, KernelMode::Sampled { count: 500, seed: 1 }).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.nontrivial > 300);
        let r = kernel_order_check(2, 3, 2, KernelMode::Sampled { count: 500, seed: 2 }).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = kernel_order_check(3, 3, 1, KernelMode::Sampled { count: 300, seed: 3 }).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn exhaustive_small() {
        let r = kernel_order_check(2, 3, 1, KernelMode::Exhaustive).unwrap();
        assert!(r.passed());
        // |ker(SL(2, Z/27) -> SL(2, Z/3))| = 3^6
        assert_eq!(r.checked, 729);
        let r = kernel_order_check(2, 2, 2, KernelMode::Exhaustive).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn excluded_case_is_witnessed() {
        let r = kernel_order_check(2, 2, 1, KernelMode::Exhaustive).unwrap();
        assert!(r.passed());
        assert!(r.excluded_case_witnesses.contains(&"3,0;0,3 (mod 8)".to_string()), "{r:?}");
    }

    #[test]
    fn preconditions() {
        assert!(matches!(
            kernel_order_check(3, 3, 1, KernelMode::Exhaustive),
            Err(FiltrationError::ExhaustiveTooLarge)
        ));
        assert!(kernel_order_check(2, 4, 1, KernelMode::Exhaustive).is_err());
        assert!(kernel_order_check(2, 3, 0, KernelMode::Exhaustive).is_err());
    }
}
