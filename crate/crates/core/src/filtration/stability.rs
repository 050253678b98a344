use serde::Serialize;

use super::admissible::AdmissibleElement;
use super::nfun::NFunction;
use super::FiltrationError;
use crate::exact::IntMatrix;

pub const DEFAULT_WINDOW: u32 = 3;
pub const DEFAULT_STABILITY_CAP: u32 = 8;

/// Measured onset of the lifting law `n_{r+1} = v^{eps_r omega} n_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub gamma: String,
    pub v: u64,
    /// `(r, n(gamma, eta^r))` for every probed level; values as decimal strings.
    pub sequence: Vec<(u32, String)>,
    #[serde(rename = "R")]
    pub radius: u32,
    pub omega: u32,
    /// `eps_r` for `r = R, ..., R + window - 1`.
    pub epsilons: Vec<u8>,
    pub window: u32,
}

impl StabilityReport {
    pub fn n_at(&self, r: u32) -> Option<u64> {
        self.sequence
            .iter()
            .find(|(s, _)| *s == r)
            .and_then(|(_, n)| n.parse().ok())
    }
}

/// `Some(k)` when `x = v^k`.
fn v_adic_power(mut x: u64, v: u64) -> Option<u32> {
    let mut k = 0;
    while x > 1 {
        if x % v != 0 {
            return None;
        }
        x /= v;
        k += 1;
    }
    (x == 1).then_some(k)
}

/// Least `R <= cap` such that over `r = R .. R + window - 1` every ratio
/// `n_{r+1} / n_r` is `1` or `v^omega` for one `omega` dividing `beta_eta`,
/// with at least one jump. Probing starts at `r = 2` when `v = 2`.
pub fn stability_radius(
    nf: &dyn NFunction,
    gamma: &IntMatrix,
    eta: &AdmissibleElement,
    cap: u32,
    window: u32,
) -> Result<StabilityReport, FiltrationError> {
    if cap < 2 {
        return Err(FiltrationError::InvalidCap(cap));
    }
    let window = window.max(1);
    let v = eta.v();
    let start = if v == 2 { 2 } else { 1 };
    let mut values: Vec<(u32, u64)> = Vec::new();
    let value_at = |r: u32, values: &mut Vec<(u32, u64)>| -> Result<u64, FiltrationError> {
        if let Some(&(_, n)) = values.iter().find(|(s, _)| *s == r) {
            return Ok(n);
        }
        let n = nf.n_value(gamma, eta, r)?;
        values.push((r, n));
        Ok(n)
    };
    for radius in start..=cap {
        let mut omega: Option<u32> = None;
        let mut epsilons = Vec::with_capacity(window as usize);
        let mut ok = true;
        for r in radius..radius + window {
            let lo = value_at(r, &mut values)?;
            let hi = value_at(r + 1, &mut values)?;
            if hi % lo != 0 {
                ok = false;
                break;
            }
            match v_adic_power(hi / lo, v) {
                Some(0) => epsilons.push(0),
                Some(k) if omega.map_or(true, |w| w == k) && eta.beta_eta() % k as u64 == 0 => {
                    omega = Some(k);
                    epsilons.push(1);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if let (true, Some(omega)) = (ok, omega) {
            values.sort_unstable();
            return Ok(StabilityReport {
                gamma: gamma.to_string(),
                v,
                sequence: values.iter().map(|&(r, n)| (r, n.to_string())).collect(),
                radius,
                omega,
                epsilons,
                window,
            });
        }
    }
    Err(FiltrationError::NotStable { cap })
}
