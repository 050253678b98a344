use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::FiltrationError;
use crate::exact::arith::{is_prime, lcm_u64};
use crate::exact::IntMatrix;

/// Which construction produced an admissible element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupType {
    A1,
    /// Inner forms of type A (`SL(n)`).
    InnerA,
    /// `SU(p, q)`, `n = p + q`.
    OuterA { p: usize, q: usize },
    /// `SO(p, q)`, `n = p + q`.
    OrthogonalBD { p: usize, q: usize },
    /// `Sp(p, q)`, `n = 2(p + q)`.
    Symplectic { p: usize, q: usize },
    OuterD,
}

impl GroupType {
    pub fn tag(&self) -> &'static str {
        match self {
            GroupType::A1 => "A1",
            GroupType::InnerA => "1A",
            GroupType::OuterA { .. } => "2A",
            GroupType::OrthogonalBD { .. } => "B/1D",
            GroupType::Symplectic { .. } => "C",
            GroupType::OuterD => "2D",
        }
    }

    fn fits(&self, n: usize) -> bool {
        match *self {
            GroupType::A1 => n == 2,
            GroupType::InnerA | GroupType::OuterD => n >= 2,
            GroupType::OuterA { p, q } | GroupType::OrthogonalBD { p, q } => p >= 1 && p <= q && p + q == n,
            GroupType::Symplectic { p, q } => p >= 1 && 2 * (p + q) == n,
        }
    }

    /// The index involution `i -> i*` pairing entries of one root subgroup,
    /// `(i, j) ~ (j*, i*)`; `None` when every entry is its own root subgroup.
    fn involution(&self, n: usize) -> Option<Vec<usize>> {
        match *self {
            GroupType::A1 | GroupType::InnerA => None,
            GroupType::OuterA { p, q } | GroupType::OrthogonalBD { p, q } => Some(
                (0..n)
                    .map(|i| if i < q - p { i } else { 2 * q - 1 - i })
                    .collect(),
            ),
            GroupType::Symplectic { .. } => {
                let h = n / 2;
                Some((0..n).map(|i| if i < h { i + h } else { i - h }).collect())
            }
            GroupType::OuterD => Some((0..n).map(|i| n - 1 - i).collect()),
        }
    }
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupType::OuterA { p, q }
            | GroupType::OrthogonalBD { p, q }
            | GroupType::Symplectic { p, q } => write!(f, "{}({p},{q})", self.tag()),
            _ => f.write_str(self.tag()),
        }
    }
}

impl Serialize for GroupType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A diagonal element `eta = diag(v^{alpha_i})`, kept only through its
/// conjugation action `(eta A eta^{-1})_{ij} = v^{-beta_ij} a_ij`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdmissibleElement {
    v: u64,
    n: usize,
    alpha: Vec<Rational64>,
    beta: Vec<Vec<i64>>,
    beta_eta: u64,
    t: Vec<(usize, usize)>,
    group_type: GroupType,
}

impl AdmissibleElement {
    pub fn v(&self) -> u64 {
        self.v
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> &[Rational64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Vec<i64>] {
        &self.beta
    }

    pub fn beta_at(&self, i: usize, j: usize) -> i64 {
        self.beta[i][j]
    }

    pub fn beta_eta(&self) -> u64 {
        self.beta_eta
    }

    pub fn max_beta(&self) -> u32 {
        self.t.iter().map(|&(i, j)| self.beta[i][j] as u32).max().unwrap_or(0)
    }

    /// Positions `(i, j)` (0-based) with `beta_ij > 0`.
    pub fn positive_set(&self) -> &[(usize, usize)] {
        &self.t
    }

    pub fn group_type(&self) -> GroupType {
        self.group_type
    }

    /// Stable textual key for caches.
    pub fn descriptor(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    fn from_alpha(v: u64, alpha: Vec<Rational64>, group_type: GroupType) -> Result<Self, FiltrationError> {
        let n = alpha.len();
        let mut beta = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let b = alpha[j] - alpha[i];
                if !b.is_integer() {
                    return Err(FiltrationError::Recipe {
                        group: group_type.to_string(),
                        reason: format!("beta_{}{} = {b} is not an integer", i + 1, j + 1),
                    });
                }
                beta[i][j] = b.to_integer();
            }
        }
        let mut t = Vec::new();
        let mut beta_eta = 1u64;
        for i in 0..n {
            for j in 0..n {
                if beta[i][j] > 0 {
                    t.push((i, j));
                    beta_eta = lcm_u64(beta_eta, beta[i][j] as u64).ok_or(FiltrationError::Overflow("beta_eta"))?;
                }
            }
        }
        Ok(AdmissibleElement {
            v,
            n,
            alpha,
            beta,
            beta_eta,
            t,
            group_type,
        })
    }
}

#[derive(Serialize)]
struct AdmissibleRepr<'a> {
    v: u64,
    n: usize,
    alpha: Vec<String>,
    beta: &'a [Vec<i64>],
    beta_eta: u64,
    #[serde(rename = "T")]
    t: Vec<[usize; 2]>,
    group_type: GroupType,
}

impl Serialize for AdmissibleElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        AdmissibleRepr {
            v: self.v,
            n: self.n,
            alpha: self.alpha.iter().map(|a| a.to_string()).collect(),
            beta: &self.beta,
            beta_eta: self.beta_eta,
            t: self.t.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
            group_type: self.group_type,
        }
        .serialize(serializer)
    }
}

fn recipe_err(group: GroupType, reason: impl Into<String>) -> FiltrationError {
    FiltrationError::Recipe {
        group: group.to_string(),
        reason: reason.into(),
    }
}

/// Build the admissible element for `group_type` attached to the entry
/// `kk = (k, k')`, given 1-based.
pub fn build_admissible(
    group_type: GroupType,
    n: usize,
    v: u64,
    kk: (usize, usize),
) -> Result<AdmissibleElement, FiltrationError> {
    if !is_prime(v) {
        return Err(FiltrationError::NotPrime(v));
    }
    let (k, k2) = kk;
    if k == 0 || k2 == 0 || k > n || k2 > n {
        return Err(FiltrationError::IndexOutOfRange { k, k2, n });
    }
    if k == k2 {
        return Err(FiltrationError::DiagonalPair(k, k2));
    }
    let mut m = vec![0i64; n + 1]; // 1-based
    match group_type {
        GroupType::A1 => {
            if n != 2 {
                return Err(recipe_err(group_type, "A1 acts on dimension 2"));
            }
            let half = |x: i64| Rational64::new(x, 2);
            let alpha = if (k, k2) == (1, 2) {
                vec![half(1), half(-1)]
            } else {
                vec![half(-1), half(1)]
            };
            return AdmissibleElement::from_alpha(v, alpha, group_type);
        }
        GroupType::InnerA | GroupType::OuterD => {
            let partner = n + 1 - k;
            if partner == k {
                return Err(recipe_err(group_type, format!("k = {k} is the middle index")));
            }
            m[k] = 1;
            m[partner] = -1;
        }
        GroupType::OuterA { p, q } | GroupType::OrthogonalBD { p, q } => {
            if p == 0 || p > q || p + q != n {
                return Err(recipe_err(group_type, format!("need 1 <= p <= q and p + q = {n}")));
            }
            let compact = q - p;
            if k <= compact && k2 <= compact {
                return Err(recipe_err(group_type, "k and k' both lie in the compact block"));
            }
            if k + k2 == 2 * q + 1 {
                return Err(recipe_err(group_type, "k = 2q - k' + 1 gives a diagonal power"));
            }
            let (idx, sign) = if k <= p { (k2, 1) } else { (k, -1) };
            if idx <= compact || 2 * q + 1 <= idx {
                return Err(recipe_err(group_type, format!("index {idx} lies outside the hyperbolic block")));
            }
            let partner = 2 * q + 1 - idx;
            if partner == idx || partner <= compact {
                return Err(recipe_err(group_type, format!("index {idx} has no partner in the hyperbolic block")));
            }
            m[idx] = sign;
            m[partner] = -sign;
        }
        GroupType::Symplectic { p, q } => {
            if p == 0 || 2 * (p + q) != n {
                return Err(recipe_err(group_type, format!("need p >= 1 and 2(p + q) = {n}")));
            }
            let forbidden = |i: usize| i <= p || (p + q < i && i <= 2 * p + q);
            if forbidden(k) == forbidden(k2) {
                return Err(recipe_err(
                    group_type,
                    "k and k' lie together in {1..p, p+q+1..2p+q} or together in its complement",
                ));
            }
            let h = n / 2;
            let partner = if k2 <= h { k2 + h } else { k2 - h };
            if k == partner {
                return Err(recipe_err(group_type, "k is the partner of k', giving a diagonal power"));
            }
            m[k2] = 1;
            m[partner] = -1;
        }
    }
    let alpha = m[1..].iter().map(|&x| Rational64::from_integer(x)).collect();
    AdmissibleElement::from_alpha(v, alpha, group_type)
}

/// Integrality, constancy on root subgroups and a non-empty positive set.
/// A matrix that does not come from a diagonal element (fails
/// `beta_ij + beta_jk = beta_ik`) is rejected as well.
pub fn is_admissible(beta: &[Vec<Rational64>], group_type: GroupType) -> bool {
    let n = beta.len();
    if !group_type.fits(n) || beta.iter().any(|row| row.len() != n) {
        return false;
    }
    if beta.iter().flatten().any(|b| !b.is_integer()) {
        return false;
    }
    let b = |i: usize, j: usize| beta[i][j].to_integer();
    for i in 0..n {
        if b(i, i) != 0 {
            return false;
        }
        for j in 0..n {
            for k in 0..n {
                if b(i, j) + b(j, k) != b(i, k) {
                    return false;
                }
            }
        }
    }
    if let Some(star) = group_type.involution(n) {
        for i in 0..n {
            for j in 0..n {
                if b(i, j) != b(star[j], star[i]) {
                    return false;
                }
            }
        }
    }
    (0..n).any(|i| (0..n).any(|j| b(i, j) > 0))
}

/// `eta^r A eta^{-r}` as an exact rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledMatrix {
    pub n: usize,
    pub entries: Vec<BigRational>,
}

impl ScaledMatrix {
    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.is_integer())
    }

    pub fn to_int(&self) -> Option<IntMatrix> {
        if !self.is_integral() {
            return None;
        }
        IntMatrix::new(self.n, self.entries.iter().map(|x| x.to_integer()).collect()).ok()
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }
}

impl fmt::Display for ScaledMatrix {
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
        Ok(())
    }
}

/// Entry `(i, j)` becomes `prod_v v^{-r_v beta^v_ij} a_ij` for the product of
/// the given elements, each raised to its own power.
pub fn conjugate_product(
    factors: &[(&AdmissibleElement, u32)],
    a: &IntMatrix,
) -> Result<ScaledMatrix, FiltrationError> {
    let n = a.dim();
    for (eta, _) in factors {
        if eta.n != n {
            return Err(FiltrationError::DimensionMismatch { got: n, want: eta.n });
        }
    }
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut num = a.get(i, j).clone();
            let mut den = BigInt::one();
            for (eta, r) in factors {
                let e = -eta.beta[i][j] * *r as i64;
                let pw = BigInt::from(eta.v).pow(e.unsigned_abs() as u32);
                if e >= 0 {
                    num *= pw;
                } else {
                    den *= pw;
                }
            }
            entries.push(BigRational::new(num, den));
        }
    }
    Ok(ScaledMatrix { n, entries })
}

pub fn conjugate_scaled(eta: &AdmissibleElement, r: u32, a: &IntMatrix) -> Result<ScaledMatrix, FiltrationError> {
    conjugate_product(&[(eta, r)], a)
}

/// `true` when `v^{r beta_ij}` divides `x_ij` at every position of `T`.
pub(crate) fn entries_divisible(eta: &AdmissibleElement, r: u32, entry: impl Fn(usize, usize) -> BigInt) -> bool {
    eta.t.iter().all(|&(i, j)| {
        let d = BigInt::from(eta.v).pow(r * eta.beta[i][j] as u32);
        entry(i, j).mod_floor(&d).is_zero()
    })
}
