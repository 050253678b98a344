use serde::{Deserialize, Serialize};

use crate::exact::IntMatrix;
use crate::geodesics::LengthClass;

/// Integers that may outgrow JSON number precision are written as strings.
pub(crate) mod dec {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(x)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            S(String),
            N(u64),
        }
        match Repr::deserialize(d)? {
            Repr::S(s) => s.parse().map_err(de::Error::custom),
            Repr::N(n) => Ok(n),
        }
    }
}

pub(crate) mod dec_vec {
    use serde::ser::SerializeSeq;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[u64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u64>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|s| s.parse().map_err(de::Error::custom)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessTerm {
    #[serde(with = "dec")]
    pub multiplier: u64,
    pub theta: IntMatrix,
    /// `(prime, exponent)` pairs of the admissible product used for this term.
    pub exponents: Vec<(u64, u32)>,
}

/// Present when the progression was built for a primitive but not absolutely
/// primitive element `gamma`, whose length is `j` times the base length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainsBlock {
    pub gamma: IntMatrix,
    pub length: LengthClass,
    pub j: u64,
    /// Term multipliers over the length of `gamma`: `multiplier / j`.
    #[serde(with = "dec_vec")]
    pub multipliers: Vec<u64>,
}

/// Result of moving the progression across a commensurability.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferBlock {
    pub d_m: u64,
    pub d_mp: u64,
    pub d: u64,
    pub d_prime: u64,
    pub p: u64,
    pub q: u64,
    #[serde(rename = "D")]
    pub big_d: u64,
    pub a_prime: u64,
    pub b_prime: i64,
    pub k: usize,
    /// 1-based term indices `a' i + b'` picked out by the monochromatic progression.
    pub indices: Vec<usize>,
    #[serde(with = "dec_vec")]
    pub multipliers: Vec<u64>,
    pub pairs: Vec<(u64, u64)>,
    pub coloring: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionWitness {
    pub base: LengthClass,
    pub gamma_abs: IntMatrix,
    #[serde(rename = "C", with = "dec")]
    pub c: u64,
    pub a: u64,
    pub b: i64,
    pub k: usize,
    pub primes: Vec<u64>,
    #[serde(rename = "R")]
    pub radius: u32,
    pub terms: Vec<WitnessTerm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contains: Option<ContainsBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer: Option<TransferBlock>,
}

impl ProgressionWitness {
    pub fn multipliers(&self) -> Vec<u64> {
        self.terms.iter().map(|t| t.multiplier).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}
