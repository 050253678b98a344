use apgeo_core::exact::IntMatrix;
use apgeo_core::filtration::DirectN;
use apgeo_core::geodesics::{classify_in_field, companion, hyperbolic, is_absolutely_primitive, length_class};
use apgeo_core::progressions::{build_progression, verify_witness, BuildOptions};
use apgeo_core::quad::unit_exponent;
use num_bigint::BigInt;
use proptest::prelude::*;

fn conjugate(t: i64, word: &[(bool, i64)]) -> IntMatrix {
    let mut g = companion(&BigInt::from(t));
    for &(upper, x) in word {
        let (s, s_inv) = if upper {
            (IntMatrix::two_by_two(1, x, 0, 1), IntMatrix::two_by_two(1, -x, 0, 1))
        } else {
            (IntMatrix::two_by_two(1, 0, x, 1), IntMatrix::two_by_two(1, 0, -x, 1))
        };
        g = s.mul(&g).unwrap().mul(&s_inv).unwrap();
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn built_witnesses_verify(t in 3i64..12, word in prop::collection::vec((any::<bool>(), -2i64..=2), 0..3), k in 1usize..4) {
        let g = conjugate(t, &word);
        let h = hyperbolic(&g).unwrap();
        prop_assume!(is_absolutely_primitive(&h).unwrap());
        let opts = BuildOptions { max_digits: 60_000, ..BuildOptions::default() };
        let w = match build_progression(&DirectN, &g, k, &opts) {
            Ok(w) => w,
            Err(e) if e.is_cap() => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let rep = verify_witness(&w);
        prop_assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        let base = length_class(&h).unwrap();
        for term in &w.terms {
            let th = classify_in_field(&term.theta, base.d0).unwrap();
            prop_assert_eq!(unit_exponent(th.lambda()).unwrap(), term.multiplier * base.multiplier);
        }
        let again = build_progression(&DirectN, &g, k, &opts).unwrap();
        prop_assert_eq!(again.to_json(), w.to_json());
    }
}
