//! Randomised ring-arithmetic invariants, 10⁵ cases each.

use proptest::prelude::*;
use radproj::{QuadInt, RingTag};

const CASES: u32 = 100_000;

fn ring() -> impl Strategy<Value = RingTag> {
    prop_oneof![Just(RingTag::Sqrt2), Just(RingTag::GoldenTau), Just(RingTag::Sqrt3)]
}

fn coeff() -> impl Strategy<Value = i64> {
    -5_000i64..=5_000
}

fn small() -> impl Strategy<Value = i64> {
    -60i64..=60
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn gcd_divides_both_arguments(r in ring(), a in coeff(), b in coeff(), c in coeff(), d in coeff()) {
        let x = QuadInt::new(a, b, r);
        let y = QuadInt::new(c, d, r);
        prop_assume!(!(x.is_zero() && y.is_zero()));
        let g = x.gcd(y).unwrap();
        prop_assert!(g.divides(x).unwrap());
        prop_assert!(g.divides(y).unwrap());
        prop_assert_eq!(g, g.canonical_associate().unwrap());
        prop_assert_eq!(g, y.gcd(x).unwrap());
    }

    #[test]
    fn common_factors_divide_the_gcd(r in ring(), f in (small(), small()), x in (small(), small()), y in (small(), small())) {
        let f = QuadInt::new(f.0, f.1, r);
        let x = QuadInt::new(x.0, x.1, r);
        let y = QuadInt::new(y.0, y.1, r);
        prop_assume!(!f.is_zero() && !(x.is_zero() && y.is_zero()));
        let g = f.checked_mul(x).unwrap().gcd(f.checked_mul(y).unwrap()).unwrap();
        prop_assert!(f.divides(g).unwrap());
        // gcd is multiplicative in a common factor up to units
        let h = x.gcd(y).unwrap();
        let q = g.div_exact(f.checked_mul(h).unwrap()).unwrap();
        prop_assert!(q.map(|u| u.is_unit()).unwrap_or(false));
    }

    #[test]
    fn norm_is_multiplicative(r in ring(), a in coeff(), b in coeff(), c in coeff(), d in coeff()) {
        let x = QuadInt::new(a, b, r);
        let y = QuadInt::new(c, d, r);
        let lhs = x.checked_mul(y).unwrap().norm().unwrap() as i128;
        let rhs = x.norm().unwrap() as i128 * y.norm().unwrap() as i128;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn euclidean_step_descends(r in ring(), a in coeff(), b in coeff(), c in coeff(), d in coeff()) {
        let x = QuadInt::new(a, b, r);
        let y = QuadInt::new(c, d, r);
        prop_assume!(!y.is_zero());
        let (q, rem) = x.div_rem(y).unwrap();
        prop_assert_eq!(q.checked_mul(y).unwrap().checked_add(rem).unwrap(), x);
        prop_assert!(rem.norm().unwrap().abs() < y.norm().unwrap().abs());
    }

    #[test]
    fn norm_matches_embeddings(r in ring(), a in coeff(), b in coeff()) {
        let x = QuadInt::new(a, b, r);
        let n = x.norm().unwrap() as f64;
        let e = x.embed() * x.embed_conj();
        prop_assert!((n - e).abs() <= 1e-6 * n.abs().max(1.0));
    }
}
