use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use vforge_core::functions::{f, f_from_h_with, h_closed_with, h_definitional_with};
use vforge_core::products::floor_sum;
use vforge_core::valuation::{alpha_p, binary_digits, legendre_factorial_vp, v2_split, vp};
use vforge_core::{DirectFactor, FactoredRational, Factorize, SpfSieve};

fn sieve() -> &'static SpfSieve {
    static S: OnceLock<SpfSieve> = OnceLock::new();
    S.get_or_init(|| SpfSieve::new(1_000_000).unwrap())
}

const SMALL_PRIMES: [u64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

fn factored() -> impl Strategy<Value = FactoredRational> {
    prop::collection::vec((prop::sample::select(&SMALL_PRIMES[..]), -6i64..=6), 0..6)
        .prop_map(|pairs| FactoredRational::from_pairs(pairs).unwrap())
}

fn integral() -> impl Strategy<Value = FactoredRational> {
    prop::collection::vec((prop::sample::select(&SMALL_PRIMES[..]), 0i64..=20), 0..6)
        .prop_map(|pairs| FactoredRational::from_pairs(pairs).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn factor_then_materialize_round_trips(m in 1u64..=1_000_000) {
        let fr = sieve().factor(m).unwrap();
        prop_assert_eq!(fr.materialize().unwrap(), BigUint::from(m));
        prop_assert_eq!(DirectFactor.factor(m).unwrap(), fr);
    }

    #[test]
    fn large_factorizations_round_trip(m in 1u64..) {
        let fr = DirectFactor.factor(m).unwrap();
        prop_assert_eq!(fr.materialize().unwrap(), BigUint::from(m));
    }

    #[test]
    fn multiplication_laws(a in factored(), b in factored(), c in factored()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &FactoredRational::one(), a.clone());
        prop_assert!((&a * &a.recip()).is_one());
    }

    #[test]
    fn odd_part_reconstructs(a in factored()) {
        let two = FactoredRational::from_pairs([(2, a.exponent(2))]).unwrap();
        prop_assert_eq!(&a.odd_part() * &two, a.clone());
        prop_assert_eq!(a.odd_part().exponent(2), 0);
    }

    #[test]
    fn log_enclosure_contains_value(a in integral()) {
        let v = a.materialize().unwrap();
        let enc = a.log2_enclosure();
        let iv = enc.to_interval::<f64>();
        prop_assert!(iv.width() < 1e-12 * (1.0 + iv.hi().abs()));
        if let Some(x) = v.to_f64() {
            let exact = x.log2();
            prop_assert!(iv.lo() - 1e-12 * exact.abs() <= exact && exact <= iv.hi() + 1e-12 * exact.abs());
        }
        // Integer part by bit length.
        let bits = v.bits() as i64;
        prop_assert!(enc.cmp_integer(bits) != Some(std::cmp::Ordering::Greater));
        prop_assert!(enc.cmp_integer(bits - 1) != Some(std::cmp::Ordering::Less));
    }

    #[test]
    fn exact_comparison_matches_fractions(a in factored(), b in factored()) {
        let (an, ad) = a.numer_denom();
        let (bn, bd) = b.numer_denom();
        prop_assert_eq!(a.cmp_exact(&b), (an * bd).cmp(&(bn * ad)));
    }

    #[test]
    fn floor_composition(n in 0u64.., i in 0u32..63) {
        prop_assert_eq!((n >> i) >> 1, n >> (i + 1));
        prop_assert_eq!((n / (1u64 << i)) / 2, n / (1u64 << (i + 1)));
    }

    #[test]
    fn legendre_matches_naive_sum(n in 0u64..=10_000, pi in 0usize..25) {
        let p = sieve().primes()[pi];
        prop_assert!(p <= 100);
        let naive: u64 = (1..=n).map(|r| u64::from(vp(r, p).unwrap())).sum();
        prop_assert_eq!(legendre_factorial_vp(n, p), naive);
    }

    #[test]
    fn alpha_brackets_n(n in 1u64..=u64::MAX / 2, pi in 0usize..200) {
        let p = sieve().primes()[pi];
        let a = alpha_p(n, p);
        prop_assert!(p.pow(a) <= n);
        prop_assert!(p.checked_pow(a + 1).is_none_or(|q| q > n));
    }

    #[test]
    fn binary_digits_invert(n in 1u64..=100_000) {
        let d = binary_digits(n).unwrap();
        prop_assert_eq!(d.value(), n);
        prop_assert!(d.digits().iter().all(|&b| b <= 1));
        prop_assert_eq!(d.digits()[d.top()], 1);
        let weighted: u64 = (0..64).filter(|&i| n >> i & 1 == 1).sum();
        prop_assert_eq!(d.weighted_sum(), weighted);
    }

    #[test]
    fn h_routes_agree(r in 1u64..=100_000) {
        let s = sieve();
        prop_assert_eq!(h_definitional_with(s, r).unwrap(), h_closed_with(s, r).unwrap());
        prop_assert_eq!(f_from_h_with(s, r).unwrap(), f(r).unwrap());
    }

    #[test]
    fn f_is_integral_exactly_when_expected(n in 1u64..=1_000_000) {
        let split = v2_split(n).unwrap();
        prop_assert_eq!(f(n).unwrap().is_integer(), split.k <= 1 || split.ell == 1);
    }

    #[test]
    fn floor_sum_is_n_minus_popcount(n in 1u64..) {
        prop_assert_eq!(floor_sum(n), n - u64::from(n.count_ones()));
    }
}
