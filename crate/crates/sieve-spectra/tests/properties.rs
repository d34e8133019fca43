//! Property tests for the structural invariants: periodicity and bounds of
//! the Ramanujan sums, evenness of the delta-symbol, agreement of the two
//! Farey summation routes, and the exactness of the character identity.

use proptest::prelude::*;

use sieve_spectra::arith::{build_arith_cache, character_table, ramanujan_sum};
use sieve_spectra::kernel::build_weight;
use sieve_spectra::localspec::chi_vs_a_sum;
use sieve_spectra::lsq::{delta_symbol, farey_square_sum, farey_square_sum_fast};
use sieve_spectra::verify::{generate_sequence, SequenceKind, SequenceSpec, XorShift64Star};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ramanujan_periodic_and_bounded(h in 1u64..=60, v in -200i64..=200) {
        let cache = build_arith_cache(64);
        let a = ramanujan_sum(h, v);
        let b = ramanujan_sum(h, v + h as i64);
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert!(a.abs() <= cache.phi(h as usize) as f64 + 1e-9);
    }

    #[test]
    fn delta_symbol_is_even(q in 3u32..=30, v in 1i64..=80) {
        let cache = build_arith_cache(4096);
        let kernel = build_weight(5).unwrap();
        let plus = delta_symbol(&cache, &kernel, q as f64, v);
        let minus = delta_symbol(&cache, &kernel, q as f64, -v);
        prop_assert!((plus - minus).abs() < 1e-12 * (1.0 + plus.abs()));
    }

    #[test]
    fn farey_routes_agree(seed in 0u64..1000, q in 1usize..=48) {
        let phi = generate_sequence(&SequenceSpec {
            kind: SequenceKind::RandomComplex,
            n: 35,
            seed,
        })
        .unwrap();
        let direct = farey_square_sum(&phi, q);
        let fast = farey_square_sum_fast(&phi, q);
        prop_assert!((direct - fast).abs() < 1e-10 * (1.0 + direct.abs()),
            "q={} direct={} fast={}", q, direct, fast);
    }

    #[test]
    fn chi_a_sum_identity(seed in 0u64..1000, h in 1usize..=16) {
        let phi = generate_sequence(&SequenceSpec {
            kind: SequenceKind::RandomComplex,
            n: 30,
            seed,
        })
        .unwrap();
        let table = character_table(h).unwrap();
        let mut rng = XorShift64Star::new(seed ^ 0xABCD);
        let weights: Vec<f64> = (0..30).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
        let (chi_s, a_s) = chi_vs_a_sum(&phi, &table, &weights);
        prop_assert!((chi_s - a_s).abs() < 1e-9 * (1.0 + chi_s.abs()));
    }

    #[test]
    fn sequences_deterministic(seed in 0u64..10_000) {
        let spec = SequenceSpec {
            kind: SequenceKind::RandomComplex,
            n: 16,
            seed,
        };
        let a = generate_sequence(&spec).unwrap();
        let b = generate_sequence(&spec).unwrap();
        for i in 1..=16 {
            prop_assert_eq!(a.get(i), b.get(i));
        }
    }

    #[test]
    fn weight_even_and_supported(t in -3.0f64..=3.0) {
        let kernel = build_weight(5).unwrap();
        let v = kernel.eval(t);
        prop_assert!((v - kernel.eval(-t)).abs() < 1e-15);
        if t.abs() < 1.0 || t.abs() > 2.0 {
            prop_assert_eq!(v, 0.0);
        } else {
            prop_assert!(v >= -1e-15);
        }
    }
}
