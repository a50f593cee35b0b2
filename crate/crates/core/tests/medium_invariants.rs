use lamtrans::medium::{assemble_m, build_medium, check_invertibility, serialize_medium, MediumConfig, Side};
use lamtrans::verify::random_admissible_medium;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_format_round_trips(seed in 0u64..100_000, n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (medium, coupling) = random_admissible_medium(&mut rng, n).unwrap();
        let cfg = serialize_medium(&medium, &coupling);
        let text = serde_json::to_string(&cfg).unwrap();
        let back: MediumConfig = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        let (m2, c2) = build_medium(&back).unwrap();
        prop_assert_eq!(&c2, &coupling);
        prop_assert_eq!(m2.interfaces(), medium.interfaces());
        prop_assert_eq!(serialize_medium(&m2, &c2), cfg);
    }

    #[test]
    fn m_is_affine_in_lambda_squared(seed in 0u64..100_000, n in 1usize..=3, lambda in 0.0f64..20.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, coupling) = random_admissible_medium(&mut rng, n).unwrap();
        for k in 1..=n {
            for side in [Side::Left, Side::Right] {
                let m0 = assemble_m(&coupling, side, k, 0.0);
                let m1 = assemble_m(&coupling, side, k, 1.0);
                let expect = &m0 + &(&m1 - &m0).scale_real(lambda * lambda);
                let got = assemble_m(&coupling, side, k, lambda);
                prop_assert!(got.distance(&expect) <= 1e-13 * (1.0 + lambda * lambda) * m1.max_abs().max(1.0));
            }
        }
    }

    #[test]
    fn finer_grids_never_raise_the_minimum(seed in 0u64..100_000, n in 1usize..=3, count in 2usize..30) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (medium, coupling) = random_admissible_medium(&mut rng, n).unwrap();
        let coarse: Vec<f64> = (1..=count).map(|i| 0.5 * i as f64).collect();
        let fine: Vec<f64> = (2..=2 * count).map(|i| 0.25 * i as f64).collect();
        let a = check_invertibility(&coupling, &medium, &coarse).unwrap();
        let b = check_invertibility(&coupling, &medium, &fine).unwrap();
        prop_assert_eq!(a.records.len(), b.records.len());
        for (x, y) in a.records.iter().zip(&b.records) {
            prop_assert!(y.min_det <= x.min_det);
        }
    }
}
