use lamtrans::linalg::{c, determinant, CMatrix};
use lamtrans::medium::{dirichlet_boundary, CouplingSet, MediumStack};
use lamtrans::spectral::{basis_residuals, SpectralBasis};
use lamtrans::verify::random_admissible_medium;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn conditions_hold_on_random_media(seed in 0u64..100_000, n in 1usize..=3, lambda in 0.2f64..6.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (medium, coupling) = random_admissible_medium(&mut rng, n).unwrap();
        let basis = SpectralBasis::build(&medium, &coupling, lambda).unwrap();
        let res = basis_residuals(&basis, &medium, &coupling);
        prop_assert!(res.boundary <= 1e-10, "boundary {}", res.boundary);
        prop_assert!(res.interface <= 1e-9, "interface {}", res.interface);
        prop_assert!(res.dual_interface <= 1e-9, "dual {}", res.dual_interface);
    }

    #[test]
    fn u_has_full_rank(seed in 0u64..100_000, n in 1usize..=3, lambda in 0.2f64..6.0, x in 0.05f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (medium, coupling) = random_admissible_medium(&mut rng, n).unwrap();
        let basis = SpectralBasis::build(&medium, &coupling, lambda).unwrap();
        let u = basis.spectral_u(x);
        let det = determinant(&u).norm();
        prop_assert!(det > 1e-8 * u.max_abs().powi(2), "det {det} at x = {x}");
    }

    #[test]
    fn classical_reduction_holds_pointwise(lambda in 0.1f64..50.0, x in 0.0f64..10.0) {
        let medium = MediumStack::new(2, vec![0.0], vec![(CMatrix::identity(2), CMatrix::zeros(2, 2))]).unwrap();
        let coupling = CouplingSet::new(2, dirichlet_boundary(2), vec![]).unwrap();
        let basis = SpectralBasis::build(&medium, &coupling, lambda).unwrap();
        let s = (lambda * x).sin();
        let u = CMatrix::identity(2).scale(c(0.0, -2.0 * s));
        let dual = CMatrix::identity(2).scale_real(s / lambda);
        prop_assert!(basis.spectral_u(x).distance(&u) <= 1e-10);
        prop_assert!(basis.dual_u(x).distance(&dual) <= 1e-10);
    }
}
