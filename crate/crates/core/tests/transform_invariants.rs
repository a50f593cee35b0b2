use lamtrans::linalg::{c, vec_norm, CMatrix, C64};
use lamtrans::medium::{dirichlet_boundary, flux_continuity, CouplingSet, MediumStack};
use lamtrans::oracles::simpson;
use lamtrans::spectral::SpectralBasis;
use lamtrans::transform::{decompose_roundtrip, forward, PiecewiseField, Profile, QuadratureSpec, Term};
use proptest::prelude::*;

/// Two symmetric layers with flux continuity and a clamped surface; no
/// condition carries a `λ²` term.
fn clamped_pair() -> (MediumStack, CouplingSet) {
    let a1 = CMatrix::from_real_rows(&[vec![1.0, 0.2], vec![0.2, 0.8]]).unwrap();
    let a2 = CMatrix::from_real_rows(&[vec![2.0, -0.1], vec![-0.1, 1.5]]).unwrap();
    let g = CMatrix::from_real_diag(&[0.1, 0.0]);
    let medium = MediumStack::new(2, vec![0.0, 0.8], vec![(a1, g.clone()), (a2, g)]).unwrap();
    let ic = flux_continuity(medium.layer(1), medium.layer(2));
    let coupling = CouplingSet::new(2, dirichlet_boundary(2), vec![ic]).unwrap();
    (medium, coupling)
}

fn bump(medium: &MediumStack, center: f64, w: [f64; 2]) -> PiecewiseField {
    PiecewiseField::uniform(medium, vec![Term::new(vec![c(w[0], 0.0), c(w[1], 0.0)], Profile::bump(center, 0.5, 4))])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn forward_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, lambda in 0.2f64..15.0, x0 in 0.6f64..1.5) {
        let (medium, coupling) = clamped_pair();
        let quad = QuadratureSpec::default();
        let f = bump(&medium, x0, [1.0, 0.3]);
        let g = PiecewiseField::uniform(&medium, vec![Term::new(vec![c(-0.4, 0.0), c(1.0, 0.0)], Profile::gaussian(1.0, 0.3))]);
        let combined = PiecewiseField::combine(c(a, 0.0), &f, c(b, 0.0), &g);
        let lhs = forward(&combined, lambda, &medium, &coupling, &quad).unwrap();
        let ff = forward(&f, lambda, &medium, &coupling, &quad).unwrap();
        let fg = forward(&g, lambda, &medium, &coupling, &quad).unwrap();
        let rhs: Vec<C64> = ff.value.iter().zip(&fg.value).map(|(x, y)| x * a + y * b).collect();
        let diff: Vec<C64> = lhs.value.iter().zip(&rhs).map(|(x, y)| x - y).collect();
        let tol = 1e-9 * (1.0 + vec_norm(&rhs)) + lhs.quadrature_error + a.abs() * ff.quadrature_error + b.abs() * fg.quadrature_error;
        prop_assert!(vec_norm(&diff) <= tol, "{} > {}", vec_norm(&diff), tol);
    }

    #[test]
    fn without_spectral_terms_forward_is_the_bare_integral(lambda in 0.2f64..10.0, x0 in 0.6f64..1.5) {
        let (medium, coupling) = clamped_pair();
        prop_assert!(coupling.spectral_terms_vanish());
        let f = bump(&medium, x0, [1.0, -0.7]);
        let v = forward(&f, lambda, &medium, &coupling, &QuadratureSpec::default()).unwrap();
        let basis = SpectralBasis::build(&medium, &coupling, lambda).unwrap();
        // Simpson on each side of the interface, where u* has a kink
        let (lo, hi) = (x0 - 0.5, x0 + 0.5);
        let l1 = medium.interfaces()[1];
        let split = |g: &dyn Fn(f64) -> f64| simpson(g, lo, l1, 4000) + simpson(g, l1, hi, 4000);
        for i in 0..2 {
            let component = |x: f64| basis.dual_u(x).mul_vec(&f.eval(x))[i];
            let exact = c(split(&|x| component(x).re), split(&|x| component(x).im));
            prop_assert!((v.value[i] - exact).norm() <= 1e-8 * (1.0 + v.value[i].norm()), "{} vs {}", v.value[i], exact);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn round_trip_recovers_compact_fields(x0 in 0.6f64..1.4, w in -1.0f64..1.0) {
        let (medium, coupling) = clamped_pair();
        let f = bump(&medium, x0, [1.0, w]);
        let xs: Vec<f64> = (0..60).map(|i| 0.05 * (i as f64 + 0.5)).filter(|x| (x - 0.8f64).abs() > 1e-3).collect();
        let report = decompose_roundtrip(&f, &xs, &medium, &coupling, &QuadratureSpec::default()).unwrap();
        prop_assert!(report.max_rel_error <= f64::max(1e-3, report.truncation), "{}", report.max_rel_error);
    }
}
