//! With `A² = E`, `Γ² = 0` and a clamped surface the transform is the sine
//! transform: `u = -2i sin(λx) E` and `u* = sin(λx)/λ E`.

use lamtrans::linalg::CMatrix;
use lamtrans::medium::{dirichlet_boundary, CouplingSet, MediumStack};
use lamtrans::spectral::SpectralBasis;
use lamtrans::transform::{forward, PiecewiseField, Profile, QuadratureSpec, Term};
use num_complex::Complex64;

fn main() {
    let medium = MediumStack::new(2, vec![0.0], vec![(CMatrix::identity(2), CMatrix::zeros(2, 2))]).unwrap();
    let coupling = CouplingSet::new(2, dirichlet_boundary(2), vec![]).unwrap();

    for lambda in [0.5, 2.0, 10.0] {
        let basis = SpectralBasis::build(&medium, &coupling, lambda).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=100 {
            let x = 0.1 * i as f64;
            let u = basis.spectral_u(x);
            let expected = Complex64::new(0.0, -2.0 * (lambda * x).sin());
            worst = worst.max((u.get(0, 0) - expected).norm()).max(u.get(0, 1).norm());
        }
        println!("lambda = {lambda:5}: max |u + 2i sin(lambda x)| = {worst:.2e}");
    }

    // e^{-x} has sine transform lambda/(1 + lambda^2); the normalisation here gives 1/(1 + lambda^2)
    let f = PiecewiseField::uniform(&medium, vec![Term::new(vec![Complex64::new(1.0, 0.0); 2], Profile::exp_monomial(0.0, 0, 1.0))]);
    for lambda in [0.1, 1.0, 5.0, 25.0] {
        let v = forward(&f, lambda, &medium, &coupling, &QuadratureSpec::default()).unwrap();
        println!("F[e^-x]({lambda:4}) = {:.12}  exact {:.12}", v.value[0].re, 1.0 / (1.0 + lambda * lambda));
    }
}
