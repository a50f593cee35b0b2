//! The transform of `Bf` against the algebraic right-hand side for a random
//! field meeting the interface conditions.

use lamtrans::elastic::{ElasticLayer, ElasticScenario, Load};
use lamtrans::linalg::vec_norm;
use lamtrans::transform::{conjugation_residual, forward, operator_rhs, random_conjugate_field, QuadratureSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let stiff = ElasticLayer { lame_lambda: 1.0, lame_mu: 1.0, c1: 3f64.sqrt(), c2: 1.0 };
    let soft = ElasticLayer { lame_lambda: 0.5, lame_mu: 0.5, c1: 1.5f64.sqrt(), c2: 0.5f64.sqrt() };
    let scenario = ElasticScenario::new(vec![stiff, soft], vec![0.0, 0.5], Load::zero()).unwrap();
    let (medium, coupling) = scenario.build_coupling(0.5).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = random_conjugate_field(&medium, &coupling, &mut rng).unwrap();
    println!("conjugation residual of f: {:.2e}", conjugation_residual(&f, &medium, &coupling));
    let bf = f.apply_b(&medium);
    let quad = QuadratureSpec::default();
    for lambda in [0.3, 1.0, 3.0, 8.0] {
        let lhs = forward(&bf, lambda, &medium, &coupling, &quad).unwrap();
        let ft = forward(&f, lambda, &medium, &coupling, &quad).unwrap();
        let rhs = operator_rhs(&f, &ft.value, lambda, &medium, &coupling);
        let diff: Vec<_> = lhs.value.iter().zip(&rhs).map(|(a, b)| a - b).collect();
        println!("lambda = {lambda:3}: |F[Bf] - rhs| = {:.2e}  |F[Bf]| = {:.3e}", vec_norm(&diff), vec_norm(&lhs.value));
    }
}
