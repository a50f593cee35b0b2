use lamtrans::linalg::c;
use lamtrans::oracles::{cosine_transform_oracle, ode_march, sine_transform_oracle};

#[test]
fn oracles_are_deterministic() {
    let f = |x: f64| x * (-x).exp();
    for lambda in [0.3, 4.0] {
        assert_eq!(sine_transform_oracle(f, lambda, 30.0).to_bits(), sine_transform_oracle(f, lambda, 30.0).to_bits());
        assert_eq!(cosine_transform_oracle(f, lambda, 30.0).to_bits(), cosine_transform_oracle(f, lambda, 30.0).to_bits());
    }
    let march = || ode_march(2.0, |s| [c(s.sin(), 0.0), c(0.0, 0.0)], 1.5, 1e-3).unwrap();
    assert_eq!(march(), march());
}

#[test]
fn transforms_of_x_exp_minus_x() {
    let f = |x: f64| x * (-x).exp();
    for lambda in [0.3, 1.0, 4.0] {
        let d = 1.0 + lambda * lambda;
        assert!((sine_transform_oracle(f, lambda, 40.0) - 2.0 * lambda / (d * d)).abs() < 1e-9);
        assert!((cosine_transform_oracle(f, lambda, 40.0) - (1.0 - lambda * lambda) / (d * d)).abs() < 1e-9);
    }
}
