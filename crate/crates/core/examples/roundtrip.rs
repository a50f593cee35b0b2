//! Forward and inverse transform of a smooth field across a two-layer
//! elastic medium at `ξ = 0.5`.

use lamtrans::elastic::{ElasticLayer, ElasticScenario, Load};
use lamtrans::linalg::c;
use lamtrans::transform::{decompose_roundtrip, PiecewiseField, Profile, QuadratureSpec, Term};

fn main() {
    let stiff = ElasticLayer { lame_lambda: 1.0, lame_mu: 1.0, c1: 3f64.sqrt(), c2: 1.0 };
    let soft = ElasticLayer { lame_lambda: 0.5, lame_mu: 0.5, c1: 1.5f64.sqrt(), c2: 0.5f64.sqrt() };
    let scenario = ElasticScenario::new(vec![stiff, soft], vec![0.0, 0.5], Load::zero()).unwrap();
    let (medium, coupling) = scenario.build_coupling(0.5).unwrap();

    let f = PiecewiseField::uniform(&medium, vec![Term::new(vec![c(1.0, 0.0), c(-0.5, 0.0)], Profile::bump(0.7, 0.6, 4))]);
    let xs: Vec<f64> = (0..100).map(|i| 0.015 * (i as f64 + 0.5)).filter(|x| (x - 0.5f64).abs() > 1e-3).collect();
    let report = decompose_roundtrip(&f, &xs, &medium, &coupling, &QuadratureSpec::default()).unwrap();

    for i in (0..xs.len()).step_by(10) {
        println!("x = {:.4}  f = {:+.6}  F^-1 F f = {:+.6}", xs[i], report.original[i][0].re, report.reconstructed[i][0].re);
    }
    println!("max relative error {:.2e} with {} lambda nodes (truncation estimate {:.2e})", report.max_rel_error, report.image_nodes, report.truncation);
}
