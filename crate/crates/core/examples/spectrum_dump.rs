//! Samples of the spectral matrix `u` and its dual `u*` as CSV on stdout.

use lamtrans::elastic::{ElasticLayer, ElasticScenario, Load};
use lamtrans::spectral::write_spectrum_csv;

fn main() {
    let stiff = ElasticLayer { lame_lambda: 1.0, lame_mu: 1.0, c1: 3f64.sqrt(), c2: 1.0 };
    let soft = ElasticLayer { lame_lambda: 0.5, lame_mu: 0.5, c1: 1.5f64.sqrt(), c2: 0.5f64.sqrt() };
    let scenario = ElasticScenario::new(vec![stiff, soft], vec![0.0, 0.5], Load::zero()).unwrap();
    let (medium, coupling) = scenario.build_coupling(1.0).unwrap();
    let xs: Vec<f64> = (0..=10).map(|i| 0.1 * i as f64).collect();
    write_spectrum_csv(&mut std::io::stdout().lock(), &medium, &coupling, &[0.5, 2.0], &xs).unwrap();
}
