//! Inversion of a rational symbol through the three spectral parts used by the
//! elastic solver: `λ` integral, contour below the spectrum and residues.
//! For `g(μ) = 1 / ((μ + n1)(μ + n2))` with both poles outside the contour the
//! sum must equal `-Σ Res g · y(-n_k)`.

use lamtrans::elastic::{ElasticLayer, ElasticScenario, Load};
use lamtrans::linalg::{c, C64, I};
use lamtrans::spectral::SpectralBasis;
use lamtrans::transform::{lambda_grid, QuadratureSpec, ResolventBasis};

#[test]
fn rational_symbol_inverts_to_residues() {
    let layers = vec![
        ElasticLayer { lame_lambda: 1.0, lame_mu: 1.0, c1: 2.0, c2: 1.0 },
        ElasticLayer { lame_lambda: 2.0, lame_mu: 1.5, c1: 2.5, c2: 1.2 },
    ];
    let sc = ElasticScenario::new(layers, vec![0.0, 1.0], Load::zero()).unwrap();
    let b0 = [c(1.0, 0.0), c(0.0, 0.0)];
    let xs = [0.0, 0.3, 0.9, 1.5, 2.5];
    for xi in [0.5, 2.0, 0.0] {
        let (m, cpl) = sc.build_coupling(xi).unwrap();
        let cc = sc.c();
        let floor = -1.2 * cc * cc * xi * xi - 0.1;
        let quad = QuadratureSpec { spectral_floor: Some(floor), lambda_max: 400.0, ..Default::default() };
        let contour = quad.contour(&m).unwrap();
        let (n1, n2) = (-2.0 * floor + 1.0, -3.0 * floor + 2.0);
        let g = |mu: C64| 1.0 / ((mu + n1) * (mu + n2));
        let grid = lambda_grid(&m, &cpl, &quad, 3.0).unwrap();
        let bases: Vec<(f64, f64, SpectralBasis)> = grid.nodes.iter().map(|&(l, w)| (l, w, SpectralBasis::build(&m, &cpl, l).unwrap())).collect();
        let ring: Vec<(C64, ResolventBasis)> =
            contour.nodes.iter().zip(&contour.weights).map(|(&mu, &w)| (w * g(mu), ResolventBasis::build(&m, &cpl, mu).unwrap())).collect();
        let rb1 = ResolventBasis::build(&m, &cpl, c(-n1, 0.0)).unwrap();
        let rb2 = ResolventBasis::build(&m, &cpl, c(-n2, 0.0)).unwrap();
        for &x in &xs {
            let mut sum = [c(0.0, 0.0); 2];
            for (l, w, b) in &bases {
                let v = b.spectral_u(x).mul_vec(&b0);
                for k in 0..2 {
                    sum[k] += -1.0 / (std::f64::consts::PI * I) * l * w * v[k] * g(c(l * l, 0.0));
                }
            }
            for (wg, rb) in &ring {
                let v = rb.boundary_response(x, &b0);
                for k in 0..2 {
                    sum[k] += wg * v[k];
                }
            }
            let (y1, y2) = (rb1.boundary_response(x, &b0), rb2.boundary_response(x, &b0));
            let scale = y1[0].norm().max(y2[0].norm());
            for k in 0..2 {
                let exact = -(y1[k] / (n2 - n1) + y2[k] / (n1 - n2));
                assert!((sum[k] - exact).norm() <= 1e-6 * scale, "xi {xi} x {x} k {k}: {} vs {exact}", sum[k]);
            }
        }
    }
}
