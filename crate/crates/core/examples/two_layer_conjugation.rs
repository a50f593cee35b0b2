//! A stiff layer over a soft half-space: displacements and the traction
//! components stay continuous across the interface.

use lamtrans::elastic::{fields_from_tension, reconstruct_tension, ElasticLayer, ElasticScenario, GridSpec, Load, SolverSpec};

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn main() {
    let stiff = ElasticLayer { lame_lambda: 1.0, lame_mu: 1.0, c1: 3f64.sqrt(), c2: 1.0 };
    let soft = ElasticLayer { lame_lambda: 0.5, lame_mu: 0.5, c1: 1.5f64.sqrt(), c2: 0.5f64.sqrt() };
    let load = Load::Pulse { amplitude: 1.0, center: 0.0, width: 1.0, duration: 3.0 };
    let scenario = ElasticScenario::new(vec![stiff, soft], vec![0.0, 0.5], load).unwrap();
    let grid = GridSpec { x: linspace(0.0, 1.0, 11), y: linspace(-1.0, 1.0, 11), t: linspace(0.0, 1.0, 5) };

    let tension = reconstruct_tension(&scenario, &grid, &SolverSpec::default()).unwrap();
    let fields = fields_from_tension(&scenario, &tension).unwrap();
    let a = fields.columns.iter().position(|&c| c == (1, 0.5)).unwrap();
    let b = fields.columns.iter().position(|&c| c == (2, 0.5)).unwrap();
    let t = grid.t.len() - 1;
    println!("   y      u-      u+      sx-     sx+     sy-     sy+");
    for (yi, y) in grid.y.iter().enumerate() {
        println!(
            "{y:+.2} {:+.4} {:+.4} {:+.4} {:+.4} {:+.4} {:+.4}",
            fields.u[t][a][yi], fields.u[t][b][yi], fields.sigma_x[t][a][yi], fields.sigma_x[t][b][yi], fields.sigma_y[t][a][yi], fields.sigma_y[t][b][yi]
        );
    }
    println!("largest relative jump of u, v, sigma_x, tau_xy: {:.2e}", fields.conjugation_residuals(&scenario)[0]);
}
