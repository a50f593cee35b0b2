//! Lamb's problem on a desk grid: a surface pulse on a homogeneous
//! half-space, with the causality and surface-stress checks.

use lamtrans::elastic::{fields_from_tension, reconstruct_tension, ElasticLayer, ElasticScenario, GridSpec, Load, SolverSpec};

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn main() {
    let layer = ElasticLayer { lame_lambda: 1.0, lame_mu: 1.0, c1: 3f64.sqrt(), c2: 1.0 };
    let load = Load::Pulse { amplitude: 1.0, center: 0.0, width: 1.0, duration: 3.0 };
    let scenario = ElasticScenario::new(vec![layer], vec![0.0], load).unwrap();
    let grid = GridSpec { x: linspace(0.0, 1.0, 11), y: linspace(-1.0, 1.0, 11), t: linspace(0.0, 1.0, 5) };

    let tension = reconstruct_tension(&scenario, &grid, &SolverSpec::default()).unwrap();
    let fields = fields_from_tension(&scenario, &tension).unwrap();
    let checks = fields.checks(&scenario, &tension);
    println!("xi nodes {}, imaginary residue {:.2e}", tension.report.xi_nodes, tension.report.imaginary_residue);
    println!("causality {:.2e}, surface stress {:.2e}", checks.causality, checks.surface_stress);

    let last = grid.t.len() - 1;
    fields.write_csv(last, &mut std::io::stdout().lock()).unwrap();
}
