use lamtrans::elastic::{duhamel_kernel, reconstruct_tension, tension_at, ElasticLayer, ElasticScenario, Forcing, GridSpec, Load, SolverSpec};
use lamtrans::linalg::{c, C64};
use lamtrans::transform::QuadratureSpec;
use proptest::prelude::*;

fn layer() -> ElasticLayer {
    ElasticLayer { lame_lambda: 1.0, lame_mu: 1.0, c1: 3f64.sqrt(), c2: 1.0 }
}

fn pulse(amplitude: f64) -> Load {
    Load::Pulse { amplitude, center: 0.0, width: 1.0, duration: 3.0 }
}

fn quick() -> SolverSpec {
    SolverSpec { transform: QuadratureSpec { lambda_max: 40.0, ..Default::default() }, xi_level: 1e-6 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn duhamel_is_linear_in_the_forcing(
        a in -3.0f64..3.0, b in -3.0f64..3.0, omega in 0.0f64..20.0, t in 0.0f64..4.0,
        v in proptest::collection::vec(-1.0f64..1.0, 8),
    ) {
        let times = [0.0, 0.4, 0.9, 1.7];
        let f: Vec<C64> = v[..4].iter().map(|&x| c(x, 0.0)).collect();
        let g: Vec<C64> = v[4..].iter().map(|&x| c(0.0, x)).collect();
        let h: Vec<C64> = f.iter().zip(&g).map(|(x, y)| x * a + y * b).collect();
        let w2 = c(omega * omega, 0.0);
        let lhs = duhamel_kernel(w2, t, &Forcing::linear(&times, &h));
        let rhs = duhamel_kernel(w2, t, &Forcing::linear(&times, &f)) * a + duhamel_kernel(w2, t, &Forcing::linear(&times, &g)) * b;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn duhamel_vanishes_at_rest(omega in 0.0f64..20.0, t in 0.0f64..4.0) {
        let zero = Forcing::linear(&[0.0, 1.0], &[c(0.0, 0.0), c(0.0, 0.0)]);
        prop_assert_eq!(duhamel_kernel(c(omega * omega, 0.0), t, &zero), c(0.0, 0.0));
        let one = Forcing::linear(&[0.0], &[c(1.0, 0.0)]);
        prop_assert_eq!(duhamel_kernel(c(omega * omega, 0.0), 0.0, &one), c(0.0, 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn tension_is_linear_in_the_load(k in 0.2f64..5.0, x in 0.05f64..1.0, y in -1.0f64..1.0, t in 0.2f64..1.5) {
        let base = ElasticScenario::new(vec![layer()], vec![0.0], pulse(1.0)).unwrap();
        let scaled = ElasticScenario::new(vec![layer()], vec![0.0], pulse(k)).unwrap();
        let a = tension_at(&base, x, y, t, &quick()).unwrap();
        let b = tension_at(&scaled, x, y, t, &quick()).unwrap();
        let scale = a.phi.abs().max(a.psi.abs()).max(1e-12);
        prop_assert!((b.phi - k * a.phi).abs() <= 1e-9 * k * scale);
        prop_assert!((b.psi - k * a.psi).abs() <= 1e-9 * k * scale);
    }
}

#[test]
fn zero_load_gives_zero_tension_everywhere() {
    let sc = ElasticScenario::new(vec![layer(), layer()], vec![0.0, 0.4], Load::zero()).unwrap();
    let grid = GridSpec { x: vec![0.0, 0.4, 0.9], y: vec![-0.5, 0.0, 0.5], t: vec![0.0, 0.7] };
    let g = reconstruct_tension(&sc, &grid, &quick()).unwrap();
    assert_eq!(g.peak(), 0.0);
}

#[test]
fn identical_layers_match_the_half_space() {
    let grid = GridSpec { x: vec![0.0, 0.3, 0.5, 0.8], y: vec![-0.6, 0.0, 0.4], t: vec![0.5, 1.0] };
    let one = ElasticScenario::new(vec![layer()], vec![0.0], pulse(1.0)).unwrap();
    let two = ElasticScenario::new(vec![layer(), layer()], vec![0.0, 0.5], pulse(1.0)).unwrap();
    let a = reconstruct_tension(&one, &grid, &quick()).unwrap();
    let b = reconstruct_tension(&two, &grid, &quick()).unwrap();
    let scale = a.peak();
    let mut worst: f64 = 0.0;
    for (ti, _) in grid.t.iter().enumerate() {
        for (ca, &(_, x)) in a.columns.iter().enumerate() {
            for (cb, _) in b.columns.iter().enumerate().filter(|(_, col)| col.1 == x) {
                for yi in 0..grid.y.len() {
                    worst = worst.max((a.phi[ti][ca][yi] - b.phi[ti][cb][yi]).abs()).max((a.psi[ti][ca][yi] - b.psi[ti][cb][yi]).abs());
                }
            }
        }
    }
    println!("identical layers against the half-space: {:.2e} of peak", worst / scale);
    assert!(worst <= 1e-2 * scale, "{worst} vs peak {scale}");
}
