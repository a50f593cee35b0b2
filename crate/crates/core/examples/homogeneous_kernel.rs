//! The kernel `H(x, z)` of a homogeneous half-space at one `ξ`.

use lamtrans::elastic::{kernel_h_homogeneous, ElasticLayer, ElasticScenario, KernelSpec, Load};

fn main() {
    let layer = ElasticLayer { lame_lambda: 1.0, lame_mu: 1.0, c1: 3f64.sqrt(), c2: 1.0 };
    let scenario = ElasticScenario::new(vec![layer], vec![0.0], Load::zero()).unwrap();
    for (x, z) in [(0.2, 0.0), (0.5, 0.3), (1.0, 1.0)] {
        let k = kernel_h_homogeneous(&scenario, 0.7, x, z, &KernelSpec::default()).unwrap();
        println!("H({x}, {z}) = [[{:+.6}, {:+.6}], [{:+.6}, {:+.6}]]  tail <= {:.1e}", k.h[0][0], k.h[0][1], k.h[1][0], k.h[1][1], k.tail);
    }
}
