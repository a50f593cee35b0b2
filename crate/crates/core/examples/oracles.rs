//! The independent reference solvers: Simpson transforms, an RK4 march and
//! a finite-difference operator residual.

use lamtrans::linalg::{c, CMatrix};
use lamtrans::oracles::{fd_residual, ode_march, sine_transform_oracle, LinearOperator};

fn main() {
    for lambda in [0.5, 2.0, 10.0] {
        let s = sine_transform_oracle(|x| (-x).exp(), lambda, 40.0);
        println!("int sin({lambda} x) e^-x dx = {s:.10}  exact {:.10}", lambda / (1.0 + lambda * lambda));
    }

    let omega: f64 = 3.0;
    let t = 2.0;
    let y = ode_march(omega, |_| [c(1.0, 0.0), c(0.0, 0.0)], t, 1e-4).unwrap();
    println!("step response {:.12}  exact {:.12}", y[0].re, (1.0 - (omega * t).cos()) / (omega * omega));

    // u'' + λ² u = 0 for u = sin(λx)
    let lambda = 1.7;
    let op = LinearOperator::sturm_liouville(&CMatrix::identity(1), &CMatrix::zeros(1, 1), lambda);
    let rep = fd_residual(|x| vec![c((lambda * x).sin(), 0.0)], &op, |_| vec![c(0.0, 0.0)], &[0.5, 1.0, 2.0], &[], 1e-3, 1e-8).unwrap();
    println!("{rep}");
}
