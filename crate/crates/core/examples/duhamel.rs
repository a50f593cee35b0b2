//! Closed-form Duhamel integrals against a Runge-Kutta march of
//! `y'' + ω² y = p̄(t)`.

use lamtrans::elastic::{duhamel_kernel, Forcing, Load};
use lamtrans::linalg::c;
use lamtrans::oracles::ode_march;

fn main() {
    let load = Load::Pulse { amplitude: 1.0, center: 0.0, width: 0.8, duration: 1.0 };
    let xi = 0.7;
    let forcing = Forcing::from_load(&load, xi).unwrap();
    for omega in [0.5, 2.0, 9.0] {
        for t in [0.5, 1.0, 2.5] {
            let closed = duhamel_kernel(c(omega * omega, 0.0), t, &forcing);
            let h = (0.05 / omega).min(t / 20000.0);
            let marched = ode_march(omega, |s| [forcing.value(s), c(0.0, 0.0)], t, h).unwrap();
            println!("omega = {omega:3}, t = {t:3}: closed {:+.10e}  RK4 {:+.10e}", closed.re, marched[0].re);
        }
    }
}
