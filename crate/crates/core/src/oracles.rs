//! Brute-force reference computations for tests: classical half-line sine and
//! cosine transforms, an explicit oscillator march and finite-difference
//! residuals. Only `linalg` is used, so nothing here shares code with the
//! transform or the solver.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{vec_norm, CMatrix, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("step {h} exceeds 0.05/omega = {limit}")]
    StepTooLarge { h: f64, limit: f64 },
    #[error("stencil at x = {x} reaches across the interface at {interface}")]
    PointTooCloseToInterface { x: f64, interface: f64 },
    #[error("{0}")]
    BadInput(String),
}

/// Outcome of one oracle comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
    pub sample_count: usize,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    /// `pass` follows `max_rel_error <= tolerance`; a NaN error fails.
    pub fn new(name: impl Into<String>, max_abs_error: f64, max_rel_error: f64, sample_count: usize, tolerance: f64) -> Self {
        OracleReport { name: name.into(), max_abs_error, max_rel_error, sample_count, tolerance, pass: max_rel_error <= tolerance }
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} max_abs={:.3e} max_rel={:.3e} samples={} tol={:.1e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.max_abs_error,
            self.max_rel_error,
            self.sample_count,
            self.tolerance
        )
    }
}

/// Composite Simpson rule with `n` (rounded up to even) cells.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Cells of the Simpson rule: 40 per period of `λ` and 500 per unit length.
fn cells(lambda: f64, x_max: f64) -> usize {
    let per_period = lambda.abs() * x_max / (2.0 * std::f64::consts::PI) * 40.0;
    per_period.max(500.0 * x_max).ceil() as usize
}

/// `∫₀^{x_max} sin(λx) f(x) dx` for `f` negligible past `x_max`.
pub fn sine_transform_oracle(f: impl Fn(f64) -> f64, lambda: f64, x_max: f64) -> f64 {
    simpson(|x| (lambda * x).sin() * f(x), 0.0, x_max, cells(lambda, x_max))
}

/// `∫₀^{x_max} cos(λx) f(x) dx` for `f` negligible past `x_max`.
pub fn cosine_transform_oracle(f: impl Fn(f64) -> f64, lambda: f64, x_max: f64) -> f64 {
    simpson(|x| (lambda * x).cos() * f(x), 0.0, x_max, cells(lambda, x_max))
}

/// Position and velocity of the oscillator pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub y: [C64; 2],
    pub dy: [C64; 2],
}

impl OdeState {
    pub fn rest() -> Self {
        OdeState { y: [C64::new(0.0, 0.0); 2], dy: [C64::new(0.0, 0.0); 2] }
    }

    /// `|y'|² + ω²|y|²` summed over components.
    pub fn energy(&self, omega: f64) -> f64 {
        (0..2).map(|k| self.dy[k].norm_sqr() + omega * omega * self.y[k].norm_sqr()).sum()
    }
}

/// Classical RK4 for `y'' = -ω² y + g(t)` from `start` over `[0, t]` with
/// step at most `h`.
pub fn ode_march_from(omega: f64, start: OdeState, forcing: impl Fn(f64) -> [C64; 2], t: f64, h: f64) -> Result<OdeState, OracleError> {
    if !(h > 0.0 && t >= 0.0 && omega.is_finite()) {
        return Err(OracleError::BadInput(format!("need h > 0, t >= 0 and finite omega, got h={h}, t={t}, omega={omega}")));
    }
    let limit = 0.05 / omega.abs();
    if h > limit {
        return Err(OracleError::StepTooLarge { h, limit });
    }
    let steps = (t / h).ceil() as usize;
    if steps == 0 {
        return Ok(start);
    }
    let dt = t / steps as f64;
    let w2 = omega * omega;
    let accel = |s: f64, y: &[C64; 2]| -> [C64; 2] {
        let g = forcing(s);
        [g[0] - w2 * y[0], g[1] - w2 * y[1]]
    };
    let add = |a: &[C64; 2], b: &[C64; 2], s: f64| [a[0] + b[0] * s, a[1] + b[1] * s];
    let mut st = start;
    for i in 0..steps {
        let s = i as f64 * dt;
        let (y, v) = (st.y, st.dy);
        let k1v = accel(s, &y);
        let k1y = v;
        let k2y = add(&v, &k1v, 0.5 * dt);
        let k2v = accel(s + 0.5 * dt, &add(&y, &k1y, 0.5 * dt));
        let k3y = add(&v, &k2v, 0.5 * dt);
        let k3v = accel(s + 0.5 * dt, &add(&y, &k2y, 0.5 * dt));
        let k4y = add(&v, &k3v, dt);
        let k4v = accel(s + dt, &add(&y, &k3y, dt));
        for k in 0..2 {
            st.y[k] = y[k] + (k1y[k] + 2.0 * k2y[k] + 2.0 * k3y[k] + k4y[k]) * (dt / 6.0);
            st.dy[k] = v[k] + (k1v[k] + 2.0 * k2v[k] + 2.0 * k3v[k] + k4v[k]) * (dt / 6.0);
        }
    }
    Ok(st)
}

/// `y(t)` for `y'' = -ω² y + g(t)` with zero initial data.
pub fn ode_march(omega: f64, forcing: impl Fn(f64) -> [C64; 2], t: f64, h: f64) -> Result<[C64; 2], OracleError> {
    Ok(ode_march_from(omega, OdeState::rest(), forcing, t, h)?.y)
}

/// `second·u'' + first·u' + zeroth·u` with constant matrix coefficients.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    pub name: String,
    pub second: CMatrix,
    pub first: CMatrix,
    pub zeroth: CMatrix,
}

impl LinearOperator {
    /// `d²/dx²` on `r` components.
    pub fn second_derivative(r: usize) -> Self {
        LinearOperator { name: "d2/dx2".into(), second: CMatrix::identity(r), first: CMatrix::zeros(r, r), zeroth: CMatrix::zeros(r, r) }
    }

    /// `A² d²/dx² + λ² E + Γ²`.
    pub fn sturm_liouville(a_sq: &CMatrix, gamma_sq: &CMatrix, lambda: f64) -> Self {
        let r = a_sq.nrows();
        LinearOperator {
            name: format!("A2 d2/dx2 + lambda^2 + G2 (lambda={lambda})"),
            second: a_sq.clone(),
            first: CMatrix::zeros(r, r),
            zeroth: &CMatrix::identity(r).scale_real(lambda * lambda) + gamma_sq,
        }
    }
}

/// Five-point fourth-order residual `‖L u(x) - rhs(x)‖` at each point, relative
/// to the largest term `‖second·u''‖ + ‖first·u'‖ + ‖zeroth·u‖` seen.
pub fn fd_residual(
    u: impl Fn(f64) -> Vec<C64>,
    op: &LinearOperator,
    rhs: impl Fn(f64) -> Vec<C64>,
    points: &[f64],
    interfaces: &[f64],
    h: f64,
    tolerance: f64,
) -> Result<OracleReport, OracleError> {
    if !(h > 0.0) {
        return Err(OracleError::BadInput(format!("step must be positive, got {h}")));
    }
    for &x in points {
        if let Some(&l) = interfaces.iter().find(|&&l| (x - l).abs() < 2.0 * h) {
            return Err(OracleError::PointTooCloseToInterface { x, interface: l });
        }
    }
    let mut max_abs: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &x in points {
        let s: Vec<Vec<C64>> = (-2..=2).map(|k| u(x + k as f64 * h)).collect();
        let r = s[0].len();
        let d1: Vec<C64> = (0..r).map(|i| (s[0][i] - 8.0 * s[1][i] + 8.0 * s[3][i] - s[4][i]) / (12.0 * h)).collect();
        let d2: Vec<C64> = (0..r).map(|i| (-s[0][i] + 16.0 * s[1][i] - 30.0 * s[2][i] + 16.0 * s[3][i] - s[4][i]) / (12.0 * h * h)).collect();
        let terms = [op.second.mul_vec(&d2), op.first.mul_vec(&d1), op.zeroth.mul_vec(&s[2])];
        let f = rhs(x);
        let res: Vec<C64> = (0..r).map(|i| terms[0][i] + terms[1][i] + terms[2][i] - f[i]).collect();
        max_abs = max_abs.max(vec_norm(&res));
        scale = scale.max(terms.iter().map(|t| vec_norm(t)).sum::<f64>() + vec_norm(&f));
    }
    let rel = if scale > 0.0 { max_abs / scale } else { max_abs };
    Ok(OracleReport::new(format!("fd_residual[{}]", op.name), max_abs, rel, points.len(), tolerance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn sine_oracle_matches_tables() {
        assert!((sine_transform_oracle(|x| (-x).exp(), 1.0, 40.0) - 0.5).abs() < 1e-10);
        assert!((sine_transform_oracle(|x| x * (-x).exp(), 2.0, 40.0) - 4.0 / 25.0).abs() < 1e-10);
        assert_eq!(sine_transform_oracle(|_| 0.0, 3.0, 10.0), 0.0);
        // ∫ cos(λx) e^{-x} = 1/(1+λ²)
        assert!((cosine_transform_oracle(|x| (-x).exp(), 2.0, 40.0) - 0.2).abs() < 1e-10);
    }

    #[test]
    fn oscillator_march_matches_closed_form() {
        let one = |_: f64| [c(1.0, 0.0), c(0.0, 0.0)];
        let y = ode_march(1.0, one, std::f64::consts::PI, 1e-3).unwrap();
        assert!((y[0] - 2.0).norm() < 1e-10 && y[1].norm() == 0.0);
        let zero = ode_march(3.0, |_| [c(0.0, 0.0); 2], 2.0, 1e-3).unwrap();
        assert_eq!(zero, [c(0.0, 0.0); 2]);
    }

    #[test]
    fn free_oscillation_conserves_energy() {
        let start = OdeState { y: [c(1.0, 0.0), c(0.0, -0.5)], dy: [c(0.0, 0.0), c(2.0, 0.0)] };
        let omega = 4.0;
        let end = ode_march_from(omega, start, |_| [c(0.0, 0.0); 2], 5.0, 0.01).unwrap();
        assert!((end.energy(omega) - start.energy(omega)).abs() < 1e-7 * start.energy(omega));
    }

    #[test]
    fn large_steps_are_refused() {
        assert!(matches!(ode_march(10.0, |_| [c(1.0, 0.0); 2], 1.0, 0.01), Err(OracleError::StepTooLarge { .. })));
    }

    #[test]
    fn residual_vanishes_on_eigenfunctions_and_cubics() {
        let lambda = 3.0;
        let pts: Vec<f64> = (1..20).map(|i| 0.1 * i as f64).collect();
        let helm = LinearOperator::sturm_liouville(&CMatrix::identity(1), &CMatrix::zeros(1, 1), lambda);
        let r = fd_residual(|x| vec![c((lambda * x).sin(), 0.0)], &helm, |_| vec![c(0.0, 0.0)], &pts, &[], 1e-3, 1e-8).unwrap();
        assert!(r.pass, "{r}");
        let d2 = LinearOperator::second_derivative(1);
        let r = fd_residual(|x| vec![c(x * x * x, 0.0)], &d2, |x| vec![c(6.0 * x, 0.0)], &pts, &[], 1e-2, 1e-10).unwrap();
        assert!(r.max_abs_error < 1e-10, "{r}");
    }

    #[test]
    fn stencils_may_not_straddle_interfaces() {
        let d2 = LinearOperator::second_derivative(1);
        let r = fd_residual(|x| vec![c(x, 0.0)], &d2, |_| vec![c(0.0, 0.0)], &[0.99], &[1.0], 0.01, 1e-8);
        assert!(matches!(r, Err(OracleError::PointTooCloseToInterface { .. })));
    }

    #[test]
    fn report_line_names_outcome() {
        let r = OracleReport::new("demo", 1e-3, 1e-4, 5, 1e-3);
        assert!(r.pass && r.to_string().starts_with("PASS demo"));
        assert!(!OracleReport::new("nan", f64::NAN, f64::NAN, 1, 1.0).pass);
    }
}
