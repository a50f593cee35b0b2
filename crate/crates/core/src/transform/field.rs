use std::sync::Arc;

use rand::Rng;

use crate::linalg::{block_solve, CMatrix, C64};
use crate::medium::{MediumStack, Side};

/// Scalar profile with closed-form derivatives of every order.
#[derive(Debug, Clone)]
pub enum Profile {
    /// `poly(s) exp(-a s² - b s)` with `s = x - x0`; `poly` ascending.
    ExpPoly { x0: f64, poly: Vec<f64>, a: f64, b: f64 },
    /// `poly(s)` for `|s| < half_width`, zero elsewhere; `s = x - center`.
    Compact { center: f64, half_width: f64, poly: Vec<f64> },
    /// Interpolating cubic from samples; zero outside the sampled range.
    Spline(Arc<CubicSpline>),
}

fn poly_eval(p: &[f64], s: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * s + c)
}

fn poly_deriv(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect()
}

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn poly_add(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len().max(q.len())];
    for (i, &a) in p.iter().enumerate() {
        out[i] += a;
    }
    for (i, &b) in q.iter().enumerate() {
        out[i] += b;
    }
    out
}

impl Profile {
    /// `exp(-((x - center)/width)²)`.
    pub fn gaussian(center: f64, width: f64) -> Self {
        Profile::ExpPoly { x0: center, poly: vec![1.0], a: 1.0 / (width * width), b: 0.0 }
    }

    /// `(x - x0)^k exp(-rate (x - x0))`.
    pub fn exp_monomial(x0: f64, k: usize, rate: f64) -> Self {
        let mut poly = vec![0.0; k + 1];
        poly[k] = 1.0;
        Profile::ExpPoly { x0, poly, a: 0.0, b: rate }
    }

    /// `(1 - ((x - center)/half_width)²)^power` on its support; `C^{power-1}` at the edges.
    pub fn bump(center: f64, half_width: f64, power: usize) -> Self {
        let base = [1.0, 0.0, -1.0 / (half_width * half_width)];
        let mut poly = vec![1.0];
        for _ in 0..power {
            poly = poly_mul(&poly, &base);
        }
        Profile::Compact { center, half_width, poly }
    }

    pub fn derivative(&self, x: f64, n: u32) -> f64 {
        match self {
            Profile::ExpPoly { x0, poly, a, b } => {
                let s = x - x0;
                let g1 = [-b, -2.0 * a];
                let mut p = poly.clone();
                for _ in 0..n {
                    p = poly_add(&poly_deriv(&p), &poly_mul(&p, &g1));
                }
                poly_eval(&p, s) * (-a * s * s - b * s).exp()
            }
            Profile::Compact { center, half_width, poly } => {
                let s = x - center;
                if s.abs() >= *half_width {
                    return 0.0;
                }
                let mut p = poly.clone();
                for _ in 0..n {
                    p = poly_deriv(&p);
                }
                poly_eval(&p, s)
            }
            Profile::Spline(sp) => sp.derivative(x, n),
        }
    }

    /// Closed support, `(-inf, inf)` for exponential profiles.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Profile::ExpPoly { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Profile::Compact { center, half_width, .. } => (center - half_width, center + half_width),
            Profile::Spline(sp) => (sp.x[0], *sp.x.last().expect("spline has nodes")),
        }
    }

    /// Points where the profile is not smooth.
    pub fn breaks(&self) -> Vec<f64> {
        match self {
            Profile::ExpPoly { .. } => vec![],
            Profile::Compact { center, half_width, .. } => vec![center - half_width, center + half_width],
            Profile::Spline(sp) => sp.x.clone(),
        }
    }

    /// Length over which the profile changes appreciably.
    pub fn feature_scale(&self) -> f64 {
        match self {
            Profile::ExpPoly { a, b, poly, .. } => {
                let mut s = f64::INFINITY;
                if *a > 0.0 {
                    s = s.min(0.5 / a.sqrt());
                }
                if b.abs() > 0.0 {
                    s = s.min(0.5 / b.abs());
                }
                if poly.len() > 1 {
                    s = s.min(2.0);
                }
                s
            }
            Profile::Compact { half_width, poly, .. } => half_width / (poly.len() as f64).sqrt(),
            Profile::Spline(sp) => sp.x.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min).max(1e-6),
        }
    }

    /// `(c, rate)` with `|p(x)| <= c exp(-rate (x - from))` for `x >= from`,
    /// or `None` if the profile does not decay.
    fn decay_bound(&self, from: f64) -> Option<(f64, f64)> {
        match self {
            Profile::ExpPoly { x0, poly, a, b } => {
                let rate = if *a > 0.0 {
                    6.0 * a.sqrt() + b.max(0.0)
                } else if *b > 0.0 {
                    0.9 * b
                } else {
                    return None;
                };
                // sup of log|p| - a s² - b s + rate (x - from), sampled until it is clearly past its peak
                let s0 = from - x0;
                let reach = if *a > 0.0 { (rate + b.abs()) / a + 40.0 / a.sqrt() } else { 80.0 * poly.len() as f64 / b };
                let mut best = f64::NEG_INFINITY;
                let steps = 8000;
                for i in 0..=steps {
                    let s = s0 + reach * i as f64 / steps as f64;
                    let p = poly.iter().enumerate().map(|(k, c)| c.abs() * s.abs().powi(k as i32)).sum::<f64>();
                    if p > 0.0 {
                        best = best.max(p.ln() - a * s * s - b * s + rate * (s - s0));
                    }
                }
                Some((if best.is_finite() { 1.1 * best.exp() } else { 0.0 }, rate))
            }
            _ => Some((0.0, f64::INFINITY)),
        }
    }
}

/// Natural cubic spline through `(x_i, y_i)`.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    /// Requires at least two strictly increasing nodes.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Option<Self> {
        let n = x.len();
        if n < 2 || y.len() != n || x.windows(2).any(|w| w[1] <= w[0]) {
            return None;
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal solve for interior second derivatives
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let rhs = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
                let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
                c[i] = h1 / diag;
                d[i] = (rhs - h0 * d[i - 1]) / diag;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        Some(CubicSpline { x, y, m })
    }

    pub fn derivative(&self, t: f64, n: u32) -> f64 {
        let last = self.x.len() - 1;
        if t < self.x[0] || t > self.x[last] {
            return 0.0;
        }
        let i = match self.x.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(last - 1),
            Err(i) => i.saturating_sub(1).min(last - 1),
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (y0, y1, m0, m1) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        match n {
            0 => a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0,
            1 => (y1 - y0) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0,
            2 => a * m0 + b * m1,
            3 => (m1 - m0) / h,
            _ => 0.0,
        }
    }
}

/// `v * p^{(order + n)}(x)` as the `n`-th derivative of the term.
#[derive(Debug, Clone)]
pub struct Term {
    pub v: Vec<C64>,
    pub profile: Profile,
    pub order: u32,
}

impl Term {
    pub fn new(v: Vec<C64>, profile: Profile) -> Self {
        Term { v, profile, order: 0 }
    }
}

/// `‖f(x)‖ <= Σ c_t exp(-rate_t (x - ln))` for `x >= support_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayWitness {
    pub bounds: Vec<(f64, f64)>,
    pub support_end: f64,
}

impl DecayWitness {
    /// Upper bound of `∫_X^∞ ‖f‖` for `X >= support_end`, infinite before it.
    pub fn tail_integral(&self, x: f64, ln: f64) -> f64 {
        if x < self.support_end {
            return f64::INFINITY;
        }
        self.bounds
            .iter()
            .map(|&(c, rate)| if c == 0.0 { 0.0 } else if rate <= 0.0 { f64::INFINITY } else { c / rate * (-rate * (x - ln)).exp() })
            .sum()
    }

    pub fn decays(&self) -> bool {
        self.bounds.iter().all(|&(c, rate)| c == 0.0 || rate > 0.0)
    }
}

/// Vector field on the layered half-line: a sum of terms on each layer.
#[derive(Debug, Clone)]
pub struct PiecewiseField {
    r: usize,
    interfaces: Vec<f64>,
    layers: Vec<Vec<Term>>,
    witness_override: Option<DecayWitness>,
}

impl PiecewiseField {
    pub fn zero(medium: &MediumStack) -> Self {
        PiecewiseField { r: medium.r(), interfaces: medium.interfaces().to_vec(), layers: vec![Vec::new(); medium.layer_count()], witness_override: None }
    }

    /// The same terms on every layer.
    pub fn uniform(medium: &MediumStack, terms: Vec<Term>) -> Self {
        let mut f = Self::zero(medium);
        for layer in &mut f.layers {
            layer.clone_from(&terms);
        }
        f
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Terms on layer `m` (1-based).
    pub fn terms(&self, m: usize) -> &[Term] {
        &self.layers[m - 1]
    }

    pub fn push(&mut self, m: usize, term: Term) {
        assert_eq!(term.v.len(), self.r);
        self.layers[m - 1].push(term);
    }

    pub fn set_witness(&mut self, w: DecayWitness) {
        self.witness_override = Some(w);
    }

    pub fn is_zero(&self) -> bool {
        self.layers.iter().all(|l| l.iter().all(|t| t.v.iter().all(|z| z.norm() == 0.0)))
    }

    /// `n`-th derivative of the layer-`m` expression (valid as a one-sided limit at its ends).
    pub fn eval_layer(&self, m: usize, x: f64, n: u32) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.r];
        for t in &self.layers[m - 1] {
            let p = t.profile.derivative(x, t.order + n);
            if p != 0.0 {
                for (o, v) in out.iter_mut().zip(&t.v) {
                    *o += v * p;
                }
            }
        }
        out
    }

    pub fn layer_of(&self, x: f64) -> usize {
        let n = self.interfaces.len() - 1;
        (1..=n).find(|&k| x <= self.interfaces[k]).unwrap_or(n + 1)
    }

    pub fn eval(&self, x: f64) -> Vec<C64> {
        self.eval_layer(self.layer_of(x), x, 0)
    }

    /// One-sided limit of the `n`-th derivative at interface `k`.
    pub fn limit(&self, k: usize, side: Side, n: u32) -> Vec<C64> {
        let m = match side {
            Side::Left => k,
            Side::Right => k + 1,
        };
        self.eval_layer(m, self.interfaces[k], n)
    }

    /// `B f = A² f'' + Γ² f` layer by layer.
    pub fn apply_b(&self, medium: &MediumStack) -> PiecewiseField {
        let mut out = PiecewiseField { witness_override: None, ..Self::zero(medium) };
        for (idx, terms) in self.layers.iter().enumerate() {
            let layer = medium.layer(idx + 1);
            for t in terms {
                out.layers[idx].push(Term { v: layer.a_sq().mul_vec(&t.v), profile: t.profile.clone(), order: t.order + 2 });
                if layer.gamma_sq().max_abs() > 0.0 {
                    out.layers[idx].push(Term { v: layer.gamma_sq().mul_vec(&t.v), profile: t.profile.clone(), order: t.order });
                }
            }
        }
        out
    }

    /// `a f + b g` on the same geometry.
    pub fn combine(a: C64, f: &PiecewiseField, b: C64, g: &PiecewiseField) -> PiecewiseField {
        assert_eq!(f.interfaces, g.interfaces);
        let mut out = PiecewiseField { r: f.r, interfaces: f.interfaces.clone(), layers: Vec::new(), witness_override: None };
        for (lf, lg) in f.layers.iter().zip(&g.layers) {
            let mut terms: Vec<Term> = lf.iter().map(|t| Term { v: t.v.iter().map(|z| z * a).collect(), ..t.clone() }).collect();
            terms.extend(lg.iter().map(|t| Term { v: t.v.iter().map(|z| z * b).collect(), ..t.clone() }));
            out.layers.push(terms);
        }
        out
    }

    /// Decay witness of the tail layer, derived from its terms unless overridden.
    pub fn witness(&self) -> DecayWitness {
        if let Some(w) = &self.witness_override {
            return w.clone();
        }
        let ln = *self.interfaces.last().expect("at least l0");
        let mut bounds = Vec::new();
        let mut support_end = ln;
        for t in self.layers.last().expect("at least one layer") {
            let norm = crate::linalg::vec_norm(&t.v);
            if norm == 0.0 {
                continue;
            }
            let (lo, hi) = t.profile.support();
            if hi.is_finite() {
                support_end = support_end.max(hi);
                let _ = lo;
                continue;
            }
            // derivative offsets only change the polynomial factor
            let differentiated = differentiated_profile(&t.profile, t.order);
            match differentiated.decay_bound(ln) {
                Some((c, rate)) => bounds.push((norm * c, rate)),
                None => bounds.push((norm, 0.0)),
            }
        }
        DecayWitness { bounds, support_end }
    }

    /// Interior breakpoints of layer `m`.
    pub fn breaks(&self, m: usize) -> Vec<f64> {
        self.layers[m - 1].iter().flat_map(|t| t.profile.breaks()).collect()
    }

    /// Union of term supports on layer `m`, or `None` for an empty layer.
    pub fn layer_support(&self, m: usize) -> Option<(f64, f64)> {
        self.layers[m - 1]
            .iter()
            .filter(|t| t.v.iter().any(|z| z.norm() > 0.0))
            .map(|t| t.profile.support())
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }

    pub fn feature_scale(&self, m: usize) -> f64 {
        self.layers[m - 1].iter().map(|t| t.profile.feature_scale()).fold(f64::INFINITY, f64::min)
    }
}

fn differentiated_profile(p: &Profile, order: u32) -> Profile {
    match p {
        Profile::ExpPoly { x0, poly, a, b } => {
            let g1 = [-b, -2.0 * a];
            let mut q = poly.clone();
            for _ in 0..order {
                q = poly_add(&poly_deriv(&q), &poly_mul(&q, &g1));
            }
            Profile::ExpPoly { x0: *x0, poly: q, a: *a, b: *b }
        }
        other => other.clone(),
    }
}

/// Random field obeying the homogeneous conjugation conditions with `λ²`
/// replaced by `-B`, built from Gaussian-polynomial terms.
///
/// Starting from the tail, each layer gets random terms plus the two
/// corrections `(1 + a s²) e^{-a s²}` and `s (1 + a s²) e^{-a s²}` at `l_k`
/// (jets `(1, 0, 0, 0)` and `(0, 1, 0, 0)`) whose weights are solved so the
/// conditions hold exactly.
pub fn random_conjugate_field(
    medium: &MediumStack,
    coupling: &crate::medium::CouplingSet,
    rng: &mut impl Rng,
) -> Result<PiecewiseField, crate::linalg::LinalgError> {
    let r = medium.r();
    let mut f = PiecewiseField::zero(medium);
    let rand_vec = |rng: &mut dyn rand::RngCore| -> Vec<C64> { (0..r).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect() };
    let l = medium.interfaces();
    let layers = medium.layer_count();
    for m in (1..=layers).rev() {
        let lo = l[m - 1];
        let hi = if m == layers { lo + 3.0 } else { l[m] };
        for _ in 0..2 {
            let center = rng.gen_range(lo..hi);
            let width = rng.gen_range(0.3..0.8) * (hi - lo).min(2.0);
            let v = rand_vec(rng);
            let c1: f64 = rng.gen_range(-0.5..0.5);
            f.push(m, Term::new(v, Profile::ExpPoly { x0: center, poly: vec![1.0, c1 / width], a: 1.0 / (width * width), b: 0.0 }));
        }
        if m == layers {
            continue;
        }
        let k = m;
        let lk = l[k];
        let ic = coupling.interface(k);
        let jet = |f: &PiecewiseField, side: Side| -> [Vec<C64>; 4] { [0, 1, 2, 3].map(|n| f.limit(k, side, n)) };
        let cond = |side: Side, j: [Vec<C64>; 4], layer: usize| -> Vec<C64> {
            let lay = medium.layer(layer);
            let mut out = vec![C64::new(0.0, 0.0); 2 * r];
            for (jj, block) in out.chunks_mut(r).enumerate() {
                let q = ic.quad(jj + 1, side);
                let bf = &lay.a_sq().mul_vec(&j[2]).iter().zip(lay.gamma_sq().mul_vec(&j[0])).map(|(a, b)| a + b).collect::<Vec<_>>();
                let bf1 = &lay.a_sq().mul_vec(&j[3]).iter().zip(lay.gamma_sq().mul_vec(&j[1])).map(|(a, b)| a + b).collect::<Vec<_>>();
                let parts = [q.beta.mul_vec(&j[0]), q.alpha.mul_vec(&j[1]), q.gamma.mul_vec(bf), q.delta.mul_vec(bf1)];
                for i in 0..r {
                    block[i] = parts[0][i] + parts[1][i] - parts[2][i] - parts[3][i];
                }
            }
            out
        };
        let target = cond(Side::Right, jet(&f, Side::Right), k + 1);
        let current = cond(Side::Left, jet(&f, Side::Left), k);
        // N [dv; dd] = target - current for the value/derivative corrections
        let lay = medium.layer(k);
        let mut rows = Vec::new();
        for j in 1..=2 {
            let q = ic.quad(j, Side::Left);
            let nv = &q.beta - &(&q.gamma * lay.gamma_sq());
            let nd = &q.alpha - &(&q.delta * lay.gamma_sq());
            rows.push((nv, nd));
        }
        let n_mat = CMatrix::from_blocks(&rows[0].0, &rows[0].1, &rows[1].0, &rows[1].1);
        let rhs: Vec<C64> = target.iter().zip(&current).map(|(t, c)| t - c).collect();
        let rhs_m = CMatrix::from_fn(2 * r, 1, |i, _| rhs[i]);
        let sol = block_solve(&n_mat, &rhs_m)?;
        let dv: Vec<C64> = (0..r).map(|i| sol.get(i, 0)).collect();
        let dd: Vec<C64> = (0..r).map(|i| sol.get(r + i, 0)).collect();
        let thickness = lk - l[k - 1];
        let a = 40.0 / (thickness * thickness);
        f.push(k, Term::new(dv, Profile::ExpPoly { x0: lk, poly: vec![1.0, 0.0, a], a, b: 0.0 }));
        f.push(k, Term::new(dd, Profile::ExpPoly { x0: lk, poly: vec![0.0, 1.0, 0.0, a], a, b: 0.0 }));
    }
    Ok(f)
}

/// Largest homogeneous-conjugation residual of `f` over all interfaces,
/// relative to the size of the condition values.
pub fn conjugation_residual(f: &PiecewiseField, medium: &MediumStack, coupling: &crate::medium::CouplingSet) -> f64 {
    let r = medium.r();
    let mut worst: f64 = 0.0;
    for k in 1..=medium.n() {
        let ic = coupling.interface(k);
        let side_value = |side: Side, layer: usize| -> Vec<C64> {
            let lay = medium.layer(layer);
            let j: Vec<Vec<C64>> = (0..4).map(|n| f.limit(k, side, n)).collect();
            let bf: Vec<C64> = lay.a_sq().mul_vec(&j[2]).iter().zip(lay.gamma_sq().mul_vec(&j[0])).map(|(a, b)| a + b).collect();
            let bf1: Vec<C64> = lay.a_sq().mul_vec(&j[3]).iter().zip(lay.gamma_sq().mul_vec(&j[1])).map(|(a, b)| a + b).collect();
            let mut out = Vec::with_capacity(2 * r);
            for jj in 1..=2 {
                let q = ic.quad(jj, side);
                let p = [q.beta.mul_vec(&j[0]), q.alpha.mul_vec(&j[1]), q.gamma.mul_vec(&bf), q.delta.mul_vec(&bf1)];
                out.extend((0..r).map(|i| p[0][i] + p[1][i] - p[2][i] - p[3][i]));
            }
            out
        };
        let a = side_value(Side::Left, k);
        let b = side_value(Side::Right, k + 1);
        let diff: Vec<C64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let scale = crate::linalg::vec_norm(&a).max(crate::linalg::vec_norm(&b)).max(1.0);
        worst = worst.max(crate::linalg::vec_norm(&diff) / scale);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn exppoly_derivatives_match_finite_differences() {
        let p = Profile::ExpPoly { x0: 0.3, poly: vec![1.0, -0.5, 0.25], a: 1.5, b: 0.4 };
        let h = 1e-3;
        for n in 0..4 {
            for &x in &[-0.4, 0.3, 1.1] {
                let fd = (p.derivative(x - 2.0 * h, n) - 8.0 * p.derivative(x - h, n) + 8.0 * p.derivative(x + h, n) - p.derivative(x + 2.0 * h, n)) / (12.0 * h);
                assert!((fd - p.derivative(x, n + 1)).abs() < 1e-8, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn bump_is_compact() {
        let p = Profile::bump(1.0, 0.5, 4);
        assert_eq!(p.derivative(1.0, 0), 1.0);
        assert_eq!(p.derivative(1.6, 0), 0.0);
        assert!(p.derivative(1.4999, 0).abs() < 1e-12);
    }

    #[test]
    fn spline_reproduces_cubic_interior() {
        let x: Vec<f64> = (0..=40).map(|i| i as f64 * 0.05).collect();
        let y: Vec<f64> = x.iter().map(|t| (2.0 * t).sin()).collect();
        let sp = CubicSpline::new(x, y).unwrap();
        assert!((sp.derivative(1.03, 0) - (2.06f64).sin()).abs() < 1e-5);
        assert!((sp.derivative(1.03, 1) - 2.0 * (2.06f64).cos()).abs() < 1e-3);
    }

    #[test]
    fn witness_bounds_gaussian_tail() {
        let m = MediumStack::new(1, vec![0.0], vec![(CMatrix::identity(1), CMatrix::zeros(1, 1))]).unwrap();
        let f = PiecewiseField::uniform(&m, vec![Term::new(vec![c(2.0, 0.0)], Profile::gaussian(1.0, 0.7))]);
        let w = f.witness();
        assert!(w.decays());
        for &x in &[0.0, 1.0, 2.5, 6.0] {
            let bound: f64 = w.bounds.iter().map(|&(c, r)| c * (-r * x).exp()).sum();
            assert!(crate::linalg::vec_norm(&f.eval(x)) <= bound);
        }
        assert!(w.tail_integral(8.0, 0.0) < 1e-10);
    }

    #[test]
    fn growing_tail_has_no_witness() {
        let m = MediumStack::new(1, vec![0.0], vec![(CMatrix::identity(1), CMatrix::zeros(1, 1))]).unwrap();
        let f = PiecewiseField::uniform(&m, vec![Term::new(vec![c(1.0, 0.0)], Profile::exp_monomial(0.0, 0, -0.1))]);
        assert!(!f.witness().decays());
    }
}
