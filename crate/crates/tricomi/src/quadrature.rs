//! Gauss–Legendre rules and the graded parameter maps used on BC and sigma.

use crate::geometry::{CurveKind, TricomiDomain};
use crate::real::{c, Real};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    if n == 1 {
        xs[0] = 0.0;
        ws[0] = 2.0;
    }
    (xs, ws)
}

/// Parameter nodes `t` and weights `w` such that `sum w f(t)` approximates
/// `int f(t) dt` over the curve's parameter range.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule<T> {
    pub kind: CurveKind,
    pub t: Vec<T>,
    pub w: Vec<T>,
}

/// Graded rule on BC: `y = y_C tau^2`, composite Gauss in `tau`. Half-integer
/// powers of `-y` become polynomials in `tau`, so the kernels are smooth.
pub fn bc_rule<T: Real>(d: &TricomiDomain<T>, panels: usize, order: usize) -> QuadRule<T> {
    let (gx, gw) = gauss_legendre(order);
    let mut t = Vec::with_capacity(panels * order);
    let mut w = Vec::with_capacity(panels * order);
    let yc = d.y_c;
    // tau from 1 (C) to 0 (B) so that y increases along the rule
    for p in (0..panels).rev() {
        let a = p as f64 / panels as f64;
        let b = (p + 1) as f64 / panels as f64;
        for q in (0..order).rev() {
            let tau = 0.5 * (a + b) + 0.5 * (b - a) * gx[q];
            let jw = 0.5 * (b - a) * gw[q];
            let tau_t = c::<T>(tau);
            t.push(yc * tau_t * tau_t);
            w.push(c::<T>(2.0) * yc.abs() * tau_t * c::<T>(jw));
        }
    }
    QuadRule { kind: CurveKind::BC, t, w }
}

/// Endpoint-graded map on sigma: `x = x0 + |x0| phi(s)`,
/// `phi(s) = (15 s - 10 s^3 + 3 s^5)/8`, so `x - endpoint ~ (1 - |s|)^3`.
pub fn sigma_map(s: f64) -> (f64, f64) {
    let phi = (15.0 * s - 10.0 * s.powi(3) + 3.0 * s.powi(5)) / 8.0;
    let dphi = 15.0 * (1.0 - s * s).powi(2) / 8.0;
    (phi, dphi)
}

pub fn sigma_rule<T: Real>(d: &TricomiDomain<T>, panels: usize, order: usize) -> QuadRule<T> {
    let (gx, gw) = gauss_legendre(order);
    let ax = d.x0.abs();
    let mut t = Vec::with_capacity(panels * order);
    let mut w = Vec::with_capacity(panels * order);
    // s from 1 (x = 0, B) down to -1 (A), so that t = -x increases
    for p in (0..panels).rev() {
        let a = -1.0 + 2.0 * p as f64 / panels as f64;
        let b = -1.0 + 2.0 * (p + 1) as f64 / panels as f64;
        for q in (0..order).rev() {
            let s = 0.5 * (a + b) + 0.5 * (b - a) * gx[q];
            let (phi, dphi) = sigma_map(s);
            let x = d.x0 + ax * c::<T>(phi);
            t.push(-x);
            w.push(ax * c::<T>(dphi * 0.5 * (b - a) * gw[q]));
        }
    }
    QuadRule { kind: CurveKind::Sigma, t, w }
}
