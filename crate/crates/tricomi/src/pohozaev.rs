//! Boundary integrands of the Pohozaev identity, their simplified forms on BC
//! and sigma, line quadrature along the boundary, and the identity and
//! eigenfunction-bound checks.

use crate::constants::{bound_rhs_squared, g1_raw, g2_clamped, optimize_epsilons, BoundaryNormBundle, ConstantLedger};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, CurveKind, Point, TricomiDomain};
use crate::quadrature::QuadRule;
use crate::real::{c, Real};

fn check_unit<T: Real>(n: Point<T>) -> Result<()> {
    let err = (n.norm() - T::one()).abs();
    if !(err <= c(1e-10)) {
        return Err(Error::Contract(format!("normal has length {}", n.norm())));
    }
    Ok(())
}

/// `<2 Du (-y u_x, -u_y) + (y u_x^2 + u_y^2)(-3x, -2y), n>` with `Du = -3x u_x - 2y u_y`.
pub fn omega1<T: Real>(p: Point<T>, grad: (T, T), n: Point<T>) -> Result<T> {
    check_unit(n)?;
    Ok(omega1_raw(p, grad, n))
}

#[inline]
pub(crate) fn omega1_raw<T: Real>(p: Point<T>, (ux, uy): (T, T), n: Point<T>) -> T {
    let two = c::<T>(2.0);
    let three = c::<T>(3.0);
    let du = -three * p.x * ux - two * p.y * uy;
    let q = p.y * ux * ux + uy * uy;
    let vx = two * du * (-p.y * ux) + q * (-three * p.x);
    let vy = two * du * (-uy) + q * (-two * p.y);
    vx * n.x + vy * n.y
}

/// `<-2 F(u) (-3x, -2y) - u (-y u_x, -u_y), n>`.
pub fn omega2<T: Real>(p: Point<T>, u: T, grad: (T, T), n: Point<T>, f_of_u: T) -> Result<T> {
    check_unit(n)?;
    Ok(omega2_raw(p, u, grad, n, f_of_u))
}

#[inline]
pub(crate) fn omega2_raw<T: Real>(p: Point<T>, u: T, (ux, uy): (T, T), n: Point<T>, f_of_u: T) -> T {
    let two = c::<T>(2.0);
    let vx = -two * f_of_u * (-c::<T>(3.0) * p.x) - u * (-p.y * ux);
    let vy = -two * f_of_u * (-two * p.y) - u * (-uy);
    vx * n.x + vy * n.y
}

fn check_bc_y<T: Real>(d: Option<&TricomiDomain<T>>, y: T) -> Result<()> {
    let lo = d.map(|d| d.y_c).unwrap_or(T::neg_infinity());
    let s = c::<T>(8.0) * T::epsilon() * d.map(|d| d.y_c.abs()).unwrap_or(T::one());
    if !(y <= s && y >= lo - s) {
        return Err(Error::Domain(format!("y = {y} is not on BC")));
    }
    Ok(())
}

/// `4 (-y)^{3/2} (1-y)^{-1/2} ((-y)^{1/2} u_x + u_y)^2`, nonnegative.
pub fn omega1_bc_simplified<T: Real>(y: T, ux: T, uy: T) -> Result<T> {
    check_bc_y::<T>(None, y)?;
    Ok(omega1_bc_raw(y, ux, uy))
}

#[inline]
pub(crate) fn omega1_bc_raw<T: Real>(y: T, ux: T, uy: T) -> T {
    let w = (-y).max(T::zero());
    let r = w.sqrt() * ux + uy;
    c::<T>(4.0) * w * w.sqrt() / (T::one() + w).sqrt() * r * r
}

/// `-(-y)^{1/2} (1-y)^{-1/2} u ((-y)^{1/2} u_x + u_y)`.
pub fn omega2_bc_simplified<T: Real>(y: T, u: T, ux: T, uy: T) -> Result<T> {
    check_bc_y::<T>(None, y)?;
    Ok(omega2_bc_raw(y, u, ux, uy))
}

#[inline]
pub(crate) fn omega2_bc_raw<T: Real>(y: T, u: T, ux: T, uy: T) -> T {
    let w = (-y).max(T::zero());
    -(w.sqrt() / (T::one() + w).sqrt()) * u * (w.sqrt() * ux + uy)
}

/// `G1 y u_x^2 + G2 y^{1/2} u_x u_y - G1 u_y^2` at `(x, g(x))`, valid when `u = 0` on sigma.
pub fn omega1_sigma_simplified<T: Real>(d: &TricomiDomain<T>, x: T, ux: T, uy: T) -> Result<T> {
    d.g(x)?;
    Ok(omega1_sigma_raw(d, x, ux, uy))
}

#[inline]
pub(crate) fn omega1_sigma_raw<T: Real>(d: &TricomiDomain<T>, x: T, ux: T, uy: T) -> T {
    let h = d.h_clamped(x);
    let y = d.g_clamped(x);
    let big_g1 = g1_raw(d.x0, x) / h;
    let big_g2 = g2_clamped(d, x) / h;
    big_g1 * y * ux * ux + big_g2 * y.sqrt() * ux * uy - big_g1 * uy * uy
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample<T> {
    pub t: T,
    pub u: T,
    pub ux: T,
    pub uy: T,
}

/// Restriction of a function and its gradient to quadrature nodes of one boundary piece.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace<T> {
    pub curve: BoundaryCurve<T>,
    pub samples: Vec<TraceSample<T>>,
    /// Parameter weights of the quadrature rule, aligned with `samples`.
    pub weights: Vec<T>,
}

/// What an integrand sees at one node.
#[derive(Debug, Clone, Copy)]
pub struct TracePoint<T> {
    pub point: Point<T>,
    pub normal: Point<T>,
    pub sample: TraceSample<T>,
}

impl<T: Real> BoundaryTrace<T> {
    pub fn from_rule(curve: BoundaryCurve<T>, rule: &QuadRule<T>, mut f: impl FnMut(Point<T>) -> (T, T, T)) -> Self {
        let samples = rule
            .t
            .iter()
            .map(|&t| {
                let (u, ux, uy) = f(curve.position(t));
                TraceSample { t, u, ux, uy }
            })
            .collect();
        BoundaryTrace { curve, samples, weights: rule.w.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.len() < 3 || self.samples.len() != self.weights.len() {
            return Err(Error::Contract("a trace needs at least 3 nodes with matching weights".into()));
        }
        let (lo, hi) = self.curve.range;
        for w in self.samples.windows(2) {
            if !(w[0].t < w[1].t) {
                return Err(Error::Contract("trace nodes must be strictly increasing".into()));
            }
        }
        for s in &self.samples {
            if s.t < lo || s.t > hi {
                return Err(Error::Contract("trace node outside the parameter range".into()));
            }
            if !(s.u.is_finite() && s.ux.is_finite() && s.uy.is_finite()) {
                return Err(Error::Contract("trace values must be finite".into()));
            }
        }
        Ok(())
    }
}

/// `int integrand ds` along the trace's curve.
pub fn line_integral<T: Real>(trace: &BoundaryTrace<T>, integrand: impl Fn(&TracePoint<T>) -> T) -> Result<T> {
    trace.validate()?;
    let mut sum = T::zero();
    for (s, &w) in trace.samples.iter().zip(&trace.weights) {
        let tp = TracePoint { point: trace.curve.position(s.t), normal: trace.curve.normal(s.t), sample: *s };
        let f = integrand(&tp);
        if f == T::zero() {
            continue;
        }
        sum = sum + w * f * trace.curve.arc_element(s.t);
    }
    Ok(sum)
}

/// `int_BC omega1 ds` through the cancelled form `4 (-y)^{3/2} ((-y)^{1/2} u_x + u_y)^2 dy`.
pub fn bc_omega1_integral<T: Real>(trace: &BoundaryTrace<T>) -> Result<T> {
    trace.validate()?;
    if trace.curve.kind != CurveKind::BC {
        return Err(Error::Contract("trace is not on BC".into()));
    }
    let mut sum = T::zero();
    for (s, &w) in trace.samples.iter().zip(&trace.weights) {
        let m = (-s.t).max(T::zero());
        let r = m.sqrt() * s.ux + s.uy;
        sum = sum + w * c::<T>(4.0) * m * m.sqrt() * r * r;
    }
    Ok(sum)
}

/// The three `L^2` trace norms `(|u|, ||y|^{1/2} u_x|, |u_y|)` on one curve.
pub fn trace_l2<T: Real>(trace: &BoundaryTrace<T>) -> Result<(T, T, T)> {
    let u = line_integral(trace, |p| p.sample.u * p.sample.u)?;
    let wx = line_integral(trace, |p| p.point.y.abs() * p.sample.ux * p.sample.ux)?;
    let uy = line_integral(trace, |p| p.sample.uy * p.sample.uy)?;
    Ok((u.sqrt(), wx.sqrt(), uy.sqrt()))
}

pub fn norm_bundle(bc: &BoundaryTrace<f64>, sigma: &BoundaryTrace<f64>) -> Result<BoundaryNormBundle> {
    let (u, wx, uy) = trace_l2(bc)?;
    let (_, wxs, uys) = trace_l2(sigma)?;
    Ok(BoundaryNormBundle {
        u_l2_bc: u,
        re_u_l2_bc: u,
        im_u_l2_bc: 0.0,
        w_ux_l2_bc: wx,
        uy_l2_bc: uy,
        w_ux_l2_sigma: wxs,
        uy_l2_sigma: uys,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PohozaevResidual {
    pub lambda: f64,
    pub lhs: f64,
    pub rhs_bc_omega1: f64,
    pub rhs_bc_omega2: f64,
    pub rhs_bc: f64,
    pub rhs_sigma: f64,
    pub relative_residual: f64,
}

/// Both sides of `4 lambda |u|^2 = int_BC (omega1 + omega2) ds + int_sigma omega1 ds`
/// for `F(u) = lambda u^2 / 2`, from an area norm and two boundary traces.
pub fn pohozaev_identity(lambda: f64, u_norm_sq: f64, bc: &BoundaryTrace<f64>, sigma: &BoundaryTrace<f64>) -> Result<PohozaevResidual> {
    if u_norm_sq == 0.0 {
        return Ok(PohozaevResidual {
            lambda,
            lhs: 0.0,
            rhs_bc_omega1: 0.0,
            rhs_bc_omega2: 0.0,
            rhs_bc: 0.0,
            rhs_sigma: 0.0,
            relative_residual: 0.0,
        });
    }
    if !(lambda > 0.0) {
        return Err(Error::Contract(format!("lambda must be positive, got {lambda}")));
    }
    let i1 = bc_omega1_integral(bc)?;
    let i2 = line_integral(bc, |p| {
        let s = p.sample;
        omega2_raw(p.point, s.u, (s.ux, s.uy), p.normal, 0.5 * lambda * s.u * s.u)
    })?;
    let is = line_integral(sigma, |p| omega1_raw(p.point, (p.sample.ux, p.sample.uy), p.normal))?;
    let lhs = 4.0 * lambda * u_norm_sq;
    let rhs = i1 + i2 + is;
    Ok(PohozaevResidual {
        lambda,
        lhs,
        rhs_bc_omega1: i1,
        rhs_bc_omega2: i2,
        rhs_bc: i1 + i2,
        rhs_sigma: is,
        relative_residual: (lhs - rhs).abs() / lhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub satisfied: bool,
    pub tol: f64,
}

pub const BOUND_TOL: f64 = 1e-2;

/// `2 sqrt(lambda) |u|_{L^2(Omega)} <= sqrt(bracket)` at the optimized ε.
pub fn bound_check(lambda: f64, u_norm: f64, norms: &BoundaryNormBundle, ledger: &ConstantLedger<f64>, tol: f64) -> Result<BoundCheck> {
    let e = optimize_epsilons(norms, ledger)?;
    let lhs = 2.0 * lambda.max(0.0).sqrt() * u_norm;
    let rhs = e.rhs_squared.max(0.0).sqrt();
    debug_assert!((bound_rhs_squared(norms, ledger, e.eps1, e.eps2) - e.rhs_squared).abs() <= 1e-12 * e.rhs_squared.abs().max(1.0));
    let satisfied = lhs > 0.0 && lhs <= rhs * (1.0 + tol);
    Ok(BoundCheck { lhs, rhs, eps1: e.eps1, eps2: e.eps2, satisfied, tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{bc_rule, sigma_rule};

    #[test]
    fn zero_state() {
        let p = Point::new(-0.3, -0.2);
        let n = Point::new(0.6, -0.8);
        assert_eq!(omega1(p, (0.0, 0.0), n).unwrap(), 0.0);
        assert_eq!(omega2(p, 0.0, (0.0, 0.0), n, 0.0).unwrap(), 0.0);
        assert!(omega1(p, (1.0, 0.0), Point::new(1.0, 1.0)).is_err());
    }

    #[test]
    fn simplified_examples() {
        assert_eq!(omega1_bc_simplified(0.0, 1.3, 0.2).unwrap(), 0.0);
        assert_eq!(omega2_bc_simplified(0.0, 1.0, 1.3, 0.2).unwrap(), 0.0);
        let y: f64 = -0.37;
        assert!(omega1_bc_simplified(y, 1.1, -(-y).sqrt() * 1.1).unwrap().abs() < 1e-16);
        assert!(omega1_bc_simplified(0.5, 1.0, 1.0).is_err());
        let d = TricomiDomain::<f64>::new(-0.5).unwrap();
        // at the endpoints g = 0, so only the G1 terms survive
        let v = omega1_sigma_simplified(&d, 0.0, 0.7, 0.9).unwrap();
        assert_eq!(v, 0.0);
        let v = omega1_sigma_simplified(&d, -1.0, 0.7, 0.9).unwrap();
        assert!((v + 3.0 * 0.81).abs() < 1e-14);
    }

    #[test]
    fn bc_quadrature_examples() {
        let d = TricomiDomain::<f64>::new(-0.5).unwrap();
        let curve = d.boundary_curve(CurveKind::BC);
        let rule = bc_rule(&d, 8, 4);
        let tr = BoundaryTrace::from_rule(curve, &rule, |_| (1.0, 1.0, 0.0));
        let len = line_integral(&tr, |_| 1.0).unwrap();
        let exact = 2.0 / 3.0 * ((1.0 - d.y_c).powf(1.5) - 1.0);
        assert!((len - exact).abs() < 1e-12);
        assert_eq!(line_integral(&tr, |_| 0.0).unwrap(), 0.0);
        let w1 = bc_omega1_integral(&tr).unwrap();
        let exact = 8.0 / 7.0 * (-d.y_c).powf(3.5);
        assert!((w1 - exact).abs() < 1e-12);
        let general = line_integral(&tr, |p| omega1_raw(p.point, (1.0, 0.0), p.normal)).unwrap();
        assert!((general - exact).abs() < 1e-12);
    }

    #[test]
    fn sigma_length_converges() {
        let d = TricomiDomain::<f64>::new(-0.5).unwrap();
        let curve = d.boundary_curve(CurveKind::Sigma);
        let len = |p: usize| {
            let tr = BoundaryTrace::from_rule(curve, &sigma_rule(&d, p, 4), |_| (0.0, 0.0, 0.0));
            line_integral(&tr, |_| 1.0).unwrap()
        };
        // y-parametrized reference, 30 digits
        let exact = 2.182_246_901_127_095_1;
        for p in [16, 32, 64] {
            assert!((len(p) - exact).abs() < 1e-9, "{p}: {}", len(p));
        }
        assert!((len(2) - exact).abs() > (len(16) - exact).abs());
    }

    #[test]
    fn too_few_nodes() {
        let d = TricomiDomain::<f64>::new(-0.5).unwrap();
        let curve = d.boundary_curve(CurveKind::BC);
        let rule = QuadRule { kind: CurveKind::BC, t: vec![-0.5, -0.1], w: vec![0.5, 0.5] };
        let tr = BoundaryTrace::from_rule(curve, &rule, |_| (0.0, 0.0, 0.0));
        assert!(line_integral(&tr, |_| 1.0).is_err());
    }

    #[test]
    fn synthetic_zero_norms_fail_bound() {
        let l = ConstantLedger::<f64>::new(-0.5).unwrap();
        let b = bound_check(6.3, 1.0, &BoundaryNormBundle::default(), &l, BOUND_TOL).unwrap();
        assert!(!b.satisfied);
    }

    #[test]
    fn zero_field_residual() {
        let d = TricomiDomain::<f64>::new(-0.5).unwrap();
        let bc = BoundaryTrace::from_rule(d.boundary_curve(CurveKind::BC), &bc_rule(&d, 4, 4), |_| (0.0, 0.0, 0.0));
        let sg = BoundaryTrace::from_rule(d.boundary_curve(CurveKind::Sigma), &sigma_rule(&d, 4, 4), |_| (0.0, 0.0, 0.0));
        let r = pohozaev_identity(1.0, 0.0, &bc, &sg).unwrap();
        assert_eq!((r.lhs, r.rhs_bc + r.rhs_sigma, r.relative_residual), (0.0, 0.0, 0.0));
    }
}
