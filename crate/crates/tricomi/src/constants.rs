//! The `x0`-dependent constants C1..C15, the critical abscissas and the
//! auxiliary functions `g1`, `g2`, `G1`, `G2`.

use crate::error::{Error, Result};
use crate::geometry::TricomiDomain;
use crate::real::{c, Real};

/// Branch classification of `x0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `x0 in [-sqrt(3)/4, 0)`: `h` convex.
    R1,
    /// `x0 in (-1/2, -sqrt(3)/4)`.
    R2a,
    /// `x0 in (-2/3, -1/2]`.
    R2b,
    /// `x0 <= -2/3`.
    R2c,
}

impl Regime {
    pub fn of<T: Real>(x0: T) -> Regime {
        let s3 = c::<T>(3.0).sqrt() / c(4.0);
        if x0 >= -s3 {
            Regime::R1
        } else if x0 > c(-0.5) {
            Regime::R2a
        } else if x0 > c(-2.0 / 3.0) {
            Regime::R2b
        } else {
            Regime::R2c
        }
    }

    pub fn first_family(self) -> bool {
        self == Regime::R1
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::R1 => "R1",
            Regime::R2a => "R2a",
            Regime::R2b => "R2b",
            Regime::R2c => "R2c",
        }
    }
}

pub fn g1<T: Real>(d: &TricomiDomain<T>, x: T) -> Result<T> {
    d.g(x)?;
    Ok(g1_raw(d.x0, x))
}

pub fn g2<T: Real>(d: &TricomiDomain<T>, x: T) -> Result<T> {
    let g = d.g(x)?;
    Ok(c::<T>(4.0) * (c::<T>(2.0) * x - d.x0) * g.powf(c(1.5)))
}

#[allow(non_snake_case)]
pub fn G1<T: Real>(d: &TricomiDomain<T>, x: T) -> Result<T> {
    Ok(g1(d, x)? / d.h_clamped(x))
}

#[allow(non_snake_case)]
pub fn G2<T: Real>(d: &TricomiDomain<T>, x: T) -> Result<T> {
    Ok(g2(d, x)? / d.h_clamped(x))
}

#[inline]
pub(crate) fn g1_raw<T: Real>(x0: T, x: T) -> T {
    c::<T>(3.0) * x * (c::<T>(2.0) * x - c::<T>(3.0) * x0)
}

#[inline]
pub(crate) fn g2_clamped<T: Real>(d: &TricomiDomain<T>, x: T) -> T {
    c::<T>(4.0) * (c::<T>(2.0) * x - d.x0) * d.g_clamped(x).powf(c(1.5))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantLedger<T> {
    pub x0: T,
    pub regime: Regime,
    pub sqrt3: T,
    pub sqrt33: T,
    pub x_plus: Option<T>,
    pub x_minus: Option<T>,
    pub x1: T,
    pub x2: T,
    /// `-sqrt((15 + sqrt 33)/32)`; independent of `x0`.
    pub x3: T,
    /// `-sqrt((15 - sqrt 33)/32)`; independent of `x0`.
    pub x4: T,
    /// Common factor of C1 and C2: `6|x0| / sqrt(1 + (3|x0|/2)^{2/3})`.
    pub k12: T,
    pub c3: T,
    pub c4: T,
    pub c5: T,
    pub c6: T,
    pub c7: Option<T>,
    pub c8: Option<T>,
    pub c9: T,
    pub c10: T,
    pub c11: Option<T>,
    pub c12: Option<T>,
    pub c13: T,
}

impl<T: Real> ConstantLedger<T> {
    pub fn new(x0: T) -> Result<Self> {
        if !(x0 < T::zero()) || !x0.is_finite() {
            return Err(Error::Domain(format!("x0 must be finite and negative, got {x0}")));
        }
        let two = c::<T>(2.0);
        let three = c::<T>(3.0);
        let sqrt3 = three.sqrt();
        let sqrt33 = c::<T>(33.0).sqrt();
        let ax = x0.abs();
        let regime = Regime::of(x0);
        let q = (c::<T>(1.5) * ax).powf(c(2.0 / 3.0));
        let k12 = c::<T>(6.0) * ax / (T::one() + q).sqrt();
        let c3 = (c::<T>(1.5) * ax).cbrt() / (T::one() + q).sqrt();

        let (x_plus, x_minus) = if regime.first_family() {
            (None, None)
        } else {
            let r = (x0 * x0 - c(3.0 / 16.0)).sqrt();
            (Some(x0 + r), Some(x0 - r))
        };
        let x1 = (c::<T>(7.0) + sqrt33) / c(8.0) * x0;
        let x2 = (c::<T>(7.0) - sqrt33) / c(8.0) * x0;
        let x3 = -((c::<T>(15.0) + sqrt33) / c(32.0)).sqrt();
        let x4 = -((c::<T>(15.0) - sqrt33) / c(32.0)).sqrt();

        let ax23 = ax.powf(c(2.0 / 3.0));
        let c4 = match regime {
            Regime::R1 | Regime::R2a | Regime::R2b => ax,
            Regime::R2c => (c::<T>(1.5) * x0 * x0 * x0 * x0).cbrt(),
        };
        let c5 = -c::<T>(1.5).powf(c(8.0 / 3.0)) * ax23;
        let c6 = two.powf(c(8.0 / 3.0)) * three * ax / (two.powf(c(4.0 / 3.0)) + c::<T>(9.0) * ax23).sqrt();
        let hmin = (x0 * x0 - c(3.0 / 64.0)).sqrt();
        let p1 = (sqrt33 + three) * (c::<T>(15.0) + sqrt33).sqrt();
        let p2 = (sqrt33 - three) * (c::<T>(15.0) - sqrt33).sqrt();
        let c9 = -two.powf(c(-19.0 / 6.0)) * three.powf(c(2.0 / 3.0)) * p1 * ax23;
        let c10 = two.powf(c(-11.0 / 6.0)) * three * p2 * ax / (two.powf(c(4.0 / 3.0)) + c::<T>(9.0) * ax23).sqrt();
        let (c7, c8, c11, c12) = if regime.first_family() {
            (None, None, None, None)
        } else {
            let c7 = -c::<T>(1.5).powi(3) * x0 * x0 / hmin;
            let c11 = -two.powf(c(-3.5)) * three * p1 * x0 * x0 / hmin;
            let (c8, c12) = if regime == Regime::R2a {
                (c6, c10)
            } else {
                (c::<T>(6.0) * x0 * x0 / hmin, two.powf(c(-3.5)) * three * p2 * x0 * x0 / hmin)
            };
            (Some(c7), Some(c8), Some(c11), Some(c12))
        };
        let c13 = match c11 {
            None => c9.abs(),
            Some(v) => v.abs(),
        };
        Ok(ConstantLedger {
            x0,
            regime,
            sqrt3,
            sqrt33,
            x_plus,
            x_minus,
            x1,
            x2,
            x3,
            x4,
            k12,
            c3,
            c4,
            c5,
            c6,
            c7,
            c8,
            c9,
            c10,
            c11,
            c12,
            c13,
        })
    }

    pub fn c1(&self, eps: T) -> T {
        self.k12 * (T::one() + eps)
    }

    pub fn c2(&self, eps: T) -> T {
        self.k12 * (T::one() + eps.recip())
    }

    /// Lower / upper bound of `G1` for the active family: `(C5, C6)` or `(C7, C8)`.
    pub fn g1_bounds(&self) -> (T, T) {
        match (self.c7, self.c8) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => (self.c5, self.c6),
        }
    }

    /// Lower / upper bound of `G2` for the active family: `(C9, C10)` or `(C11, C12)`.
    pub fn g2_bounds(&self) -> (T, T) {
        match (self.c11, self.c12) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => (self.c9, self.c10),
        }
    }

    pub fn c14(&self, eps: T) -> T {
        self.g1_bounds().1 + eps / c(2.0) * self.c13
    }

    pub fn c15(&self, eps: T) -> T {
        -self.g1_bounds().0 + self.c13 / (c::<T>(2.0) * eps)
    }

    /// Named scalar entries in a fixed order. The ε-dependent constants are
    /// reported at ε = 1.
    pub fn entries(&self) -> Vec<(&'static str, Option<f64>)> {
        let f = |v: T| Some(v.to_f64_lossy());
        let o = |v: Option<T>| v.map(|v| v.to_f64_lossy());
        let one = T::one();
        vec![
            ("x0", f(self.x0)),
            ("x_plus", o(self.x_plus)),
            ("x_minus", o(self.x_minus)),
            ("x1", f(self.x1)),
            ("x2", f(self.x2)),
            ("x3", f(self.x3)),
            ("x4", f(self.x4)),
            ("C1_eps1", f(self.c1(one))),
            ("C2_eps1", f(self.c2(one))),
            ("C3", f(self.c3)),
            ("C4", f(self.c4)),
            ("C5", f(self.c5)),
            ("C6", f(self.c6)),
            ("C7", o(self.c7)),
            ("C8", o(self.c8)),
            ("C9", f(self.c9)),
            ("C10", f(self.c10)),
            ("C11", o(self.c11)),
            ("C12", o(self.c12)),
            ("C13", f(self.c13)),
            ("C14_eps1", f(self.c14(one))),
            ("C15_eps1", f(self.c15(one))),
        ]
    }
}

/// The boundary norms entering the eigenfunction bound.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundaryNormBundle {
    pub u_l2_bc: f64,
    pub re_u_l2_bc: f64,
    pub im_u_l2_bc: f64,
    /// `||y|^{1/2} u_x|` on BC.
    pub w_ux_l2_bc: f64,
    pub uy_l2_bc: f64,
    pub w_ux_l2_sigma: f64,
    pub uy_l2_sigma: f64,
}

impl BoundaryNormBundle {
    pub fn is_valid(&self) -> bool {
        [
            self.u_l2_bc,
            self.re_u_l2_bc,
            self.im_u_l2_bc,
            self.w_ux_l2_bc,
            self.uy_l2_bc,
            self.w_ux_l2_sigma,
            self.uy_l2_sigma,
        ]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonChoice {
    pub eps1: f64,
    pub eps2: f64,
    /// The bracketed sum under the square root, evaluated at `(eps1, eps2)`.
    pub rhs_squared: f64,
}

pub const EPS_SEARCH: (f64, f64) = (1e-6, 1e6);

/// Bracketed right side of the eigenfunction bound at `(eps1, eps2)`.
pub fn bound_rhs_squared(n: &BoundaryNormBundle, l: &ConstantLedger<f64>, eps1: f64, eps2: f64) -> f64 {
    l.c1(eps1) * n.w_ux_l2_bc.powi(2)
        + l.c2(eps1) * n.uy_l2_bc.powi(2)
        + l.c3 * (n.re_u_l2_bc + n.im_u_l2_bc) * (n.w_ux_l2_bc + n.uy_l2_bc)
        + l.c14(eps2) * n.w_ux_l2_sigma.powi(2)
        + l.c15(eps2) * n.uy_l2_sigma.powi(2)
}

/// Minimizes [`bound_rhs_squared`] over both ε. The BC part gives
/// `eps1* = sqrt(b/a)`; the sigma part is searched by golden section on
/// `log eps2` over [`EPS_SEARCH`].
pub fn optimize_epsilons(n: &BoundaryNormBundle, l: &ConstantLedger<f64>) -> Result<EpsilonChoice> {
    if !n.is_valid() {
        return Err(Error::Contract("boundary norms must be finite and nonnegative".into()));
    }
    let (lo, hi) = EPS_SEARCH;
    let a = n.w_ux_l2_bc.powi(2);
    let b = n.uy_l2_bc.powi(2);
    let eps1 = if a > 0.0 && b > 0.0 {
        (b / a).sqrt().clamp(lo, hi)
    } else if a > 0.0 {
        lo
    } else if b > 0.0 {
        hi
    } else {
        1.0
    };
    let f = |le: f64| bound_rhs_squared(n, l, eps1, le.exp());
    let (mut p, mut q) = (lo.ln(), hi.ln());
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut u = q - r * (q - p);
    let mut v = p + r * (q - p);
    let (mut fu, mut fv) = (f(u), f(v));
    for _ in 0..200 {
        if fu <= fv {
            q = v;
            v = u;
            fv = fu;
            u = q - r * (q - p);
            fu = f(u);
        } else {
            p = u;
            u = v;
            fu = fv;
            v = p + r * (q - p);
            fv = f(v);
        }
    }
    let mut le = 0.5 * (p + q);
    for cand in [lo.ln(), hi.ln()] {
        if f(cand) < f(le) {
            le = cand;
        }
    }
    let eps2 = le.exp();
    Ok(EpsilonChoice { eps1, eps2, rhs_squared: bound_rhs_squared(n, l, eps1, eps2) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn regimes() {
        let s = 3f64.sqrt() / 4.0;
        assert_eq!(Regime::of(-s), Regime::R1);
        assert_eq!(Regime::of(-0.3), Regime::R1);
        assert_eq!(Regime::of(-0.45), Regime::R2a);
        assert_eq!(Regime::of(-0.5), Regime::R2b);
        assert_eq!(Regime::of(-0.6), Regime::R2b);
        assert_eq!(Regime::of(-2.0 / 3.0), Regime::R2c);
        assert_eq!(Regime::of(-3.0), Regime::R2c);
    }

    #[test]
    fn auxiliary_examples() {
        let d = TricomiDomain::<f64>::new(-0.5).unwrap();
        assert_eq!(g1(&d, -1.0).unwrap(), 1.5);
        assert_eq!(g1(&d, -0.75).unwrap(), 0.0);
        assert_eq!(g2(&d, -0.25).unwrap(), 0.0);
        assert_eq!(g2(&d, -1.0).unwrap(), 0.0);
        assert_eq!(g2(&d, 0.0).unwrap(), 0.0);
        assert_eq!(G1(&d, 0.0).unwrap(), 0.0);
        assert!((G1(&d, -1.0).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(G2(&d, -1.0).unwrap(), 0.0);
        assert!(g1(&d, 0.5).is_err());
    }

    #[test]
    fn ledger_examples_half() {
        let l = ConstantLedger::<f64>::new(-0.5).unwrap();
        assert_eq!(l.x_plus, Some(-0.25));
        assert_eq!(l.x_minus, Some(-0.75));
        // closed form (3/4)^{1/3} / (1 + (3/4)^{2/3})^{1/2} = 0.6724577...
        let c3 = 0.75f64.cbrt() / (1.0 + 0.75f64.powf(2.0 / 3.0)).sqrt();
        assert!((l.c3 - c3).abs() < 1e-14);
        assert!((l.c3 - 0.672458).abs() < 1e-6);
        assert!((l.c1(1.0) - 6.0 / (1.0 + 0.75f64.powf(2.0 / 3.0)).sqrt()).abs() < 1e-13);
        assert_eq!(l.c1(1.0), l.c2(1.0));
        assert!((l.c8.unwrap() - 1.5 / (13f64.sqrt() / 8.0)).abs() < 1e-14);
        assert!((l.c8.unwrap() - 3.32820).abs() < 1e-5);
        assert_eq!(l.c4, 0.5);
    }

    #[test]
    fn ledger_c4_triple_point() {
        let x0 = -2.0 / 3.0;
        let l = ConstantLedger::new(x0).unwrap();
        let d = TricomiDomain::new(x0).unwrap();
        assert!(rel(l.c4, 2.0 / 3.0) < 1e-15);
        for x in [2.0 * x0, x0, 0.0] {
            assert!(rel(d.h(x).unwrap(), 2.0 / 3.0) < 1e-14);
        }
    }

    #[test]
    fn rejects_nonnegative() {
        assert!(ConstantLedger::new(0.0f64).is_err());
    }

    #[test]
    fn abscissas_ordering() {
        for &x0 in &[-0.2, -0.5, -1.0, -3.0] {
            let l = ConstantLedger::new(x0).unwrap();
            assert!(2.0 * x0 < l.x1 && l.x1 < 1.5 * x0);
            assert!(13.0 / 8.0 * x0 < l.x1);
            assert!(x0 / 4.0 < l.x2 && l.x2 < x0 / 8.0);
            if let (Some(p), Some(m)) = (l.x_plus, l.x_minus) {
                assert!(2.0 * x0 < m && m < x0 && x0 < p && p < 0.0);
            }
        }
    }

    #[test]
    fn epsilon_examples() {
        let l = ConstantLedger::<f64>::new(-0.5).unwrap();
        let n = BoundaryNormBundle { u_l2_bc: 1.0, re_u_l2_bc: 1.0, w_ux_l2_bc: 0.7, uy_l2_bc: 0.7, ..Default::default() };
        let e = optimize_epsilons(&n, &l).unwrap();
        assert!((e.eps1 - 1.0).abs() < 1e-15);
        let n2 = BoundaryNormBundle { w_ux_l2_bc: 0.3, w_ux_l2_sigma: 0.4, ..Default::default() };
        let e2 = optimize_epsilons(&n2, &l).unwrap();
        assert!(e2.eps2 <= 1e-5);
        let free = l.c1(e2.eps1) * 0.09 + (l.g1_bounds().1) * 0.16;
        assert!((e2.rhs_squared - free).abs() < 1e-5 * free);
    }

    #[test]
    fn golden_matches_closed_form_eps2() {
        let l = ConstantLedger::new(-1.2).unwrap();
        let n = BoundaryNormBundle { w_ux_l2_sigma: 0.8, uy_l2_sigma: 0.2, ..Default::default() };
        let e = optimize_epsilons(&n, &l).unwrap();
        assert!(rel(e.eps2, 0.2 / 0.8) < 1e-6);
    }
}
