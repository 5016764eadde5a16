//! Closed-form geometry of the normal Tricomi domain.
//!
//! The domain is bounded by the elliptic arc `sigma: 9(x-x0)^2 + 4y^3 = 9x0^2`
//! in `y >= 0` and by the two characteristics through `A = (2x0, 0)` and
//! `B = (0, 0)`, which meet at `C = (x0, y_C)`.

use crate::error::{Error, Result};
use crate::real::{c, Real};
use crate::report::VerificationReport;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point<T>) -> T {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    AC,
    BC,
    Sigma,
}

impl CurveKind {
    pub const ALL: [CurveKind; 3] = [CurveKind::Sigma, CurveKind::AC, CurveKind::BC];

    pub fn name(self) -> &'static str {
        match self {
            CurveKind::AC => "AC",
            CurveKind::BC => "BC",
            CurveKind::Sigma => "sigma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TricomiDomain<T> {
    pub x0: T,
    pub y_c: T,
    pub a: Point<T>,
    pub b: Point<T>,
    pub c: Point<T>,
}

/// Absolute tolerance on each defining inequality of the membership test.
pub const MEMBERSHIP_TOL: f64 = 1e-12;
/// Inputs of `g_prime` this close to an endpoint are rejected.
pub const SINGULARITY_GUARD: f64 = 1e-12;
/// Default horizon of the flow-time grid used by the star-shapedness check.
pub const T_MAX: f64 = 10.0;

impl<T: Real> TricomiDomain<T> {
    pub fn new(x0: T) -> Result<Self> {
        if !(x0 < T::zero()) || !x0.is_finite() {
            return Err(Error::Domain(format!("x0 must be finite and negative, got {x0}")));
        }
        let y_c = -(c::<T>(1.5) * x0.abs()).powf(c(2.0 / 3.0));
        Ok(TricomiDomain {
            x0,
            y_c,
            a: Point::new(c::<T>(2.0) * x0, T::zero()),
            b: Point::new(T::zero(), T::zero()),
            c: Point::new(x0, y_c),
        })
    }

    /// Height of the apex of sigma, `g(x0) = (9 x0^2 / 4)^{1/3}`.
    pub fn y_max(&self) -> T {
        (c::<T>(2.25) * self.x0 * self.x0).cbrt()
    }

    fn range_slack(&self) -> T {
        c::<T>(8.0) * T::epsilon() * self.x0.abs()
    }

    fn check_range(&self, x: T) -> Result<T> {
        let lo = c::<T>(2.0) * self.x0;
        let s = self.range_slack();
        if !(x >= lo - s && x <= s) {
            return Err(Error::Domain(format!("x = {x} outside [{lo}, 0]")));
        }
        Ok(x.max(lo).min(T::zero()))
    }

    /// `g` without the range check; arguments are clamped to `[2x0, 0]`.
    #[inline]
    pub fn g_clamped(&self, x: T) -> T {
        let lo = c::<T>(2.0) * self.x0;
        let x = x.max(lo).min(T::zero());
        let prod = c::<T>(9.0) * x * (lo - x) / c(4.0);
        prod.max(T::zero()).cbrt()
    }

    pub fn g(&self, x: T) -> Result<T> {
        let x = self.check_range(x)?;
        Ok(self.g_clamped(x))
    }

    pub fn g_prime(&self, x: T) -> Result<T> {
        let x = self.check_range(x)?;
        let guard = c::<T>(SINGULARITY_GUARD);
        if x - c::<T>(2.0) * self.x0 <= guard || -x <= guard {
            return Err(Error::Singularity(format!("g' is unbounded at x = {x}")));
        }
        let g = self.g_clamped(x);
        Ok(-c::<T>(1.5) * (x - self.x0) / (g * g))
    }

    #[inline]
    pub fn h_clamped(&self, x: T) -> T {
        let g = self.g_clamped(x);
        let g2 = g * g;
        let d = x - self.x0;
        (d * d + c::<T>(4.0 / 9.0) * g2 * g2).sqrt()
    }

    pub fn h(&self, x: T) -> Result<T> {
        let x = self.check_range(x)?;
        Ok(self.h_clamped(x))
    }

    pub fn boundary_curve(&self, kind: CurveKind) -> BoundaryCurve<T> {
        let range = match kind {
            CurveKind::AC => (T::zero(), -self.y_c),
            CurveKind::BC => (self.y_c, T::zero()),
            CurveKind::Sigma => (T::zero(), -c::<T>(2.0) * self.x0),
        };
        BoundaryCurve { kind, domain: *self, range }
    }

    /// Slack of the tightest defining inequality; nonnegative iff the point is in
    /// the closed domain (before the membership tolerance is applied).
    pub fn membership_slack(&self, p: Point<T>) -> T {
        let (x, y) = (p.x, p.y);
        if y >= T::zero() {
            let d = x - self.x0;
            c::<T>(9.0) * self.x0 * self.x0 - c::<T>(9.0) * d * d - c::<T>(4.0) * y * y * y
        } else {
            let w = c::<T>(2.0 / 3.0) * (-y).powf(c(1.5));
            let left = x - (c::<T>(2.0) * self.x0 + w);
            let right = -w - x;
            let bottom = y - self.y_c;
            left.min(right).min(bottom)
        }
    }

    pub fn contains(&self, p: Point<T>) -> bool {
        self.membership_slack(p) >= -c::<T>(MEMBERSHIP_TOL)
    }

    /// `<(-3x, -2y), n>` at the boundary point with parameter `t`, in closed form.
    pub fn starlike_product(&self, kind: CurveKind, t: T) -> T {
        match kind {
            CurveKind::AC => c::<T>(6.0) * self.x0 / (T::one() + t).sqrt(),
            CurveKind::BC => T::zero(),
            CurveKind::Sigma => {
                let x = -t;
                -c::<T>(3.0) * x * self.x0 / self.h_clamped(x)
            }
        }
    }

    /// Points evenly spread in parameter over the three boundary pieces,
    /// always including the corners.
    pub fn boundary_samples(&self, n: usize) -> Vec<Point<T>> {
        let n = n.max(3);
        let per = [n / 3 + n % 3, n / 3, n / 3];
        let mut out = Vec::with_capacity(n);
        for (kind, &m) in CurveKind::ALL.iter().zip(per.iter()) {
            let curve = self.boundary_curve(*kind);
            let (t0, t1) = curve.range;
            for i in 0..m {
                let s = if m == 1 { T::zero() } else { c::<T>(i as f64) / c((m - 1) as f64) };
                out.push(curve.position(t0 + (t1 - t0) * s));
            }
        }
        out
    }
}

/// A parametrized boundary piece, oriented counterclockwise.
///
/// * AC: `t = -y` in `[0, |y_C|]`, running from A to C.
/// * BC: `t = y` in `[y_C, 0]`, running from C to B.
/// * sigma: `t = -x` in `[0, 2|x0|]`, running from B to A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCurve<T> {
    pub kind: CurveKind,
    pub domain: TricomiDomain<T>,
    pub range: (T, T),
}

impl<T: Real> BoundaryCurve<T> {
    pub fn position(&self, t: T) -> Point<T> {
        let d = &self.domain;
        match self.kind {
            CurveKind::AC => {
                let t = t.max(T::zero());
                Point::new(c::<T>(2.0) * d.x0 + c::<T>(2.0 / 3.0) * t.powf(c(1.5)), -t)
            }
            CurveKind::BC => {
                let t = t.min(T::zero());
                Point::new(-c::<T>(2.0 / 3.0) * (-t).powf(c(1.5)), t)
            }
            CurveKind::Sigma => {
                let x = -t;
                Point::new(x, d.g_clamped(x))
            }
        }
    }

    /// Derivative of `position`; unbounded at the endpoints of sigma.
    pub fn tangent(&self, t: T) -> Point<T> {
        match self.kind {
            CurveKind::AC => Point::new(t.max(T::zero()).sqrt(), -T::one()),
            CurveKind::BC => Point::new((-t).max(T::zero()).sqrt(), T::one()),
            CurveKind::Sigma => {
                let n = self.normal(t);
                let s = self.arc_element(t);
                Point::new(-n.y * s, n.x * s)
            }
        }
    }

    /// Unit outer normal. On sigma this is `h^{-1} (x - x0, (2/3) g^2)`, which
    /// stays finite at both endpoints.
    pub fn normal(&self, t: T) -> Point<T> {
        let d = &self.domain;
        match self.kind {
            CurveKind::AC => {
                let w = t.max(T::zero());
                let s = (T::one() + w).sqrt().recip();
                Point::new(-s, -w.sqrt() * s)
            }
            CurveKind::BC => {
                let w = (-t).max(T::zero());
                let s = (T::one() + w).sqrt().recip();
                Point::new(s, -w.sqrt() * s)
            }
            CurveKind::Sigma => {
                let x = -t;
                let g = d.g_clamped(x);
                let h = d.h_clamped(x);
                Point::new((x - d.x0) / h, c::<T>(2.0 / 3.0) * g * g / h)
            }
        }
    }

    /// `|position'(t)|`.
    pub fn arc_element(&self, t: T) -> T {
        let d = &self.domain;
        match self.kind {
            CurveKind::AC => (T::one() + t.max(T::zero())).sqrt(),
            CurveKind::BC => (T::one() - t.min(T::zero())).sqrt(),
            CurveKind::Sigma => {
                let x = -t;
                let g = d.g_clamped(x);
                if g == T::zero() {
                    return T::infinity();
                }
                c::<T>(1.5) * d.h_clamped(x) / (g * g)
            }
        }
    }
}

/// Exact dilation flow `F_t(x, y) = (x e^{-3t}, y e^{-2t})`; `t = +inf` maps to the origin.
pub fn flow<T: Real>(p: Point<T>, t: T) -> Point<T> {
    if t == T::infinity() {
        return Point::new(T::zero(), T::zero());
    }
    Point::new(p.x * (-c::<T>(3.0) * t).exp(), p.y * (-c::<T>(2.0) * t).exp())
}

/// Membership rule used by [`verify_star_shaped_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarTarget {
    /// The domain itself.
    Domain,
    /// The mirror image of the domain across the vertical line through A,
    /// which no longer contains the flow's limit point.
    ReflectedAboutA,
}

/// Flow times: `0`, then a geometric ladder up to `t_max`, then `+inf`.
pub fn flow_times(n_times: usize, t_max: f64) -> Vec<f64> {
    let n = n_times.max(2);
    let mut ts = vec![0.0];
    let lo: f64 = 1e-3;
    for j in 0..n - 1 {
        let s = j as f64 / (n - 2).max(1) as f64;
        ts.push(lo * (t_max / lo).powf(s));
    }
    ts.push(f64::INFINITY);
    ts
}

pub fn verify_star_shaped(domain: &TricomiDomain<f64>, n_boundary: usize, n_times: usize) -> Result<VerificationReport> {
    verify_star_shaped_with(domain, n_boundary, n_times, StarTarget::Domain)
}

pub fn verify_star_shaped_with(
    domain: &TricomiDomain<f64>,
    n_boundary: usize,
    n_times: usize,
    target: StarTarget,
) -> Result<VerificationReport> {
    if n_boundary < 2 || n_times < 2 {
        return Err(Error::Contract("need at least 2 boundary points and 2 flow times".into()));
    }
    let tol = 1e-10;
    let ax = domain.a.x;
    let mirror = |p: Point<f64>| Point::new(2.0 * ax - p.x, p.y);
    let (samples, slack): (Vec<Point<f64>>, Box<dyn Fn(Point<f64>) -> f64>) = match target {
        StarTarget::Domain => (domain.boundary_samples(n_boundary), Box::new(|p| domain.membership_slack(p))),
        StarTarget::ReflectedAboutA => (
            domain.boundary_samples(n_boundary).into_iter().map(mirror).collect(),
            Box::new(move |p| domain.membership_slack(mirror(p))),
        ),
    };
    let times = flow_times(n_times, T_MAX);
    let mut worst = f64::INFINITY;
    let mut worst_at = (Point::new(0.0, 0.0), 0.0);
    for &p in &samples {
        for &t in &times {
            let q = flow(p, t);
            let s = slack(q);
            if s < worst {
                worst = s;
                worst_at = (p, t);
            }
        }
    }
    let passed = worst >= -tol;
    let label = match target {
        StarTarget::Domain => "domain",
        StarTarget::ReflectedAboutA => "reflected domain (mirror about x = 2x0)",
    };
    let mut notes = format!(
        "target={label}; points={}; times={} (0, geometric to {T_MAX}, +inf); tol={tol:e}",
        samples.len(),
        times.len()
    );
    if !passed {
        notes.push_str(&format!(
            "; violation at p=({:.17e}, {:.17e}), t={}",
            worst_at.0.x, worst_at.0.y, worst_at.1
        ));
    }
    Ok(VerificationReport {
        claim_id: "starshape".into(),
        x0: domain.x0,
        grid_size: samples.len() * times.len(),
        worst_margin: worst,
        worst_location: worst_at.0.x,
        passed,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(x0: f64) -> TricomiDomain<f64> {
        TricomiDomain::new(x0).unwrap()
    }

    #[test]
    fn rejects_nonnegative_x0() {
        assert!(TricomiDomain::new(0.0).is_err());
        assert!(TricomiDomain::new(0.3).is_err());
        assert!(TricomiDomain::new(f64::NAN).is_err());
    }

    #[test]
    fn corner_c_on_both_characteristics() {
        for &x0 in &[-0.1, -0.5, -1.0, -3.7] {
            let d = dom(x0);
            let w = 2.0 * (-d.y_c).powf(1.5);
            assert!((3.0 * (d.c.x - 2.0 * x0) - w).abs() < 1e-12);
            assert!((3.0 * d.c.x + w).abs() < 1e-12);
        }
    }

    #[test]
    fn g_values() {
        let d = dom(-0.5);
        assert_eq!(d.g(0.0).unwrap(), 0.0);
        assert_eq!(d.g(-1.0).unwrap(), 0.0);
        assert!((d.g(-0.25).unwrap() - 0.75).abs() < 1e-15);
        assert!((d.g(-0.5).unwrap() - 0.825482).abs() < 1e-6);
        assert!(d.g(0.1).is_err());
        assert!(d.g(-1.1).is_err());
    }

    #[test]
    fn g_prime_values() {
        let d = dom(-0.5);
        assert_eq!(d.g_prime(-0.5).unwrap(), 0.0);
        assert!((d.g_prime(-0.25).unwrap() + 2.0 / 3.0).abs() < 1e-14);
        assert!(d.g_prime(-0.75).unwrap() > 0.0);
        assert!(matches!(d.g_prime(0.0), Err(Error::Singularity(_))));
        assert!(matches!(d.g_prime(-1.0), Err(Error::Singularity(_))));
        assert!(d.g_prime(-2e-12).unwrap().abs() > 1e6);
    }

    #[test]
    fn h_values() {
        let d = dom(-0.5);
        assert!((d.h(0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((d.h(-0.5).unwrap() - (1.5f64 * 0.0625).cbrt()).abs() < 1e-15);
        assert!((d.h(-0.5).unwrap() - 0.454280).abs() < 1e-6);
        assert!((d.h(-0.25).unwrap() - 13f64.sqrt() / 8.0).abs() < 1e-15);
    }

    #[test]
    fn curve_examples() {
        let d = dom(-0.5);
        let bc = d.boundary_curve(CurveKind::BC);
        let p = bc.position(d.y_c);
        assert!((p.x - d.c.x).abs() < 1e-14 && (p.y - d.c.y).abs() < 1e-15);
        let s = d.boundary_curve(CurveKind::Sigma);
        let n = s.normal(1.0);
        assert!((n.x + 1.0).abs() < 1e-15 && n.y.abs() < 1e-15);
        for &y in &[-0.9, -0.3, 0.0] {
            assert!((bc.arc_element(y) - (1.0 - y).sqrt()).abs() < 1e-15);
        }
        let ac = d.boundary_curve(CurveKind::AC);
        let q = ac.position(-d.y_c);
        assert!((q.x - d.c.x).abs() < 1e-14);
    }

    #[test]
    fn membership_examples() {
        let d = dom(-0.5);
        assert!(d.contains(Point::new(-0.5, 0.0)));
        assert!(d.contains(d.c));
        assert!(d.contains(d.a) && d.contains(d.b));
        assert!(!d.contains(Point::new(-0.5, d.y_max() + 0.01)));
        assert!(!d.contains(Point::new(-0.5, d.y_c - 0.01)));
        assert!(!d.contains(Point::new(0.01, -0.01)));
    }

    #[test]
    fn flow_examples() {
        let p = Point::new(-0.3, 0.2);
        assert_eq!(flow(p, 0.0), p);
        assert_eq!(flow(p, f64::INFINITY), Point::new(0.0, 0.0));
        let d = dom(-0.5);
        let bc = d.boundary_curve(CurveKind::BC);
        let q = bc.position(-0.4);
        for &t in &[0.1, 1.0, 5.0] {
            let r = flow(q, t);
            assert!((3.0 * r.x + 2.0 * (-r.y).powf(1.5)).abs() < 1e-14);
        }
    }

    #[test]
    fn starlike_examples() {
        let d = dom(-0.5);
        assert_eq!(d.starlike_product(CurveKind::BC, -0.3), 0.0);
        assert!((d.starlike_product(CurveKind::AC, 0.0) - 6.0 * -0.5).abs() < 1e-15);
        let v = d.starlike_product(CurveKind::Sigma, 0.5);
        assert!((v + 1.650964).abs() < 1e-6);
        assert!((v + 3.0 * 0.25 / d.h(-0.5).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn starlike_matches_normals() {
        let d = dom(-0.8);
        for kind in CurveKind::ALL {
            let curve = d.boundary_curve(kind);
            for i in 0..=50 {
                let t = curve.range.0 + (curve.range.1 - curve.range.0) * i as f64 / 50.0;
                let p = curve.position(t);
                let direct = Point::new(-3.0 * p.x, -2.0 * p.y).dot(curve.normal(t));
                assert!((direct - d.starlike_product(kind, t)).abs() < 1e-13, "{kind:?} {t}");
            }
        }
    }

    #[test]
    fn star_shaped_and_negative_control() {
        let d = dom(-0.5);
        let r = verify_star_shaped(&d, 200, 50).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.worst_margin >= -1e-10);
        let n = verify_star_shaped_with(&d, 200, 50, StarTarget::ReflectedAboutA).unwrap();
        assert!(!n.passed);
    }

    #[test]
    fn corner_a_stays_inside() {
        let d = dom(-1.3);
        for t in flow_times(60, T_MAX) {
            assert!(d.contains(flow(d.a, t)));
        }
    }

    #[test]
    fn works_in_single_precision() {
        let d = TricomiDomain::<f32>::new(-0.5).unwrap();
        assert!((d.h(-0.25).unwrap() - 13f32.sqrt() / 8.0).abs() < 1e-6);
        assert!(d.contains(Point::new(-0.5f32, 0.1)));
    }
}
