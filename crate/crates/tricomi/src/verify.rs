//! Dense-grid verification of the shape of `h` and of the two-sided bounds on
//! `G1` and `G2`, together with the closed-form functions used in their
//! proofs, which serve as independent cross-checks.
//!
//! All margins are normalized by the largest magnitude of the checked function
//! on the grid; a claim passes when its worst margin is at least `-MARGIN_TOL`.

use crate::constants::{g1_raw, g2_clamped, ConstantLedger, Regime};
use crate::error::{Error, Result};
use crate::geometry::TricomiDomain;
use crate::report::VerificationReport;

pub const MARGIN_TOL: f64 = 1e-10;
pub const SHARPNESS_TOL: f64 = 1e-6;
/// Floor of the convex/concave dead band for second divided differences.
pub const CONVEXITY_TOL: f64 = 1e-8;

fn check_grid(n: usize) -> Result<()> {
    if n < 1000 {
        return Err(Error::Contract(format!("grid_size must be at least 1000, got {n}")));
    }
    Ok(())
}

/// Uniform grid over `[2x0, 0]` with the breakpoints of the ledger merged in.
pub fn abscissas(l: &ConstantLedger<f64>, n: usize) -> Vec<f64> {
    let x0 = l.x0;
    let lo = 2.0 * x0;
    let mut xs: Vec<f64> = (0..=n).map(|i| lo - lo * i as f64 / n as f64).collect();
    xs[n] = 0.0;
    let mut extra = vec![x0, 1.5 * x0, 0.75 * x0, 0.5 * x0, l.x1, l.x2];
    extra.extend(l.x_plus);
    extra.extend(l.x_minus);
    for e in extra {
        if e > lo && e < 0.0 {
            xs.push(e);
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    xs
}

#[derive(Debug, Clone, Copy)]
struct Margin {
    value: f64,
    at: f64,
}

impl Margin {
    fn none() -> Self {
        Margin { value: f64::INFINITY, at: f64::NAN }
    }
    fn push(&mut self, value: f64, at: f64) {
        if value < self.value {
            self.value = value;
            self.at = at;
        }
    }
}

fn assemble(claim: &str, x0: f64, grid: usize, parts: &[(&str, Margin)], extra: &str) -> VerificationReport {
    let mut worst = Margin::none();
    let mut text = Vec::new();
    for (name, m) in parts {
        worst.push(m.value, m.at);
        text.push(format!("{name}={:.6e}@{:.9}", m.value, m.at));
    }
    let passed = worst.value >= -MARGIN_TOL;
    let mut notes = format!("tol={MARGIN_TOL:e}; {}", text.join("; "));
    if !extra.is_empty() {
        notes.push_str("; ");
        notes.push_str(extra);
    }
    VerificationReport {
        claim_id: claim.into(),
        x0,
        grid_size: grid,
        worst_margin: worst.value,
        worst_location: worst.at,
        passed,
        notes,
    }
}

/// Closed-form `h(x0) = ((3/2) x0^4)^{1/3}`.
pub fn h_at_x0(x0: f64) -> f64 {
    (1.5 * x0.powi(4)).cbrt()
}

/// Closed-form minimum `h(x_+-) = sqrt(x0^2 - 3/64)`.
pub fn h_at_x_pm(x0: f64) -> f64 {
    (x0 * x0 - 3.0 / 64.0).sqrt()
}

/// Shape of `h`: two-sided bounds, evenness about `x0`, and the
/// convexity/concavity pattern.
pub fn verify_h_profile(x0: f64, grid_size: usize) -> Result<VerificationReport> {
    check_grid(grid_size)?;
    let d = TricomiDomain::new(x0)?;
    let l = ConstantLedger::new(x0)?;
    let xs = abscissas(&l, grid_size);
    let hs: Vec<f64> = xs.iter().map(|&x| d.h_clamped(x)).collect();
    let hmax = hs.iter().cloned().fold(0.0, f64::max);

    let (lower, upper) = if l.regime.first_family() { (h_at_x0(x0), x0.abs()) } else { (h_at_x_pm(x0), l.c4) };
    let mut bounds = Margin::none();
    for (&x, &h) in xs.iter().zip(&hs) {
        bounds.push((h - lower) / hmax, x);
        bounds.push((upper - h) / hmax, x);
    }

    let direct_c4 = d.h_clamped(2.0 * x0).max(d.h_clamped(x0)).max(d.h_clamped(0.0));
    let mut c4 = Margin::none();
    c4.push(-(l.c4 - direct_c4).abs() / direct_c4, x0);

    let mut even = Margin::none();
    for &x in &xs {
        even.push(-(d.h_clamped(x) - d.h_clamped(2.0 * x0 - x)).abs() / hmax, x);
    }

    let step = 2.0 * x0.abs() / grid_size as f64;
    let inflection = if l.regime.first_family() { None } else { Some(find_inflection(x0)?) };
    let roundoff = 64.0 * f64::EPSILON * hmax / (step * step);
    let band = (CONVEXITY_TOL * x0 * x0).max(roundoff);
    let mut second = Vec::with_capacity(grid_size);
    let mut d2max: f64 = 0.0;
    for i in 1..grid_size {
        let x = 2.0 * x0 + step * i as f64;
        if x + step > 0.0 {
            break;
        }
        let dd = (d.h_clamped(x + step) - 2.0 * d.h_clamped(x) + d.h_clamped(x - step)) / (step * step);
        d2max = d2max.max(dd.abs());
        second.push((x, dd));
    }
    let mut conv = Margin::none();
    let mut excluded = 0usize;
    for &(x, dd) in &second {
        let sign = match inflection {
            None => 1.0,
            Some(xb) => {
                let mirror = 2.0 * x0 - xb;
                if (x - xb).abs() <= 2.0 * step || (x - mirror).abs() <= 2.0 * step {
                    excluded += 1;
                    continue;
                }
                if x > mirror && x < xb {
                    -1.0
                } else {
                    1.0
                }
            }
        };
        conv.push((sign * dd + band) / d2max, x);
    }

    let mut parts = vec![("bounds", bounds), ("C4", c4), ("evenness", even), ("convexity", conv)];
    let mut extra = format!(
        "regime={}; lower={lower:.17e}; upper={upper:.17e}; dead_band={band:.3e} (max of {CONVEXITY_TOL:e}*x0^2 and roundoff {roundoff:.3e}); excluded_near_inflection={excluded}",
        l.regime.label()
    );
    if let Some(xb) = inflection {
        let xp = l.x_plus.unwrap();
        let mut inside = Margin::none();
        inside.push((xb - x0).min(xp - xb) / x0.abs(), xb);
        parts.push(("inflection_in_(x0,x+)", inside));
        let mut dual = Margin::none();
        dual.push(-n_dual_gap(x0), xb);
        parts.push(("N_dual_forms", dual));
        extra.push_str(&format!("; inflection={xb:.17e}"));
    }
    Ok(assemble("lemma4.5", x0, xs.len(), &parts, &extra))
}

/// Largest relative disagreement between the printed forms of `N` on 20
/// points of `(0, X_+)`.
pub fn n_dual_gap(x0: f64) -> f64 {
    let xp = (x0 * x0 - 3.0 / 16.0).max(0.0).sqrt();
    let top = if xp > 0.0 { xp } else { x0.abs() * 0.999 };
    let mut scale: f64 = 0.0;
    let mut gap: f64 = 0.0;
    for j in 0..20 {
        let xx = top * (j as f64 + 0.5) / 20.0;
        let a = n_poly(x0, xx);
        let b = n_reduced(x0, xx);
        let c = n_product(x0, xx);
        scale = scale.max(a.abs()).max(b.abs());
        gap = gap.max((a - b).abs()).max((a - c).abs());
    }
    gap / scale.max(f64::MIN_POSITIVE)
}

/// `G(X) = g(X + x0) = (9 (x0^2 - X^2) / 4)^{1/3}`.
pub fn big_g(x0: f64, xx: f64) -> f64 {
    (2.25 * (x0 * x0 - xx * xx)).max(0.0).cbrt()
}

/// `H(X) = h(X + x0)`.
pub fn big_h(x0: f64, xx: f64) -> f64 {
    let g = big_g(x0, xx);
    (xx * xx + 4.0 / 9.0 * g.powi(4)).sqrt()
}

/// `H'(X) = X (3 - 4 G) / (3 H)`.
pub fn big_h_prime(x0: f64, xx: f64) -> f64 {
    xx * (3.0 - 4.0 * big_g(x0, xx)) / (3.0 * big_h(x0, xx))
}

/// `H''(X) = N(X) / (9 G^2 H^3)`.
pub fn big_h_second(x0: f64, xx: f64) -> f64 {
    let g = big_g(x0, xx);
    n_reduced(x0, xx) / (9.0 * g * g * big_h(x0, xx).powi(3))
}

/// `N` as the difference of the squared quantities.
pub fn n_product(x0: f64, xx: f64) -> f64 {
    let g = big_g(x0, xx);
    let h = big_h(x0, xx);
    3.0 * (6.0 * xx * xx + (3.0 - 4.0 * g) * g * g) * h * h - (xx * (3.0 - 4.0 * g) * g).powi(2)
}

/// `N` expanded in powers of `G`.
pub fn n_poly(x0: f64, xx: f64) -> f64 {
    let g = big_g(x0, xx);
    let x2 = xx * xx;
    18.0 * x2 * x2 - 8.0 * x2 * g.powi(4) + 12.0 * x2 * g.powi(3) + 4.0 * g.powi(6) - 16.0 / 3.0 * g.powi(7)
}

/// `N` with `G^3` eliminated, linear in `G`.
pub fn n_reduced(x0: f64, xx: f64) -> f64 {
    let g = big_g(x0, xx);
    let (x2, a2) = (xx * xx, x0 * x0);
    2.25 * (5.0 * x2 * x2 - 6.0 * a2 * x2 + 9.0 * a2 * a2 - 4.0 * (x2 * x2 - 4.0 * a2 * x2 + 3.0 * a2 * a2) * g)
}

/// Alternative reduced form of `N` (first line of the same display).
pub fn n_reduced_alt(x0: f64, xx: f64) -> f64 {
    let g = big_g(x0, xx);
    let (x2, a2) = (xx * xx, x0 * x0);
    9.0 * (2.0 * x2 * x2 + 0.75 * (3.0 * a2 + x2) * (a2 - x2) - (3.0 * a2 - x2) * (a2 - x2) * g)
}

pub fn n1_full(x0: f64, xx: f64) -> f64 {
    let g = big_g(x0, xx);
    let (x2, a2) = (xx * xx, x0 * x0);
    2.0 * (5.0 * x2 - 3.0 * a2) * g * g - 8.0 * (x2 - 2.0 * a2) * g.powi(3) + 3.0 * (x2 * x2 - 4.0 * a2 * x2 + 3.0 * a2 * a2)
}

pub fn n1_reduced(x0: f64, xx: f64) -> f64 {
    let g = big_g(x0, xx);
    let (x2, a2) = (xx * xx, x0 * x0);
    2.0 * (5.0 * x2 - 3.0 * a2) * g * g + 21.0 * x2 * x2 - 66.0 * a2 * x2 + 45.0 * a2 * a2
}

/// `N1'(X) = 3 X G^{-1} (21 x0^2 - 25 X^2 - 4 (11 x0^2 - 7 X^2) G)`.
pub fn n1_prime(x0: f64, xx: f64) -> f64 {
    let g = big_g(x0, xx);
    let (x2, a2) = (xx * xx, x0 * x0);
    3.0 * xx / g * (21.0 * a2 - 25.0 * x2 - 4.0 * (11.0 * a2 - 7.0 * x2) * g)
}

pub fn r_fn(x0: f64, xx: f64) -> f64 {
    let (x2, a2) = (xx * xx, x0 * x0);
    (21.0 * a2 - 25.0 * x2) / (4.0 * (11.0 * a2 - 7.0 * x2))
}

/// Numerator of `G1' = h^{-3} S1`.
pub fn s1(d: &TricomiDomain<f64>, x: f64) -> f64 {
    let x0 = d.x0;
    let g = d.g_clamped(x);
    3.0 * (2.0 * x.powi(3) - 6.0 * x0 * x * x + 7.0 * x0 * x0 * x - 3.0 * x0.powi(3))
        - x * (4.0 * x * x - 13.0 * x0 * x + 6.0 * x0 * x0) * g
}

/// Numerator of `G2' = -3 g^{-3/2} h^{-3} S2`.
pub fn s2(d: &TricomiDomain<f64>, x: f64) -> f64 {
    let x0 = d.x0;
    let g = d.g_clamped(x);
    3.0 * (2.0 * x.powi(4) - 8.0 * x0 * x.powi(3) + 12.0 * x0 * x0 * x * x - 7.0 * x0.powi(3) * x + x0.powi(4))
        - x * (4.0 * x.powi(3) - 17.0 * x0 * x * x + 17.0 * x0 * x0 * x + 2.0 * x0.powi(3)) * g
}

/// Abscissa of the inflection point of `h` in `(x0, x_+)`, by bisection on
/// the reduced form of `N`.
pub fn find_inflection(x0: f64) -> Result<f64> {
    if Regime::of(x0).first_family() {
        return Err(Error::Domain(format!("no inflection point for x0 = {x0} >= -sqrt(3)/4")));
    }
    let xp = (x0 * x0 - 3.0 / 16.0).sqrt();
    let (n0, np) = (n_reduced(x0, 0.0), n_reduced(x0, xp));
    if !(n0 < 0.0 && np > 0.0) {
        return Err(Error::Logic(format!("sign condition N(0) < 0 < N(X+) fails: {n0}, {np}")));
    }
    let (mut a, mut b) = (0.0, xp);
    for _ in 0..200 {
        if b - a <= 1e-12 {
            break;
        }
        let m = 0.5 * (a + b);
        if n_reduced(x0, m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(x0 + 0.5 * (a + b))
}

/// Minimum over the grid of `G - lower` and `upper - G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundGaps {
    pub lower_gap: f64,
    pub lower_at: f64,
    pub upper_gap: f64,
    pub upper_at: f64,
    pub scale: f64,
}

fn gaps(xs: &[f64], f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> BoundGaps {
    let mut lg = Margin::none();
    let mut ug = Margin::none();
    let mut scale: f64 = 0.0;
    for &x in xs {
        let v = f(x);
        scale = scale.max(v.abs());
        lg.push(v - lo, x);
        ug.push(hi - v, x);
    }
    BoundGaps { lower_gap: lg.value, lower_at: lg.at, upper_gap: ug.value, upper_at: ug.at, scale }
}

pub fn g1_gaps(x0: f64, grid_size: usize) -> Result<BoundGaps> {
    let d = TricomiDomain::new(x0)?;
    let l = ConstantLedger::new(x0)?;
    let (lo, hi) = l.g1_bounds();
    Ok(gaps(&abscissas(&l, grid_size), |x| g1_raw(x0, x) / d.h_clamped(x), lo, hi))
}

pub fn g2_gaps(x0: f64, grid_size: usize) -> Result<BoundGaps> {
    let d = TricomiDomain::new(x0)?;
    let l = ConstantLedger::new(x0)?;
    let (lo, hi) = l.g2_bounds();
    Ok(gaps(&abscissas(&l, grid_size), |x| g2_clamped(&d, x) / d.h_clamped(x), lo, hi))
}

pub fn verify_g1_bounds(x0: f64, grid_size: usize) -> Result<VerificationReport> {
    check_grid(grid_size)?;
    let l = ConstantLedger::new(x0)?;
    let gp = g1_gaps(x0, grid_size)?;
    let n = abscissas(&l, grid_size).len();
    let lower = Margin { value: gp.lower_gap / gp.scale, at: gp.lower_at };
    let upper = Margin { value: gp.upper_gap / gp.scale, at: gp.upper_at };
    let (lo, hi) = l.g1_bounds();
    let names = if l.regime.first_family() { ("C5", "C6") } else { ("C7", "C8") };
    let extra = format!(
        "regime={}; {}={lo:.17e}; {}={hi:.17e}; lower_gap={:.6e}; upper_gap={:.6e}; sharp_lower={}; sharp_upper={}",
        l.regime.label(),
        names.0,
        names.1,
        gp.lower_gap,
        gp.upper_gap,
        gp.lower_gap <= SHARPNESS_TOL,
        gp.upper_gap <= SHARPNESS_TOL
    );
    Ok(assemble("cor4.6", x0, n, &[("lower", lower), ("upper", upper)], &extra))
}

pub fn verify_g2_bounds(x0: f64, grid_size: usize) -> Result<VerificationReport> {
    check_grid(grid_size)?;
    let d = TricomiDomain::new(x0)?;
    let l = ConstantLedger::new(x0)?;
    let xs = abscissas(&l, grid_size);
    let gp = g2_gaps(x0, grid_size)?;
    let lower = Margin { value: gp.lower_gap / gp.scale, at: gp.lower_at };
    let upper = Margin { value: gp.upper_gap / gp.scale, at: gp.upper_at };
    let mut abs = Margin::none();
    for &x in &xs {
        abs.push((l.c13 - (g2_clamped(&d, x) / d.h_clamped(x)).abs()) / gp.scale, x);
    }
    let (lo, hi) = l.g2_bounds();
    let names = if l.regime.first_family() { ("C9", "C10") } else { ("C11", "C12") };
    let extra = format!(
        "regime={}; {}={lo:.17e}; {}={hi:.17e}; C13={:.17e}; lower_gap={:.6e}; upper_gap={:.6e}; sharp_lower={}; sharp_upper={}",
        l.regime.label(),
        names.0,
        names.1,
        l.c13,
        gp.lower_gap,
        gp.upper_gap,
        gp.lower_gap <= SHARPNESS_TOL,
        gp.upper_gap <= SHARPNESS_TOL
    );
    Ok(assemble("cor4.8", x0, xs.len(), &[("lower", lower), ("upper", upper), ("abs_C13", abs)], &extra))
}

/// The closed-form functions from the proofs, evaluated at `X` (and at
/// `x = X + x0` for `S1`, `S2`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProofInternals {
    pub big_x: f64,
    pub h: f64,
    pub h_prime: f64,
    pub n: f64,
    pub n_alt: f64,
    pub n1: f64,
    pub r: f64,
    pub s1: f64,
    pub s2: f64,
}

pub fn proof_internals(x0: f64, big_x: f64) -> Result<ProofInternals> {
    let d = TricomiDomain::new(x0)?;
    if !(big_x >= 0.0 && big_x < x0.abs()) {
        return Err(Error::Domain(format!("X = {big_x} outside [0, {})", x0.abs())));
    }
    let x = big_x + x0;
    Ok(ProofInternals {
        big_x,
        h: big_h(x0, big_x),
        h_prime: big_h_prime(x0, big_x),
        n: n_reduced(x0, big_x),
        n_alt: n_poly(x0, big_x),
        n1: n1_reduced(x0, big_x),
        r: r_fn(x0, big_x),
        s1: s1(&d, x),
        s2: s2(&d, x),
    })
}

/// Log-spaced sweep of `count` values of `x0` in `[lo, hi]` (both negative).
pub fn log_sweep(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.abs().ln(), hi.abs().ln());
    (0..count)
        .map(|i| {
            let s = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
            -(a + (b - a) * s).exp()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_profile_examples() {
        let r = verify_h_profile(-0.4, 20000).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((h_at_x0(-0.4) - (1.5 * 0.4f64.powi(4)).cbrt()).abs() < 1e-15);
        assert!((h_at_x0(-0.4) - 0.337373).abs() < 1e-6);
        let r = verify_h_profile(-0.5, 20000).unwrap();
        assert!(r.passed, "{r:?}");
        let l = ConstantLedger::new(-1.0).unwrap();
        assert!((l.c4 - 1.5f64.cbrt()).abs() < 1e-15 && (l.c4 - 1.144714).abs() < 1e-6);
        assert!(verify_h_profile(-1.0, 20000).unwrap().passed);
        assert!(verify_h_profile(-1.0, 10).is_err());
    }

    #[test]
    fn inflection_half() {
        let x0 = -0.5;
        let n0 = 27.0 / 64.0 * (3.0 - 4.0 * (9.0f64 / 16.0).cbrt());
        assert!(n0 < 0.0);
        assert!((n_reduced(x0, 0.0) - n0).abs() < 1e-14);
        assert!((n_poly(x0, 0.0) - n0).abs() < 1e-14);
        let xp = 0.25;
        assert!((n_reduced(x0, xp) - 9.0 / 4.0 * 13.0 / 128.0).abs() < 1e-14);
        let xb = find_inflection(x0).unwrap();
        assert!(xb > x0 && xb < -0.25);
        assert!(n_reduced(x0, xb - x0).abs() < 1e-10);
        assert!(find_inflection(-0.3).is_err());
    }

    #[test]
    fn proof_internal_examples() {
        for &x0 in &[-0.5, -1.5] {
            let p = proof_internals(x0, 0.0).unwrap();
            let d = TricomiDomain::new(x0).unwrap();
            assert!((p.h - d.h(x0).unwrap()).abs() < 1e-15);
            assert!((p.r - 21.0 / 44.0).abs() < 1e-15);
            let xp = (x0 * x0 - 3.0 / 16.0).sqrt();
            assert!((n1_reduced(x0, xp) - 6.75 * (x0 * x0 - 3.0 / 64.0)).abs() < 1e-12);
            assert!((n1_full(x0, xp) - n1_reduced(x0, xp)).abs() < 1e-12);
        }
        assert!(proof_internals(-0.5, 0.5).is_err());
    }

    #[test]
    fn g1_examples() {
        assert!(verify_g1_bounds(-0.4, 10000).unwrap().passed);
        let s = -1.0 / 5f64.sqrt();
        let gp = g1_gaps(s, 100000).unwrap();
        assert!(gp.lower_gap <= SHARPNESS_TOL && gp.lower_gap >= -1e-12);
    }

    #[test]
    fn g2_examples() {
        assert!(verify_g2_bounds(-0.4, 10000).unwrap().passed);
        let l = ConstantLedger::new(-1.0).unwrap();
        assert!(g2_gaps(l.x4, 100000).unwrap().lower_gap <= SHARPNESS_TOL);
        assert!(g2_gaps(l.x3, 100000).unwrap().upper_gap <= SHARPNESS_TOL);
    }

    #[test]
    fn sweep_endpoints() {
        let s = log_sweep(-4.0, -0.05, 40);
        assert_eq!(s.len(), 40);
        assert!((s[0] + 4.0).abs() < 1e-12 && (s[39] + 0.05).abs() < 1e-15);
    }
}
