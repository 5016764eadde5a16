//! Randomized checks of the boundary integrands: the general forms with
//! explicit normals against the simplified ones, and the three trace
//! inequalities on random smooth fields.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::constants::ConstantLedger;
use crate::error::{Error, Result};
use crate::geometry::{CurveKind, Point, TricomiDomain};
use crate::pohozaev::*;
use crate::quadrature::{bc_rule, sigma_rule};
use crate::report::VerificationReport;

pub const EQUIVALENCE_TOL: f64 = 1e-12;
pub const INEQUALITY_TOL: f64 = 1e-10;
pub const EPSILONS: [f64; 3] = [0.5, 1.0, 2.0];

/// `sum a_ij x^i y^j` of total degree at most 3, with exact gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicField {
    pub coeffs: [f64; 10],
}

const POWERS: [(i32, i32); 10] = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)];

impl CubicField {
    pub fn random(rng: &mut impl Rng, amplitude: f64) -> Self {
        let mut coeffs = [0.0; 10];
        for c in &mut coeffs {
            *c = rng.gen_range(-amplitude..amplitude);
        }
        CubicField { coeffs }
    }

    /// `(u, u_x, u_y)` at `p`.
    pub fn eval(&self, p: Point<f64>) -> (f64, f64, f64) {
        let pw = |v: f64, k: i32| if k < 0 { 0.0 } else { v.powi(k) };
        let mut r = (0.0, 0.0, 0.0);
        for (c, &(i, j)) in self.coeffs.iter().zip(&POWERS) {
            r.0 += c * pw(p.x, i) * pw(p.y, j);
            r.1 += c * i as f64 * pw(p.x, i - 1) * pw(p.y, j);
            r.2 += c * j as f64 * pw(p.x, i) * pw(p.y, j - 1);
        }
        r
    }
}

fn report(claim: &str, x0: f64, n: usize, worst: f64, at: f64, tol: f64, notes: String) -> VerificationReport {
    VerificationReport {
        claim_id: claim.into(),
        x0,
        grid_size: n,
        worst_margin: worst,
        worst_location: at,
        passed: worst >= -tol,
        notes,
    }
}

/// General `omega1`, `omega2` with the curve normals against the cancelled
/// forms on BC and sigma, over `states` random states per curve. The margin
/// is `tol - relative disagreement`, and also covers `omega1 >= 0` on BC.
pub fn verify_integrands(x0: f64, states: usize, seed: u64) -> Result<VerificationReport> {
    if states == 0 {
        return Err(Error::Contract("need at least one random state".into()));
    }
    let d = TricomiDomain::new(x0)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let bc = d.boundary_curve(CurveKind::BC);
    let sg = d.boundary_curve(CurveKind::Sigma);
    let mut worst = [(f64::INFINITY, f64::NAN); 4];
    let mut push = |k: usize, v: f64, at: f64| {
        if v < worst[k].0 {
            worst[k] = (v, at);
        }
    };
    for _ in 0..states {
        let (u, ux, uy) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let lambda: f64 = rng.gen_range(0.0..50.0);

        let t = d.y_c * rng.gen::<f64>();
        let (p, n) = (bc.position(t), bc.normal(t));
        let simple = omega1_bc_simplified(t, ux, uy)?;
        let gap = (omega1(p, (ux, uy), n)? - simple).abs() / (1.0 + ux * ux + uy * uy);
        push(0, EQUIVALENCE_TOL - gap, p.x);
        push(1, simple, p.x);
        let f = 0.5 * lambda * u * u;
        let gap = (omega2(p, u, (ux, uy), n, f)? - omega2_bc_simplified(t, u, ux, uy)?).abs()
            / (1.0 + u.abs() * (ux.abs() + uy.abs()) + f);
        push(2, EQUIVALENCE_TOL - gap, p.x);

        // u = 0 on sigma leaves only the normal derivative
        let x = 2.0 * x0 * rng.gen_range(1e-3..1.0 - 1e-3);
        let (p, n) = (sg.position(-x), sg.normal(-x));
        let (gx, gy) = (ux * n.x, ux * n.y);
        let gap = (omega1(p, (gx, gy), n)? - omega1_sigma_simplified(&d, x, gx, gy)?).abs()
            / ((1.0 + ux * ux) * (1.0 + x0 * x0));
        push(3, EQUIVALENCE_TOL - gap, x);
    }
    let names = ["omega1_BC", "omega1_BC_nonneg", "omega2_BC", "omega1_sigma"];
    let (k, &(w, at)) = worst.iter().enumerate().min_by(|a, b| a.1 .0.total_cmp(&b.1 .0)).unwrap();
    let parts: Vec<String> = names.iter().zip(&worst).map(|(n, m)| format!("{n}={:.6e}", m.0)).collect();
    let notes = format!("states_per_curve={states}; seed={seed}; tol={EQUIVALENCE_TOL:e}; {}; worst={}", parts.join("; "), names[k]);
    Ok(report("integrands", x0, 3 * states, w, at, 0.0, notes))
}

/// Per-bundle values of the three trace inequalities at one `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceInequalities {
    pub bc_omega1: f64,
    pub bc_omega1_bound: f64,
    pub bc_omega2: f64,
    pub bc_omega2_bound: f64,
    pub sigma_omega1: f64,
    pub sigma_omega1_bound: f64,
}

pub fn trace_inequalities(
    d: &TricomiDomain<f64>,
    l: &ConstantLedger<f64>,
    field: &CubicField,
    eps: f64,
) -> Result<TraceInequalities> {
    let f = |p: Point<f64>| field.eval(p);
    let bc = BoundaryTrace::from_rule(d.boundary_curve(CurveKind::BC), &bc_rule(d, 32, 6), f);
    let sg = BoundaryTrace::from_rule(d.boundary_curve(CurveKind::Sigma), &sigma_rule(d, 64, 6), f);
    let (u, wx, uy) = trace_l2(&bc)?;
    let (_, wxs, uys) = trace_l2(&sg)?;
    let bc_omega2 = line_integral(&bc, |p| omega2_bc_simplified(p.point.y, p.sample.u, p.sample.ux, p.sample.uy).unwrap_or(f64::NAN))?;
    let sigma_omega1 = line_integral(&sg, |p| omega1_sigma_simplified(d, p.point.x, p.sample.ux, p.sample.uy).unwrap_or(f64::NAN))?;
    Ok(TraceInequalities {
        bc_omega1: bc_omega1_integral(&bc)?,
        bc_omega1_bound: l.c1(eps) * wx * wx + l.c2(eps) * uy * uy,
        bc_omega2,
        bc_omega2_bound: l.c3 * u * (wx + uy),
        sigma_omega1,
        sigma_omega1_bound: l.c14(eps) * wxs * wxs + l.c15(eps) * uys * uys,
    })
}

/// The BC and sigma trace inequalities for `bundles` random cubic fields and
/// each eps in [`EPSILONS`]. Margins are `(bound - value) / max(1, |bound|)`.
pub fn verify_trace_inequalities(x0: f64, bundles: usize, seed: u64) -> Result<VerificationReport> {
    if bundles == 0 {
        return Err(Error::Contract("need at least one random bundle".into()));
    }
    let d = TricomiDomain::new(x0)?;
    let l = ConstantLedger::new(x0)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst = [f64::INFINITY; 3];
    let mut worst_eps = [f64::NAN; 3];
    for _ in 0..bundles {
        let field = CubicField::random(&mut rng, 3.0);
        for eps in EPSILONS {
            let t = trace_inequalities(&d, &l, &field, eps)?;
            let m = [
                (t.bc_omega1_bound - t.bc_omega1) / t.bc_omega1_bound.abs().max(1.0),
                (t.bc_omega2_bound - t.bc_omega2) / t.bc_omega2_bound.abs().max(1.0),
                (t.sigma_omega1_bound - t.sigma_omega1) / t.sigma_omega1_bound.abs().max(1.0),
            ];
            for k in 0..3 {
                // NaN from a failed evaluation counts as a violation
                let v = if m[k].is_nan() { f64::NEG_INFINITY } else { m[k] };
                if v < worst[k] {
                    worst[k] = v;
                    worst_eps[k] = eps;
                }
            }
        }
    }
    let names = ["BC_omega1", "BC_omega2", "sigma_omega1"];
    let k = (0..3).min_by(|&a, &b| worst[a].total_cmp(&worst[b])).unwrap();
    let parts: Vec<String> = (0..3).map(|i| format!("{}={:.6e}@eps={}", names[i], worst[i], worst_eps[i])).collect();
    let notes = format!("bundles={bundles}; seed={seed}; eps=0.5,1,2; tol={INEQUALITY_TOL:e}; {}; worst={}", parts.join("; "), names[k]);
    Ok(report("trace_inequalities", x0, bundles, worst[k], worst_eps[k], INEQUALITY_TOL, notes))
}
