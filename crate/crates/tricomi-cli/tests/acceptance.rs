//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::Command;
use std::time::Instant;

use tricomi::checks::{verify_integrands, verify_trace_inequalities};
use tricomi::eigen::*;
use tricomi::geometry::{verify_star_shaped, verify_star_shaped_with, StarTarget};
use tricomi::pohozaev::{bound_check, BOUND_TOL};
use tricomi::verify::*;
use tricomi::{ConstantLedger, Point, Regime, TricomiDomain};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

// 1

/// The printed closed forms, written out independently of the library.
fn closed_forms(x0: f64) -> Vec<(&'static str, Option<f64>)> {
    let a = x0.abs();
    let q = (1.5 * a).powf(2.0 / 3.0);
    let s33 = 33f64.sqrt();
    let den = (2f64.powf(4.0 / 3.0) + 9.0 * a.powf(2.0 / 3.0)).sqrt();
    let hm = (x0 * x0 - 3.0 / 64.0).sqrt();
    let first = x0 >= -3f64.sqrt() / 4.0;
    let c4 = if x0 < -2.0 / 3.0 { (1.5 * x0.powi(4)).cbrt() } else { a };
    let c5 = -(1.5f64).powf(8.0 / 3.0) * a.powf(2.0 / 3.0);
    let c6 = 2f64.powf(8.0 / 3.0) * 3.0 * a / den;
    let c9 = -2f64.powf(-19.0 / 6.0) * 3f64.powf(2.0 / 3.0) * (s33 + 3.0) * (15.0 + s33).sqrt() * a.powf(2.0 / 3.0);
    let c10 = 2f64.powf(-11.0 / 6.0) * 3.0 * (s33 - 3.0) * (15.0 - s33).sqrt() * a / den;
    let (c7, c8, c11, c12) = if first {
        (None, None, None, None)
    } else {
        let c7 = -(1.5f64).powi(3) * x0 * x0 / hm;
        let c11 = -2f64.powf(-3.5) * 3.0 * (s33 + 3.0) * (15.0 + s33).sqrt() * x0 * x0 / hm;
        let (c8, c12) = if x0 > -0.5 {
            (c6, c10)
        } else {
            (6.0 * x0 * x0 / hm, 2f64.powf(-3.5) * 3.0 * (s33 - 3.0) * (15.0 - s33).sqrt() * x0 * x0 / hm)
        };
        (Some(c7), Some(c8), Some(c11), Some(c12))
    };
    let c13 = c11.map(f64::abs).unwrap_or(c9.abs());
    let (lo, hi) = (c7.unwrap_or(c5), c8.unwrap_or(c6));
    let r = (x0 * x0 - 3.0 / 16.0).sqrt();
    vec![
        ("x_plus", (!first).then(|| x0 + r)),
        ("x_minus", (!first).then(|| x0 - r)),
        ("x1", Some((7.0 + s33) / 8.0 * x0)),
        ("x2", Some((7.0 - s33) / 8.0 * x0)),
        ("C1_eps1", Some(6.0 * a * 2.0 / (1.0 + q).sqrt())),
        ("C2_eps1", Some(6.0 * a * 2.0 / (1.0 + q).sqrt())),
        ("C3", Some((1.5 * a).cbrt() / (1.0 + q).sqrt())),
        ("C4", Some(c4)),
        ("C5", Some(c5)),
        ("C6", Some(c6)),
        ("C7", c7),
        ("C8", c8),
        ("C9", Some(c9)),
        ("C10", Some(c10)),
        ("C11", c11),
        ("C12", c12),
        ("C13", Some(c13)),
        ("C14_eps1", Some(hi + 0.5 * c13)),
        ("C15_eps1", Some(-lo + 0.5 * c13)),
    ]
}

fn criterion_1() -> Check {
    let xs = [-0.3, -3f64.sqrt() / 4.0, -0.5, -2.0 / 3.0, -1.0, -2.0];
    let mut worst: f64 = 0.0;
    for &x0 in &xs {
        let l = ConstantLedger::new(x0).map_err(|e| e.to_string())?;
        let d = TricomiDomain::new(x0).map_err(|e| e.to_string())?;
        let got = l.entries();
        for (name, want) in closed_forms(x0) {
            let have = got.iter().find(|e| e.0 == name).and_then(|e| e.1);
            match (have, want) {
                (Some(h), Some(w)) => {
                    worst = worst.max(rel(h, w));
                    ensure(rel(h, w) <= 1e-12, format!("{name} at x0={x0}: {h} vs {w}"))?;
                }
                (None, None) => {}
                _ => return Err(format!("{name} at x0={x0}: presence mismatch")),
            }
        }
        // C4 as the maximum of h over the three candidate points
        let c4 = [2.0 * x0, x0, 0.0].iter().map(|&x| d.h(x).unwrap()).fold(0.0, f64::max);
        ensure(rel(l.c4, c4) <= 1e-12, format!("C4 definition at x0={x0}"))?;
    }
    let e: f64 = 1e-12;
    let gap4 = (ConstantLedger::new(-2.0 / 3.0 - e).unwrap().c4 - ConstantLedger::new(-2.0 / 3.0 + e).unwrap().c4).abs();
    let at = |x: f64| ConstantLedger::new(x).unwrap();
    let gap8 = (at(-0.5 - e).c8.unwrap() - at(-0.5 + e).c8.unwrap()).abs();
    let gap12 = (at(-0.5 - e).c12.unwrap() - at(-0.5 + e).c12.unwrap()).abs();
    let gap = gap4.max(gap8).max(gap12);
    ensure(gap <= 1e-9, format!("branch gap {gap:e}"))?;
    Ok(format!("worst relative error {worst:.1e}, branch gap {gap:.1e}"))
}

// 2

fn criterion_2() -> Check {
    let mut worst_dual: f64 = 0.0;
    for x0 in log_sweep(-4.0, -0.05, 40) {
        let r = verify_h_profile(x0, 100_000).map_err(|e| e.to_string())?;
        ensure(r.passed, format!("lemma4.5 at x0={x0}: {}", r.notes))?;
        let gap = n_dual_gap(x0);
        worst_dual = worst_dual.max(gap);
        ensure(gap <= 1e-10, format!("N dual forms differ by {gap:e} at x0={x0}"))?;
        if !Regime::of(x0).first_family() {
            let xb = find_inflection(x0).map_err(|e| e.to_string())?;
            let xp = x0 + (x0 * x0 - 3.0 / 16.0).sqrt();
            ensure(x0 < xb && xb < xp, format!("inflection {xb} outside (x0, x_+) at x0={x0}"))?;
        }
    }
    Ok(format!("40 values of x0 at grid 1e5, N dual gap {worst_dual:.1e}"))
}

// 3

fn criterion_3() -> Check {
    let mut worst = f64::INFINITY;
    for x0 in log_sweep(-4.0, -0.05, 40) {
        for r in [verify_g1_bounds(x0, 100_000), verify_g2_bounds(x0, 100_000)] {
            let r = r.map_err(|e| e.to_string())?;
            worst = worst.min(r.worst_margin);
            ensure(r.passed && r.worst_margin >= -1e-10, format!("{} at x0={x0}: {}", r.claim_id, r.notes))?;
        }
    }
    let x3 = -((15.0 + 33f64.sqrt()) / 32.0).sqrt();
    let x4 = -((15.0 - 33f64.sqrt()) / 32.0).sqrt();
    let g = g1_gaps(-1.0 / 5f64.sqrt(), 100_000).map_err(|e| e.to_string())?.lower_gap;
    ensure(g <= 1e-6, format!("G1 lower bound not sharp at -1/sqrt5: {g:e}"))?;
    let g4 = g2_gaps(x4, 100_000).map_err(|e| e.to_string())?.lower_gap;
    ensure(g4 <= 1e-6, format!("G2 lower bound not sharp at x4: {g4:e}"))?;
    let g3 = g2_gaps(x3, 100_000).map_err(|e| e.to_string())?.upper_gap;
    ensure(g3 <= 1e-6, format!("G2 upper bound not sharp at x3: {g3:e}"))?;
    Ok(format!("worst margin {worst:.1e}; sharpness gaps {g:.1e}, {g4:.1e}, {g3:.1e}"))
}

// 4, 5

fn criterion_4() -> Check {
    let mut worst = f64::INFINITY;
    for (i, x0) in [-0.3, -0.5, -1.0, -2.0].into_iter().enumerate() {
        let r = verify_integrands(x0, 1000, i as u64).map_err(|e| e.to_string())?;
        worst = worst.min(r.worst_margin);
        ensure(r.passed, format!("x0={x0}: {}", r.notes))?;
    }
    Ok(format!("1000 states per curve at 4 values of x0, margin {worst:.1e}"))
}

fn criterion_5() -> Check {
    let mut worst = f64::INFINITY;
    for (i, x0) in [-0.3, -0.5, -1.0].into_iter().enumerate() {
        let r = verify_trace_inequalities(x0, 1000, 100 + i as u64).map_err(|e| e.to_string())?;
        worst = worst.min(r.worst_margin);
        ensure(r.worst_margin >= -1e-10, format!("x0={x0}: {}", r.notes))?;
    }
    Ok(format!("1000 bundles at 3 values of x0, eps in {{0.5, 1, 2}}, margin {worst:.1e}"))
}

// 6

fn criterion_6() -> Check {
    for x0 in [-0.25, -0.5, -1.0, -2.0] {
        let d = TricomiDomain::new(x0).unwrap();
        let r = verify_star_shaped(&d, 200, 50).map_err(|e| e.to_string())?;
        ensure(r.passed, format!("x0={x0}: {}", r.notes))?;
        let n = verify_star_shaped_with(&d, 200, 50, StarTarget::ReflectedAboutA).map_err(|e| e.to_string())?;
        ensure(!n.passed, format!("negative control passed at x0={x0}"))?;
    }
    Ok("4 domains star-shaped, reflected controls fail".into())
}

// 7

fn manufactured(x0: f64) -> (impl Fn(Point<f64>) -> f64, impl Fn(Point<f64>) -> f64) {
    // w = phi_sigma phi_AC e^{3y} (1 + x); each factor as [value, d_x, d_xx, d_y, d_yy]
    let parts = move |p: Point<f64>| {
        let (x, y) = (p.x, p.y);
        let f = [9.0 * x0 * x0 - 9.0 * (x - x0).powi(2) - 4.0 * y.powi(3), -18.0 * (x - x0), -18.0, -12.0 * y * y, -24.0 * y];
        let g = [(x - 2.0 * x0).powi(2) + 4.0 / 9.0 * y.powi(3), 2.0 * (x - 2.0 * x0), 2.0, 4.0 / 3.0 * y * y, 8.0 / 3.0 * y];
        let e = (3.0 * y).exp();
        let h = [e * (1.0 + x), e, 0.0, 3.0 * e * (1.0 + x), 9.0 * e * (1.0 + x)];
        (f, g, h)
    };
    let w = move |p: Point<f64>| {
        let (f, g, h) = parts(p);
        f[0] * g[0] * h[0]
    };
    let tw = move |p: Point<f64>| {
        let (f, g, h) = parts(p);
        let second = |i: usize, j: usize| {
            f[j] * g[0] * h[0] + f[0] * g[j] * h[0] + f[0] * g[0] * h[j] + 2.0 * (f[i] * g[i] * h[0] + f[i] * g[0] * h[i] + f[0] * g[i] * h[i])
        };
        -p.y * second(1, 2) - second(3, 4)
    };
    (w, tw)
}

fn criterion_7() -> Check {
    let x0 = -0.5;
    let (w, tw) = manufactured(x0);
    let err = |m: usize| {
        let op = assemble(Grid::new(x0, MeshSpec::square(m)).unwrap()).unwrap();
        let aw = op.apply_a_with_boundary(&w);
        let bf = op.apply_b_with_boundary(&tw);
        (0..op.n()).filter(|&r| op.regular[r]).map(|r| (aw[r] - bf[r]).abs()).fold(0.0, f64::max)
    };
    let e: Vec<f64> = [64, 128, 256].iter().map(|&m| err(m)).collect();
    let orders = [(e[0] / e[1]).log2(), (e[1] / e[2]).log2()];
    ensure(orders.iter().all(|&o| o >= 1.8), format!("manufactured orders {orders:?}"))?;
    let mut lambdas = Vec::new();
    let mut worst_res: f64 = 0.0;
    for m in [64, 128] {
        let t = Instant::now();
        let (_, s) = solve_mesh(x0, MeshSpec::square(m), &SolveOptions::with_count(4)).map_err(|e| e.to_string())?;
        let p = s.real.first().ok_or(format!("no real eigenvalue at {m}"))?;
        ensure(p.lambda > 0.0, format!("lambda0 = {} at {m}", p.lambda))?;
        let max = p.u.iter().cloned().fold(f64::MIN, f64::max);
        let min = p.u.iter().cloned().fold(f64::MAX, f64::min);
        ensure(min >= -1e-6 * max, format!("min/max = {min}/{max} at {m}"))?;
        for q in &s.real {
            worst_res = worst_res.max(q.residual);
            ensure(q.residual <= 1e-8, format!("residual {} at {m}", q.residual))?;
        }
        ensure(m != 128 || t.elapsed().as_secs_f64() < 120.0, "solve at 128 cells over 120 s")?;
        lambdas.push(p.lambda);
    }
    Ok(format!(
        "orders {:.2}, {:.2}; lambda0 = {:.6} (64), {:.6} (128); max residual {worst_res:.1e}",
        orders[0], orders[1], lambdas[0], lambdas[1]
    ))
}

// 8

fn criterion_8() -> Check {
    let x0 = -0.5;
    let ledger = ConstantLedger::new(x0).unwrap();
    let mut res = Vec::new();
    let mut bound = None;
    for m in [64, 128] {
        let (op, s) = solve_mesh(x0, MeshSpec::square(m), &SolveOptions::with_count(1)).map_err(|e| e.to_string())?;
        let p = s.real.first().ok_or(format!("no real eigenvalue at {m}"))?;
        res.push(pohozaev_residual(p, &op.grid).map_err(|e| e.to_string())?.relative_residual);
        if m == 128 {
            bound = Some(bound_check(p.lambda, p.l2_norm, &p.trace_norms, &ledger, BOUND_TOL).map_err(|e| e.to_string())?);
        }
    }
    ensure(res[1] < res[0], format!("Pohozaev residual {res:?} does not decrease"))?;
    let b = bound.unwrap();
    ensure(b.satisfied, format!("bound {} > {}", b.lhs, b.rhs))?;
    Ok(format!("residual {:.3e} -> {:.3e}; bound {:.4} <= {:.4} at 128", res[0], res[1], b.lhs, b.rhs))
}

// 9

fn run_cli(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_tricomi")).args(args).env_remove("TRICOMI_LOG").output().expect("run tricomi");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn criterion_9() -> Check {
    let golden: [&[&str]; 7] = [
        &["constants", "--x0", "-0.5", "--format", "json"],
        &["constants", "--x0-range", "-4:-0.05:40", "--format", "csv"],
        &["verify", "cor4.6", "--x0", "-0.4472135955", "--grid", "100000"],
        &["verify", "lemma4.5", "--x0-range", "-4:-0.05:8", "--format", "csv"],
        &["verify", "integrands", "--x0", "-0.5", "--count", "200"],
        &["eigen", "--x0", "-0.5", "--grid", "48"],
        &["plot", "h", "--x0", "-0.3"],
    ];
    for args in golden {
        let (a, ca) = run_cli(args);
        let (b, cb) = run_cli(args);
        ensure(!a.is_empty(), format!("no output from {args:?}"))?;
        ensure(a == b && ca == cb, format!("outputs differ for {args:?}"))?;
        ensure(ca == 0, format!("exit {ca} for {args:?}"))?;
    }
    let (out, code) = run_cli(&["verify", "starshape", "--x0", "-0.5"]);
    let text = String::from_utf8_lossy(&out);
    ensure(code == 0 && text.contains("\"passed\":true") && !text.contains("\"passed\":false"), "passing verify run")?;
    let (out, code) = run_cli(&["verify", "starshape", "--x0", "-0.5", "--negative-control"]);
    ensure(code == 1 && String::from_utf8_lossy(&out).contains("\"passed\":false"), format!("negative control exit {code}"))?;
    let (_, code) = run_cli(&["constants", "--x0", "0.5"]);
    ensure(code == 2, format!("parse error exit {code}"))?;
    Ok("7 golden commands byte-identical; exit codes 0 / 1 / 2".into())
}

fn main() {
    // runtime budgets in seconds
    let criteria: [(&str, fn() -> Check, f64); 9] = [
        ("constant ledger exactness", criterion_1, 1.0),
        ("h profile suite", criterion_2, 30.0),
        ("G1/G2 bound suite", criterion_3, 30.0),
        ("integrand equivalence", criterion_4, 1.0),
        ("trace inequality suite", criterion_5, 10.0),
        ("star-shapedness", criterion_6, 5.0),
        ("eigensolver consistency", criterion_7, 120.0),
        ("Pohozaev identity and bound", criterion_8, 180.0),
        ("CLI determinism", criterion_9, f64::INFINITY),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let mut r = f();
        let secs = t.elapsed().as_secs_f64();
        if r.is_ok() && secs > *budget {
            r = Err(format!("runtime {secs:.2} s over the {budget} s budget"));
        }
        match r {
            Ok(msg) => println!("criterion {} ({name}): PASS [{secs:.2} s] {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.2} s] {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
