use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use log::{debug, info};
use rayon::prelude::*;

use tricomi::checks::{verify_integrands, verify_trace_inequalities};
use tricomi::eigen::field::{write_binary, write_csv};
use tricomi::eigen::{pohozaev_residual, solve_mesh, MeshSpec, SolveOptions};
use tricomi::geometry::{verify_star_shaped_with, StarTarget};
use tricomi::pohozaev::{bound_check, BOUND_TOL};
use tricomi::report::{fmt_csv, json_array, json_string, JsonObject};
use tricomi::verify::{log_sweep, verify_g1_bounds, verify_g2_bounds, verify_h_profile};
use tricomi::{BoundaryNormBundle, ConstantLedger, Error, TricomiDomain, VerificationReport};

use crate::{svg, Claim, Common, Format, PlotKind};

pub const RESIDUAL_TOL: f64 = 1e-8;
pub const NONNEG_TOL: f64 = 1e-6;

pub enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

pub struct Outcome {
    pub body: String,
    /// Identifiers of the checks that did not pass.
    pub failures: Vec<String>,
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::Singularity(_) => "singularity",
        Error::Contract(_) => "contract",
        Error::Config(_) => "config",
        Error::Numerical(_) => "numerical",
        Error::Logic(_) => "logic",
    }
}

pub fn diagnostic(kind: &str, message: &str, failures: &[String]) -> String {
    let items: Vec<String> = failures.iter().map(|f| json_string(f)).collect();
    let mut o = JsonObject::new();
    o.str("error", kind).str("message", message).raw("failures", &json_array(&items));
    o.finish()
}

fn x0_list(c: &Common) -> Vec<f64> {
    match (c.x0, c.x0_range) {
        (Some(x), _) => vec![x],
        (None, Some((a, b, n))) => log_sweep(a, b, n),
        (None, None) => vec![-0.5],
    }
}

fn single_x0(c: &Common, what: &str) -> Result<f64, Failure> {
    if c.x0_range.is_some() {
        return Err(Failure::Usage(format!("{what} takes a single --x0")));
    }
    Ok(c.x0.unwrap_or(-0.5))
}

fn data_format(c: &Common) -> Result<Format, Failure> {
    match c.format.unwrap_or(Format::Json) {
        Format::Svg => Err(Failure::Usage("svg output is only available from `plot`".into())),
        f => Ok(f),
    }
}

/// Maps `f` over `xs` on `jobs` threads, keeping the input order.
fn sweep<T: Send>(c: &Common, xs: &[f64], f: impl Fn(f64) -> tricomi::Result<T> + Sync + Send) -> Result<Vec<T>, Failure> {
    let jobs = c.jobs.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Run(Error::Config(format!("thread pool: {e}"))))?;
    info!("sweep over {} values of x0 on {jobs} threads", xs.len());
    let out: tricomi::Result<Vec<T>> = pool.install(|| xs.par_iter().map(|&x| f(x)).collect());
    Ok(out?)
}

fn lines(mut rows: Vec<String>) -> String {
    rows.push(String::new());
    rows.join("\n")
}

// constants

fn ledger_json(l: &ConstantLedger<f64>) -> tricomi::Result<String> {
    let d = TricomiDomain::new(l.x0)?;
    let mut o = JsonObject::new();
    o.str("regime", l.regime.label());
    for (name, v) in l.entries() {
        o.opt(name, v);
    }
    o.num("y_C", d.y_c).num("y_max", d.y_max()).num("h_x0", d.h(l.x0)?);
    Ok(o.finish())
}

pub fn constants(c: &Common) -> Result<Outcome, Failure> {
    let fmt = data_format(c)?;
    let xs = x0_list(c);
    let ledgers = sweep(c, &xs, ConstantLedger::<f64>::new)?;
    let body = match fmt {
        Format::Json => {
            let items = ledgers.iter().map(ledger_json).collect::<tricomi::Result<Vec<_>>>()?;
            if c.x0_range.is_none() {
                format!("{}\n", items[0])
            } else {
                format!("{}\n", json_array(&items))
            }
        }
        _ => {
            let names: Vec<&str> = ledgers[0].entries().iter().map(|e| e.0).collect();
            let mut rows = vec![format!("regime,{}", names.join(","))];
            for l in &ledgers {
                let vals: Vec<String> = l.entries().iter().map(|e| e.1.map(fmt_csv).unwrap_or_default()).collect();
                rows.push(format!("{},{}", l.regime.label(), vals.join(",")));
            }
            lines(rows)
        }
    };
    Ok(Outcome { body, failures: Vec::new() })
}

// verify

pub fn verify(claim: Claim, c: &Common, negative: bool, seed: u64) -> Result<Outcome, Failure> {
    let fmt = data_format(c)?;
    if negative && claim != Claim::Starshape {
        return Err(Failure::Usage("--negative-control is only defined for starshape".into()));
    }
    let xs = x0_list(c);
    let run = |x0: f64| -> tricomi::Result<Vec<VerificationReport>> {
        info!("verify {claim:?} at x0 = {x0}");
        Ok(match claim {
            Claim::Lemma45 => vec![verify_h_profile(x0, c.grid.unwrap_or(100_000))?],
            Claim::Cor46 => vec![verify_g1_bounds(x0, c.grid.unwrap_or(100_000))?],
            Claim::Cor48 => vec![verify_g2_bounds(x0, c.grid.unwrap_or(100_000))?],
            Claim::Starshape => {
                let target = if negative { StarTarget::ReflectedAboutA } else { StarTarget::Domain };
                let d = TricomiDomain::new(x0)?;
                vec![verify_star_shaped_with(&d, c.grid.unwrap_or(200), c.count.unwrap_or(50), target)?]
            }
            Claim::Integrands => vec![
                verify_integrands(x0, c.grid.unwrap_or(1000), seed)?,
                verify_trace_inequalities(x0, c.count.unwrap_or(1000), seed)?,
            ],
        })
    };
    let mut reports: Vec<VerificationReport> = sweep(c, &xs, run)?.into_iter().flatten().collect();
    if let Some(t) = c.tol {
        for r in &mut reports {
            r.passed = r.worst_margin >= -t;
        }
    }
    let failures = reports.iter().filter(|r| !r.passed).map(|r| format!("{}@x0={}", r.claim_id, r.x0)).collect();
    let body = match fmt {
        Format::Json => format!("{}\n", json_array(&reports.iter().map(|r| r.to_json()).collect::<Vec<_>>())),
        _ => {
            let mut rows = vec![VerificationReport::CSV_HEADER.to_string()];
            rows.extend(reports.iter().map(|r| r.to_csv_row()));
            lines(rows)
        }
    };
    Ok(Outcome { body, failures })
}

// eigen and bound

fn mesh(c: &Common, default: usize) -> MeshSpec {
    MeshSpec { nx: c.nx.or(c.grid).unwrap_or(default), ny: c.ny }
}

fn norms_json(n: &BoundaryNormBundle) -> String {
    let mut o = JsonObject::new();
    o.num("u_l2_bc", n.u_l2_bc)
        .num("w_ux_l2_bc", n.w_ux_l2_bc)
        .num("uy_l2_bc", n.uy_l2_bc)
        .num("w_ux_l2_sigma", n.w_ux_l2_sigma)
        .num("uy_l2_sigma", n.uy_l2_sigma);
    o.finish()
}

struct EigenRun {
    x0: f64,
    json: String,
    lambda0: Option<f64>,
    failures: Vec<String>,
}

fn eigen_one(x0: f64, c: &Common, export: Option<(&Path, usize)>) -> tricomi::Result<EigenRun> {
    let spec = mesh(c, 64);
    let opts = SolveOptions::with_count(c.count.unwrap_or(4));
    info!("eigen x0 = {x0}, {} cells", spec.nx);
    let (op, s) = solve_mesh(x0, spec, &opts)?;
    debug!("{:?}", s.diagnostics);
    let tol = c.tol.unwrap_or(RESIDUAL_TOL);
    let mut failures = Vec::new();
    let mut pairs = Vec::new();
    for (i, p) in s.real.iter().enumerate() {
        let max = p.u.iter().cloned().fold(f64::MIN, f64::max);
        let min = p.u.iter().cloned().fold(f64::MAX, f64::min);
        let mut o = JsonObject::new();
        o.num("lambda", p.lambda)
            .num("residual", p.residual)
            .num("l2_norm", p.l2_norm)
            .num("min", min)
            .num("max", max)
            .raw("trace_norms", &norms_json(&p.trace_norms));
        pairs.push(o.finish());
        if !(p.residual <= tol) {
            failures.push(format!("residual[{i}]@x0={x0}"));
        }
    }
    match s.real.first() {
        None => failures.push(format!("no_real_eigenvalue@x0={x0}")),
        Some(p) => {
            let max = p.u.iter().cloned().fold(f64::MIN, f64::max);
            let min = p.u.iter().cloned().fold(f64::MAX, f64::min);
            if !(p.lambda > 0.0) {
                failures.push(format!("lambda0_positive@x0={x0}"));
            }
            if !(min >= -NONNEG_TOL * max) {
                failures.push(format!("nonnegative@x0={x0}"));
            }
            if let Some((path, cols)) = export {
                write_field(path, &op.grid, &p.u, cols).map_err(|e| Error::Config(format!("export: {e}")))?;
            }
        }
    }
    let complex: Vec<String> = s.complex.iter().map(|&(re, im)| format!("[{},{}]", tricomi::report::fmt_num(re), tricomi::report::fmt_num(im))).collect();
    let d = &s.diagnostics;
    let mut diag = JsonObject::new();
    diag.int("unknowns", d.unknowns as i64)
        .num("shift", d.shift)
        .int("krylov_dim", d.krylov_dim as i64)
        .int("restarts", d.restarts as i64)
        .bool("arnoldi_converged", d.arnoldi_converged)
        .opt("principal_gap", d.principal_gap);
    match &d.message {
        Some(m) => diag.str("message", m),
        None => diag.raw("message", "null"),
    };
    let mut o = JsonObject::new();
    o.num("x0", x0)
        .int("nx", spec.nx as i64)
        .int("ny", op.grid.ny() as i64)
        .raw("pairs", &json_array(&pairs))
        .raw("complex", &json_array(&complex))
        .raw("diagnostics", &diag.finish())
        .bool("passed", failures.is_empty());
    Ok(EigenRun { x0, json: o.finish(), lambda0: s.real.first().map(|p| p.lambda), failures })
}

fn write_field(path: &Path, grid: &tricomi::eigen::Grid, u: &[f64], cols: usize) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    if path.extension().is_some_and(|e| e == "csv") {
        write_csv(&mut w, grid, u)
    } else {
        let (x_lo, x_hi, y_lo, y_hi) = grid.bbox();
        let rows = ((cols as f64) * (y_hi - y_lo) / (x_hi - x_lo)).round().max(1.0) as usize;
        write_binary(&mut w, grid, u, cols.max(1), rows)
    }
}

pub fn eigen(c: &Common, export: Option<&Path>, raster: usize) -> Result<Outcome, Failure> {
    if data_format(c)? == Format::Csv {
        return Err(Failure::Usage("eigen reports are JSON; use --export for CSV fields".into()));
    }
    if export.is_some() && c.x0_range.is_some() {
        return Err(Failure::Usage("--export needs a single --x0".into()));
    }
    let xs = x0_list(c);
    let runs = sweep(c, &xs, |x0| eigen_one(x0, c, export.map(|p| (p, raster))))?;
    let failures: Vec<String> = runs.iter().flat_map(|r| r.failures.clone()).collect();
    let body = if c.x0_range.is_none() {
        format!("{}\n", runs[0].json)
    } else {
        // diagnostic only: no claim says how lambda0 depends on |x0|
        let mut by_size: Vec<(f64, f64)> = runs.iter().filter_map(|r| r.lambda0.map(|l| (r.x0.abs(), l))).collect();
        by_size.sort_by(|a, b| a.0.total_cmp(&b.0));
        let monotone = by_size.windows(2).all(|w| w[1].1 <= w[0].1);
        let mut o = JsonObject::new();
        o.raw("runs", &json_array(&runs.iter().map(|r| r.json.clone()).collect::<Vec<_>>()))
            .bool("lambda0_decreasing_in_abs_x0", monotone)
            .bool("passed", failures.is_empty());
        format!("{}\n", o.finish())
    };
    Ok(Outcome { body, failures })
}

fn bound_one(x0: f64, c: &Common) -> tricomi::Result<(String, bool)> {
    let spec = mesh(c, 128);
    info!("bound x0 = {x0}, {} cells", spec.nx);
    let (op, s) = solve_mesh(x0, spec, &SolveOptions::with_count(1))?;
    let Some(p) = s.real.first() else {
        return Err(Error::Numerical(format!("no real eigenvalue at x0 = {x0}; try a finer grid")));
    };
    let ledger = ConstantLedger::new(x0)?;
    let pz = pohozaev_residual(p, &op.grid)?;
    let b = bound_check(p.lambda, p.l2_norm, &p.trace_norms, &ledger, c.tol.unwrap_or(BOUND_TOL))?;
    let mut poh = JsonObject::new();
    poh.num("lhs", pz.lhs)
        .num("rhs_bc_omega1", pz.rhs_bc_omega1)
        .num("rhs_bc_omega2", pz.rhs_bc_omega2)
        .num("rhs_sigma", pz.rhs_sigma)
        .num("relative_residual", pz.relative_residual);
    let mut bo = JsonObject::new();
    bo.num("lhs", b.lhs).num("rhs", b.rhs).num("eps1", b.eps1).num("eps2", b.eps2).num("tol", b.tol).bool("satisfied", b.satisfied);
    let mut o = JsonObject::new();
    o.num("x0", x0)
        .int("nx", spec.nx as i64)
        .num("lambda", p.lambda)
        .num("residual", p.residual)
        .raw("pohozaev", &poh.finish())
        .raw("norms", &norms_json(&p.trace_norms))
        .raw("bound", &bo.finish())
        .str("label", "numerical evidence")
        .bool("passed", b.satisfied);
    Ok((o.finish(), b.satisfied))
}

pub fn bound(c: &Common) -> Result<Outcome, Failure> {
    if data_format(c)? == Format::Csv {
        return Err(Failure::Usage("bound reports are JSON".into()));
    }
    let xs = x0_list(c);
    let runs = sweep(c, &xs, |x0| bound_one(x0, c))?;
    let failures = xs.iter().zip(&runs).filter(|(_, r)| !r.1).map(|(x, _)| format!("bound@x0={x}")).collect();
    let items: Vec<String> = runs.into_iter().map(|r| r.0).collect();
    let body = if c.x0_range.is_none() { format!("{}\n", items[0]) } else { format!("{}\n", json_array(&items)) };
    Ok(Outcome { body, failures })
}

// plot

pub fn plot(what: PlotKind, c: &Common) -> Result<Outcome, Failure> {
    if !matches!(c.format, None | Some(Format::Svg)) {
        return Err(Failure::Usage("plot writes SVG only".into()));
    }
    let x0 = single_x0(c, "plot")?;
    let d = TricomiDomain::new(x0)?;
    let body = match what {
        PlotKind::H => svg::h_profile(&d),
        PlotKind::Domain => svg::domain(&d),
        PlotKind::Eigen => {
            let (op, s) = solve_mesh(x0, mesh(c, 64), &SolveOptions::with_count(1))?;
            let Some(p) = s.real.first() else {
                return Err(Failure::Run(Error::Numerical(format!("no real eigenvalue at x0 = {x0}"))));
            };
            svg::eigen(&d, &op.grid, &p.u, p.lambda)
        }
    };
    Ok(Outcome { body, failures: Vec::new() })
}
