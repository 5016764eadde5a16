//! Grid functions: interpolation, area integrals, boundary traces and export.
//!
//! The interpolant is bilinear on Cartesian cells above `y = 0` and bilinear
//! in the characteristic indices below, linear on the half cells along the
//! parabolic segment. Lattice values on AC and sigma, and missing Cartesian
//! corners outside the domain, are 0.

use std::collections::HashMap;
use std::io::{self, Write};

use super::assemble::dense_solve;
use super::grid::Grid;
use crate::constants::BoundaryNormBundle;
use crate::error::{Error, Result};
use crate::geometry::{CurveKind, Point};
use crate::pohozaev::{norm_bundle, BoundaryTrace};
use crate::quadrature::{bc_rule, gauss_legendre, sigma_rule};

/// Quadrature resolution of the boundary traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRules {
    pub bc_panels: usize,
    pub sigma_panels: usize,
    pub order: usize,
}

impl Default for TraceRules {
    fn default() -> Self {
        TraceRules { bc_panels: 200, sigma_panels: 400, order: 8 }
    }
}

fn ue(grid: &Grid, u: &[f64], i: usize, j: usize) -> f64 {
    let idx = if j == 0 { grid.ab(i) } else { grid.ell(i, j) };
    idx.map_or(0.0, |r| u[r])
}

fn uh(grid: &Grid, u: &[f64], a: usize, b: usize) -> f64 {
    if b == 0 || b > a || a > grid.m {
        return 0.0;
    }
    let idx = if a == b { grid.ab(a) } else { grid.hyp(a, b) };
    idx.map_or(0.0, |r| u[r])
}

/// Interpolated value at `p`, or `None` outside the closed domain.
pub fn value_at(grid: &Grid, u: &[f64], p: Point<f64>) -> Option<f64> {
    if !grid.domain.contains(p) {
        return None;
    }
    let x0 = grid.x0();
    let k = grid.k;
    let m = grid.m;
    if p.y >= 0.0 {
        let fx = ((p.x - 2.0 * x0) / k).clamp(0.0, m as f64);
        let fy = (p.y / grid.dy).clamp(0.0, grid.jmax as f64);
        let i = (fx.floor() as usize).min(m - 1);
        let j = (fy.floor() as usize).min(grid.jmax - 1);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        Some(
            ue(grid, u, i, j) * (1.0 - tx) * (1.0 - ty)
                + ue(grid, u, i + 1, j) * tx * (1.0 - ty)
                + ue(grid, u, i, j + 1) * (1.0 - tx) * ty
                + ue(grid, u, i + 1, j + 1) * tx * ty,
        )
    } else {
        let s = (2.0 / 3.0) * (-p.y).powf(1.5);
        let al = ((p.x + s - 2.0 * x0) / k).clamp(0.0, m as f64);
        let be = ((p.x - s - 2.0 * x0) / k).clamp(0.0, al);
        Some(char_interp(grid, u, al, be))
    }
}

/// Interpolant at fractional characteristic indices `0 <= be <= al <= M`.
fn char_interp(grid: &Grid, u: &[f64], al: f64, be: f64) -> f64 {
    let a = (al.ceil() as usize).clamp(1, grid.m);
    let b = (be.ceil() as usize).clamp(1, a);
    let tx = al - (a - 1) as f64;
    let ty = be - (b - 1) as f64;
    if a == b {
        let u00 = uh(grid, u, a - 1, a - 1);
        let u10 = uh(grid, u, a, a - 1);
        let u11 = uh(grid, u, a, a);
        u00 + tx * (u10 - u00) + ty * (u11 - u10)
    } else {
        uh(grid, u, a - 1, b - 1) * (1.0 - tx) * (1.0 - ty)
            + uh(grid, u, a, b - 1) * tx * (1.0 - ty)
            + uh(grid, u, a - 1, b) * (1.0 - tx) * ty
            + uh(grid, u, a, b) * tx * ty
    }
}

/// Composite Gauss over `[lo, hi]` split at the sorted `breaks`.
fn gauss_between(lo: f64, hi: f64, breaks: &mut Vec<f64>, gx: &[f64], gw: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
    breaks.retain(|&b| b > lo && b < hi);
    breaks.push(lo);
    breaks.push(hi);
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut sum = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= 0.0 {
            continue;
        }
        for (x, wt) in gx.iter().zip(gw) {
            sum += 0.5 * (b - a) * wt * f(0.5 * (a + b) + 0.5 * (b - a) * x);
        }
    }
    sum
}

/// `int_Omega f(p, u(p)) dA` for the interpolant of `u`, exact up to the
/// Gauss order on every piece where the interpolant is polynomial.
pub fn area_integral(grid: &Grid, u: &[f64], f: impl Fn(Point<f64>, f64) -> f64) -> f64 {
    let x0 = grid.x0();
    let k = grid.k;
    let m = grid.m;
    let (gx, gw) = gauss_legendre(4);
    let mut total = 0.0;
    let mut breaks = Vec::new();

    // elliptic part, row by row in y
    let ymax = grid.domain.y_max();
    for j in 0..grid.jmax {
        let y0 = j as f64 * grid.dy;
        let y1 = ((j + 1) as f64 * grid.dy).min(ymax);
        if y1 <= y0 {
            break;
        }
        for (ty, wy) in gx.iter().zip(&gw) {
            let y = 0.5 * (y0 + y1) + 0.5 * (y1 - y0) * ty;
            let half = (x0 * x0 - 4.0 * y * y * y / 9.0).max(0.0).sqrt();
            let (xl, xr) = (x0 - half, x0 + half);
            breaks.clear();
            breaks.extend((1..m).map(|i| 2.0 * x0 + i as f64 * k));
            let fy = y / grid.dy;
            let jj = (fy.floor() as usize).min(grid.jmax - 1);
            let tyy = fy - jj as f64;
            let row = gauss_between(xl, xr, &mut breaks, &gx, &gw, |x| {
                let fx = ((x - 2.0 * x0) / k).clamp(0.0, m as f64);
                let i = (fx.floor() as usize).min(m - 1);
                let tx = fx - i as f64;
                let v = ue(grid, u, i, jj) * (1.0 - tx) * (1.0 - tyy)
                    + ue(grid, u, i + 1, jj) * tx * (1.0 - tyy)
                    + ue(grid, u, i, jj + 1) * (1.0 - tx) * tyy
                    + ue(grid, u, i + 1, jj + 1) * tx * tyy;
                f(Point::new(x, y), v)
            });
            total += 0.5 * (y1 - y0) * wy * row;
        }
    }

    // hyperbolic part in (d, m) = (alpha - beta, alpha + beta); d fixes y,
    // dA = |dy/ds| (k/2) (k/2) dd dm with |dy/ds| = |y|^{-1/2}
    for n in 0..m {
        for (td, wd) in gx.iter().zip(&gw) {
            let tau = 0.5 + 0.5 * td;
            // d = n + tau^3 on the first strip removes the |y|^{-1/2} singularity
            let (d, jac) = if n == 0 { (tau * tau * tau, 3.0 * tau * tau * 0.5) } else { (n as f64 + tau, 0.5) };
            let s = d * k / 2.0;
            let y = Grid::y_of_s(s);
            let dyds = 1.0 / (-y).sqrt();
            breaks.clear();
            for i in 0..=2 * m {
                breaks.push(i as f64 - d);
                breaks.push(i as f64 + d);
            }
            let line = gauss_between(d, 2.0 * m as f64 - d, &mut breaks, &gx, &gw, |mm| {
                let al = 0.5 * (mm + d);
                let be = 0.5 * (mm - d);
                let x = 2.0 * x0 + mm * k / 2.0;
                f(Point::new(x, y), char_interp(grid, u, al, be))
            });
            total += wd * jac * dyds * (k / 2.0) * (k / 2.0) * line;
        }
    }
    total
}

pub fn l2_norm_sq(grid: &Grid, u: &[f64]) -> f64 {
    area_integral(grid, u, |_, v| v * v)
}

/// Nodes plus samples of the boundary data on AC and sigma, bucketed for
/// radius queries.
pub struct FieldSampler {
    pts: Vec<Point<f64>>,
    vals: Vec<f64>,
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
    radius: f64,
}

impl FieldSampler {
    /// Sampler for a field vanishing on AC and sigma.
    pub fn new(grid: &Grid, u: &[f64]) -> Self {
        Self::with_boundary(grid, u, |_| 0.0)
    }

    /// Sampler for a field with boundary values `data` on AC and sigma.
    pub fn with_boundary(grid: &Grid, u: &[f64], data: impl Fn(Point<f64>) -> f64) -> Self {
        let mut pts: Vec<Point<f64>> = grid.nodes.iter().map(|n| n.p).collect();
        let mut vals = u.to_vec();
        let d = &grid.domain;
        let h = grid.k.min(grid.dy) / 2.0;
        let ns = (2.0 * d.x0.abs() / h).ceil() as usize;
        for i in 0..=ns {
            let x = 2.0 * d.x0 * i as f64 / ns as f64;
            let p = Point::new(x, d.g_clamped(x));
            pts.push(p);
            vals.push(data(p));
        }
        let ac = d.boundary_curve(CurveKind::AC);
        let na = (d.y_c.abs() / h).ceil() as usize;
        for i in 0..=na {
            let p = ac.position(ac.range.1 * i as f64 / na as f64);
            pts.push(p);
            vals.push(data(p));
        }
        let radius = 3.0 * grid.k.max(grid.dy);
        let cell = radius;
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in pts.iter().enumerate() {
            buckets.entry(((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)).or_default().push(i);
        }
        FieldSampler { pts, vals, cell, buckets, radius }
    }

    fn near(&self, p: Point<f64>, r: f64, out: &mut Vec<usize>) {
        out.clear();
        let reach = (r / self.cell).ceil() as i64;
        let (cx, cy) = ((p.x / self.cell).floor() as i64, (p.y / self.cell).floor() as i64);
        for bx in cx - reach..=cx + reach {
            for by in cy - reach..=cy + reach {
                if let Some(v) = self.buckets.get(&(bx, by)) {
                    for &i in v {
                        let q = self.pts[i];
                        if (q.x - p.x).hypot(q.y - p.y) <= r {
                            out.push(i);
                        }
                    }
                }
            }
        }
    }

    /// Value and gradient at `p` from a Gaussian-weighted quadratic fit.
    pub fn fit(&self, p: Point<f64>) -> (f64, f64, f64) {
        let mut idx = Vec::new();
        let mut r = self.radius;
        for _ in 0..6 {
            self.near(p, r, &mut idx);
            if idx.len() >= 6 {
                if let Some(c) = self.solve_fit(p, r, &idx) {
                    return (c[0], c[1] / r, c[2] / r);
                }
            }
            r *= 1.5;
        }
        (0.0, 0.0, 0.0)
    }

    fn solve_fit(&self, p: Point<f64>, r: f64, idx: &[usize]) -> Option<Vec<f64>> {
        let mut ata = vec![0.0; 36];
        let mut atb = vec![0.0; 6];
        for &i in idx {
            let dx = (self.pts[i].x - p.x) / r;
            let dy = (self.pts[i].y - p.y) / r;
            let w = (-(dx * dx + dy * dy)).exp();
            let row = [1.0, dx, dy, dx * dx, dx * dy, dy * dy];
            for a in 0..6 {
                atb[a] += w * row[a] * self.vals[i];
                for b in 0..6 {
                    ata[a * 6 + b] += w * row[a] * row[b];
                }
            }
        }
        let diag_max = (0..6).map(|a| ata[a * 7]).fold(0.0, f64::max);
        let mut m = ata.clone();
        let mut sol = atb;
        dense_solve(&mut m, &mut sol, 6).ok()?;
        // reject nearly rank-deficient clouds
        let mut probe = ata;
        let mut e = vec![0.0; 6];
        e[0] = 1.0;
        dense_solve(&mut probe, &mut e, 6).ok()?;
        let inv_norm = e.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if !(inv_norm.is_finite() && inv_norm * diag_max < 1e10) || sol.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some(sol)
    }
}

/// Traces on BC and sigma of a field vanishing on AC and sigma.
pub fn traces(grid: &Grid, u: &[f64], rules: TraceRules) -> Result<(BoundaryTrace<f64>, BoundaryTrace<f64>)> {
    traces_with_boundary(grid, u, rules, |_| 0.0)
}

pub fn traces_with_boundary(
    grid: &Grid,
    u: &[f64],
    rules: TraceRules,
    data: impl Fn(Point<f64>) -> f64,
) -> Result<(BoundaryTrace<f64>, BoundaryTrace<f64>)> {
    if u.len() != grid.len() {
        return Err(Error::Contract(format!("field has {} values for {} nodes", u.len(), grid.len())));
    }
    let sampler = FieldSampler::with_boundary(grid, u, data);
    let d = &grid.domain;
    let bc = BoundaryTrace::from_rule(d.boundary_curve(CurveKind::BC), &bc_rule(d, rules.bc_panels, rules.order), |p| sampler.fit(p));
    let sg = BoundaryTrace::from_rule(
        d.boundary_curve(CurveKind::Sigma),
        &sigma_rule(d, rules.sigma_panels, rules.order),
        |p| sampler.fit(p),
    );
    Ok((bc, sg))
}

pub fn trace_norms(grid: &Grid, u: &[f64]) -> Result<BoundaryNormBundle> {
    let (bc, sg) = traces(grid, u, TraceRules::default())?;
    norm_bundle(&bc, &sg)
}

/// Pixel-centre raster of the interpolant over the grid's bounding box,
/// row 0 at the bottom; NaN outside the domain.
pub fn raster(grid: &Grid, u: &[f64], nx: usize, ny: usize) -> Vec<f64> {
    let (x_lo, x_hi, y_lo, y_hi) = grid.bbox();
    let mut out = Vec::with_capacity(nx * ny);
    for r in 0..ny {
        let y = y_lo + (r as f64 + 0.5) * (y_hi - y_lo) / ny as f64;
        for c in 0..nx {
            let x = x_lo + (c as f64 + 0.5) * (x_hi - x_lo) / nx as f64;
            out.push(value_at(grid, u, Point::new(x, y)).unwrap_or(f64::NAN));
        }
    }
    out
}

/// Flat little-endian file: `nx`, `ny`, `x_lo`, `x_hi`, `y_lo`, `y_hi` and the
/// raster, all as 8-byte floats.
pub fn write_binary(w: &mut impl Write, grid: &Grid, u: &[f64], nx: usize, ny: usize) -> io::Result<()> {
    let (x_lo, x_hi, y_lo, y_hi) = grid.bbox();
    for v in [nx as f64, ny as f64, x_lo, x_hi, y_lo, y_hi] {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in raster(grid, u, nx, ny) {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_csv(w: &mut impl Write, grid: &Grid, u: &[f64]) -> io::Result<()> {
    writeln!(w, "x,y,u")?;
    for (n, v) in grid.nodes.iter().zip(u) {
        writeln!(w, "{:.16e},{:.16e},{:.16e}", n.p.x, n.p.y, v)?;
    }
    Ok(())
}
