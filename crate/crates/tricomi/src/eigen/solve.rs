//! Shift-invert Arnoldi for the pencil `(A, B)` with a sparse LU of `A - sigma B`.

use faer::complex_native::c64;
use faer::prelude::*;
use faer::sparse::SparseColMat;

use super::assemble::Operator;
use super::field;
use crate::constants::BoundaryNormBundle;
use crate::error::{Error, Result};

pub const DEFAULT_SHIFT: f64 = 1e-3;
/// Relative imaginary part above which an eigenvalue counts as complex.
pub const IMAG_TOL: f64 = 1e-8;
pub const RESIDUAL_TARGET: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub count: usize,
    pub shift: f64,
    pub max_restarts: usize,
    /// Relative Ritz residual accepted by the Arnoldi stage.
    pub ritz_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { count: 4, shift: DEFAULT_SHIFT, max_restarts: 60, ritz_tol: 1e-10 }
    }
}

impl SolveOptions {
    pub fn with_count(count: usize) -> Self {
        SolveOptions { count, ..Self::default() }
    }

    fn krylov_dim(&self) -> usize {
        (4 * self.count + 20).max(40)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    pub imag: f64,
    /// Nodal values, ordered as the grid nodes.
    pub u: Vec<f64>,
    /// `|A u - lambda B u|_2 / |u|_2`.
    pub residual: f64,
    pub trace_norms: BoundaryNormBundle,
    /// `|u|_{L^2(Omega)}` after normalization.
    pub l2_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveDiagnostics {
    pub unknowns: usize,
    pub shift: f64,
    pub krylov_dim: usize,
    pub restarts: usize,
    pub arnoldi_converged: bool,
    /// Every extracted approximation `(re, im)`, ordered by modulus.
    pub ritz: Vec<(f64, f64)>,
    /// `(lambda_1 - lambda_0) / lambda_0` for the two smallest real eigenvalues.
    pub principal_gap: Option<f64>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Real eigenpairs in increasing order of `|lambda|`.
    pub real: Vec<EigenPair>,
    /// Eigenvalues with a non-negligible imaginary part, `(re, im)`.
    pub complex: Vec<(f64, f64)>,
    pub diagnostics: SolveDiagnostics,
}

struct ShiftedLu {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    n: usize,
}

impl ShiftedLu {
    fn new(op: &Operator, shift: f64) -> Result<Self> {
        let n = op.n();
        let mut trip = op.a.triplets();
        for (r, c, v) in op.b.triplets() {
            trip.push((r, c, -shift * v));
        }
        let m = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip)
            .map_err(|e| Error::Numerical(format!("sparse assembly failed: {e:?}")))?;
        let lu = m.sp_lu().map_err(|e| {
            Error::Numerical(format!("LU of A - {shift} B failed ({e:?}); try a finer grid or a different shift"))
        })?;
        Ok(ShiftedLu { lu, n })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut m = Mat::<f64>::from_fn(self.n, 1, |i, _| rhs[i]);
        self.lu.solve_in_place(m.as_mut());
        (0..self.n).map(|i| m.read(i, 0)).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: &mut [f64], s: f64) {
    a.iter_mut().for_each(|v| *v *= s);
}

struct Ritz {
    theta: c64,
    /// Real and imaginary parts of the Ritz vector.
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Arnoldi for `(A - sigma B)^{-1} B` with explicit restarts.
fn arnoldi(op: &Operator, lu: &ShiftedLu, opts: &SolveOptions, diag: &mut SolveDiagnostics) -> Vec<Ritz> {
    let n = op.n();
    let m = opts.krylov_dim().min(n);
    let want = opts.count.min(m.saturating_sub(2)).max(1);
    diag.krylov_dim = m;
    let mut start = vec![1.0; n];
    let mut result = Vec::new();
    for restart in 0..=opts.max_restarts {
        diag.restarts = restart;
        let s = 1.0 / norm(&start);
        scale(&mut start, s);
        let mut v: Vec<Vec<f64>> = vec![start.clone()];
        let mut h = vec![vec![0.0; m]; m + 1];
        let mut dim = m;
        let mut beta = 0.0;
        for j in 0..m {
            let mut w = lu.solve(&op.b.mul(&v[j]));
            for _pass in 0..2 {
                for (i, vi) in v.iter().enumerate() {
                    let c = dot(vi, &w);
                    h[i][j] += c;
                    w.iter_mut().zip(vi).for_each(|(wk, vk)| *wk -= c * vk);
                }
            }
            beta = norm(&w);
            h[j + 1][j] = beta;
            let hn: f64 = (0..=j).map(|i| h[i][j] * h[i][j]).sum::<f64>().sqrt();
            if beta <= 1e-14 * hn {
                dim = j + 1;
                beta = 0.0;
                break;
            }
            if j + 1 < m {
                scale(&mut w, 1.0 / beta);
                v.push(w);
            }
        }
        let hm = Mat::<f64>::from_fn(dim, dim, |i, j| h[i][j]);
        let ev = hm.eigendecomposition::<c64>();
        let s = ev.s();
        let uvec = ev.u();
        let mut order: Vec<usize> = (0..dim).collect();
        let thetas: Vec<c64> = (0..dim).map(|i| s.column_vector().read(i)).collect();
        order.sort_by(|&a, &b| thetas[b].abs().partial_cmp(&thetas[a].abs()).unwrap());
        let mut take = want.min(dim);
        // keep conjugate pairs together
        if take < dim && thetas[order[take - 1]].im.abs() > 0.0 {
            let t = thetas[order[take - 1]];
            if (thetas[order[take]].re - t.re).abs() <= 1e-12 * t.abs() && (thetas[order[take]].im + t.im).abs() <= 1e-12 * t.abs() {
                take += 1;
            }
        }
        let mut converged = true;
        result.clear();
        for &i in &order[..take] {
            let th = thetas[i];
            let ynorm: f64 = (0..dim).map(|r| uvec.read(r, i).abs().powi(2)).sum::<f64>().sqrt();
            let est = beta * uvec.read(dim - 1, i).abs() / ynorm;
            if est > opts.ritz_tol * th.abs() {
                converged = false;
            }
            let mut re = vec![0.0; n];
            let mut im = vec![0.0; n];
            for (r, vr) in v.iter().take(dim).enumerate() {
                let c = uvec.read(r, i);
                for k in 0..n {
                    re[k] += c.re * vr[k];
                    im[k] += c.im * vr[k];
                }
            }
            result.push(Ritz { theta: th, re, im });
        }
        diag.arnoldi_converged = converged;
        if converged || restart == opts.max_restarts {
            break;
        }
        start = vec![0.0; n];
        for r in &result {
            let nr = (norm(&r.re).powi(2) + norm(&r.im).powi(2)).sqrt().max(f64::MIN_POSITIVE);
            for k in 0..n {
                start[k] += (r.re[k] + r.im[k]) / nr;
            }
        }
    }
    result
}

fn pencil_residual(op: &Operator, x: &[f64], lambda: f64) -> f64 {
    let ax = op.a.mul(x);
    let bx = op.b.mul(x);
    let r: Vec<f64> = ax.iter().zip(&bx).map(|(a, b)| a - lambda * b).collect();
    norm(&r) / norm(x)
}

/// Inverse iteration with a factorization shifted next to `lambda`.
fn refine(op: &Operator, mut x: Vec<f64>, lambda: f64) -> Result<(f64, Vec<f64>, f64)> {
    let quotient = |x: &[f64]| {
        let ax = op.a.mul(x);
        let bx = op.b.mul(x);
        dot(&bx, &ax) / dot(&bx, &bx)
    };
    let mut best_l = quotient(&x);
    let mut best_r = pencil_residual(op, &x, best_l);
    let mut best_x = x.clone();
    let mut lu = None;
    for rel in [1e-9, 1e-7, 1e-5] {
        let mu = lambda * (1.0 + rel) + rel;
        if let Ok(f) = ShiftedLu::new(op, mu) {
            lu = Some(f);
            break;
        }
    }
    let Some(lu) = lu else { return Ok((best_l, best_x, best_r)) };
    for _ in 0..8 {
        x = lu.solve(&op.b.mul(&x));
        let s = norm(&x);
        if !(s.is_finite() && s > 0.0) {
            break;
        }
        scale(&mut x, 1.0 / s);
        let l = quotient(&x);
        let r = pencil_residual(op, &x, l);
        if r < best_r {
            best_r = r;
            best_l = l;
            best_x.clone_from(&x);
        }
        if r < 1e-13 * op.a.norm_inf() {
            break;
        }
    }
    Ok((best_l, best_x, best_r))
}

/// Up to `count` eigenvalues of smallest modulus; real ones come back as
/// normalized eigenpairs with trace norms.
pub fn solve_real_spectrum(op: &Operator, opts: &SolveOptions) -> Result<Spectrum> {
    if opts.count == 0 {
        return Err(Error::Config("count must be at least 1".into()));
    }
    let mut diag = SolveDiagnostics { unknowns: op.n(), shift: opts.shift, ..Default::default() };
    let lu = ShiftedLu::new(op, opts.shift)?;
    let ritz = arnoldi(op, &lu, opts, &mut diag);
    let mut approx: Vec<(c64, Ritz)> = ritz
        .into_iter()
        .filter(|r| r.theta.abs() > 0.0)
        .map(|r| {
            let inv = c64::new(1.0, 0.0) / r.theta;
            (c64::new(opts.shift + inv.re, inv.im), r)
        })
        .collect();
    approx.sort_by(|a, b| a.0.abs().partial_cmp(&b.0.abs()).unwrap());
    approx.truncate(opts.count);
    diag.ritz = approx.iter().map(|(l, _)| (l.re, l.im)).collect();

    let mut real = Vec::new();
    let mut complex = Vec::new();
    for (lam, r) in approx {
        if lam.im.abs() > IMAG_TOL * lam.abs() {
            complex.push((lam.re, lam.im));
            continue;
        }
        let (l, mut u, res) = refine(op, r.re, lam.re)?;
        let l2 = field::l2_norm_sq(&op.grid, &u).sqrt();
        if !(l2 > 0.0) {
            continue;
        }
        let sign = if u.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        scale(&mut u, sign / l2);
        let trace_norms = field::trace_norms(&op.grid, &u)?;
        real.push(EigenPair { lambda: l, imag: 0.0, u, residual: res, trace_norms, l2_norm: 1.0 });
    }
    real.sort_by(|a, b| a.lambda.abs().partial_cmp(&b.lambda.abs()).unwrap());
    if real.len() >= 2 {
        diag.principal_gap = Some((real[1].lambda - real[0].lambda) / real[0].lambda);
    }
    if real.is_empty() {
        diag.message = Some(format!("no real eigenvalue among the {} of smallest modulus", opts.count));
    } else if !diag.arnoldi_converged {
        diag.message = Some("Arnoldi stage hit the restart limit; pairs refined by inverse iteration".into());
    }
    Ok(Spectrum { real, complex, diagnostics: diag })
}
