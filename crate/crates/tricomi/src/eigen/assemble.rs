//! Discretization of `T = -y d_xx - d_yy` as a pencil `A u = lambda B u`.
//!
//! * Elliptic nodes: Shortley–Weller five-point stencil, `B = I`.
//! * Parabolic nodes: `-u_yy` on the vertical line through the node from one
//!   point below and three above, exact for quartics; `B = I`.
//! * Hyperbolic node `(a, b)`: collocated at the centre of the cell
//!   `[a-1, a] x [b-1, b]`, i.e. midway between the node and `(a-1, b-1)`,
//!   which share the same `y`. The `|y| u_xx` term uses those two points; the
//!   centre value and `-u_yy` come from four points on the vertical line
//!   through the centre, two on each side where the line allows. `B` averages the
//!   two points. Rows on BC use only points inside, so BC carries no condition.

use super::grid::{Grid, NodeKind, Ref};
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Contribution of a boundary point (value 0 in the eigenproblem) to a row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletEntry {
    pub row: usize,
    pub p: Point<f64>,
    pub a: f64,
    pub b: f64,
}

/// Compressed-row sparse matrix, used for products.
#[derive(Debug, Clone)]
pub struct Csr {
    pub n: usize,
    pub ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl Csr {
    pub fn from_triplets(n: usize, trip: &[(usize, usize, f64)]) -> Self {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(r, c, v) in trip {
            rows[r].push((c, v));
        }
        let mut ptr = Vec::with_capacity(n + 1);
        let mut col = Vec::new();
        let mut val = Vec::new();
        ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *val.last_mut().unwrap() += v;
                } else {
                    col.push(c);
                    val.push(v);
                    last = Some(c);
                }
            }
            ptr.push(col.len());
        }
        Csr { n, ptr, col, val }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_into(x, &mut y);
        y
    }

    pub fn mul_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for e in self.ptr[r]..self.ptr[r + 1] {
                s += self.val[e] * x[self.col[e]];
            }
            *yr = s;
        }
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut t = Vec::with_capacity(self.val.len());
        for r in 0..self.n {
            for e in self.ptr[r]..self.ptr[r + 1] {
                t.push((r, self.col[e], self.val[e]));
            }
        }
        t
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n).map(|r| self.val[self.ptr[r]..self.ptr[r + 1]].iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone)]
pub struct Operator {
    pub grid: Grid,
    pub a: Csr,
    pub b: Csr,
    pub dirichlet: Vec<DirichletEntry>,
    /// Rows whose full stencil lies away from every boundary; used for
    /// interior consistency measurements.
    pub regular: Vec<bool>,
    pub row_kind: Vec<RowKind>,
}

/// Stencil shape parameters.
const AB_BELOW: usize = 1;
const AB_ABOVE: usize = 3;
const HYP_TOWARD_AXIS: usize = 2;
const HYP_DEEPER: usize = 2;

/// Weights `w` with `sum w_i (y_i - yc)^q = rhs_q`, `q = 0..n-1`.
fn moment_weights(ys: &[f64], yc: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = ys.len();
    let scale = ys.iter().map(|y| (y - yc).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut m = vec![0.0; n * n];
    let mut r = vec![0.0; n];
    for q in 0..n {
        for (i, y) in ys.iter().enumerate() {
            m[q * n + i] = ((y - yc) / scale).powi(q as i32);
        }
        r[q] = rhs[q] / scale.powi(q as i32);
    }
    dense_solve(&mut m, &mut r, n)?;
    Ok(r)
}

/// Gaussian elimination with partial pivoting on a row-major `n x n` system.
pub(crate) fn dense_solve(m: &mut [f64], r: &mut [f64], n: usize) -> Result<()> {
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i * n + c].abs().partial_cmp(&m[j * n + c].abs()).unwrap()).unwrap();
        if m[piv * n + c].abs() < 1e-300 {
            return Err(Error::Numerical("singular local system".into()));
        }
        if piv != c {
            for j in 0..n {
                m.swap(c * n + j, piv * n + j);
            }
            r.swap(c, piv);
        }
        for i in c + 1..n {
            let f = m[i * n + c] / m[c * n + c];
            if f != 0.0 {
                for j in c..n {
                    m[i * n + j] -= f * m[c * n + j];
                }
                r[i] -= f * r[c];
            }
        }
    }
    for c in (0..n).rev() {
        let mut s = r[c];
        for j in c + 1..n {
            s -= m[c * n + j] * r[j];
        }
        r[c] = s / m[c * n + c];
    }
    Ok(())
}

struct Rows {
    a: Vec<(usize, usize, f64)>,
    b: Vec<(usize, usize, f64)>,
    dir: Vec<DirichletEntry>,
}

impl Rows {
    fn add(&mut self, row: usize, r: Ref, wa: f64, wb: f64) {
        match r {
            Ref::Node(c) => {
                if wa != 0.0 {
                    self.a.push((row, c, wa));
                }
                if wb != 0.0 {
                    self.b.push((row, c, wb));
                }
            }
            Ref::Dirichlet(p) => self.dir.push(DirichletEntry { row, p, a: wa, b: wb }),
        }
    }
}

pub fn assemble(grid: Grid) -> Result<Operator> {
    let n = grid.len();
    let x0 = grid.x0();
    let k = grid.k;
    let dy = grid.dy;
    let mut rows = Rows { a: Vec::with_capacity(12 * n), b: Vec::with_capacity(2 * n), dir: Vec::new() };
    let mut regular = vec![false; n];
    let mut row_kind = vec![RowKind::Elliptic; n];

    for r in 0..n {
        let node = grid.nodes[r];
        match node.kind {
            NodeKind::Elliptic { i, j } => {
                let (x, y) = (node.p.x, node.p.y);
                let half = (x0 * x0 - 4.0 * y * y * y / 9.0).max(0.0).sqrt();
                let (xr, xl) = (x0 + half, x0 - half);
                let he = k.min(xr - x);
                let hw = k.min(x - xl);
                let ce = 2.0 / (he * (he + hw));
                let cw = 2.0 / (hw * (he + hw));
                rows.add(r, Ref::Node(r), y * (ce + cw), 1.0);
                let east = if xr - x >= k { grid.ell(i + 1, j).map(Ref::Node) } else { None };
                let west = if x - xl >= k { grid.ell(i - 1, j).map(Ref::Node) } else { None };
                rows.add(r, east.unwrap_or(Ref::Dirichlet(Point::new(x + he, y))), -y * ce, 0.0);
                rows.add(r, west.unwrap_or(Ref::Dirichlet(Point::new(x - hw, y))), -y * cw, 0.0);
                let gy = grid.domain.g_clamped(x);
                let hn = dy.min(gy - y);
                let north = if hn >= dy { grid.ell(i, j + 1).map(Ref::Node) } else { None };
                let south = if j >= 2 { grid.ell(i, j - 1) } else { grid.ab(i) }.expect("south neighbour exists");
                let hs = dy;
                let cn = 2.0 / (hn * (hn + hs));
                let cs = 2.0 / (hs * (hn + hs));
                rows.a.push((r, r, cn + cs));
                rows.add(r, north.unwrap_or(Ref::Dirichlet(Point::new(x, y + hn))), -cn, 0.0);
                rows.add(r, Ref::Node(south), -cs, 0.0);
                regular[r] = he >= k
                    && hw >= k
                    && hn >= dy
                    && east.is_some()
                    && west.is_some()
                    && north.is_some()
                    && grid.ell(i, j + 2).is_some()
                    && grid.ell(i + 2, j).is_some()
                    && i >= 2
                    && grid.ell(i - 2, j).is_some();
            }
            NodeKind::Parabolic { a } => {
                row_kind[r] = RowKind::Parabolic;
                let all = grid.vertical_line(2 * a);
                let mut below: Vec<(Ref, f64)> = all.iter().copied().filter(|e| e.1 < 0.0).collect();
                let mut above: Vec<(Ref, f64)> = all.iter().copied().filter(|e| e.1 > 0.0).collect();
                below.sort_by(|p, q| q.1.partial_cmp(&p.1).unwrap());
                above.sort_by(|p, q| p.1.partial_cmp(&q.1).unwrap());
                let cand: Vec<(Ref, f64)> = if below.len() >= AB_BELOW && above.len() >= AB_ABOVE {
                    let mut c: Vec<(Ref, f64)> = below[..AB_BELOW].to_vec();
                    c.push((Ref::Node(r), 0.0));
                    c.extend_from_slice(&above[..AB_ABOVE]);
                    regular[r] = c.iter().all(|e| matches!(e.0, Ref::Node(_))) && a >= 3 && a + 3 <= grid.m;
                    c
                } else {
                    let mut c = all.clone();
                    c.sort_by(|p, q| p.1.abs().partial_cmp(&q.1.abs()).unwrap());
                    c.truncate(3);
                    c
                };
                let ys: Vec<f64> = cand.iter().map(|e| e.1).collect();
                let mut rhs = vec![0.0; ys.len()];
                rhs[2] = -2.0;
                let w = moment_weights(&ys, 0.0, &rhs)?;
                for (e, wi) in cand.iter().zip(w) {
                    rows.add(r, e.0, wi, 0.0);
                }
                rows.b.push((r, r, 1.0));
            }
            NodeKind::Hyperbolic { a, b } => {
                row_kind[r] = RowKind::Hyperbolic;
                let col2 = a + b - 1;
                let sc = (a - b) as f64 * k / 2.0;
                let yc = Grid::y_of_s(sc);
                let e = 4.0 * yc.abs() / (k * k);
                rows.add(r, Ref::Node(r), e, 0.5);
                let (wref, _) = grid.hnode(a - 1, b - 1).expect("west partner exists");
                rows.add(r, wref, e, 0.5);
                let all = grid.vertical_line(col2);
                let mut toward: Vec<(Ref, f64)> = all.iter().copied().filter(|p| p.1 > yc).collect();
                let mut deeper: Vec<(Ref, f64)> = all.iter().copied().filter(|p| p.1 < yc).collect();
                toward.sort_by(|p, q| p.1.partial_cmp(&q.1).unwrap());
                deeper.sort_by(|p, q| q.1.partial_cmp(&p.1).unwrap());
                let total = HYP_TOWARD_AXIS + HYP_DEEPER;
                let mut ts = HYP_TOWARD_AXIS.min(toward.len());
                let tn = deeper.len().min(total - ts);
                ts = toward.len().min(total - tn);
                let mut cand: Vec<(Ref, f64)> = toward[..ts].to_vec();
                cand.extend_from_slice(&deeper[..tn]);
                regular[r] =
                    cand.iter().all(|p| matches!(p.0, Ref::Node(_))) && cand.len() == total && b >= 3 && a + 3 <= grid.m;
                if cand.len() >= 3 {
                    let ys: Vec<f64> = cand.iter().map(|p| p.1).collect();
                    let mut rhs = vec![0.0; ys.len()];
                    rhs[0] = -2.0 * e;
                    rhs[2] = -2.0;
                    let w = moment_weights(&ys, yc, &rhs)?;
                    for (p, wi) in cand.iter().zip(w) {
                        rows.add(r, p.0, wi, 0.0);
                    }
                } else {
                    // characteristic diamond
                    let f = 0.5 / (yc.abs().sqrt() * k);
                    let (p1, _) = grid.hnode(a, b - 1).expect("lattice point");
                    let (p2, _) = grid.hnode(a - 1, b).expect("lattice point");
                    rows.add(r, p1, -e - f, 0.0);
                    rows.add(r, p2, -e + f, 0.0);
                }
            }
        }
    }
    let a = Csr::from_triplets(n, &rows.a);
    let b = Csr::from_triplets(n, &rows.b);
    Ok(Operator { grid, a, b, dirichlet: rows.dir, regular, row_kind })
}

impl Operator {
    pub fn n(&self) -> usize {
        self.a.n
    }

    /// `A w` with the boundary contributions of `w` included; for consistency tests.
    pub fn apply_a_with_boundary(&self, w: impl Fn(Point<f64>) -> f64) -> Vec<f64> {
        let wn: Vec<f64> = self.grid.nodes.iter().map(|n| w(n.p)).collect();
        let mut out = self.a.mul(&wn);
        for d in &self.dirichlet {
            out[d.row] += d.a * w(d.p);
        }
        out
    }

    /// `B f` with the boundary contributions of `f` included.
    pub fn apply_b_with_boundary(&self, f: impl Fn(Point<f64>) -> f64) -> Vec<f64> {
        let fv: Vec<f64> = self.grid.nodes.iter().map(|n| f(n.p)).collect();
        let mut out = self.b.mul(&fv);
        for d in &self.dirichlet {
            out[d.row] += d.b * f(d.p);
        }
        out
    }
}
