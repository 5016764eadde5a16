//! Hybrid mesh: a Cartesian lattice in the elliptic part and on the parabolic
//! segment, and the characteristic lattice `(xi, eta) = (x + s, x - s)`,
//! `s = (2/3)(-y)^{3/2}`, in the hyperbolic part.
//!
//! Hyperbolic node `(a, b)` sits at `xi = 2x0 + a k`, `eta = 2x0 + b k` with
//! `1 <= b < a <= M`. The line `b = 0` is AC (Dirichlet), `a = M` is BC (free)
//! and `a = b` is the parabolic segment, whose nodes are shared with the
//! Cartesian lattice.

use crate::error::{Error, Result};
use crate::geometry::{Point, TricomiDomain};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshSpec {
    /// Cells across the parabolic segment AB; also fixes the characteristic step.
    pub nx: usize,
    /// Cartesian rows between `y = 0` and the apex of sigma. `None` gives square cells.
    pub ny: Option<usize>,
}

impl MeshSpec {
    pub fn square(n: usize) -> Self {
        MeshSpec { nx: n, ny: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Parabolic { a: usize },
    Elliptic { i: usize, j: usize },
    Hyperbolic { a: usize, b: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    /// On BC, where no boundary condition is imposed.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub p: Point<f64>,
}

/// Stencil reference: an unknown, or a point of AC or sigma carrying the value 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ref {
    Node(usize),
    Dirichlet(Point<f64>),
}

pub const MIN_CELLS: usize = 32;

#[derive(Debug, Clone)]
pub struct Grid {
    pub domain: TricomiDomain<f64>,
    pub m: usize,
    pub k: f64,
    pub dy: f64,
    pub jmax: usize,
    pub nodes: Vec<Node>,
    ab: Vec<Option<usize>>,
    ell: Vec<Option<usize>>,
    hyp: Vec<Option<usize>>,
}

impl Grid {
    pub fn new(x0: f64, spec: MeshSpec) -> Result<Self> {
        let domain = TricomiDomain::new(x0)?;
        let m = spec.nx;
        if m < MIN_CELLS {
            return Err(Error::Config(format!("need at least {MIN_CELLS} cells across AB, got {m}")));
        }
        let k = 2.0 * x0.abs() / m as f64;
        let ymax = domain.y_max();
        let dy = match spec.ny {
            None => k,
            Some(ny) if ny >= 8 => ymax / ny as f64,
            Some(ny) => return Err(Error::Config(format!("need at least 8 elliptic rows, got {ny}"))),
        };
        let jmax = (ymax / dy).ceil() as usize + 1;
        let mut g = Grid {
            domain,
            m,
            k,
            dy,
            jmax,
            nodes: Vec::new(),
            ab: vec![None; m + 1],
            ell: vec![None; (m + 1) * (jmax + 1)],
            hyp: vec![None; (m + 1) * (m + 1)],
        };
        for a in 1..m {
            g.ab[a] = Some(g.nodes.len());
            g.nodes.push(Node { kind: NodeKind::Parabolic { a }, p: Point::new(2.0 * x0 + a as f64 * k, 0.0) });
        }
        for j in 1..=jmax {
            for i in 1..m {
                let x = 2.0 * x0 + i as f64 * k;
                let y = j as f64 * dy;
                if y < domain.g_clamped(x) - 1e-9 * dy {
                    g.ell[i * (jmax + 1) + j] = Some(g.nodes.len());
                    g.nodes.push(Node { kind: NodeKind::Elliptic { i, j }, p: Point::new(x, y) });
                }
            }
        }
        for a in 2..=m {
            for b in 1..a {
                let p = g.char_point(a as f64, b as f64);
                g.hyp[a * (m + 1) + b] = Some(g.nodes.len());
                g.nodes.push(Node { kind: NodeKind::Hyperbolic { a, b }, p });
            }
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn x0(&self) -> f64 {
        self.domain.x0
    }

    /// `y` as a function of the characteristic half-width `s`.
    #[inline]
    pub fn y_of_s(s: f64) -> f64 {
        -(1.5 * s).powf(2.0 / 3.0)
    }

    /// Position of the characteristic lattice point `(a, b)`; fractional indices allowed.
    pub fn char_point(&self, a: f64, b: f64) -> Point<f64> {
        let x0 = self.domain.x0;
        let s = (a - b) * self.k / 2.0;
        Point::new(2.0 * x0 + (a + b) * self.k / 2.0, Self::y_of_s(s.max(0.0)))
    }

    pub fn class(&self, idx: usize) -> NodeClass {
        match self.nodes[idx].kind {
            NodeKind::Hyperbolic { a, .. } if a == self.m => NodeClass::Free,
            _ => NodeClass::Interior,
        }
    }

    pub fn ab(&self, a: usize) -> Option<usize> {
        self.ab.get(a).copied().flatten()
    }

    pub fn ell(&self, i: usize, j: usize) -> Option<usize> {
        if i > self.m || j > self.jmax {
            return None;
        }
        self.ell[i * (self.jmax + 1) + j]
    }

    pub fn hyp(&self, a: usize, b: usize) -> Option<usize> {
        if a > self.m || b > self.m {
            return None;
        }
        self.hyp[a * (self.m + 1) + b]
    }

    /// Characteristic lattice reference, including the AC line, the diagonal
    /// and the corners A and B. `None` outside the lattice.
    pub fn hnode(&self, a: usize, b: usize) -> Option<(Ref, Point<f64>)> {
        if a > self.m || b > a {
            return None;
        }
        let p = self.char_point(a as f64, b as f64);
        if b == 0 {
            return Some((Ref::Dirichlet(p), p));
        }
        if a == b {
            if a == self.m {
                return Some((Ref::Dirichlet(p), p));
            }
            let idx = self.ab(a).expect("parabolic node");
            return Some((Ref::Node(idx), self.nodes[idx].p));
        }
        let idx = self.hyp(a, b).expect("hyperbolic node");
        Some((Ref::Node(idx), self.nodes[idx].p))
    }

    /// Every lattice point on the vertical line `x = 2x0 + col2 k / 2`, with its `y`.
    pub fn vertical_line(&self, col2: usize) -> Vec<(Ref, f64)> {
        let mut out = Vec::new();
        for a in 0..=self.m {
            if col2 < a {
                break;
            }
            let b = col2 - a;
            if b <= a {
                if let Some((r, p)) = self.hnode(a, b) {
                    out.push((r, p.y));
                }
            }
        }
        if col2 % 2 == 0 {
            let i = col2 / 2;
            let x = 2.0 * self.domain.x0 + i as f64 * self.k;
            for j in 1..=self.jmax {
                match self.ell(i, j) {
                    Some(idx) => out.push((Ref::Node(idx), self.nodes[idx].p.y)),
                    None => {
                        let p = Point::new(x, self.domain.g_clamped(x));
                        out.push((Ref::Dirichlet(p), p.y));
                        break;
                    }
                }
            }
        }
        out
    }

    /// Bounding box `[2x0 - d, d] x [y_C - d, y_max + d]` with `d = k / 2`.
    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        let d = 0.5 * self.k;
        (2.0 * self.domain.x0 - d, d, self.domain.y_c - d, self.domain.y_max() + d)
    }

    /// Number of Cartesian rows up to the apex.
    pub fn ny(&self) -> usize {
        (self.domain.y_max() / self.dy).round() as usize
    }
}
