//! Discrete eigenproblem `T u = lambda u` in the domain, `u = 0` on AC and sigma.

pub mod assemble;
pub mod field;
pub mod grid;
pub mod solve;

pub use assemble::{assemble, Csr, DirichletEntry, Operator, RowKind};
pub use field::{area_integral, l2_norm_sq, trace_norms, traces, traces_with_boundary, value_at, FieldSampler, TraceRules};
pub use grid::{Grid, MeshSpec, Node, NodeClass, NodeKind, Ref, MIN_CELLS};
pub use solve::{solve_real_spectrum, EigenPair, SolveDiagnostics, SolveOptions, Spectrum, DEFAULT_SHIFT, IMAG_TOL};

use crate::error::Result;
use crate::pohozaev::{pohozaev_identity, PohozaevResidual};

/// Assemble and solve in one step.
pub fn solve_mesh(x0: f64, mesh: MeshSpec, opts: &SolveOptions) -> Result<(Operator, Spectrum)> {
    let op = assemble(Grid::new(x0, mesh)?)?;
    let spec = solve_real_spectrum(&op, opts)?;
    Ok((op, spec))
}

/// Both sides of the Pohozaev identity for a computed pair.
pub fn pohozaev_residual(pair: &EigenPair, grid: &Grid) -> Result<PohozaevResidual> {
    let (bc, sg) = traces(grid, &pair.u, TraceRules::default())?;
    pohozaev_identity(pair.lambda, pair.l2_norm * pair.l2_norm, &bc, &sg)
}
