//! The Tricomi operator `T = -y d_xx - d_yy` on the normal Tricomi domain:
//! closed-form geometry and constants, checks of the univariate inequalities
//! behind the eigenfunction bound, Pohozaev boundary integrals, and a
//! finite-difference eigensolver.
//!
//! Geometry, constants, quadrature and the integrand kernels are generic over
//! [`Real`]; the verification sweeps and the eigensolver work in `f64`.

pub mod checks;
pub mod constants;
pub mod eigen;
pub mod error;
pub mod geometry;
pub mod pohozaev;
pub mod quadrature;
pub mod real;
pub mod report;
pub mod verify;

pub use constants::{BoundaryNormBundle, ConstantLedger, EpsilonChoice, Regime};
pub use error::{Error, Result};
pub use geometry::{BoundaryCurve, CurveKind, Point, TricomiDomain};
pub use real::Real;
pub use report::VerificationReport;

pub type Domain = TricomiDomain<f64>;
pub type Ledger = ConstantLedger<f64>;
pub type Curve = BoundaryCurve<f64>;
pub type Point2 = Point<f64>;

pub type DomainF32 = TricomiDomain<f32>;
pub type LedgerF32 = ConstantLedger<f32>;
