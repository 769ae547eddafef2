//! Well-balanced fifth-order WENO finite-difference solver for the 1D
//! blood-flow equations in elastic vessels of varying rest radius.

pub mod boundary;
pub mod cases;
pub mod error;
pub mod flux;
pub mod integrator;
pub mod io;
pub mod mesh;
pub mod source;
pub mod weno;

pub use boundary::{BoundaryCondition, DampedWave};
pub use cases::{build_case, CaseName, CaseSpec};
pub use error::{Error, Result};
pub use integrator::{DtRule, RunOutcome, Solver};
pub use mesh::{FieldPair, Grid, Mode, SchemeConfig, VesselGeometry, GHOST_WIDTH};
