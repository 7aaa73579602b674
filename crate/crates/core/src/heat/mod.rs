//! P1 finite elements in space, backward Euler in time.

pub mod assembly;
mod field;
mod mesh;
pub mod problem;
mod solver;
mod tridiagonal;

pub use assembly::{assemble_operators, Operators};
pub use field::SpaceTimeField;
pub use mesh::Mesh1D;
pub use problem::{DiffusionField, MassKind, ProblemSpec};
pub use solver::{solve_monolithic, EndCondition, LocalProblem, LocalSolution, RobinBoundaryData, Side};
pub use tridiagonal::{ThomasFactor, Tridiagonal};
