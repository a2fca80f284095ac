//! Separable convex integer minimization over N-fold 4-block decomposable
//! matrices.
//!
//! The pipeline solves
//!
//! ```text
//! min { f(z) : E z = b, l <= z <= u, z integer }
//! ```
//!
//! where `E` is assembled from blocks `A, B, C, D` with top block row
//! `(C D D ... D)` and `N` block rows `(B 0 .. A .. 0)`, and `f` is a sum of
//! convex univariate terms. It first solves a piecewise-linear surrogate of
//! the continuous relaxation exactly, shrinks the box around that point using
//! Graver basis norm bounds, finds a feasible point by augmentation and then
//! improves it with Graver-best steps until no improving step exists.
//!
//! All arithmetic is exact (arbitrary-precision integers and rationals).

pub mod bounds;
pub mod cli;
pub mod continuous;
pub mod error;
pub mod fourblock;
pub mod graver;
pub mod io;
pub mod linalg;
pub mod objective;
pub mod rational;
pub mod solver;

pub use error::{Error, Result};
pub use fourblock::FourBlockInstance;
pub use graver::GraverBasis;
pub use linalg::{IntMatrix, IntVector};
pub use objective::SeparableObjective;
pub use solver::{solve, SolveOutcome};
