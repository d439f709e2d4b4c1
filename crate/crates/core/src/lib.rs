//! Binary tomography through the Lagrange dual of the constrained
//! least-squares problem.
//!
//! The dual of `min ½‖Ax − y‖²` over binary images is a generalized LASSO,
//! `min_μ ½‖μ − y‖² + p(Aᵀμ)`, whose minimizer decides every pixel with a
//! nonzero multiplier. The crate provides the projection operators, the
//! proximal maps and dual solvers, an exhaustive enumeration oracle for tiny
//! images, the LSQR and total-variation baselines, and the metrics and noise
//! models used by the benchmark harness.

pub mod baselines;
pub mod dual;
pub mod enumerate;
pub mod error;
pub mod geometry;
pub mod image;
pub mod io;
pub mod lsqr;
pub mod metrics;
pub mod noise;
pub mod operator;
pub mod phantom;
pub mod projector;
pub mod range;
pub mod sinogram;

mod linalg;

pub use dual::{DualSolution, GreyLevels, SolverConfig};
pub use error::{Error, Result};
pub use geometry::{GridSpec, Kernel, LatticeDirection, LatticeGeometry, ParallelGeometry};
pub use image::{BinaryImage, Ternary, TernaryImage};
pub use operator::SparseOperator;
pub use sinogram::Sinogram;
