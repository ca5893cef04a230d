//! Finite-difference solvers with optimal time steps and non-iterative
//! defect correction.

pub mod error;
pub mod experiments;
pub mod grid;
pub mod harness;
pub mod linalg;
pub mod ots;
pub mod reproduce;
pub mod solvers_1d;
pub mod solvers_2d;
pub mod sources;
pub mod stencil;

pub use error::{Error, Result};
pub use grid::{ImplicitDomain, UniformGrid1D, UniformGrid2D};
pub use ots::{LeadingError, SchemeDescriptor, TimeStepPolicy};
pub use sources::{ExactSolution, SourceModel};
pub use stencil::{ScalarField1D, ScalarField2D};
