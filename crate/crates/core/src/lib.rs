//! Physics-informed solver for differential equations built on constrained
//! expressions whose free function is a random-feature single-layer network.
//!
//! The pipeline is: sample an [`elm::ElmBasis`], wrap it in a
//! [`tfc::ConstrainedExpression`] that satisfies the boundary and initial
//! conditions for every choice of output weights, collocate the residual on a
//! grid, and solve for the output weights by SVD least squares (linear
//! equations) or Gauss-Newton (nonlinear equations).

pub mod activation;
pub mod bench;
pub mod domain;
pub mod elm;
pub mod error;
pub mod problems;
pub mod solver;
pub mod tfc;

pub use activation::{activate, ActivationKind};
pub use bench::{run_once, RunConfig, RunReport};
pub use domain::{DomainBox, Interval};
pub use elm::{init_elm, DerivMultiIndex, ElmBasis, InputMap, WeightRange};
pub use error::{Result, XtfcError};
pub use problems::{catalog, ProblemDefinition, ProblemId};
