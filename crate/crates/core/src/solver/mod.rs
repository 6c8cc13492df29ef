//! Training of the output weights: collocation, SVD least squares, Gauss-Newton.

mod gauss_newton;
mod grid;
mod lstsq;
mod system;

pub use gauss_newton::{gauss_newton, GaussNewtonOutcome, SolveConfig};
pub use grid::{CollocationGrid, GridKind};
pub use lstsq::{default_rcond, lstsq_svd, mat_from_rows};
pub use system::{assemble_linear, solve, CollocationSystem, Operand, ResidualOperator, SolveOutcome};
