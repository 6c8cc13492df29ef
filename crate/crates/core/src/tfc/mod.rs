//! Multivariate constrained expressions built from per-axis boundary constraints.

mod constraint;
mod expression;
mod mtensor;
mod switch;

pub use constraint::{BoundaryOperator, Constraint, ConstraintFn, ConstraintSpec};
pub use expression::{build_ce, ConstrainedExpression, ProjectionCache, CONSISTENCY_TOL};
pub use mtensor::{build_m_tensor, MTensor, MTensorEntry};
pub use switch::{build_switch_vector, Polynomial, SwitchVector};
