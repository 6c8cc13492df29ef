use std::fmt;
use std::sync::Arc;

use crate::error::{Result, XtfcError};

/// Right-hand side of one constraint.
///
/// Called as `data(x, d)` and returns `∂^d c(x)`, where `c` is the data
/// prescribed on the constraint's hyperplane. The coordinate along the
/// constraint's own axis is ignored and `d` is always zero on that axis.
/// Returns `None` when the requested partial derivative is not available.
pub type ConstraintFn = Arc<dyn Fn(&[f64], &[u32]) -> Option<f64> + Send + Sync>;

/// `ᵏb_q^d`: differentiate `d` times along axis `k`, then restrict to `x_k = q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryOperator {
    pub axis: usize,
    pub location: f64,
    pub order: u32,
}

impl BoundaryOperator {
    pub const fn new(axis: usize, location: f64, order: u32) -> Self {
        BoundaryOperator { axis, location, order }
    }

    /// Applies the operator to a function of the full point with analytic partials.
    pub fn apply<F>(&self, f: F, x: &[f64], d: &[u32]) -> f64
    where
        F: Fn(&[f64], &[u32]) -> f64,
    {
        let mut xr = x.to_vec();
        xr[self.axis] = self.location;
        let mut dr = d.to_vec();
        dr[self.axis] += self.order;
        f(&xr, &dr)
    }
}

impl fmt::Display for BoundaryOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b[axis={}, q={}, d={}]", self.axis, self.location, self.order)
    }
}

#[derive(Clone)]
pub struct Constraint {
    pub op: BoundaryOperator,
    pub data: ConstraintFn,
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Constraint")
            .field("op", &self.op)
            .finish_non_exhaustive()
    }
}

/// All constraints of one unknown function, grouped by axis.
#[derive(Debug, Clone)]
pub struct ConstraintSpec {
    per_axis: Vec<Vec<Constraint>>,
}

impl ConstraintSpec {
    pub fn new(dim: usize) -> Self {
        ConstraintSpec {
            per_axis: vec![Vec::new(); dim],
        }
    }

    /// Adds `∂^order f / ∂x_axis^order (x_axis = location) = data`.
    pub fn with<F>(mut self, axis: usize, location: f64, order: u32, data: F) -> Result<Self>
    where
        F: Fn(&[f64], &[u32]) -> Option<f64> + Send + Sync + 'static,
    {
        self.push(Constraint {
            op: BoundaryOperator::new(axis, location, order),
            data: Arc::new(data),
        })?;
        Ok(self)
    }

    pub fn push(&mut self, c: Constraint) -> Result<()> {
        let dim = self.per_axis.len();
        let axis = c.op.axis;
        if axis >= dim {
            return Err(XtfcError::InvalidArgument(format!(
                "constraint axis {axis} out of range for dimension {dim}"
            )));
        }
        if !c.op.location.is_finite() {
            return Err(XtfcError::InvalidArgument("constraint location must be finite".into()));
        }
        if self.per_axis[axis]
            .iter()
            .any(|e| e.op.location == c.op.location && e.op.order == c.op.order)
        {
            return Err(XtfcError::InvalidArgument(format!(
                "duplicate constraint (q={}, d={}) on axis {axis}",
                c.op.location, c.op.order
            )));
        }
        self.per_axis[axis].push(c);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.per_axis.len()
    }

    pub fn axis(&self, k: usize) -> &[Constraint] {
        &self.per_axis[k]
    }

    pub fn count(&self, k: usize) -> usize {
        self.per_axis[k].len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constraint> {
        self.per_axis.iter().flatten()
    }
}
