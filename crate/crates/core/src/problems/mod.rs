//! Benchmark catalog: one ODE, one ODE system and seven PDEs with
//! closed-form solutions.

pub mod calc;
mod catalog;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::activation::ActivationKind;
use crate::domain::DomainBox;
use crate::elm::WeightRange;
use crate::error::{Result, XtfcError};
use crate::solver::{CollocationGrid, GridKind, Operand, ResidualOperator};
use crate::tfc::ConstraintSpec;

pub use catalog::{PDE5_DIFFUSIVITY, PDE5_HEIGHT, PDE5_LENGTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemId {
    Ode1,
    Sode2,
    Pde1,
    Pde2,
    Pde3,
    Pde4,
    Pde5,
    Pde6,
    Pde7,
}

impl ProblemId {
    pub const ALL: [ProblemId; 9] = [
        ProblemId::Ode1,
        ProblemId::Sode2,
        ProblemId::Pde1,
        ProblemId::Pde2,
        ProblemId::Pde3,
        ProblemId::Pde4,
        ProblemId::Pde5,
        ProblemId::Pde6,
        ProblemId::Pde7,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemId::Ode1 => "ode1",
            ProblemId::Sode2 => "sode2",
            ProblemId::Pde1 => "pde1",
            ProblemId::Pde2 => "pde2",
            ProblemId::Pde3 => "pde3",
            ProblemId::Pde4 => "pde4",
            ProblemId::Pde5 => "pde5",
            ProblemId::Pde6 => "pde6",
            ProblemId::Pde7 => "pde7",
        }
    }

    pub fn definition(self) -> ProblemDefinition {
        catalog::definition(self)
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemId {
    type Err = XtfcError;

    fn from_str(s: &str) -> Result<Self> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| XtfcError::UnknownProblem(s.to_string()))
    }
}

/// Hyperparameters a problem is run with unless overridden.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Defaults {
    pub neurons: usize,
    pub points: Vec<usize>,
    pub activation: ActivationKind,
    pub weight_range: WeightRange,
    pub tol: f64,
    pub max_iter: usize,
}

pub(crate) type PointFn = fn(&[f64], &[f64], &mut [f64]);
pub(crate) type ExactFn = fn(usize, &[f64], &[u32]) -> Option<f64>;
pub(crate) type ConstraintsFn = fn(usize) -> ConstraintSpec;

/// A differential equation with its constraints, exact solution and defaults.
#[derive(Clone)]
pub struct ProblemDefinition {
    pub id: ProblemId,
    pub title: &'static str,
    pub domain: DomainBox,
    pub axis_names: &'static [&'static str],
    pub outputs: usize,
    pub linear: bool,
    pub defaults: Defaults,
    /// Extra off-grid test points (the tabulated points for the ODE problems).
    pub table_points: Vec<f64>,
    pub(crate) operands: Vec<Operand>,
    pub(crate) residual_fn: PointFn,
    pub(crate) partials_fn: PointFn,
    pub(crate) exact_fn: ExactFn,
    pub(crate) constraints_fn: ConstraintsFn,
}

impl fmt::Debug for ProblemDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemDefinition")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("outputs", &self.outputs)
            .field("linear", &self.linear)
            .field("defaults", &self.defaults)
            .finish_non_exhaustive()
    }
}

/// All nine benchmark problems in catalog order.
pub fn catalog() -> Vec<ProblemDefinition> {
    ProblemId::ALL.iter().map(|id| id.definition()).collect()
}

impl ProblemDefinition {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// Constraints on unknown `output`.
    pub fn constraints(&self, output: usize) -> Result<ConstraintSpec> {
        if output >= self.outputs {
            return Err(XtfcError::InvalidArgument(format!(
                "{} has {} output(s), asked for {output}",
                self.id, self.outputs
            )));
        }
        Ok((self.constraints_fn)(output))
    }

    /// Exact value of every unknown at `x`.
    pub fn exact(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(XtfcError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if !self.domain.contains(x) {
            return Err(XtfcError::OutOfDomain { point: x.to_vec() });
        }
        let zero = vec![0; self.dim()];
        (0..self.outputs)
            .map(|o| (self.exact_fn)(o, x, &zero).ok_or(XtfcError::MissingDerivative { orders: zero.clone() }))
            .collect()
    }

    /// Partial derivative `∂^d` of exact unknown `output`, when available.
    pub fn exact_derivative(&self, output: usize, x: &[f64], d: &[u32]) -> Option<f64> {
        if output >= self.outputs || x.len() != self.dim() || d.len() != self.dim() {
            return None;
        }
        (self.exact_fn)(output, x, d)
    }

    /// Residual of the exact solution at `x` (zero up to rounding).
    pub fn exact_residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let vals = self
            .operands
            .iter()
            .map(|op| {
                self.exact_derivative(op.output, x, op.deriv.orders())
                    .ok_or_else(|| XtfcError::MissingDerivative {
                        orders: op.deriv.orders().to_vec(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = vec![0.0; self.outputs];
        (self.residual_fn)(x, &vals, &mut out);
        Ok(out)
    }

    /// Training grid; `counts` of `None` uses the default point counts.
    pub fn make_grid(&self, counts: Option<&[usize]>, kind: GridKind) -> Result<CollocationGrid> {
        let counts = counts.unwrap_or(&self.defaults.points);
        CollocationGrid::new(&self.domain, counts, kind)
    }

    /// Test set: a uniform grid at twice the training density per axis, plus
    /// the tabulated points for one-dimensional problems.
    pub fn test_grid(&self, train_counts: &[usize]) -> Result<CollocationGrid> {
        let counts: Vec<usize> = train_counts.iter().map(|&c| 2 * c).collect();
        let grid = CollocationGrid::new(&self.domain, &counts, GridKind::Uniform)?;
        if self.table_points.is_empty() {
            return Ok(grid);
        }
        let mut pts: Vec<Vec<f64>> = grid.points().map(|p| p.to_vec()).collect();
        pts.extend(self.table_points.iter().map(|&t| vec![t]));
        CollocationGrid::from_points(self.dim(), &pts)
    }
}

impl ResidualOperator for ProblemDefinition {
    fn operands(&self) -> &[Operand] {
        &self.operands
    }

    fn equations(&self) -> usize {
        self.outputs
    }

    fn outputs(&self) -> usize {
        self.outputs
    }

    fn is_linear(&self) -> bool {
        self.linear
    }

    fn residual(&self, x: &[f64], values: &[f64], out: &mut [f64]) {
        (self.residual_fn)(x, values, out)
    }

    fn partials(&self, x: &[f64], values: &[f64], out: &mut [f64]) {
        (self.partials_fn)(x, values, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_parse() {
        for id in ProblemId::ALL {
            assert_eq!(id.as_str().parse::<ProblemId>().unwrap(), id);
        }
        assert_eq!("PDE3".parse::<ProblemId>().unwrap(), ProblemId::Pde3);
        assert!(matches!("pde8".parse::<ProblemId>(), Err(XtfcError::UnknownProblem(_))));
    }

    #[test]
    fn catalog_has_nine_problems() {
        let ids: Vec<ProblemId> = catalog().iter().map(|p| p.id).collect();
        assert_eq!(ids, ProblemId::ALL.to_vec());
    }

    #[test]
    fn exact_spot_values() {
        let ode1 = ProblemId::Ode1.definition();
        assert!((ode1.exact(&[1.0]).unwrap()[0] - 1.0).abs() < 1e-15);
        let sode2 = ProblemId::Sode2.definition();
        let v = sode2.exact(&[3.0]).unwrap();
        assert!((v[0] - 3f64.sin()).abs() < 1e-15 && (v[1] - 10.0).abs() < 1e-15);
        let pde4 = ProblemId::Pde4.definition();
        assert!((pde4.exact(&[0.5, 0.0]).unwrap()[0] - 1.0).abs() < 1e-15);
        let pde1 = ProblemId::Pde1.definition();
        for y in [0.0, 0.3, 1.0] {
            assert!((pde1.exact(&[0.0, y]).unwrap()[0] - y.powi(3)).abs() < 1e-15);
        }
        assert!(matches!(ode1.exact(&[2.5]), Err(XtfcError::OutOfDomain { .. })));
        assert!(pde1.exact(&[0.5]).is_err());
    }

    #[test]
    fn pde7_exact_formula() {
        let p = ProblemId::Pde7.definition();
        let (x, y, z, t) = (0.3f64, 0.6f64, 0.2f64, 0.9f64);
        let want = t * t * (2.0 * std::f64::consts::PI * z).sin()
            + (x * x * y).sin()
            + x * y.powf(1.5) * z
            + x * y * t * (z - 1.0) * (t - 1.0);
        assert!((p.exact(&[x, y, z, t]).unwrap()[0] - want).abs() < 1e-15);
    }

    #[test]
    fn pde5_box_dimensions() {
        let p = ProblemId::Pde5.definition();
        assert_eq!(PDE5_LENGTH, 2.0);
        assert_eq!(PDE5_HEIGHT, 1.0);
        assert_eq!(PDE5_DIFFUSIVITY, 1.0);
        assert_eq!(p.domain.axis(0).hi, 2.0);
        assert_eq!(p.domain.axis(1).hi, 1.0);
    }

    #[test]
    fn default_grids() {
        let ode1 = ProblemId::Ode1.definition();
        let g = ode1.make_grid(None, GridKind::Uniform).unwrap();
        assert_eq!(g.len(), 51);
        assert_eq!(g.point(0), &[1.0]);
        assert_eq!(g.point(50), &[2.0]);
        let pde7 = ProblemId::Pde7.definition();
        let g = pde7.make_grid(None, GridKind::Uniform).unwrap();
        assert_eq!(g.counts(), &[5, 5, 5, 5]);
        assert_eq!(g.len(), 625);
        let t = ode1.test_grid(&[51]).unwrap();
        assert_eq!(t.len(), 102 + 11);
    }

    #[test]
    fn constraints_output_bounds() {
        let p = ProblemId::Sode2.definition();
        assert!(p.constraints(1).is_ok());
        assert!(p.constraints(2).is_err());
    }
}
