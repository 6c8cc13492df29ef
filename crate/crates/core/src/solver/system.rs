//! Collocation of a residual operator on constrained expressions.

use std::time::Duration;

use faer::Mat;

use crate::elm::DerivMultiIndex;
use crate::error::{Result, XtfcError};
use crate::tfc::{ConstrainedExpression, ProjectionCache};

use super::gauss_newton::{gauss_newton, SolveConfig};
use super::grid::CollocationGrid;
use super::lstsq::matvec;

/// A derivative of one unknown function that the residual depends on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operand {
    pub output: usize,
    pub deriv: DerivMultiIndex,
}

impl Operand {
    pub fn new(output: usize, orders: &[u32]) -> Self {
        Operand {
            output,
            deriv: DerivMultiIndex::from(orders),
        }
    }
}

/// Pointwise residual of a differential equation (or system).
///
/// `values[o]` holds the value of `operands()[o]` at `x`. Residuals are laid
/// out per equation; `partials` is row-major `equations × operands` and holds
/// `∂ r_e / ∂ values[o]`.
pub trait ResidualOperator: Send + Sync {
    fn operands(&self) -> &[Operand];
    fn equations(&self) -> usize;
    fn outputs(&self) -> usize;
    fn is_linear(&self) -> bool;
    fn residual(&self, x: &[f64], values: &[f64], out: &mut [f64]);
    fn partials(&self, x: &[f64], values: &[f64], out: &mut [f64]);
}

/// Precomputed operand rows `∂^d f(x_p) = a[p] + H[p, :] β` for every operand.
pub struct CollocationSystem<'a> {
    op: &'a dyn ResidualOperator,
    grid: &'a CollocationGrid,
    col_start: Vec<usize>,
    neurons: Vec<usize>,
    offsets: Vec<Vec<f64>>,
    rows: Vec<Mat<f64>>,
}

impl<'a> CollocationSystem<'a> {
    pub fn new(op: &'a dyn ResidualOperator, ces: &[ConstrainedExpression], grid: &'a CollocationGrid) -> Result<Self> {
        if ces.len() != op.outputs() {
            return Err(XtfcError::DimensionMismatch {
                expected: op.outputs(),
                got: ces.len(),
            });
        }
        for ce in ces {
            if ce.dim() != grid.dim() {
                return Err(XtfcError::DimensionMismatch {
                    expected: grid.dim(),
                    got: ce.dim(),
                });
            }
        }
        let neurons: Vec<usize> = ces.iter().map(|c| c.neurons()).collect();
        let mut col_start = Vec::with_capacity(ces.len());
        let mut acc = 0;
        for &l in &neurons {
            col_start.push(acc);
            acc += l;
        }
        let n = grid.len();
        let mut offsets = Vec::with_capacity(op.operands().len());
        let mut rows = Vec::with_capacity(op.operands().len());
        for operand in op.operands() {
            let ce = ces.get(operand.output).ok_or_else(|| {
                XtfcError::InvalidArgument(format!("operand refers to missing output {}", operand.output))
            })?;
            let l = ce.neurons();
            let mut h = Mat::<f64>::zeros(n, l);
            let mut a = vec![0.0; n];
            let mut buf = vec![0.0; l];
            let mut cache = ProjectionCache::new();
            for (p, x) in grid.points().enumerate() {
                a[p] = ce.basis_row_cached(x, operand.deriv.orders(), &mut buf, &mut cache)?;
                for (j, &v) in buf.iter().enumerate() {
                    h[(p, j)] = v;
                }
            }
            offsets.push(a);
            rows.push(h);
        }
        Ok(CollocationSystem {
            op,
            grid,
            col_start,
            neurons,
            offsets,
            rows,
        })
    }

    pub fn unknowns(&self) -> usize {
        self.neurons.iter().sum()
    }

    pub fn residual_len(&self) -> usize {
        self.grid.len() * self.op.equations()
    }

    /// Splits the stacked unknowns into one weight vector per output.
    pub fn split_beta(&self, beta: &[f64]) -> Vec<Vec<f64>> {
        self.col_start
            .iter()
            .zip(&self.neurons)
            .map(|(&s, &l)| beta[s..s + l].to_vec())
            .collect()
    }

    /// Operand values, row-major `points × operands`.
    pub fn operand_values(&self, beta: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        let nops = self.rows.len();
        let mut vals = vec![0.0; n * nops];
        for (o, operand) in self.op.operands().iter().enumerate() {
            let s = self.col_start[operand.output];
            let l = self.neurons[operand.output];
            let hb = matvec(self.rows[o].as_ref(), &beta[s..s + l]);
            for p in 0..n {
                vals[p * nops + o] = self.offsets[o][p] + hb[p];
            }
        }
        vals
    }

    /// Stacked residual, equation-major (`e · N + p`).
    pub fn residual(&self, beta: &[f64]) -> Vec<f64> {
        let n = self.grid.len();
        let neq = self.op.equations();
        let nops = self.rows.len();
        let vals = self.operand_values(beta);
        let mut out = vec![0.0; n * neq];
        let mut r = vec![0.0; neq];
        for p in 0..n {
            self.op
                .residual(self.grid.point(p), &vals[p * nops..(p + 1) * nops], &mut r);
            for e in 0..neq {
                out[e * n + p] = r[e];
            }
        }
        out
    }

    /// `∂ r / ∂ β` by the chain rule through the operand rows.
    pub fn jacobian(&self, beta: &[f64]) -> Mat<f64> {
        let n = self.grid.len();
        let neq = self.op.equations();
        let nops = self.rows.len();
        let vals = self.operand_values(beta);
        // coef[(e * nops + o) * n + p] = ∂ r_e / ∂ v_o at point p
        let mut coef = vec![0.0; neq * nops * n];
        let mut part = vec![0.0; neq * nops];
        for p in 0..n {
            self.op
                .partials(self.grid.point(p), &vals[p * nops..(p + 1) * nops], &mut part);
            for (eo, &v) in part.iter().enumerate() {
                coef[eo * n + p] = v;
            }
        }
        let mut jac = Mat::<f64>::zeros(n * neq, self.unknowns());
        for e in 0..neq {
            for (o, operand) in self.op.operands().iter().enumerate() {
                let c = &coef[(e * nops + o) * n..(e * nops + o + 1) * n];
                if c.iter().all(|&v| v == 0.0) {
                    continue;
                }
                let s = self.col_start[operand.output];
                let h = &self.rows[o];
                for j in 0..h.ncols() {
                    let src = h.col(j);
                    let mut dst = jac.col_mut(s + j);
                    for p in 0..n {
                        dst[e * n + p] += c[p] * src[p];
                    }
                }
            }
        }
        jac
    }
}

/// Linear collocation system `A β = b` with `r(β) = A β - b`.
pub fn assemble_linear(
    op: &dyn ResidualOperator,
    ces: &[ConstrainedExpression],
    grid: &CollocationGrid,
) -> Result<(Mat<f64>, Vec<f64>)> {
    if !op.is_linear() {
        return Err(XtfcError::InvalidArgument(
            "assemble_linear requires a linear operator".into(),
        ));
    }
    let sys = CollocationSystem::new(op, ces, grid)?;
    let zero = vec![0.0; sys.unknowns()];
    let a = sys.jacobian(&zero);
    let b = sys.residual(&zero).into_iter().map(|v| -v).collect();
    Ok((a, b))
}

/// Trained output weights plus solve diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    /// One weight vector per unknown function.
    pub betas: Vec<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
    pub diverged: bool,
    /// `max |r|` at the training points for the returned weights.
    pub residual_max: f64,
    pub residual_history: Vec<f64>,
    /// Time spent in the least-squares iterations, excluding row assembly.
    pub solve_time: Duration,
}

/// Collocates `op` on `grid` and solves for the output weights.
///
/// Linear operators take a single SVD least-squares solve; nonlinear ones
/// run Gauss-Newton from `β = 0`. Both go through [`gauss_newton`], which
/// stops after one step when the residual is affine.
pub fn solve(
    op: &dyn ResidualOperator,
    ces: &[ConstrainedExpression],
    grid: &CollocationGrid,
    cfg: &SolveConfig,
) -> Result<SolveOutcome> {
    cfg.validate()?;
    let cfg = if op.is_linear() {
        SolveConfig { max_iter: 1, ..*cfg }
    } else {
        *cfg
    };
    let sys = CollocationSystem::new(op, ces, grid)?;
    let beta0 = vec![0.0; sys.unknowns()];
    let out = gauss_newton(|b| Ok(sys.residual(b)), |b| Ok(sys.jacobian(b)), beta0, &cfg)?;
    Ok(SolveOutcome {
        betas: sys.split_beta(&out.beta),
        iterations: out.iterations,
        converged: out.converged || op.is_linear(),
        diverged: out.diverged,
        residual_max: out.residual_max(),
        residual_history: out.residual_history.clone(),
        solve_time: out.elapsed,
    })
}
