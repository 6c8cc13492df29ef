use std::time::{Duration, Instant};

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Result, XtfcError};

use super::lstsq::{default_rcond, lstsq_svd, matvec};

/// Iteration controls for the least-squares solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Singular-value cutoff ratio; `None` selects `ε · max(rows, cols)`.
    pub rcond: Option<f64>,
    /// Threshold on the convergence metric (see [`gauss_newton`]).
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            rcond: None,
            tol: 1e-12,
            max_iter: 50,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(XtfcError::InvalidArgument(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(XtfcError::InvalidArgument("max_iter must be >= 1".into()));
        }
        if let Some(r) = self.rcond {
            if !(r.is_finite() && r >= 0.0) {
                return Err(XtfcError::InvalidArgument(format!("rcond must be >= 0, got {r}")));
            }
        }
        Ok(())
    }

    pub fn rcond_for(&self, rows: usize, cols: usize) -> f64 {
        self.rcond.unwrap_or_else(|| default_rcond(rows, cols))
    }
}

/// Result of a Gauss-Newton run.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussNewtonOutcome {
    pub beta: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Stopped because the metric grew three iterations in a row.
    pub diverged: bool,
    /// `max |r|` before the first step and after every step.
    pub residual_history: Vec<f64>,
    /// Convergence metric after every step.
    pub metric_history: Vec<f64>,
    pub elapsed: Duration,
}

impl GaussNewtonOutcome {
    pub fn residual_max(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&f64::NAN)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Undamped Gauss-Newton: `β ← β + Δ` with `Δ = lstsq(J(β), -r(β))`.
///
/// The update is computed as `β⁺ = lstsq(J, J β - r)`, which equals `β + Δ`
/// minus the part of `β` in the numerical null space of `J`. Without that
/// projection, components picked up in directions the collocation cannot see
/// accumulate over the iterations and surface as oscillations between the
/// training points.
///
/// The convergence metric is the part of the residual change the
/// linearization did not predict, `max |r(β+Δ) - r(β) - J(β) Δ|`, relative
/// to `max(1, max |r(β₀)|)`. It is exactly zero for a linear residual, so
/// linear problems stop after one step, and it decays quadratically near a
/// solution of a nonlinear one. Three consecutive increases of the metric
/// end the run as diverged.
pub fn gauss_newton<R, J>(
    mut residual: R,
    mut jacobian: J,
    beta0: Vec<f64>,
    cfg: &SolveConfig,
) -> Result<GaussNewtonOutcome>
where
    R: FnMut(&[f64]) -> Result<Vec<f64>>,
    J: FnMut(&[f64]) -> Result<Mat<f64>>,
{
    cfg.validate()?;
    let start = Instant::now();
    let mut beta = beta0;
    let mut r = residual(&beta)?;
    let scale = max_abs(&r).max(1.0);
    let mut residual_history = vec![max_abs(&r)];
    let mut metric_history = Vec::new();
    let mut converged = false;
    let mut diverged = false;
    let mut growth = 0;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        let jac = jacobian(&beta)?;
        if jac.nrows() != r.len() || jac.ncols() != beta.len() {
            return Err(XtfcError::DimensionMismatch {
                expected: r.len() * beta.len(),
                got: jac.nrows() * jac.ncols(),
            });
        }
        let jb = matvec(jac.as_ref(), &beta);
        let rhs: Vec<f64> = jb.iter().zip(&r).map(|(a, b)| a - b).collect();
        let next = lstsq_svd(jac.as_ref(), &rhs, cfg.rcond_for(jac.nrows(), jac.ncols()))?;
        let step: Vec<f64> = next.iter().zip(&beta).map(|(n, b)| n - b).collect();
        let predicted = matvec(jac.as_ref(), &step);
        beta = next;
        let r_new = residual(&beta)?;
        if r_new.iter().any(|v| !v.is_finite()) {
            return Err(XtfcError::NonFinite("Gauss-Newton residual"));
        }
        let defect = r_new
            .iter()
            .zip(&r)
            .zip(&predicted)
            .fold(0.0f64, |m, ((new, old), p)| m.max((new - old - p).abs()));
        let metric = defect / scale;
        iterations += 1;
        r = r_new;
        residual_history.push(max_abs(&r));
        if let Some(&prev) = metric_history.last() {
            growth = if metric > prev { growth + 1 } else { 0 };
        }
        metric_history.push(metric);
        if metric < cfg.tol {
            converged = true;
            break;
        }
        if growth >= 3 {
            diverged = true;
            break;
        }
    }
    Ok(GaussNewtonOutcome {
        beta,
        iterations,
        converged,
        diverged,
        residual_history,
        metric_history,
        elapsed: start.elapsed(),
    })
}
