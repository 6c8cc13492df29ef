use faer::linalg::solvers::Svd;
use faer::{Mat, MatRef};

use crate::error::{Result, XtfcError};

/// Default singular-value cutoff ratio: machine epsilon times the larger dimension.
pub fn default_rcond(rows: usize, cols: usize) -> f64 {
    f64::EPSILON * rows.max(cols) as f64
}

/// Minimum-norm least-squares solution of `A β ≈ b` through a thin SVD.
///
/// Singular values below `rcond · σ_max` are treated as zero, which gives the
/// pseudoinverse solution `β = A⁺ b` restricted to the numerical range.
pub fn lstsq_svd(a: MatRef<'_, f64>, b: &[f64], rcond: f64) -> Result<Vec<f64>> {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Err(XtfcError::InvalidArgument(
            "least squares needs a non-empty matrix".into(),
        ));
    }
    if b.len() != rows {
        return Err(XtfcError::DimensionMismatch {
            expected: rows,
            got: b.len(),
        });
    }
    if !(rcond.is_finite() && rcond >= 0.0) {
        return Err(XtfcError::InvalidArgument(format!(
            "rcond must be finite and >= 0, got {rcond}"
        )));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(XtfcError::NonFinite("least-squares right-hand side"));
    }
    for j in 0..cols {
        if a.col(j).iter().any(|v| !v.is_finite()) {
            return Err(XtfcError::NonFinite("least-squares matrix"));
        }
    }

    let svd = Svd::new_thin(a).map_err(|_| XtfcError::SvdNoConvergence)?;
    let u = svd.U();
    let v = svd.V();
    let s = svd.S().column_vector();
    let k = s.nrows();
    let smax = (0..k).map(|i| s[i]).fold(0.0f64, f64::max);
    let cutoff = rcond * smax;

    let mut beta = vec![0.0; cols];
    for i in 0..k {
        let si = s[i];
        if si <= cutoff || si == 0.0 {
            continue;
        }
        let ui = u.col(i);
        let mut coef = 0.0;
        for (r, bv) in b.iter().enumerate() {
            coef += ui[r] * bv;
        }
        coef /= si;
        let vi = v.col(i);
        for (c, bc) in beta.iter_mut().enumerate() {
            *bc += coef * vi[c];
        }
    }
    Ok(beta)
}

/// `A x` for a dense matrix and a slice.
pub(crate) fn matvec(a: MatRef<'_, f64>, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.nrows()];
    for (j, &xj) in x.iter().enumerate() {
        if xj == 0.0 {
            continue;
        }
        for (o, &aij) in out.iter_mut().zip(a.col(j).iter()) {
            *o += aij * xj;
        }
    }
    out
}

/// Builds a dense matrix from row-major data.
pub fn mat_from_rows(rows: usize, cols: usize, data: &[f64]) -> Result<Mat<f64>> {
    if data.len() != rows * cols {
        return Err(XtfcError::DimensionMismatch {
            expected: rows * cols,
            got: data.len(),
        });
    }
    Ok(Mat::from_fn(rows, cols, |i, j| data[i * cols + j]))
}
