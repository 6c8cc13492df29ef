//! Per-axis switching polynomials.
//!
//! For `ℓ` constraints along one axis the vector is `{1, v_1, ..., v_ℓ}` with
//! `v_i(x) = Σ_m α_{m,i} x^m` over the monomials `x^0..x^{ℓ-1}`. The
//! coefficients solve `B α = I` where `B[r][m]` is the r-th boundary operator
//! applied to `x^m`, which gives `b_r[v_i] = δ_{ri}`.

use crate::error::{Result, XtfcError};

use super::constraint::BoundaryOperator;

/// Polynomial in monomial coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn constant(c: f64) -> Self {
        Polynomial(vec![c])
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// `p^{(d)}(x)`.
    pub fn eval(&self, x: f64, d: u32) -> f64 {
        let d = d as usize;
        if d >= self.0.len() {
            return 0.0;
        }
        // Horner on the differentiated coefficients
        let mut acc = 0.0;
        for m in (d..self.0.len()).rev() {
            acc = acc * x + self.0[m] * falling_factorial(m, d);
        }
        acc
    }
}

/// `m (m-1) ... (m-d+1)`.
fn falling_factorial(m: usize, d: usize) -> f64 {
    (0..d).map(|i| (m - i) as f64).product()
}

/// `b_q^d[x^m]`.
fn monomial_under(op: &BoundaryOperator, m: usize) -> f64 {
    let d = op.order as usize;
    if m < d {
        0.0
    } else {
        falling_factorial(m, d) * op.location.powi((m - d) as i32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchVector {
    axis: usize,
    /// `polys[0]` is the constant 1; `polys[i]` switches on constraint `i - 1`.
    polys: Vec<Polynomial>,
}

impl SwitchVector {
    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polynomial(&self, i: usize) -> &Polynomial {
        &self.polys[i]
    }

    /// `v_i^{(d)}(x)`.
    pub fn eval(&self, i: usize, x: f64, d: u32) -> f64 {
        self.polys[i].eval(x, d)
    }
}

/// Builds the switching vector for the constraints `ops` on one axis.
pub fn build_switch_vector(axis: usize, ops: &[BoundaryOperator]) -> Result<SwitchVector> {
    let n = ops.len();
    let mut polys = vec![Polynomial::constant(1.0)];
    if n == 0 {
        return Ok(SwitchVector { axis, polys });
    }
    let mut lhs: Vec<Vec<f64>> = ops
        .iter()
        .map(|op| (0..n).map(|m| monomial_under(op, m)).collect())
        .collect();
    let mut rhs: Vec<Vec<f64>> = (0..n)
        .map(|r| (0..n).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale = lhs.iter().flatten().fold(0.0f64, |a, &v| a.max(v.abs())).max(1.0);

    // Gauss-Jordan with partial pivoting; ℓ is tiny (≤ 4 in practice)
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| lhs[a][col].abs().total_cmp(&lhs[b][col].abs()))
            .unwrap_or(col);
        if lhs[pivot][col].abs() <= 1e-12 * scale {
            return Err(XtfcError::ConstraintDegeneracy { axis });
        }
        lhs.swap(col, pivot);
        rhs.swap(col, pivot);
        let p = lhs[col][col];
        for c in 0..n {
            lhs[col][c] /= p;
            rhs[col][c] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = lhs[r][col];
                if f != 0.0 {
                    for c in 0..n {
                        lhs[r][c] -= f * lhs[col][c];
                        rhs[r][c] -= f * rhs[col][c];
                    }
                }
            }
        }
    }
    // rhs now holds α, rows indexed by monomial degree, columns by constraint
    polys.extend((0..n).map(|i| Polynomial(rhs.iter().map(|row| row[i]).collect())));
    Ok(SwitchVector { axis, polys })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(q: f64, d: u32) -> BoundaryOperator {
        BoundaryOperator::new(0, q, d)
    }

    fn coeffs(v: &SwitchVector) -> Vec<Vec<f64>> {
        (0..v.len()).map(|i| v.polynomial(i).0.clone()).collect()
    }

    fn close(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
        a.len() == b.len()
            && a.iter()
                .zip(b)
                .all(|(p, q)| p.len() == q.len() && p.iter().zip(q).all(|(x, y)| (x - y).abs() < 1e-14))
    }

    #[test]
    fn dirichlet_on_unit_interval() {
        // {1, 1 - x, x}
        let v = build_switch_vector(0, &[op(0.0, 0), op(1.0, 0)]).unwrap();
        assert!(close(&coeffs(&v), &[vec![1.0], vec![1.0, -1.0], vec![0.0, 1.0]]));
    }

    #[test]
    fn value_then_slope() {
        // value at 0, derivative at 1 -> {1, 1, y}
        let v = build_switch_vector(1, &[op(0.0, 0), op(1.0, 1)]).unwrap();
        assert!(close(&coeffs(&v), &[vec![1.0], vec![1.0, 0.0], vec![0.0, 1.0]]));
    }

    #[test]
    fn single_initial_value() {
        let v = build_switch_vector(2, &[op(0.0, 0)]).unwrap();
        assert!(close(&coeffs(&v), &[vec![1.0], vec![1.0]]));
    }

    #[test]
    fn scaled_interval() {
        // {1, (2 - x)/2, x/2} on [0, 2]
        let v = build_switch_vector(0, &[op(0.0, 0), op(2.0, 0)]).unwrap();
        assert!(close(&coeffs(&v), &[vec![1.0], vec![1.0, -0.5], vec![0.0, 0.5]]));
    }

    #[test]
    fn kronecker_property() {
        let cases = vec![
            vec![op(0.0, 0), op(1.0, 0)],
            vec![op(0.0, 0), op(1.0, 1)],
            vec![op(1.0, 0), op(2.0, 0)],
            vec![op(0.0, 0), op(0.0, 1), op(1.0, 0)],
            vec![op(-1.0, 0), op(0.5, 1), op(2.0, 2), op(1.0, 0)],
        ];
        for ops in cases {
            let v = build_switch_vector(0, &ops).unwrap();
            for (r, o) in ops.iter().enumerate() {
                for i in 0..ops.len() {
                    let got = v.eval(i + 1, o.location, o.order);
                    let want = if r == i { 1.0 } else { 0.0 };
                    assert!((got - want).abs() < 1e-12, "{ops:?} r={r} i={i}: {got}");
                }
            }
        }
    }

    #[test]
    fn degenerate_constraints_name_the_axis() {
        // two slope constraints: b[1] = 0 for both rows
        let err = build_switch_vector(3, &[op(0.0, 1), op(1.0, 1)]).unwrap_err();
        assert_eq!(err, XtfcError::ConstraintDegeneracy { axis: 3 });
    }

    #[test]
    fn polynomial_derivatives() {
        let p = Polynomial(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(p.eval(2.0, 0), 1.0 + 4.0 + 12.0 + 32.0);
        assert_eq!(p.eval(2.0, 1), 2.0 + 12.0 + 48.0);
        assert_eq!(p.eval(2.0, 2), 6.0 + 48.0);
        assert_eq!(p.eval(2.0, 3), 24.0);
        assert_eq!(p.eval(2.0, 4), 0.0);
    }
}
