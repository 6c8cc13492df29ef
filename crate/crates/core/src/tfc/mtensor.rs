//! The signed tensor of boundary-operator compositions.
//!
//! Index `i_k = 0` on an axis means "no constraint on this axis"; `i_k = r + 1`
//! selects the r-th constraint of that axis. The all-zero entry vanishes,
//! entries with a single non-zero index are the constraints themselves, and an
//! entry with `m` non-zero indices is the composition of the selected
//! operators with sign `(-1)^{m+1}`.

use crate::error::{Result, XtfcError};

use super::constraint::{BoundaryOperator, ConstraintSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct MTensorEntry {
    /// Zero-based tensor index, one slot per axis.
    pub index: Vec<usize>,
    /// `0` for the origin entry, otherwise `(-1)^{m+1}`.
    pub sign: f64,
    /// Selected operators in increasing axis order.
    pub ops: Vec<BoundaryOperator>,
}

impl MTensorEntry {
    pub fn rank(&self) -> usize {
        self.ops.len()
    }

    /// Evaluates `sign · b_{ops}[target](x)` for a target with analytic partials.
    pub fn apply<F>(&self, target: F, x: &[f64], d: &[u32]) -> f64
    where
        F: Fn(&[f64], &[u32]) -> f64,
    {
        if self.sign == 0.0 {
            return 0.0;
        }
        let mut xr = x.to_vec();
        let mut dr = d.to_vec();
        for op in &self.ops {
            xr[op.axis] = op.location;
            dr[op.axis] += op.order;
        }
        self.sign * target(&xr, &dr)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MTensor {
    shape: Vec<usize>,
    /// Row-major over `shape`.
    entries: Vec<MTensorEntry>,
}

impl MTensor {
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn entries(&self) -> &[MTensorEntry] {
        &self.entries
    }

    pub fn entry(&self, index: &[usize]) -> Result<&MTensorEntry> {
        if index.len() != self.shape.len() {
            return Err(XtfcError::DimensionMismatch {
                expected: self.shape.len(),
                got: index.len(),
            });
        }
        let mut flat = 0;
        for (&i, &n) in index.iter().zip(&self.shape) {
            if i >= n {
                return Err(XtfcError::InvalidArgument(format!(
                    "tensor index {index:?} out of bounds for shape {:?}",
                    self.shape
                )));
            }
            flat = flat * n + i;
        }
        Ok(&self.entries[flat])
    }
}

/// Enumerates every tensor entry for the given constraints.
pub fn build_m_tensor(spec: &ConstraintSpec) -> MTensor {
    let dim = spec.dim();
    let shape: Vec<usize> = (0..dim).map(|k| spec.count(k) + 1).collect();
    let total: usize = shape.iter().product();
    let mut entries = Vec::with_capacity(total);
    let mut index = vec![0usize; dim];
    for _ in 0..total {
        let ops: Vec<BoundaryOperator> = index
            .iter()
            .enumerate()
            .filter(|(_, &i)| i > 0)
            .map(|(k, &i)| spec.axis(k)[i - 1].op)
            .collect();
        let sign = match ops.len() {
            0 => 0.0,
            m if m % 2 == 1 => 1.0,
            _ => -1.0,
        };
        entries.push(MTensorEntry {
            index: index.clone(),
            sign,
            ops,
        });
        // odometer increment, last axis fastest
        for k in (0..dim).rev() {
            index[k] += 1;
            if index[k] < shape[k] {
                break;
            }
            index[k] = 0;
        }
    }
    MTensor { shape, entries }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero(_: &[f64], _: &[u32]) -> Option<f64> {
        Some(0.0)
    }

    /// Dirichlet in x1, value + slope at 0 in x2 and x3 on the unit cube.
    fn cube_example() -> ConstraintSpec {
        ConstraintSpec::new(3)
            .with(0, 0.0, 0, zero)
            .unwrap()
            .with(0, 1.0, 0, zero)
            .unwrap()
            .with(1, 0.0, 0, zero)
            .unwrap()
            .with(1, 0.0, 1, zero)
            .unwrap()
            .with(2, 0.0, 0, zero)
            .unwrap()
            .with(2, 0.0, 1, zero)
            .unwrap()
    }

    /// c(x1, x2, x3) = e^{x1} sin(2 x2 + 1) cos(3 x3 - 0.5), separable partials.
    fn probe(x: &[f64], d: &[u32]) -> f64 {
        let f1 = x[0].exp();
        let s = 2.0f64.powi(d[1] as i32) * sin_deriv(2.0 * x[1] + 1.0, d[1]);
        let c = 3.0f64.powi(d[2] as i32) * sin_deriv(3.0 * x[2] - 0.5 + std::f64::consts::FRAC_PI_2, d[2]);
        f1 * s * c
    }

    fn sin_deriv(z: f64, d: u32) -> f64 {
        (z + d as f64 * std::f64::consts::FRAC_PI_2).sin()
    }

    #[test]
    fn origin_entry_is_zero() {
        let m = build_m_tensor(&cube_example());
        assert_eq!(m.shape(), &[3, 3, 3]);
        let e = m.entry(&[0, 0, 0]).unwrap();
        assert_eq!(e.sign, 0.0);
        assert_eq!(e.apply(probe, &[0.3, 0.4, 0.5], &[0, 0, 0]), 0.0);
    }

    #[test]
    fn first_order_subtensors_are_the_constraints() {
        let spec = cube_example();
        let m = build_m_tensor(&spec);
        for k in 0..3 {
            for r in 0..2 {
                let mut idx = vec![0; 3];
                idx[k] = r + 1;
                let e = m.entry(&idx).unwrap();
                assert_eq!(e.sign, 1.0);
                assert_eq!(e.ops, vec![spec.axis(k)[r].op]);
            }
        }
    }

    #[test]
    fn mixed_slope_entry() {
        // M_{133} = -c_{x2 x3}(x1, 0, 0)
        let m = build_m_tensor(&cube_example());
        let e = m.entry(&[0, 2, 2]).unwrap();
        assert_eq!(e.sign, -1.0);
        let x = [0.3, 0.7, 0.9];
        let want = -probe(&[0.3, 0.0, 0.0], &[0, 1, 1]);
        assert_eq!(e.apply(probe, &x, &[0, 0, 0]), want);
    }

    #[test]
    fn printed_slices_match() {
        let m = build_m_tensor(&cube_example());
        let x = [0.21, 0.43, 0.65];
        let (x1, x2, x3) = (x[0], x[1], x[2]);
        let c = |p: [f64; 3], d: [u32; 3]| probe(&p, &d);
        // slice k = 1 (no x3 constraint)
        let slice1 = [
            [0.0, c([0.0, x2, x3], [0, 0, 0]), c([1.0, x2, x3], [0, 0, 0])],
            [
                c([x1, 0.0, x3], [0, 0, 0]),
                -c([0.0, 0.0, x3], [0, 0, 0]),
                -c([1.0, 0.0, x3], [0, 0, 0]),
            ],
            [
                c([x1, 0.0, x3], [0, 1, 0]),
                -c([0.0, 0.0, x3], [0, 1, 0]),
                -c([1.0, 0.0, x3], [0, 1, 0]),
            ],
        ];
        // slice k = 3 (slope in x3)
        let slice3 = [
            [
                c([x1, x2, 0.0], [0, 0, 1]),
                -c([0.0, x2, 0.0], [0, 0, 1]),
                -c([1.0, x2, 0.0], [0, 0, 1]),
            ],
            [
                -c([x1, 0.0, 0.0], [0, 0, 1]),
                c([0.0, 0.0, 0.0], [0, 0, 1]),
                c([1.0, 0.0, 0.0], [0, 0, 1]),
            ],
            [
                -c([x1, 0.0, 0.0], [0, 1, 1]),
                c([0.0, 0.0, 0.0], [0, 1, 1]),
                c([1.0, 0.0, 0.0], [0, 1, 1]),
            ],
        ];
        // printed layout: row = x2 index, column = x1 index
        for i in 0..3 {
            for j in 0..3 {
                let a = m.entry(&[j, i, 0]).unwrap().apply(probe, &x, &[0, 0, 0]);
                assert_eq!(a, slice1[i][j], "slice1 [{i}][{j}]");
                let b = m.entry(&[j, i, 2]).unwrap().apply(probe, &x, &[0, 0, 0]);
                assert_eq!(b, slice3[i][j], "slice3 [{i}][{j}]");
            }
        }
        // M_{221} and M_{332} from the worked example
        assert_eq!(
            m.entry(&[1, 1, 0]).unwrap().apply(probe, &x, &[0, 0, 0]),
            -c([0.0, 0.0, x3], [0, 0, 0])
        );
        assert_eq!(
            m.entry(&[2, 2, 1]).unwrap().apply(probe, &x, &[0, 0, 0]),
            c([1.0, 0.0, 0.0], [0, 1, 0])
        );
    }

    #[test]
    fn dirichlet_square_corner_sign() {
        let spec = ConstraintSpec::new(2)
            .with(0, 0.0, 0, zero)
            .unwrap()
            .with(0, 1.0, 0, zero)
            .unwrap()
            .with(1, 0.0, 0, zero)
            .unwrap()
            .with(1, 1.0, 0, zero)
            .unwrap();
        let m = build_m_tensor(&spec);
        let e = m.entry(&[1, 1]).unwrap();
        assert_eq!(e.sign, -1.0);
        assert_eq!(
            e.ops,
            vec![BoundaryOperator::new(0, 0.0, 0), BoundaryOperator::new(1, 0.0, 0)]
        );
        assert!(m.entry(&[3, 0]).is_err());
        assert!(m.entry(&[1]).is_err());
    }

    #[test]
    fn sign_rule_in_four_dimensions() {
        let mut spec = ConstraintSpec::new(4);
        for k in 0..4 {
            spec = spec.with(k, 0.0, 0, zero).unwrap();
        }
        let m = build_m_tensor(&spec);
        for e in m.entries() {
            let nonunit = e.index.iter().filter(|&&i| i > 0).count();
            let want = if nonunit == 0 {
                0.0
            } else {
                (-1f64).powi(nonunit as i32 + 1)
            };
            assert_eq!(e.sign, want);
        }
    }
}
