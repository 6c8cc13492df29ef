//! Constrained expressions `f(x) = g(x) + Σ_M sign · Π v_{i_k}(x_k) · b_M[c - g](x)`.
//!
//! Each non-zero tensor entry becomes one term. A term only depends on the
//! coordinates it fixes through its switching polynomials and on the
//! remaining (free) coordinates through the projected target, so any partial
//! derivative of a term factorizes into a polynomial derivative times a
//! derivative of `c` or `g` at the projected point. That makes `f` and all
//! its partials exactly affine in `β`: `∂^d f = a_d(x) + h_d(x)·β`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::DomainBox;
use crate::elm::{DerivMultiIndex, ElmBasis};
use crate::error::{Result, XtfcError};

use super::constraint::{BoundaryOperator, ConstraintFn, ConstraintSpec};
use super::mtensor::{build_m_tensor, MTensor};
use super::switch::{build_switch_vector, SwitchVector};

/// Absolute tolerance (scaled by `1 + |value|`) for constraint data agreeing
/// at hyperplane intersections.
pub const CONSISTENCY_TOL: f64 = 1e-12;
const CONSISTENCY_SAMPLES: usize = 16;

#[derive(Clone)]
struct Term {
    sign: f64,
    /// `(axis, switch index)` per fixed axis.
    switches: Vec<(usize, usize)>,
    ops: Vec<BoundaryOperator>,
    /// Data of the innermost (highest-axis) constraint; the remaining
    /// operators are applied to it analytically.
    data: ConstraintFn,
    data_axis: usize,
}

type ProjectionKey = (Vec<u64>, Vec<u32>);

fn projection_key(xr: &[f64], dr: &[u32]) -> ProjectionKey {
    (xr.iter().map(|v| v.to_bits()).collect(), dr.to_vec())
}

/// Memo of free-function evaluations at projected points.
///
/// On tensor grids most points share their projections onto the constraint
/// hyperplanes, so batched evaluation through a cache skips the repeats. A
/// cache belongs to one expression; value caches also to one `β`.
#[derive(Debug, Default)]
pub struct ProjectionCache {
    rows: HashMap<ProjectionKey, Vec<f64>>,
    dots: HashMap<ProjectionKey, f64>,
}

impl ProjectionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len() + self.dots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&mut self) {
        self.rows.clear();
        self.dots.clear();
    }
}

#[derive(Clone)]
pub struct ConstrainedExpression {
    basis: ElmBasis,
    switches: Vec<SwitchVector>,
    tensor: MTensor,
    terms: Vec<Term>,
}

impl std::fmt::Debug for ConstrainedExpression {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConstrainedExpression")
            .field("dim", &self.dim())
            .field("neurons", &self.basis.neurons())
            .field("terms", &self.terms.len())
            .finish()
    }
}

/// Builds the constrained expression for `spec` with `basis` as free function.
///
/// Checks that constraint data agree where hyperplanes of different axes
/// intersect, sampling the intersections inside `domain`.
pub fn build_ce(spec: &ConstraintSpec, basis: ElmBasis, domain: &DomainBox) -> Result<ConstrainedExpression> {
    let dim = spec.dim();
    if basis.dim() != dim {
        return Err(XtfcError::DimensionMismatch {
            expected: dim,
            got: basis.dim(),
        });
    }
    if domain.dim() != dim {
        return Err(XtfcError::DimensionMismatch {
            expected: dim,
            got: domain.dim(),
        });
    }
    let switches = (0..dim)
        .map(|k| {
            let ops: Vec<BoundaryOperator> = spec.axis(k).iter().map(|c| c.op).collect();
            build_switch_vector(k, &ops)
        })
        .collect::<Result<Vec<_>>>()?;
    let tensor = build_m_tensor(spec);
    let mut terms = Vec::new();
    for entry in tensor.entries() {
        if entry.sign == 0.0 {
            continue;
        }
        let fixed: Vec<(usize, usize)> = entry
            .index
            .iter()
            .enumerate()
            .filter(|(_, &i)| i > 0)
            .map(|(k, &i)| (k, i))
            .collect();
        let &(data_axis, data_index) = fixed.last().expect("non-origin entry");
        terms.push(Term {
            sign: entry.sign,
            switches: fixed.clone(),
            ops: entry.ops.clone(),
            data: spec.axis(data_axis)[data_index - 1].data.clone(),
            data_axis,
        });
    }
    check_consistency(spec, &tensor, domain)?;
    Ok(ConstrainedExpression {
        basis,
        switches,
        tensor,
        terms,
    })
}

fn check_consistency(spec: &ConstraintSpec, tensor: &MTensor, domain: &DomainBox) -> Result<()> {
    let dim = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    let samples: Vec<Vec<f64>> = (0..CONSISTENCY_SAMPLES)
        .map(|_| {
            let u: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
            domain.from_unit(&u)
        })
        .collect();
    for entry in tensor.entries().iter().filter(|e| e.rank() >= 2) {
        let sources: Vec<(usize, &ConstraintFn)> = entry
            .index
            .iter()
            .enumerate()
            .filter(|(_, &i)| i > 0)
            .map(|(k, &i)| (k, &spec.axis(k)[i - 1].data))
            .collect();
        for x in &samples {
            let mut values = Vec::with_capacity(sources.len());
            for (axis, data) in &sources {
                if let Some(v) = eval_data(data, *axis, &entry.ops, x, &vec![0; dim]) {
                    values.push(v);
                }
            }
            if let Some(&first) = values.first() {
                for &v in &values[1..] {
                    let diff = (v - first).abs();
                    if diff.is_nan() || diff > CONSISTENCY_TOL * (1.0 + first.abs()) {
                        return Err(XtfcError::InconsistentConstraints {
                            axes: entry.ops.iter().map(|o| o.axis).collect(),
                            difference: diff,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// `∂^{d_free} b_{ops}[c](x)` using the data function attached to `data_axis`.
fn eval_data(data: &ConstraintFn, data_axis: usize, ops: &[BoundaryOperator], x: &[f64], d: &[u32]) -> Option<f64> {
    let mut xr = x.to_vec();
    let mut dr = d.to_vec();
    for op in ops {
        xr[op.axis] = op.location;
        dr[op.axis] = if op.axis == data_axis { 0 } else { op.order };
    }
    data(&xr, &dr)
}

impl ConstrainedExpression {
    pub fn dim(&self) -> usize {
        self.switches.len()
    }

    pub fn basis(&self) -> &ElmBasis {
        &self.basis
    }

    pub fn neurons(&self) -> usize {
        self.basis.neurons()
    }

    pub fn tensor(&self) -> &MTensor {
        &self.tensor
    }

    pub fn switch_vector(&self, axis: usize) -> &SwitchVector {
        &self.switches[axis]
    }

    /// Number of projection terms, excluding the identity `g` term.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn check_point(&self, x: &[f64], d: &[u32]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(XtfcError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        if d.len() != self.dim() {
            return Err(XtfcError::DimensionMismatch {
                expected: self.dim(),
                got: d.len(),
            });
        }
        Ok(())
    }

    /// Switching-polynomial factor of a term, differentiated along its fixed axes.
    #[inline]
    fn term_weight(&self, term: &Term, x: &[f64], d: &[u32]) -> f64 {
        let mut w = term.sign;
        for &(axis, i) in &term.switches {
            w *= self.switches[axis].eval(i, x[axis], d[axis]);
            if w == 0.0 {
                break;
            }
        }
        w
    }

    /// Projected point and derivative orders for the `g` side of a term.
    #[inline]
    fn project(term: &Term, x: &[f64], d: &[u32], xr: &mut [f64], dr: &mut [u32]) {
        xr.copy_from_slice(x);
        dr.copy_from_slice(d);
        for op in &term.ops {
            xr[op.axis] = op.location;
            dr[op.axis] = op.order;
        }
    }

    fn offset_term(term: &Term, xr: &[f64], dr: &mut [u32]) -> Result<f64> {
        let own = dr[term.data_axis];
        dr[term.data_axis] = 0;
        let v = (term.data)(xr, dr);
        dr[term.data_axis] = own;
        v.ok_or_else(|| XtfcError::MissingDerivative { orders: dr.to_vec() })
    }

    /// Writes `h_d(x)` into `row` and returns `a_d(x)`, so that
    /// `∂^d f(x) = a_d(x) + row·β`.
    pub fn basis_row_into(&self, x: &[f64], d: &[u32], row: &mut [f64]) -> Result<f64> {
        self.check_point(x, d)?;
        row.iter_mut().for_each(|r| *r = 0.0);
        self.basis.accumulate_row(x, d, 1.0, row)?;
        let mut offset = 0.0;
        let mut xr = x.to_vec();
        let mut dr = d.to_vec();
        for term in &self.terms {
            let w = self.term_weight(term, x, d);
            if w == 0.0 {
                continue;
            }
            Self::project(term, x, d, &mut xr, &mut dr);
            self.basis.accumulate_row(&xr, &dr, -w, row)?;
            offset += w * Self::offset_term(term, &xr, &mut dr)?;
        }
        Ok(offset)
    }

    /// [`basis_row_into`](Self::basis_row_into) reusing projected rows from `cache`.
    pub fn basis_row_cached(&self, x: &[f64], d: &[u32], row: &mut [f64], cache: &mut ProjectionCache) -> Result<f64> {
        self.check_point(x, d)?;
        row.iter_mut().for_each(|r| *r = 0.0);
        self.basis.accumulate_row(x, d, 1.0, row)?;
        let mut offset = 0.0;
        let mut xr = x.to_vec();
        let mut dr = d.to_vec();
        for term in &self.terms {
            let w = self.term_weight(term, x, d);
            if w == 0.0 {
                continue;
            }
            Self::project(term, x, d, &mut xr, &mut dr);
            let key = projection_key(&xr, &dr);
            let projected = match cache.rows.get(&key) {
                Some(r) => r,
                None => {
                    let mut r = vec![0.0; self.neurons()];
                    self.basis.accumulate_row(&xr, &dr, 1.0, &mut r)?;
                    cache.rows.entry(key).or_insert(r)
                }
            };
            row.iter_mut().zip(projected).for_each(|(r, p)| *r -= w * p);
            offset += w * Self::offset_term(term, &xr, &mut dr)?;
        }
        Ok(offset)
    }

    /// [`value`](Self::value) reusing projected values from `cache`, which
    /// must only ever have seen this `beta`.
    pub fn value_cached(&self, beta: &[f64], x: &[f64], d: &[u32], cache: &mut ProjectionCache) -> Result<f64> {
        self.check_point(x, d)?;
        let mut value = self.basis.dot(beta, x, d)?;
        let mut offset = 0.0;
        let mut xr = x.to_vec();
        let mut dr = d.to_vec();
        for term in &self.terms {
            let w = self.term_weight(term, x, d);
            if w == 0.0 {
                continue;
            }
            Self::project(term, x, d, &mut xr, &mut dr);
            let key = projection_key(&xr, &dr);
            let g = match cache.dots.get(&key) {
                Some(&g) => g,
                None => {
                    let g = self.basis.dot(beta, &xr, &dr)?;
                    cache.dots.insert(key, g);
                    g
                }
            };
            value -= w * g;
            offset += w * Self::offset_term(term, &xr, &mut dr)?;
        }
        Ok(offset + value)
    }

    /// `(a_d(x), h_d(x))`.
    pub fn ce_basis_row(&self, x: &[f64], d: &DerivMultiIndex) -> Result<(f64, Vec<f64>)> {
        let mut row = vec![0.0; self.neurons()];
        let offset = self.basis_row_into(x, d.orders(), &mut row)?;
        Ok((offset, row))
    }

    /// `(a_d(x), ∂^d f(x; β))`.
    pub fn ce_eval(&self, beta: &[f64], x: &[f64], d: &DerivMultiIndex) -> Result<(f64, f64)> {
        let d = d.orders();
        self.check_point(x, d)?;
        let mut value = self.basis.dot(beta, x, d)?;
        let mut offset = 0.0;
        let mut xr = x.to_vec();
        let mut dr = d.to_vec();
        for term in &self.terms {
            let w = self.term_weight(term, x, d);
            if w == 0.0 {
                continue;
            }
            Self::project(term, x, d, &mut xr, &mut dr);
            value -= w * self.basis.dot(beta, &xr, &dr)?;
            offset += w * Self::offset_term(term, &xr, &mut dr)?;
        }
        Ok((offset, offset + value))
    }

    /// `∂^d f(x; β)`.
    pub fn value(&self, beta: &[f64], x: &[f64], d: &DerivMultiIndex) -> Result<f64> {
        self.ce_eval(beta, x, d).map(|(_, v)| v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::ActivationKind;
    use crate::domain::Interval;
    use crate::elm::{init_elm, WeightRange};
    use rand::Rng;

    fn basis(l: usize, dim: usize, seed: u64) -> ElmBasis {
        init_elm(l, dim, WeightRange::new(-1.0, 1.0).unwrap(), seed, ActivationKind::Tanh).unwrap()
    }

    fn random_beta(l: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..l).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    /// Dirichlet data of e^{-x}(x + y^3) on the unit square.
    fn poisson_spec() -> ConstraintSpec {
        ConstraintSpec::new(2)
            .with(0, 0.0, 0, |x, d| {
                Some(match d[1] {
                    0 => x[1].powi(3),
                    1 => 3.0 * x[1].powi(2),
                    2 => 6.0 * x[1],
                    3 => 6.0,
                    _ => 0.0,
                })
            })
            .unwrap()
            .with(0, 1.0, 0, |x, d| {
                Some(
                    (-1.0f64).exp()
                        * match d[1] {
                            0 => 1.0 + x[1].powi(3),
                            1 => 3.0 * x[1].powi(2),
                            2 => 6.0 * x[1],
                            3 => 6.0,
                            _ => 0.0,
                        },
                )
            })
            .unwrap()
            .with(1, 0.0, 0, |x, d| {
                Some((-1f64).powi(d[0] as i32) * (-x[0]).exp() * (x[0] - d[0] as f64))
            })
            .unwrap()
            .with(1, 1.0, 0, |x, d| {
                Some((-1f64).powi(d[0] as i32) * (-x[0]).exp() * (x[0] + 1.0 - d[0] as f64))
            })
            .unwrap()
    }

    #[test]
    fn constraints_hold_for_any_beta() {
        let ce = build_ce(&poisson_spec(), basis(30, 2, 1), &DomainBox::unit(2)).unwrap();
        let d0 = DerivMultiIndex::zeros(2);
        for s in 0..5 {
            let beta = random_beta(30, s);
            for i in 0..=10 {
                let t = i as f64 / 10.0;
                let v = ce.value(&beta, &[0.0, t], &d0).unwrap();
                assert!((v - t.powi(3)).abs() < 1e-13);
                let v = ce.value(&beta, &[t, 1.0], &d0).unwrap();
                assert!((v - (-t).exp() * (t + 1.0)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn affine_in_beta() {
        let ce = build_ce(&poisson_spec(), basis(20, 2, 2), &DomainBox::unit(2)).unwrap();
        let x = [0.3, 0.8];
        let d = DerivMultiIndex::new(vec![1, 1]).unwrap();
        let (a0, _) = ce.ce_basis_row(&x, &d).unwrap();
        for s in 0..10 {
            let beta = random_beta(20, 100 + s);
            let (off, val) = ce.ce_eval(&beta, &x, &d).unwrap();
            let (_, row) = ce.ce_basis_row(&x, &d).unwrap();
            let lin: f64 = row.iter().zip(&beta).map(|(h, b)| h * b).sum();
            assert_eq!(off, a0);
            assert!((val - lin - a0).abs() < 1e-13);
        }
    }

    #[test]
    fn row_matches_column_probing() {
        let ce = build_ce(&poisson_spec(), basis(12, 2, 3), &DomainBox::unit(2)).unwrap();
        let x = [0.45, 0.2];
        let d = DerivMultiIndex::new(vec![2, 0]).unwrap();
        let (offset, row) = ce.ce_basis_row(&x, &d).unwrap();
        let zero = vec![0.0; 12];
        let base = ce.value(&zero, &x, &d).unwrap();
        assert_eq!(base, offset);
        for j in 0..12 {
            let mut e = zero.clone();
            e[j] = 1.0;
            let probe = ce.value(&e, &x, &d).unwrap() - base;
            assert!((probe - row[j]).abs() < 1e-13, "column {j}");
        }
    }

    #[test]
    fn cached_evaluation_matches_direct() {
        let ce = build_ce(&poisson_spec(), basis(16, 2, 4), &DomainBox::unit(2)).unwrap();
        let beta = random_beta(16, 9);
        let mut rows = ProjectionCache::new();
        let mut values = ProjectionCache::new();
        let mut row = vec![0.0; 16];
        for d in [[0, 0], [2, 0], [1, 1]] {
            let di = DerivMultiIndex::new(d.to_vec()).unwrap();
            for i in 0..=6 {
                for j in 0..=6 {
                    let x = [i as f64 / 6.0, j as f64 / 6.0];
                    let (a, h) = ce.ce_basis_row(&x, &di).unwrap();
                    let a2 = ce.basis_row_cached(&x, &d, &mut row, &mut rows).unwrap();
                    assert_eq!(a, a2);
                    for (p, q) in h.iter().zip(&row) {
                        assert!((p - q).abs() < 1e-14);
                    }
                    let v = ce.value(&beta, &x, &di).unwrap();
                    let v2 = ce.value_cached(&beta, &x, &d, &mut values).unwrap();
                    assert!((v - v2).abs() < 1e-13);
                }
            }
        }
        assert!(!rows.is_empty() && rows.len() < 3 * 49 * ce.term_count());
    }

    #[test]
    fn inconsistent_corner_rejected() {
        let spec = ConstraintSpec::new(2)
            .with(0, 0.0, 0, |_, _| Some(1.0))
            .unwrap()
            .with(1, 0.0, 0, |_, _| Some(2.0))
            .unwrap();
        let err = build_ce(&spec, basis(5, 2, 0), &DomainBox::unit(2)).unwrap_err();
        assert!(matches!(err, XtfcError::InconsistentConstraints { .. }));
    }

    #[test]
    fn dimension_mismatch() {
        let err = build_ce(&poisson_spec(), basis(5, 3, 0), &DomainBox::unit(2)).unwrap_err();
        assert_eq!(err, XtfcError::DimensionMismatch { expected: 2, got: 3 });
        let ce = build_ce(&poisson_spec(), basis(5, 2, 0), &DomainBox::unit(2)).unwrap();
        assert!(ce.value(&[0.0; 5], &[0.1], &DerivMultiIndex::zeros(1)).is_err());
    }

    #[test]
    fn missing_constraint_derivative_is_an_error() {
        let spec = ConstraintSpec::new(2)
            .with(0, 0.0, 0, |_, d| if d[1] == 0 { Some(0.0) } else { None })
            .unwrap();
        let ce = build_ce(&spec, basis(5, 2, 0), &DomainBox::unit(2)).unwrap();
        let err = ce
            .value(&[0.0; 5], &[0.5, 0.5], &DerivMultiIndex::along(2, 1, 1))
            .unwrap_err();
        assert!(matches!(err, XtfcError::MissingDerivative { .. }));
    }

    #[test]
    fn general_locations_and_orders() {
        // value and slope at x = -0.5, value at x = 1.5 on [-1, 2]
        let spec = ConstraintSpec::new(1)
            .with(0, -0.5, 0, |_, _| Some(0.25))
            .unwrap()
            .with(0, -0.5, 1, |_, _| Some(-3.0))
            .unwrap()
            .with(0, 1.5, 0, |_, _| Some(2.0))
            .unwrap();
        let domain = DomainBox::new(vec![Interval::new(-1.0, 2.0)]).unwrap();
        let b = init_elm(10, 1, WeightRange::new(-2.0, 2.0).unwrap(), 4, ActivationKind::Sin).unwrap();
        let ce = build_ce(&spec, b, &domain).unwrap();
        let beta = random_beta(10, 5);
        let d0 = DerivMultiIndex::zeros(1);
        let d1 = DerivMultiIndex::along(1, 0, 1);
        assert!((ce.value(&beta, &[-0.5], &d0).unwrap() - 0.25).abs() < 1e-12);
        assert!((ce.value(&beta, &[-0.5], &d1).unwrap() + 3.0).abs() < 1e-12);
        assert!((ce.value(&beta, &[1.5], &d0).unwrap() - 2.0).abs() < 1e-12);
    }
}
