use serde::{Deserialize, Serialize};

use crate::domain::DomainBox;
use crate::error::{Result, XtfcError};

/// Point layout along each axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    /// Equally spaced, endpoints included.
    #[default]
    Uniform,
}

/// Tensor-product collocation points, flattened with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid {
    counts: Vec<usize>,
    kind: GridKind,
    dim: usize,
    coords: Vec<f64>,
}

impl CollocationGrid {
    pub fn new(domain: &DomainBox, counts: &[usize], kind: GridKind) -> Result<Self> {
        let dim = domain.dim();
        if counts.len() != dim {
            return Err(XtfcError::DimensionMismatch {
                expected: dim,
                got: counts.len(),
            });
        }
        if counts.contains(&0) {
            return Err(XtfcError::InvalidArgument("grid counts must be positive".into()));
        }
        let axes: Vec<Vec<f64>> = counts
            .iter()
            .enumerate()
            .map(|(k, &n)| axis_points(domain.axis(k).lo, domain.axis(k).hi, n, kind))
            .collect();
        let total: usize = counts.iter().product();
        let mut coords = Vec::with_capacity(total * dim);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            for k in 0..dim {
                coords.push(axes[k][idx[k]]);
            }
            for k in (0..dim).rev() {
                idx[k] += 1;
                if idx[k] < counts[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(CollocationGrid {
            counts: counts.to_vec(),
            kind,
            dim,
            coords,
        })
    }

    /// Grid from an explicit point list.
    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(XtfcError::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Ok(CollocationGrid {
            counts: vec![points.len()],
            kind: GridKind::Uniform,
            dim,
            coords,
        })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, p: usize) -> &[f64] {
        &self.coords[p * self.dim..(p + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }
}

fn axis_points(lo: f64, hi: f64, n: usize, kind: GridKind) -> Vec<f64> {
    match kind {
        GridKind::Uniform => {
            if n == 1 {
                return vec![0.5 * (lo + hi)];
            }
            let h = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + i as f64 * h })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Interval;

    #[test]
    fn two_points_are_the_endpoints() {
        let g = CollocationGrid::new(&DomainBox::unit(1), &[2], GridKind::Uniform).unwrap();
        assert_eq!(g.points().collect::<Vec<_>>(), vec![&[0.0][..], &[1.0][..]]);
    }

    #[test]
    fn tensor_layout_last_axis_fastest() {
        let d = DomainBox::new(vec![Interval::new(0.0, 2.0), Interval::new(-1.0, 1.0)]).unwrap();
        let g = CollocationGrid::new(&d, &[3, 2], GridKind::Uniform).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.point(0), &[0.0, -1.0]);
        assert_eq!(g.point(1), &[0.0, 1.0]);
        assert_eq!(g.point(2), &[1.0, -1.0]);
        assert_eq!(g.point(5), &[2.0, 1.0]);
        assert!(g.points().all(|p| d.contains(p)));
    }

    #[test]
    fn invalid_counts() {
        assert!(CollocationGrid::new(&DomainBox::unit(2), &[3], GridKind::Uniform).is_err());
        assert!(CollocationGrid::new(&DomainBox::unit(2), &[3, 0], GridKind::Uniform).is_err());
    }
}
