use serde::{Deserialize, Serialize};

use crate::error::{Result, XtfcError};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

/// Axis-aligned box `∏_k [lo_k, hi_k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox(pub Vec<Interval>);

impl DomainBox {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(XtfcError::InvalidArgument("domain must have at least one axis".into()));
        }
        if let Some(bad) = intervals
            .iter()
            .find(|i| i.lo.is_nan() || i.hi.is_nan() || i.lo >= i.hi)
        {
            return Err(XtfcError::InvalidArgument(format!(
                "degenerate interval [{}, {}]",
                bad.lo, bad.hi
            )));
        }
        Ok(DomainBox(intervals))
    }

    pub fn unit(dim: usize) -> Self {
        DomainBox(vec![Interval::new(0.0, 1.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn axis(&self, k: usize) -> Interval {
        self.0[k]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.0.iter().zip(x).all(|(i, &v)| i.contains(v))
    }

    /// Maps a point of the unit cube onto the box.
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        self.0.iter().zip(u).map(|(i, &t)| i.lo + t * i.width()).collect()
    }
}
