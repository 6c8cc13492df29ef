//! Random-feature free function `g(x) = Σ_j β_j σ(w_j·u(x) + b_j)`.
//!
//! Input weights and biases are drawn once from a seeded ChaCha8 stream and
//! never trained; only the output weights `β` are unknown, so `g` and all of
//! its partial derivatives are linear in `β`. `u` is either the identity or
//! the affine map of a domain box onto the unit box.

use std::fmt;
use std::str::FromStr;

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::activation::{ActivationKind, MAX_ACTIVATION_ORDER};
use crate::domain::DomainBox;
use crate::error::{Result, XtfcError};

/// Partial-derivative orders, one entry per input coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DerivMultiIndex(Vec<u32>);

impl DerivMultiIndex {
    pub fn zeros(dim: usize) -> Self {
        DerivMultiIndex(vec![0; dim])
    }

    /// Builds a multi-index, rejecting total orders above the activation limit.
    pub fn new(orders: Vec<u32>) -> Result<Self> {
        let total: u32 = orders.iter().sum();
        if total > MAX_ACTIVATION_ORDER {
            return Err(XtfcError::DerivativeOrder {
                order: total,
                max: MAX_ACTIVATION_ORDER,
            });
        }
        Ok(DerivMultiIndex(orders))
    }

    /// `order`-th derivative along a single axis.
    pub fn along(dim: usize, axis: usize, order: u32) -> Self {
        let mut v = vec![0; dim];
        v[axis] = order;
        DerivMultiIndex(v)
    }

    pub fn orders(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }
}

impl From<&[u32]> for DerivMultiIndex {
    fn from(v: &[u32]) -> Self {
        DerivMultiIndex(v.to_vec())
    }
}

/// Closed interval used for uniform weight initialization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightRange {
    pub lo: f64,
    pub hi: f64,
}

impl WeightRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(XtfcError::InvalidArgument(format!(
                "weight range requires finite lo < hi, got ({lo}, {hi})"
            )));
        }
        Ok(WeightRange { lo, hi })
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

impl fmt::Display for WeightRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.lo, self.hi)
    }
}

impl FromStr for WeightRange {
    type Err = XtfcError;

    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(',')
            .ok_or_else(|| XtfcError::InvalidArgument(format!("expected `lo,hi`, got `{s}`")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| XtfcError::InvalidArgument(format!("bad bound `{t}`: {e}")))
        };
        WeightRange::new(parse(lo)?, parse(hi)?)
    }
}

/// Coordinates the hidden layer is fed with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputMap {
    /// The problem domain rescaled onto `[0, 1]^n`.
    #[default]
    Unit,
    /// Raw coordinates.
    Raw,
}

impl InputMap {
    pub fn name(self) -> &'static str {
        match self {
            InputMap::Unit => "unit",
            InputMap::Raw => "raw",
        }
    }
}

impl fmt::Display for InputMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InputMap {
    type Err = XtfcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "unit" => Ok(InputMap::Unit),
            "raw" => Ok(InputMap::Raw),
            _ => Err(XtfcError::InvalidArgument(format!(
                "unknown input map `{s}` (unit|raw)"
            ))),
        }
    }
}

/// Frozen hidden layer of a single-layer random-feature network.
#[derive(Debug, Clone, PartialEq)]
pub struct ElmBasis {
    neurons: usize,
    dim: usize,
    /// Row-major `neurons × dim`, as sampled.
    weights: Vec<f64>,
    biases: Vec<f64>,
    /// Weights and biases acting on raw coordinates once the input map is
    /// folded in.
    raw_weights: Vec<f64>,
    raw_biases: Vec<f64>,
    input_box: Option<DomainBox>,
    kind: ActivationKind,
    seed: u64,
    range: WeightRange,
}

/// Samples a hidden layer. The weights are drawn first (row by row) and the
/// biases after, all from one ChaCha8 stream seeded with `seed`.
pub fn init_elm(neurons: usize, dim: usize, range: WeightRange, seed: u64, kind: ActivationKind) -> Result<ElmBasis> {
    ElmBasis::new(neurons, dim, range, seed, kind)
}

impl ElmBasis {
    pub fn new(neurons: usize, dim: usize, range: WeightRange, seed: u64, kind: ActivationKind) -> Result<Self> {
        if neurons == 0 {
            return Err(XtfcError::InvalidArgument("neuron count must be >= 1".into()));
        }
        if dim == 0 {
            return Err(XtfcError::InvalidArgument("input dimension must be >= 1".into()));
        }
        let range = WeightRange::new(range.lo, range.hi)?;
        let dist = Uniform::new_inclusive(range.lo, range.hi).map_err(|e| XtfcError::InvalidArgument(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: Vec<f64> = (0..neurons * dim).map(|_| dist.sample(&mut rng)).collect();
        let biases: Vec<f64> = (0..neurons).map(|_| dist.sample(&mut rng)).collect();
        Ok(ElmBasis {
            neurons,
            dim,
            raw_weights: weights.clone(),
            raw_biases: biases.clone(),
            weights,
            biases,
            input_box: None,
            kind,
            seed,
            range,
        })
    }

    /// Builds a basis from explicit parameters. Used by tests and bindings.
    pub fn from_parts(weights: Vec<f64>, biases: Vec<f64>, dim: usize, kind: ActivationKind) -> Result<Self> {
        let neurons = biases.len();
        if neurons == 0 || dim == 0 {
            return Err(XtfcError::InvalidArgument("empty basis".into()));
        }
        if weights.len() != neurons * dim {
            return Err(XtfcError::DimensionMismatch {
                expected: neurons * dim,
                got: weights.len(),
            });
        }
        let lo = weights.iter().chain(&biases).cloned().fold(f64::INFINITY, f64::min);
        let hi = weights.iter().chain(&biases).cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(ElmBasis {
            neurons,
            dim,
            raw_weights: weights.clone(),
            raw_biases: biases.clone(),
            weights,
            biases,
            input_box: None,
            kind,
            seed: 0,
            range: WeightRange { lo, hi },
        })
    }

    pub fn neurons(&self) -> usize {
        self.neurons
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> ActivationKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn range(&self) -> WeightRange {
        self.range
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn weight_row(&self, j: usize) -> &[f64] {
        &self.weights[j * self.dim..(j + 1) * self.dim]
    }

    /// Feeds the layer `u_k = (x_k - lo_k) / (hi_k - lo_k)` instead of `x`.
    /// Replaces any earlier input map.
    pub fn with_unit_inputs(mut self, domain: &DomainBox) -> Result<Self> {
        if domain.dim() != self.dim {
            return Err(XtfcError::DimensionMismatch {
                expected: self.dim,
                got: domain.dim(),
            });
        }
        for j in 0..self.neurons {
            let mut b = self.biases[j];
            for k in 0..self.dim {
                let axis = domain.axis(k);
                let w = self.weights[j * self.dim + k] / axis.width();
                self.raw_weights[j * self.dim + k] = w;
                b -= w * axis.lo;
            }
            self.raw_biases[j] = b;
        }
        self.input_box = Some(domain.clone());
        Ok(self)
    }

    /// Applies `map` for inputs ranging over `domain`.
    pub fn with_input_map(self, map: InputMap, domain: &DomainBox) -> Result<Self> {
        match map {
            InputMap::Unit => self.with_unit_inputs(domain),
            InputMap::Raw => Ok(ElmBasis {
                raw_weights: self.weights.clone(),
                raw_biases: self.biases.clone(),
                input_box: None,
                ..self
            }),
        }
    }

    /// The box mapped onto the unit box, if any.
    pub fn input_box(&self) -> Option<&DomainBox> {
        self.input_box.as_ref()
    }

    fn check(&self, x: &[f64], d: &[u32]) -> Result<u32> {
        if x.len() != self.dim {
            return Err(XtfcError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if d.len() != self.dim {
            return Err(XtfcError::DimensionMismatch {
                expected: self.dim,
                got: d.len(),
            });
        }
        let total: u32 = d.iter().sum();
        if total > MAX_ACTIVATION_ORDER {
            return Err(XtfcError::DerivativeOrder {
                order: total,
                max: MAX_ACTIVATION_ORDER,
            });
        }
        Ok(total)
    }

    /// Row of `∂^d σ(w_j·u(x) + b_j)` for every neuron `j`.
    pub fn basis_row(&self, x: &[f64], d: &DerivMultiIndex) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.neurons];
        self.accumulate_row(x, d.orders(), 1.0, &mut out)?;
        Ok(out)
    }

    /// `out[j] += scale · ∂^d σ(w_j·u(x) + b_j)`.
    pub fn accumulate_row(&self, x: &[f64], d: &[u32], scale: f64, out: &mut [f64]) -> Result<()> {
        let total = self.check(x, d)?;
        if out.len() != self.neurons {
            return Err(XtfcError::DimensionMismatch {
                expected: self.neurons,
                got: out.len(),
            });
        }
        for (j, o) in out.iter_mut().enumerate() {
            let w = &self.raw_weights[j * self.dim..(j + 1) * self.dim];
            let mut z = self.raw_biases[j];
            let mut chain = scale;
            for k in 0..self.dim {
                z += w[k] * x[k];
                if d[k] > 0 {
                    chain *= w[k].powi(d[k] as i32);
                }
            }
            *o += chain * self.kind.eval_unchecked(z, total);
        }
        Ok(())
    }

    /// `∂^d g(x) = basis_row(x, d) · β`, computed without materializing the row.
    pub fn eval_g(&self, beta: &[f64], x: &[f64], d: &DerivMultiIndex) -> Result<f64> {
        self.dot(beta, x, d.orders())
    }

    pub(crate) fn dot(&self, beta: &[f64], x: &[f64], d: &[u32]) -> Result<f64> {
        let total = self.check(x, d)?;
        if beta.len() != self.neurons {
            return Err(XtfcError::DimensionMismatch {
                expected: self.neurons,
                got: beta.len(),
            });
        }
        let mut acc = 0.0;
        for (j, &bj) in beta.iter().enumerate() {
            if bj == 0.0 {
                continue;
            }
            let w = &self.raw_weights[j * self.dim..(j + 1) * self.dim];
            let mut z = self.raw_biases[j];
            let mut chain = bj;
            for k in 0..self.dim {
                z += w[k] * x[k];
                if d[k] > 0 {
                    chain *= w[k].powi(d[k] as i32);
                }
            }
            acc += chain * self.kind.eval_unchecked(z, total);
        }
        Ok(acc)
    }
}
