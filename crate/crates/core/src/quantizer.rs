//! Maps real-valued feature vectors to discrete value levels and back.
//!
//! Calibration is uniform min-max binning: the per-feature bounds come from a
//! calibration corpus (the training partition, never the remembered or test
//! partitions), and the range is split into `2^m` equal bins. Out-of-range
//! inputs clamp instead of erroring, and dequantization returns bin midpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ric::DiscreteFunction;

/// Real-valued characteristics of one input object. Entries are finite by
/// construction.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(FeatureVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Largest supported granularity exponent; `2^16` levels is the most a
/// `u16` level index can address.
pub const MAX_GRANULARITY: u32 = 16;

/// Per-feature calibration bounds plus the granularity exponent `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantizerModel {
    n_args: usize,
    m: u32,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl QuantizerModel {
    /// Calibrates bounds as the per-feature min/max over `corpus`.
    pub fn fit<'a, I>(corpus: I, m: u32) -> Result<Self>
    where
        I: IntoIterator<Item = &'a FeatureVector>,
    {
        if m > MAX_GRANULARITY {
            return Err(Error::Calibration {
                reason: format!("granularity exponent {m} exceeds {MAX_GRANULARITY}"),
            });
        }
        let mut iter = corpus.into_iter();
        let first = iter.next().ok_or_else(|| Error::Calibration {
            reason: "empty calibration corpus".into(),
        })?;
        let mut lo = first.values().to_vec();
        let mut hi = first.values().to_vec();
        for v in iter {
            if v.len() != lo.len() {
                return Err(Error::dimension(format!(
                    "feature vector of length {} in corpus of length {}",
                    v.len(),
                    lo.len()
                )));
            }
            for (i, &x) in v.values().iter().enumerate() {
                lo[i] = lo[i].min(x);
                hi[i] = hi[i].max(x);
            }
        }
        Ok(QuantizerModel {
            n_args: lo.len(),
            m,
            lo,
            hi,
        })
    }

    pub fn n_args(&self) -> usize {
        self.n_args
    }

    /// Granularity exponent.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of value levels, `2^m`.
    pub fn levels(&self) -> usize {
        1usize << self.m
    }

    /// Discretizes `v` into a total function on `[0, levels)`.
    ///
    /// `level = clamp(floor((v - lo) / (hi - lo) * levels), 0, levels - 1)`;
    /// a degenerate feature (`hi == lo`) always maps to level 0.
    pub fn quantize(&self, v: &FeatureVector) -> Result<DiscreteFunction> {
        if v.len() != self.n_args {
            return Err(Error::dimension(format!(
                "vector of length {} vs quantizer for {}",
                v.len(),
                self.n_args
            )));
        }
        let levels = self.levels() as f64;
        let mut out = DiscreteFunction::undefined(self.n_args);
        for (i, &x) in v.values().iter().enumerate() {
            let span = self.hi[i] - self.lo[i];
            let level = if span > 0.0 {
                ((x - self.lo[i]) / span * levels)
                    .floor()
                    .clamp(0.0, levels - 1.0) as u16
            } else {
                0
            };
            out.set(i, level);
        }
        Ok(out)
    }

    /// Maps a total function back to bin-midpoint feature values.
    pub fn dequantize(&self, f: &DiscreteFunction) -> Result<FeatureVector> {
        if f.n_args() != self.n_args {
            return Err(Error::dimension(format!(
                "function with {} arguments vs quantizer for {}",
                f.n_args(),
                self.n_args
            )));
        }
        if let Some(arg) = f.first_undefined() {
            return Err(Error::Partial { arg });
        }
        let levels = self.levels();
        let mut values = Vec::with_capacity(self.n_args);
        for (i, level) in f.defined() {
            if level as usize >= levels {
                return Err(Error::Range {
                    value: level as usize,
                    levels,
                });
            }
            let width = (self.hi[i] - self.lo[i]) / levels as f64;
            values.push(self.lo[i] + (level as f64 + 0.5) * width);
        }
        FeatureVector::new(values)
    }
}
