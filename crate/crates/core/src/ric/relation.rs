//! Boolean relation tables stored as packed per-column bitsets.
//!
//! A relation marks which value levels each argument is related to. Columns
//! are arguments, rows are value levels. Storage is column-major `u64` words
//! so union and containment run word-wide, and per-column mark counts are
//! cached so entropy is O(n_args).

use super::function::DiscreteFunction;
use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// Maximum number of value rows; levels must fit in a `u16`.
pub const MAX_VALS: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    n_args: usize,
    n_vals: usize,
    words_per_col: usize,
    words: Vec<u64>,
    col_counts: Vec<u32>,
}

impl Relation {
    /// An all-false relation. Dimensions must be positive and `n_vals` at
    /// most [`MAX_VALS`].
    pub fn empty(n_args: usize, n_vals: usize) -> Self {
        assert!(n_args > 0 && n_vals > 0, "relation dimensions must be positive");
        assert!(n_vals <= MAX_VALS, "n_vals must fit in a u16 level");
        let words_per_col = n_vals.div_ceil(WORD_BITS);
        Relation {
            n_args,
            n_vals,
            words_per_col,
            words: vec![0; n_args * words_per_col],
            col_counts: vec![0; n_args],
        }
    }

    /// The relation holding exactly one function.
    pub fn from_function(f: &DiscreteFunction, n_vals: usize) -> Result<Self> {
        let mut r = Relation::empty(f.n_args(), n_vals);
        r.insert_function(f)?;
        Ok(r)
    }

    pub fn n_args(&self) -> usize {
        self.n_args
    }

    pub fn n_vals(&self) -> usize {
        self.n_vals
    }

    #[inline]
    fn col(&self, arg: usize) -> &[u64] {
        &self.words[arg * self.words_per_col..(arg + 1) * self.words_per_col]
    }

    #[inline]
    pub fn get(&self, arg: usize, val: usize) -> bool {
        assert!(arg < self.n_args && val < self.n_vals);
        self.words[arg * self.words_per_col + val / WORD_BITS] >> (val % WORD_BITS) & 1 != 0
    }

    pub fn set(&mut self, arg: usize, val: usize) {
        assert!(arg < self.n_args && val < self.n_vals);
        let w = &mut self.words[arg * self.words_per_col + val / WORD_BITS];
        let mask = 1u64 << (val % WORD_BITS);
        if *w & mask == 0 {
            *w |= mask;
            self.col_counts[arg] += 1;
        }
    }

    /// Number of marked levels in a column (`mu` of that argument).
    pub fn col_count(&self, arg: usize) -> u32 {
        self.col_counts[arg]
    }

    pub fn col_counts(&self) -> &[u32] {
        &self.col_counts
    }

    /// Ascending marked levels of one column.
    pub fn marked_values(&self, arg: usize) -> Vec<u16> {
        let mut out = Vec::with_capacity(self.col_counts[arg] as usize);
        for (wi, &word) in self.col(arg).iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                out.push((wi * WORD_BITS + b) as u16);
                bits &= bits - 1;
            }
        }
        out
    }

    /// Marks each defined `(argument, level)` of `f`. Rejects out-of-range
    /// levels before touching any cell.
    pub fn insert_function(&mut self, f: &DiscreteFunction) -> Result<()> {
        self.check_args(f)?;
        for (_, level) in f.defined() {
            if level as usize >= self.n_vals {
                return Err(Error::Range {
                    value: level as usize,
                    levels: self.n_vals,
                });
            }
        }
        for (arg, level) in f.defined() {
            self.set(arg, level as usize);
        }
        Ok(())
    }

    /// Whether every defined cell of `f` is marked here; this is containment
    /// specialized to a function on the left.
    pub fn admits_function(&self, f: &DiscreteFunction) -> Result<bool> {
        self.check_args(f)?;
        for (arg, level) in f.defined() {
            if level as usize >= self.n_vals {
                return Err(Error::Range {
                    value: level as usize,
                    levels: self.n_vals,
                });
            }
            if !self.get(arg, level as usize) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Cell-wise disjunction with `other`, in place.
    pub fn union_in_place(&mut self, other: &Relation) -> Result<()> {
        self.check_dims(other)?;
        for arg in 0..self.n_args {
            let base = arg * self.words_per_col;
            let mut count = 0u32;
            for w in 0..self.words_per_col {
                let merged = self.words[base + w] | other.words[base + w];
                self.words[base + w] = merged;
                count += merged.count_ones();
            }
            self.col_counts[arg] = count;
        }
        Ok(())
    }

    /// Cell-wise disjunction, by value.
    pub fn union(&self, other: &Relation) -> Result<Relation> {
        let mut out = self.clone();
        out.union_in_place(other)?;
        Ok(out)
    }

    /// Whether every marked cell here is marked in `other`.
    pub fn is_subset_of(&self, other: &Relation) -> Result<bool> {
        self.check_dims(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0))
    }

    /// Average indeterminacy: mean over arguments of `log2(mu)`, counting
    /// empty columns as fully determined (zero contribution).
    pub fn entropy(&self) -> f64 {
        let sum: f64 = self
            .col_counts
            .iter()
            .filter(|&&mu| mu >= 1)
            .map(|&mu| (mu as f64).log2())
            .sum();
        sum / self.n_args as f64
    }

    fn check_dims(&self, other: &Relation) -> Result<()> {
        if self.n_args != other.n_args || self.n_vals != other.n_vals {
            return Err(Error::dimension(format!(
                "{}x{} vs {}x{}",
                self.n_args, self.n_vals, other.n_args, other.n_vals
            )));
        }
        Ok(())
    }

    fn check_args(&self, f: &DiscreteFunction) -> Result<()> {
        if f.n_args() != self.n_args {
            return Err(Error::dimension(format!(
                "function has {} arguments, relation has {}",
                f.n_args(),
                self.n_args
            )));
        }
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn recount(&self) -> Vec<u32> {
        (0..self.n_args)
            .map(|a| self.col(a).iter().map(|w| w.count_ones()).sum())
            .collect()
    }
}
