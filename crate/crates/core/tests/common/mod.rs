//! Shared test support: a naive set-of-pairs relation oracle, random
//! generators, and the evaluation corpus loader.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use eam_core::dataset::{self, idx, LabeledCorpus};
use eam_core::{DiscreteFunction, Relation};

/// Relation as an explicit set of `(argument, value)` pairs; the independent
/// reference the packed bit-matrix implementation is checked against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveRelation {
    pub n_args: usize,
    pub n_vals: usize,
    pub pairs: BTreeSet<(usize, usize)>,
}

impl NaiveRelation {
    pub fn empty(n_args: usize, n_vals: usize) -> Self {
        NaiveRelation {
            n_args,
            n_vals,
            pairs: BTreeSet::new(),
        }
    }

    pub fn set(&mut self, arg: usize, val: usize) {
        assert!(arg < self.n_args && val < self.n_vals);
        self.pairs.insert((arg, val));
    }

    pub fn union(&self, other: &NaiveRelation) -> NaiveRelation {
        assert_eq!((self.n_args, self.n_vals), (other.n_args, other.n_vals));
        NaiveRelation {
            n_args: self.n_args,
            n_vals: self.n_vals,
            pairs: self.pairs.union(&other.pairs).copied().collect(),
        }
    }

    pub fn is_subset_of(&self, other: &NaiveRelation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn entropy(&self) -> f64 {
        let sum: f64 = (0..self.n_args)
            .map(|a| self.pairs.iter().filter(|&&(pa, _)| pa == a).count())
            .filter(|&mu| mu >= 1)
            .map(|mu| (mu as f64).log2())
            .sum();
        sum / self.n_args as f64
    }

    /// The packed counterpart with identical cells.
    pub fn to_packed(&self) -> Relation {
        let mut r = Relation::empty(self.n_args, self.n_vals);
        for &(a, v) in &self.pairs {
            r.set(a, v);
        }
        r
    }
}

/// Packed relation and its naive twin with random cells.
pub fn random_relation_pair(
    rng: &mut ChaCha8Rng,
    n_args: usize,
    n_vals: usize,
    density: f64,
) -> (Relation, NaiveRelation) {
    let mut naive = NaiveRelation::empty(n_args, n_vals);
    for a in 0..n_args {
        for v in 0..n_vals {
            if rng.random_bool(density) {
                naive.set(a, v);
            }
        }
    }
    (naive.to_packed(), naive)
}

pub fn random_total_function(rng: &mut ChaCha8Rng, n_args: usize, n_vals: usize) -> DiscreteFunction {
    DiscreteFunction::total(
        (0..n_args)
            .map(|_| rng.random_range(0..n_vals as u16))
            .collect::<Vec<_>>(),
    )
}

/// A total function contained in `r`, or `None` if some column is empty.
pub fn constituent_function(rng: &mut ChaCha8Rng, r: &Relation) -> Option<DiscreteFunction> {
    let mut f = DiscreteFunction::undefined(r.n_args());
    for arg in 0..r.n_args() {
        let marked = r.marked_values(arg);
        if marked.is_empty() {
            return None;
        }
        f.set(arg, marked[rng.random_range(0..marked.len())]);
    }
    Some(f)
}

/// Seed for the synthetic fallback corpus; fixed so every test binary sees
/// the same data.
pub const CORPUS_SEED: u64 = 1701;
pub const FULL_CORPUS_LEN: usize = 70_000;

/// The evaluation corpus: the real files when `EAM_MNIST_DIR` names a
/// directory with the four official IDX files, otherwise the deterministic
/// synthetic corpus of the same shape.
pub fn evaluation_corpus() -> LabeledCorpus {
    match std::env::var_os("EAM_MNIST_DIR") {
        Some(dir) => {
            let dir = PathBuf::from(dir);
            let pick = |stem: &str| {
                let plain = dir.join(stem);
                if plain.exists() {
                    plain
                } else {
                    dir.join(format!("{stem}.gz"))
                }
            };
            let mut corpus = LabeledCorpus::new(
                idx::load_idx_images(&pick("train-images-idx3-ubyte")).expect("train images"),
                idx::load_idx_labels(&pick("train-labels-idx1-ubyte")).expect("train labels"),
            )
            .expect("train corpus");
            corpus.append(
                LabeledCorpus::new(
                    idx::load_idx_images(&pick("t10k-images-idx3-ubyte")).expect("test images"),
                    idx::load_idx_labels(&pick("t10k-labels-idx1-ubyte")).expect("test labels"),
                )
                .expect("test corpus"),
            );
            eprintln!("evaluation corpus: MNIST from {dir:?} ({} items)", corpus.len());
            corpus
        }
        None => {
            let corpus = dataset::synth::generate(FULL_CORPUS_LEN, CORPUS_SEED);
            eprintln!("evaluation corpus: synthetic ({} items)", corpus.len());
            corpus
        }
    }
}
