//! Corpus ingestion and the train/remembered/test partition scheme.
//!
//! A corpus splits 57/33/10 per class: the training share calibrates the
//! quantizer, the remembered share fills the registers, and the test share
//! measures recognition. Folds rotate the 10% test slice through the data;
//! the per-class shuffle depends only on the seed, so test slices of
//! different folds never overlap.

pub mod idx;
pub mod synth;

use rand::seq::SliceRandom;

use crate::amr::Label;
use crate::error::{Error, Result};
use crate::features::GrayImage;
use crate::seeding;

pub const NUM_CLASSES: usize = 10;
pub const NUM_FOLDS: usize = 10;

/// Images with their digit labels.
#[derive(Clone, Debug)]
pub struct LabeledCorpus {
    images: Vec<GrayImage>,
    labels: Vec<Label>,
}

impl LabeledCorpus {
    pub fn new(images: Vec<GrayImage>, labels: Vec<Label>) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::dimension(format!(
                "{} images vs {} labels",
                images.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= NUM_CLASSES) {
            return Err(Error::Range {
                value: bad as usize,
                levels: NUM_CLASSES,
            });
        }
        Ok(LabeledCorpus { images, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn images(&self) -> &[GrayImage] {
        &self.images
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Appends another corpus (e.g. the official train and test files are
    /// concatenated into one pool before partitioning).
    pub fn append(&mut self, other: LabeledCorpus) {
        self.images.extend(other.images);
        self.labels.extend(other.labels);
    }
}

/// Disjoint index sets covering a corpus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub train_idx: Vec<usize>,
    pub rem_idx: Vec<usize>,
    pub test_idx: Vec<usize>,
}

impl Partition {
    /// Remembered indices grouped per class, preserving the partition's
    /// shuffled order. Prefixes of these groups give nested stratified
    /// subsets for the fill-fraction sweeps.
    pub fn rem_by_class(&self, labels: &[Label]) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); NUM_CLASSES];
        for &i in &self.rem_idx {
            groups[labels[i] as usize].push(i);
        }
        groups
    }

    /// The first `ceil(percent%)` of each class's remembered indices.
    pub fn stratified_rem_prefix(&self, labels: &[Label], percent: u32) -> Vec<usize> {
        self.rem_by_class(labels)
            .iter()
            .flat_map(|group| {
                let take = fill_cut(group.len(), percent);
                group[..take].iter().copied()
            })
            .collect()
    }
}

/// Items a fill percentage takes from a class group: `ceil(len * pct / 100)`,
/// so any positive percentage registers at least one item when the group is
/// nonempty.
pub fn fill_cut(len: usize, percent: u32) -> usize {
    (len * percent as usize).div_ceil(100).min(len)
}

/// Stratified 57/33/10 partition for one of the ten folds.
///
/// Each class's indices are shuffled with a fold-independent seeded RNG; the
/// fold-th tenth becomes the test slice, and the remainder splits 57/90 into
/// train and 33/90 into remembered, in shuffled order. Panics if
/// `fold >= NUM_FOLDS`.
pub fn make_partition(labels: &[Label], fold: usize, seed: u64) -> Partition {
    assert!(fold < NUM_FOLDS, "fold {fold} out of range");
    let mut rng = seeding::rng(seeding::derive(seed, &[0x9a27]));
    let mut partition = Partition {
        train_idx: Vec::new(),
        rem_idx: Vec::new(),
        test_idx: Vec::new(),
    };
    for class in 0..NUM_CLASSES {
        let mut idxs: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l as usize == class)
            .map(|(i, _)| i)
            .collect();
        idxs.shuffle(&mut rng);
        let lo = fold * idxs.len() / NUM_FOLDS;
        let hi = (fold + 1) * idxs.len() / NUM_FOLDS;
        partition.test_idx.extend(&idxs[lo..hi]);
        let remaining: Vec<usize> = idxs[..lo].iter().chain(&idxs[hi..]).copied().collect();
        let train_n = remaining.len() * 57 / 90;
        partition.train_idx.extend(&remaining[..train_n]);
        partition.rem_idx.extend(&remaining[train_n..]);
    }
    partition
}
