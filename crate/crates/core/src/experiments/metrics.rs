//! Recognition metrics over one evaluation point.
//!
//! Per-register metrics treat each register as a one-vs-rest detector: the
//! positives of register k are the test items whose class is in k's label
//! set, and an acceptance of any item counts toward k regardless of what the
//! other registers did. System metrics instead commit each item to at most
//! one register (minimal entropy among the accepting ones) and score that
//! unique assignment: precision over the assigned items, recall over all
//! items. Zero-denominator rates default to 1.0 (an idle detector makes no
//! false claims).

use std::collections::BTreeSet;

use serde::Serialize;

use crate::amr::Label;
use crate::util::mean;

/// System verdict for one test item.
#[derive(Clone, Debug)]
pub struct ItemJudgment {
    /// Register ids that accepted the item, ascending.
    pub accepting: Vec<usize>,
    /// Minimal-entropy unique selection, if anything accepted.
    pub chosen: Option<usize>,
}

/// Metrics of one evaluation point (one fold at one granularity or fill).
#[derive(Clone, Debug)]
pub struct RecognitionMetrics {
    pub per_amr_precision: Vec<f64>,
    pub per_amr_recall: Vec<f64>,
    pub per_amr_entropy: Vec<f64>,
    pub system_precision: f64,
    pub system_recall: f64,
    /// Mean number of accepting registers per test item.
    pub avg_accepting: f64,
}

impl RecognitionMetrics {
    /// Macro average over registers.
    pub fn amr_precision(&self) -> f64 {
        mean(&self.per_amr_precision)
    }

    pub fn amr_recall(&self) -> f64 {
        mean(&self.per_amr_recall)
    }

    pub fn amr_entropy(&self) -> f64 {
        mean(&self.per_amr_entropy)
    }

    pub fn scalars(&self) -> MetricScalars {
        MetricScalars {
            amr_precision: self.amr_precision(),
            amr_recall: self.amr_recall(),
            amr_entropy: self.amr_entropy(),
            system_precision: self.system_precision,
            system_recall: self.system_recall,
            avg_accepting: self.avg_accepting,
        }
    }
}

/// The scalar metric columns of a report row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricScalars {
    pub amr_precision: f64,
    pub amr_recall: f64,
    pub amr_entropy: f64,
    pub system_precision: f64,
    pub system_recall: f64,
    pub avg_accepting: f64,
}

fn rate(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores per-item judgments against the true labels.
///
/// `label_sets[k]` are the classes register `k` holds and `entropies[k]` its
/// entropy at evaluation time; judgments and truths are aligned.
pub fn compute_metrics(
    judgments: &[ItemJudgment],
    truths: &[Label],
    label_sets: &[BTreeSet<Label>],
    entropies: &[f64],
) -> RecognitionMetrics {
    assert_eq!(judgments.len(), truths.len(), "misaligned judgments");
    assert_eq!(label_sets.len(), entropies.len(), "misaligned registers");
    let k = label_sets.len();

    let mut tp = vec![0usize; k];
    let mut fp = vec![0usize; k];
    let mut fn_ = vec![0usize; k];
    let mut assigned = 0usize;
    let mut correct = 0usize;
    let mut accept_total = 0usize;

    for (judgment, &truth) in judgments.iter().zip(truths) {
        accept_total += judgment.accepting.len();
        let mut accepts = vec![false; k];
        for &id in &judgment.accepting {
            accepts[id] = true;
        }
        for id in 0..k {
            let positive = label_sets[id].contains(&truth);
            match (accepts[id], positive) {
                (true, true) => tp[id] += 1,
                (true, false) => fp[id] += 1,
                (false, true) => fn_[id] += 1,
                (false, false) => {}
            }
        }
        if let Some(chosen) = judgment.chosen {
            assigned += 1;
            if label_sets[chosen].contains(&truth) {
                correct += 1;
            }
        }
    }

    RecognitionMetrics {
        per_amr_precision: (0..k).map(|i| rate(tp[i], tp[i] + fp[i])).collect(),
        per_amr_recall: (0..k).map(|i| rate(tp[i], tp[i] + fn_[i])).collect(),
        per_amr_entropy: entropies.to_vec(),
        system_precision: rate(correct, assigned),
        system_recall: rate(correct, judgments.len()),
        avg_accepting: if judgments.is_empty() {
            0.0
        } else {
            accept_total as f64 / judgments.len() as f64
        },
    }
}

/// Spearman rank correlation with average ranks on ties. `None` when fewer
/// than two points or either side is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return None;
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let mx = mean(&rx);
    let my = mean(&ry);
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mx) * (b - my);
        vx += (a - mx) * (a - mx);
        vy += (b - my) * (b - my);
    }
    if vx == 0.0 || vy == 0.0 {
        return None;
    }
    Some(cov / (vx.sqrt() * vy.sqrt()))
}

fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("finite metric values"));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}
