//! The four recognition/retrieval experiments.
//!
//! 1. One register per digit, swept over granularities `2^m`.
//! 2. One register per digit pair, same sweep.
//! 3. Fixed granularity, registers filled with growing nested fractions of
//!    the remembered corpus.
//! 4. Retrieval similarity: per fill level, cues are retrieved and compared
//!    to the result in quantized feature space, with images rendered for
//!    qualitative inspection.
//!
//! Folds and sweep points are independent work units and run in parallel;
//! every random choice derives from the run seed, so reports are identical
//! across runs and thread schedules.

pub mod metrics;
pub mod report;

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::amr::{select_min_entropy, Label, MemorySystem};
use crate::dataset::{fill_cut, make_partition, LabeledCorpus, Partition, NUM_CLASSES, NUM_FOLDS};
use crate::error::{Error, Result};
use crate::features::{self, ExtractorKind, ExtractorSpec, GrayImage};
use crate::quantizer::{FeatureVector, QuantizerModel};
use crate::ric::{DiscreteFunction, SamplerPolicy};
use crate::seeding;

pub use metrics::{compute_metrics, spearman, ItemJudgment, MetricScalars, RecognitionMetrics};

/// Fill percentages used by experiments 3 and 4.
pub const DEFAULT_FILLS: [u32; 8] = [1, 2, 4, 8, 16, 32, 64, 100];
/// Granularity exponents swept by experiments 1 and 2.
pub const DEFAULT_M_RANGE: [u32; 10] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9];
/// Fixed granularity exponent of experiments 3 and 4 (64x32 registers).
pub const FIXED_M: u32 = 5;

/// Immutable inputs shared by all experiments: labels, extracted features,
/// extractor geometry, sampler policy, and the run seed.
#[derive(Clone, Debug)]
pub struct ExperimentContext {
    labels: Vec<Label>,
    features: Vec<FeatureVector>,
    extractor: ExtractorSpec,
    sampler: SamplerPolicy,
    seed: u64,
}

impl ExperimentContext {
    /// Extracts features from every corpus image (in parallel).
    pub fn from_corpus(
        corpus: &LabeledCorpus,
        extractor: ExtractorSpec,
        sampler: SamplerPolicy,
        seed: u64,
    ) -> Result<Self> {
        let features = corpus
            .images()
            .par_iter()
            .map(|img| features::extract(&extractor, img))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExperimentContext {
            labels: corpus.labels().to_vec(),
            features,
            extractor,
            sampler,
            seed,
        })
    }

    /// Uses externally computed features; labels must be digit classes.
    pub fn from_features(
        rows: Vec<(Label, FeatureVector)>,
        extractor: ExtractorSpec,
        sampler: SamplerPolicy,
        seed: u64,
    ) -> Result<Self> {
        let (labels, features): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= NUM_CLASSES) {
            return Err(Error::Range {
                value: bad as usize,
                levels: NUM_CLASSES,
            });
        }
        let n = features.first().map_or(0, FeatureVector::len);
        if extractor.kind == ExtractorKind::BlockAverage && extractor.n_features() != n {
            return Err(Error::dimension(format!(
                "{n} features per row, extractor grid implies {}",
                extractor.n_features()
            )));
        }
        Ok(ExperimentContext {
            labels,
            features,
            extractor,
            sampler,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn features(&self) -> &[FeatureVector] {
        &self.features
    }

    pub fn extractor(&self) -> &ExtractorSpec {
        &self.extractor
    }

    pub fn sampler(&self) -> SamplerPolicy {
        self.sampler
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn check_folds(&self, folds: &[usize]) -> Result<()> {
        if self.is_empty() {
            return Err(Error::Calibration {
                reason: "empty corpus".into(),
            });
        }
        match folds.iter().find(|&&f| f >= NUM_FOLDS) {
            Some(&bad) => Err(Error::Range {
                value: bad,
                levels: NUM_FOLDS,
            }),
            None => Ok(()),
        }
    }

    /// Partition, fitted quantizer and an empty register bank for one fold.
    fn fold_setup(
        &self,
        fold: usize,
        m: u32,
        label_sets: &[BTreeSet<Label>],
    ) -> Result<(Partition, MemorySystem)> {
        let partition = make_partition(&self.labels, fold, self.seed);
        let quantizer =
            QuantizerModel::fit(partition.train_idx.iter().map(|&i| &self.features[i]), m)?;
        let system = MemorySystem::with_label_sets(label_sets, quantizer, self.sampler)?;
        Ok((partition, system))
    }

    fn quantize_all(
        &self,
        quantizer: &QuantizerModel,
        idx: &[usize],
    ) -> Result<Vec<DiscreteFunction>> {
        idx.iter()
            .map(|&i| quantizer.quantize(&self.features[i]))
            .collect()
    }
}

/// Which quantity the sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisKind {
    Granularity,
    FillPercent,
}

/// One evaluation point: one fold at one sweep position.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub fold: usize,
    pub m: u32,
    pub fill_pct: u32,
    pub metrics: RecognitionMetrics,
}

/// All evaluation points of one experiment, axis-major then fold order.
#[derive(Clone, Debug)]
pub struct SweepResult {
    pub axis: AxisKind,
    pub rows: Vec<SweepRow>,
}

/// Per-point mean and standard deviation over folds.
#[derive(Clone, Debug)]
pub struct PointSummary {
    pub m: u32,
    pub fill_pct: u32,
    pub folds: usize,
    pub mean: MetricScalars,
    pub std: MetricScalars,
}

impl SweepResult {
    pub fn axis_values(&self) -> Vec<u32> {
        let mut values: Vec<u32> = self
            .rows
            .iter()
            .map(|r| match self.axis {
                AxisKind::Granularity => r.m,
                AxisKind::FillPercent => r.fill_pct,
            })
            .collect();
        values.dedup();
        values
    }

    pub fn rows_at(&self, axis_value: u32) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| match self.axis {
            AxisKind::Granularity => r.m == axis_value,
            AxisKind::FillPercent => r.fill_pct == axis_value,
        })
    }

    pub fn fold_means(&self) -> Vec<PointSummary> {
        use crate::util::{mean, stddev};
        self.axis_values()
            .into_iter()
            .map(|value| {
                let scalars: Vec<MetricScalars> =
                    self.rows_at(value).map(|r| r.metrics.scalars()).collect();
                let agg = |f: fn(&[f64]) -> f64| MetricScalars {
                    amr_precision: f(&scalars.iter().map(|s| s.amr_precision).collect::<Vec<_>>()),
                    amr_recall: f(&scalars.iter().map(|s| s.amr_recall).collect::<Vec<_>>()),
                    amr_entropy: f(&scalars.iter().map(|s| s.amr_entropy).collect::<Vec<_>>()),
                    system_precision: f(&scalars
                        .iter()
                        .map(|s| s.system_precision)
                        .collect::<Vec<_>>()),
                    system_recall: f(&scalars.iter().map(|s| s.system_recall).collect::<Vec<_>>()),
                    avg_accepting: f(&scalars.iter().map(|s| s.avg_accepting).collect::<Vec<_>>()),
                };
                let first = self.rows_at(value).next();
                PointSummary {
                    m: first.map_or(0, |r| r.m),
                    fill_pct: first.map_or(0, |r| r.fill_pct),
                    folds: scalars.len(),
                    mean: agg(mean),
                    std: agg(stddev),
                }
            })
            .collect()
    }
}

/// One register per digit.
pub fn single_label_sets() -> Vec<BTreeSet<Label>> {
    (0..NUM_CLASSES as Label).map(|d| BTreeSet::from([d])).collect()
}

/// One register per digit pair: {0,1}, {2,3}, {4,5}, {6,7}, {8,9}.
pub fn pair_label_sets() -> Vec<BTreeSet<Label>> {
    (0..NUM_CLASSES as Label / 2)
        .map(|p| BTreeSet::from([2 * p, 2 * p + 1]))
        .collect()
}

fn evaluate(
    system: &MemorySystem,
    label_sets: &[BTreeSet<Label>],
    test_funcs: &[DiscreteFunction],
    test_labels: &[Label],
) -> Result<RecognitionMetrics> {
    let entropies = system.entropies();
    let judgments = test_funcs
        .iter()
        .map(|f| {
            let recognition = system.recognize(f)?;
            let chosen = select_min_entropy(&recognition.accepting, &recognition.entropies);
            Ok(ItemJudgment {
                accepting: recognition.accepting,
                chosen,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(compute_metrics(&judgments, test_labels, label_sets, &entropies))
}

/// Registers the full remembered share and sweeps granularities; common body
/// of experiments 1 and 2.
pub fn run_granularity_sweep(
    ctx: &ExperimentContext,
    label_sets: &[BTreeSet<Label>],
    m_values: &[u32],
    folds: &[usize],
) -> Result<SweepResult> {
    ctx.check_folds(folds)?;
    let mut m_values = m_values.to_vec();
    m_values.sort_unstable();
    m_values.dedup();
    let units: Vec<(u32, usize)> = m_values
        .iter()
        .flat_map(|&m| folds.iter().map(move |&f| (m, f)))
        .collect();
    let rows = units
        .par_iter()
        .map(|&(m, fold)| {
            let (partition, mut system) = ctx.fold_setup(fold, m, label_sets)?;
            let rem = ctx.quantize_all(system.quantizer(), &partition.rem_idx)?;
            for (f, &i) in rem.iter().zip(&partition.rem_idx) {
                system.register(ctx.labels[i], f)?;
            }
            let test = ctx.quantize_all(system.quantizer(), &partition.test_idx)?;
            let test_labels: Vec<Label> =
                partition.test_idx.iter().map(|&i| ctx.labels[i]).collect();
            let metrics = evaluate(&system, label_sets, &test, &test_labels)?;
            Ok(SweepRow {
                fold,
                m,
                fill_pct: 100,
                metrics,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        axis: AxisKind::Granularity,
        rows,
    })
}

/// Experiment 1: one register per digit over a granularity sweep.
pub fn run_experiment1(
    ctx: &ExperimentContext,
    m_values: &[u32],
    folds: &[usize],
) -> Result<SweepResult> {
    run_granularity_sweep(ctx, &single_label_sets(), m_values, folds)
}

/// Experiment 2: registers holding two overlapped digits each.
pub fn run_experiment2(
    ctx: &ExperimentContext,
    m_values: &[u32],
    folds: &[usize],
) -> Result<SweepResult> {
    run_granularity_sweep(ctx, &pair_label_sets(), m_values, folds)
}

fn sorted_fills(fills: &[u32]) -> Result<Vec<u32>> {
    let mut fills = fills.to_vec();
    fills.sort_unstable();
    fills.dedup();
    match fills.last() {
        None => Err(Error::Unsupported {
            reason: "empty fill list".into(),
        }),
        Some(&max) if max > 100 => Err(Error::Range {
            value: max as usize,
            levels: 101,
        }),
        _ => Ok(fills),
    }
}

/// Experiment 3: fixed granularity, nested fill fractions of the remembered
/// corpus. Subsets are nested per class, so each fill level registers only
/// the delta on top of the previous one.
pub fn run_experiment3(
    ctx: &ExperimentContext,
    m: u32,
    fills: &[u32],
    folds: &[usize],
) -> Result<SweepResult> {
    ctx.check_folds(folds)?;
    let fills = sorted_fills(fills)?;
    let label_sets = single_label_sets();
    let rows = folds
        .par_iter()
        .map(|&fold| {
            let (partition, mut system) = ctx.fold_setup(fold, m, &label_sets)?;
            let groups = partition.rem_by_class(&ctx.labels);
            let funcs: Vec<Vec<DiscreteFunction>> = groups
                .iter()
                .map(|g| ctx.quantize_all(system.quantizer(), g))
                .collect::<Result<_>>()?;
            let test = ctx.quantize_all(system.quantizer(), &partition.test_idx)?;
            let test_labels: Vec<Label> =
                partition.test_idx.iter().map(|&i| ctx.labels[i]).collect();

            let mut cuts = vec![0usize; groups.len()];
            let mut fold_rows = Vec::with_capacity(fills.len());
            for &fill in &fills {
                for (class, group) in groups.iter().enumerate() {
                    let next = fill_cut(group.len(), fill);
                    for (f, &i) in funcs[class][cuts[class]..next]
                        .iter()
                        .zip(&group[cuts[class]..next])
                    {
                        system.register(ctx.labels[i], f)?;
                    }
                    cuts[class] = next;
                }
                let metrics = evaluate(&system, &label_sets, &test, &test_labels)?;
                fold_rows.push(SweepRow {
                    fold,
                    m,
                    fill_pct: fill,
                    metrics,
                });
            }
            Ok(fold_rows)
        })
        .collect::<Result<Vec<Vec<SweepRow>>>>()?;

    // axis-major row order
    let mut flat: Vec<SweepRow> = rows.into_iter().flatten().collect();
    flat.sort_by_key(|r| (r.fill_pct, r.fold));
    Ok(SweepResult {
        axis: AxisKind::FillPercent,
        rows: flat,
    })
}

/// One cue's outcome at one fill level.
#[derive(Clone, Debug)]
pub struct Exp4Row {
    pub fold: usize,
    pub digit: Label,
    pub sample: usize,
    pub fill_pct: u32,
    /// Entropy of the register holding the cue's class at this fill level.
    pub entropy: f64,
    pub accepted: bool,
    pub chosen_amr: Option<usize>,
    /// Mean absolute level difference between cue and retrieved function.
    pub distance: Option<f64>,
    /// Same distance under the identity sampler; zero whenever accepted.
    pub identity_distance: Option<f64>,
}

/// Retrieval similarity table plus rendered images.
#[derive(Clone, Debug)]
pub struct Exp4Result {
    pub fills: Vec<u32>,
    pub samples_per_digit: usize,
    pub rows: Vec<Exp4Row>,
    /// `(file stem, image)` pairs for the first fold's first sample per digit.
    pub images: Vec<(String, GrayImage)>,
}

impl Exp4Result {
    /// Per digit, the points `(mean entropy, mean distance)` across fill
    /// levels with at least one accepted retrieval.
    pub fn entropy_distance_points(&self, digit: Label) -> Vec<(f64, f64)> {
        self.fills
            .iter()
            .filter_map(|&fill| {
                let rows: Vec<&Exp4Row> = self
                    .rows
                    .iter()
                    .filter(|r| r.digit == digit && r.fill_pct == fill)
                    .collect();
                let distances: Vec<f64> = rows.iter().filter_map(|r| r.distance).collect();
                if distances.is_empty() {
                    return None;
                }
                let entropy =
                    rows.iter().map(|r| r.entropy).sum::<f64>() / rows.len() as f64;
                Some((entropy, crate::util::mean(&distances)))
            })
            .collect()
    }

    /// Spearman correlation of entropy vs distance per digit.
    pub fn spearman_by_digit(&self) -> Vec<(Label, Option<f64>)> {
        (0..NUM_CLASSES as Label)
            .map(|digit| {
                let pts = self.entropy_distance_points(digit);
                let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
                (digit, spearman(&xs, &ys))
            })
            .collect()
    }

    /// Mean Spearman correlation over digits with enough points.
    pub fn mean_spearman(&self) -> Option<f64> {
        let rhos: Vec<f64> = self
            .spearman_by_digit()
            .into_iter()
            .filter_map(|(_, rho)| rho)
            .collect();
        if rhos.is_empty() {
            None
        } else {
            Some(crate::util::mean(&rhos))
        }
    }
}

/// Experiment 4: retrieve cues at each fill level and measure cue-to-result
/// similarity in quantized feature space.
pub fn run_experiment4(
    ctx: &ExperimentContext,
    m: u32,
    fills: &[u32],
    folds: &[usize],
    samples_per_digit: usize,
) -> Result<Exp4Result> {
    ctx.check_folds(folds)?;
    let fills = sorted_fills(fills)?;
    let label_sets = single_label_sets();
    let image_fold = folds.first().copied();
    let render = ctx.extractor.kind == ExtractorKind::BlockAverage;

    let per_fold = folds
        .par_iter()
        .map(|&fold| {
            let (partition, mut system) = ctx.fold_setup(fold, m, &label_sets)?;
            let groups = partition.rem_by_class(&ctx.labels);
            let funcs: Vec<Vec<DiscreteFunction>> = groups
                .iter()
                .map(|g| ctx.quantize_all(system.quantizer(), g))
                .collect::<Result<_>>()?;

            // cues: the first test items of each class, in partition order
            let mut cue_idx = vec![Vec::new(); NUM_CLASSES];
            for &i in &partition.test_idx {
                let class = ctx.labels[i] as usize;
                if cue_idx[class].len() < samples_per_digit {
                    cue_idx[class].push(i);
                }
            }
            let cues: Vec<Vec<DiscreteFunction>> = cue_idx
                .iter()
                .map(|g| ctx.quantize_all(system.quantizer(), g))
                .collect::<Result<_>>()?;

            let mut images = Vec::new();
            if Some(fold) == image_fold && render {
                for digit in 0..NUM_CLASSES {
                    let Some(&i) = cue_idx[digit].first() else { continue };
                    let cue_img = features::synthesize(&ctx.extractor, &ctx.features[i])?;
                    images.push((format!("exp4_d{digit}_cue"), cue_img));
                    let decoded = system.quantizer().dequantize(&cues[digit][0])?;
                    let decoded_img = features::synthesize(&ctx.extractor, &decoded)?;
                    images.push((format!("exp4_d{digit}_decoded"), decoded_img));
                }
            }

            let mut cuts = vec![0usize; groups.len()];
            let mut rows = Vec::new();
            for &fill in &fills {
                for (class, group) in groups.iter().enumerate() {
                    let next = fill_cut(group.len(), fill);
                    for (f, &i) in funcs[class][cuts[class]..next]
                        .iter()
                        .zip(&group[cuts[class]..next])
                    {
                        system.register(ctx.labels[i], f)?;
                    }
                    cuts[class] = next;
                }
                let entropies = system.entropies();
                for digit in 0..NUM_CLASSES {
                    for (sample, cue) in cues[digit].iter().enumerate() {
                        let seed = seeding::derive(
                            ctx.seed,
                            &[4, fold as u64, fill as u64, digit as u64, sample as u64],
                        );
                        let outcome = system.retrieve(cue, seed)?;
                        let distance = outcome
                            .retrieved
                            .as_ref()
                            .map(|got| level_distance(cue, got));
                        let identity_distance = match outcome.chosen_amr {
                            Some(id) => system.amrs()[id]
                                .retrieve(cue, SamplerPolicy::Identity, seed)?
                                .map(|got| level_distance(cue, &got)),
                            None => None,
                        };
                        if sample == 0 && Some(fold) == image_fold && render {
                            if let Some(got) = &outcome.retrieved {
                                let v = system.quantizer().dequantize(got)?;
                                let img = features::synthesize(&ctx.extractor, &v)?;
                                images.push((format!("exp4_d{digit}_fill{fill}"), img));
                            }
                        }
                        rows.push(Exp4Row {
                            fold,
                            digit: digit as Label,
                            sample,
                            fill_pct: fill,
                            entropy: entropies[digit],
                            accepted: outcome.accepted,
                            chosen_amr: outcome.chosen_amr,
                            distance,
                            identity_distance,
                        });
                    }
                }
            }
            Ok((rows, images))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    let mut images = Vec::new();
    for (fold_rows, fold_images) in per_fold {
        rows.extend(fold_rows);
        images.extend(fold_images);
    }
    rows.sort_by_key(|r| (r.fill_pct, r.fold, r.digit, r.sample));
    Ok(Exp4Result {
        fills,
        samples_per_digit,
        rows,
        images,
    })
}

/// Mean absolute level difference over all arguments of two total functions.
fn level_distance(cue: &DiscreteFunction, got: &DiscreteFunction) -> f64 {
    let sum: f64 = cue
        .defined()
        .zip(got.defined())
        .map(|((_, a), (_, b))| (a as i32 - b as i32).abs() as f64)
        .sum();
    sum / cue.n_args() as f64
}
