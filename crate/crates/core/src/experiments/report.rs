//! Report files: CSV tables (one row per fold and sweep point) and JSON
//! summaries (per-point means and standard deviations over folds).
//!
//! Column order is part of the interface; floats print with six decimals so
//! identical runs produce byte-identical files.

use serde::Serialize;

use super::{Exp4Result, SweepResult};
use crate::dataset::NUM_CLASSES;
use crate::error::Result;

pub const SWEEP_CSV_HEADER: &str = "experiment,fold,m,fill_pct,amr_precision,amr_recall,\
                                    amr_entropy,system_precision,system_recall,avg_accepting";
pub const EXP4_CSV_HEADER: &str =
    "fold,digit,sample,fill_pct,entropy,accepted,chosen_amr,distance,identity_distance";

pub fn sweep_csv(experiment: u32, sweep: &SweepResult) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in &sweep.rows {
        let s = row.metrics.scalars();
        out.push_str(&format!(
            "{},{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
            experiment,
            row.fold,
            row.m,
            row.fill_pct,
            s.amr_precision,
            s.amr_recall,
            s.amr_entropy,
            s.system_precision,
            s.system_recall,
            s.avg_accepting,
        ));
    }
    out
}

#[derive(Serialize)]
struct PointJson {
    m: u32,
    fill_pct: u32,
    folds: usize,
    mean: super::MetricScalars,
    std: super::MetricScalars,
}

#[derive(Serialize)]
struct SweepJson {
    experiment: u32,
    axis: &'static str,
    points: Vec<PointJson>,
}

pub fn sweep_summary_json(experiment: u32, sweep: &SweepResult) -> Result<String> {
    let summary = SweepJson {
        experiment,
        axis: match sweep.axis {
            super::AxisKind::Granularity => "m",
            super::AxisKind::FillPercent => "fill_pct",
        },
        points: sweep
            .fold_means()
            .into_iter()
            .map(|p| PointJson {
                m: p.m,
                fill_pct: p.fill_pct,
                folds: p.folds,
                mean: p.mean,
                std: p.std,
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&summary).expect("serializable summary") + "\n")
}

pub fn exp4_csv(result: &Exp4Result) -> String {
    let mut out = String::from(EXP4_CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        let opt = |v: Option<f64>| v.map_or(String::new(), |d| format!("{d:.6}"));
        out.push_str(&format!(
            "{},{},{},{},{:.6},{},{},{},{}\n",
            row.fold,
            row.digit,
            row.sample,
            row.fill_pct,
            row.entropy,
            row.accepted as u8,
            row.chosen_amr.map_or(String::new(), |id| id.to_string()),
            opt(row.distance),
            opt(row.identity_distance),
        ));
    }
    out
}

#[derive(Serialize)]
struct FillJson {
    fill_pct: u32,
    mean_entropy: f64,
    acceptance_rate: f64,
    mean_distance: Option<f64>,
}

#[derive(Serialize)]
struct DigitSpearmanJson {
    digit: u8,
    spearman: Option<f64>,
    points: usize,
}

#[derive(Serialize)]
struct Exp4Json {
    samples_per_digit: usize,
    per_fill: Vec<FillJson>,
    per_digit_spearman: Vec<DigitSpearmanJson>,
    mean_spearman: Option<f64>,
}

pub fn exp4_summary_json(result: &Exp4Result) -> Result<String> {
    let per_fill = result
        .fills
        .iter()
        .map(|&fill| {
            let rows: Vec<_> = result.rows.iter().filter(|r| r.fill_pct == fill).collect();
            let accepted = rows.iter().filter(|r| r.accepted).count();
            let distances: Vec<f64> = rows.iter().filter_map(|r| r.distance).collect();
            FillJson {
                fill_pct: fill,
                mean_entropy: crate::util::mean(
                    &rows.iter().map(|r| r.entropy).collect::<Vec<_>>(),
                ),
                acceptance_rate: if rows.is_empty() {
                    0.0
                } else {
                    accepted as f64 / rows.len() as f64
                },
                mean_distance: if distances.is_empty() {
                    None
                } else {
                    Some(crate::util::mean(&distances))
                },
            }
        })
        .collect();
    let per_digit_spearman = (0..NUM_CLASSES as u8)
        .map(|digit| DigitSpearmanJson {
            digit,
            spearman: result
                .spearman_by_digit()
                .into_iter()
                .find(|(d, _)| *d == digit)
                .and_then(|(_, rho)| rho),
            points: result.entropy_distance_points(digit).len(),
        })
        .collect();
    let summary = Exp4Json {
        samples_per_digit: result.samples_per_digit,
        per_fill,
        per_digit_spearman,
        mean_spearman: result.mean_spearman(),
    };
    Ok(serde_json::to_string_pretty(&summary).expect("serializable summary") + "\n")
}
