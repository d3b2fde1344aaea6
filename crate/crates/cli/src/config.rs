//! Run configuration: a JSON file plus flag overrides.
//!
//! Flags win over the config file. A run must name exactly one input source
//! (raw images with labels, or a feature file) and must carry a seed, so
//! reruns are reproducible by construction.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use eam_core::{ExtractorSpec, SamplerPolicy};

use crate::CliError;

/// On-disk and on-flag run options; all optional until resolved.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub images: Vec<PathBuf>,
    pub labels: Vec<PathBuf>,
    pub features: Option<PathBuf>,
    pub m: Option<u32>,
    pub m_range: Option<Vec<u32>>,
    pub fills: Option<Vec<u32>>,
    pub folds: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub sampler: Option<SamplerPolicy>,
    pub grid: Option<usize>,
    pub pad: Option<usize>,
    pub jobs: Option<usize>,
    pub samples_per_digit: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {path:?}: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {path:?}: {e}")))
    }

    /// Overlays `flags` (set fields win) on top of `self`.
    pub fn merged_with(mut self, flags: RunConfig) -> Self {
        if !flags.images.is_empty() {
            self.images = flags.images;
        }
        if !flags.labels.is_empty() {
            self.labels = flags.labels;
        }
        macro_rules! overlay {
            ($($field:ident),*) => {
                $(if flags.$field.is_some() { self.$field = flags.$field; })*
            };
        }
        overlay!(
            features, m, m_range, fills, folds, seed, out, sampler, grid, pad, jobs,
            samples_per_digit
        );
        self
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        self.seed
            .ok_or_else(|| CliError::Usage("a seed is required (--seed or config)".into()))
    }

    pub fn out_dir(&self) -> Result<&Path, CliError> {
        self.out
            .as_deref()
            .ok_or_else(|| CliError::Usage("an output directory is required (--out)".into()))
    }

    pub fn sampler(&self) -> SamplerPolicy {
        self.sampler.unwrap_or(SamplerPolicy::Triangular)
    }

    pub fn extractor(&self) -> Result<ExtractorSpec, CliError> {
        let grid = self.grid.unwrap_or(8);
        let pad = self.pad.unwrap_or(32);
        ExtractorSpec::block_average(grid, pad, 28, 28)
            .map_err(|e| CliError::Usage(format!("extractor geometry: {e}")))
    }

    /// Exactly one of raw images or a feature file.
    pub fn validated_source(&self) -> Result<InputSource, CliError> {
        match (self.images.is_empty(), &self.features) {
            (false, None) => {
                if self.labels.is_empty() {
                    Err(CliError::Usage(
                        "--labels is required alongside --images".into(),
                    ))
                } else if self.images.len() != self.labels.len() {
                    Err(CliError::Usage(format!(
                        "{} image files but {} label files",
                        self.images.len(),
                        self.labels.len()
                    )))
                } else {
                    Ok(InputSource::Images(
                        self.images.clone(),
                        self.labels.clone(),
                    ))
                }
            }
            (true, Some(path)) => Ok(InputSource::Features(path.clone())),
            (true, None) => Err(CliError::Usage(
                "an input source is required: --images/--labels or --features".into(),
            )),
            (false, Some(_)) => Err(CliError::Usage(
                "--images and --features are mutually exclusive".into(),
            )),
        }
    }

    pub fn m_values(&self) -> Vec<u32> {
        match (&self.m_range, self.m) {
            (Some(range), _) => range.clone(),
            (None, Some(m)) => vec![m],
            (None, None) => eam_core::experiments::DEFAULT_M_RANGE.to_vec(),
        }
    }

    pub fn fixed_m(&self) -> u32 {
        self.m.unwrap_or(eam_core::experiments::FIXED_M)
    }

    pub fn fills(&self) -> Vec<u32> {
        self.fills
            .clone()
            .unwrap_or_else(|| eam_core::experiments::DEFAULT_FILLS.to_vec())
    }

    pub fn folds(&self) -> Result<Vec<usize>, CliError> {
        let folds = self
            .folds
            .clone()
            .unwrap_or_else(|| (0..eam_core::dataset::NUM_FOLDS).collect());
        if folds.is_empty() {
            return Err(CliError::Usage("fold list is empty".into()));
        }
        if let Some(&bad) = folds.iter().find(|&&f| f >= eam_core::dataset::NUM_FOLDS) {
            return Err(CliError::Usage(format!(
                "fold {bad} out of range 0..{}",
                eam_core::dataset::NUM_FOLDS
            )));
        }
        Ok(folds)
    }
}

/// Resolved input source of a run.
pub enum InputSource {
    /// Parallel lists of IDX image and label files, concatenated in order.
    Images(Vec<PathBuf>, Vec<PathBuf>),
    Features(PathBuf),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: RunConfig = serde_json::from_str(
            r#"{"seed": 1, "m": 4, "images": ["a.idx"], "labels": ["b.idx"]}"#,
        )
        .unwrap();
        let flags = RunConfig {
            seed: Some(9),
            ..Default::default()
        };
        let merged = file.merged_with(flags);
        assert_eq!(merged.seed().unwrap(), 9);
        assert_eq!(merged.fixed_m(), 4);
        assert!(matches!(
            merged.validated_source().unwrap(),
            InputSource::Images(..)
        ));
    }

    #[test]
    fn source_must_be_exclusive() {
        let both = RunConfig {
            images: vec!["a".into()],
            labels: vec!["b".into()],
            features: Some("f".into()),
            ..Default::default()
        };
        assert!(both.validated_source().is_err());
        let neither = RunConfig::default();
        assert!(neither.validated_source().is_err());
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sead": 3}"#).is_err());
    }
}
