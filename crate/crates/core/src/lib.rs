//! Entropic associative memory: boolean-relation memory registers supporting
//! register / recognize / retrieve operations with an intrinsic entropy
//! measure, plus the experiment harness that exercises them on a handwritten
//! digit corpus.
//!
//! Layering, bottom up:
//!
//! * [`ric`] — relations, discrete functions, the abstraction / containment /
//!   reduction operations and the entropy measure.
//! * [`quantizer`] — real-valued feature vectors and their discretization
//!   into `2^m` levels.
//! * [`amr`] — associative memory registers and the multi-register system.
//! * [`features`] — block-average image analysis/synthesis and the feature
//!   interchange format.
//! * [`dataset`] — IDX corpus loading and the train/remembered/test
//!   partition scheme.
//! * [`experiments`] — the four recognition/retrieval experiments with their
//!   metrics and reports.

pub mod amr;
pub mod dataset;
pub mod error;
pub mod experiments;
pub mod features;
pub mod quantizer;
pub mod ric;
pub mod seeding;
pub mod util;

pub use amr::{Amr, Label, MemorySystem, Recognition, RetrieveOutcome};
pub use error::{Error, Result};
pub use features::{ExtractorKind, ExtractorSpec, GrayImage};
pub use quantizer::{FeatureVector, QuantizerModel};
pub use ric::{DiscreteFunction, Relation, SamplerPolicy};
