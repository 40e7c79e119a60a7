//! Joint intent classification and slot tagging.
//!
//! [`Tagger`] is the contract the inference steps rely on: per-position label
//! distributions plus an intent distribution. [`Model`] is the trainable
//! reference implementation, a windowed log-linear token classifier paired
//! with a bag-of-features intent classifier.

mod loglinear;
mod model;
mod persist;
mod table;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::SlotLabel;

pub use loglinear::LogLinear;
pub use model::{corpus_fingerprint, token_features, train, Hyperparams, Model, ModelMeta, TrainReport};
pub use persist::{load_model, load_model_file, save_model, save_model_file, FORMAT_VERSION, MAGIC};
pub use table::TableTagger;

#[derive(Debug, Error)]
pub enum TaggerError {
    #[error("cannot predict on an empty token sequence")]
    EmptyInput,
    #[error("cannot train on an empty corpus")]
    EmptyCorpus,
    #[error("inventory mismatch: {0}")]
    InventoryMismatch(String),
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("unsupported model format version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupt model payload: {0}")]
    CorruptPayload(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Per-position distributions over the slot-label inventory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TagPosterior {
    labels: Vec<SlotLabel>,
    positions: Vec<Vec<f64>>,
}

impl TagPosterior {
    /// Panics if a row's width differs from the label count.
    pub fn new(labels: Vec<SlotLabel>, positions: Vec<Vec<f64>>) -> Self {
        assert!(positions.iter().all(|p| p.len() == labels.len()));
        TagPosterior { labels, positions }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn labels(&self) -> &[SlotLabel] {
        &self.labels
    }

    pub fn distribution(&self, i: usize) -> &[f64] {
        &self.positions[i]
    }

    /// Index of the most probable label; the lowest index wins ties.
    pub fn argmax(&self, i: usize) -> usize {
        argmax(&self.positions[i])
    }

    pub fn label(&self, i: usize) -> &SlotLabel {
        &self.labels[self.argmax(i)]
    }

    /// `p_i`: probability of the argmax label at position `i`.
    pub fn confidence(&self, i: usize) -> f64 {
        self.positions[i][self.argmax(i)]
    }

    /// Slot class of the argmax label, ignoring B/I.
    pub fn class(&self, i: usize) -> Option<&str> {
        self.label(i).class()
    }

    pub fn argmax_labels(&self) -> Vec<SlotLabel> {
        (0..self.len()).map(|i| self.label(i).clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntentPosterior {
    intents: Vec<String>,
    probs: Vec<f64>,
}

impl IntentPosterior {
    pub fn new(intents: Vec<String>, probs: Vec<f64>) -> Self {
        assert_eq!(intents.len(), probs.len());
        IntentPosterior { intents, probs }
    }

    pub fn intents(&self) -> &[String] {
        &self.intents
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn best(&self) -> (&str, f64) {
        let i = argmax(&self.probs);
        (&self.intents[i], self.probs[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub tags: TagPosterior,
    pub intent: IntentPosterior,
}

/// A joint intent/slot model usable by the inference pipeline.
///
/// Implementations must be deterministic and must accept the `<unk>` and
/// delex placeholder surfaces as ordinary input tokens.
pub trait Tagger: Send + Sync {
    fn labels(&self) -> &[SlotLabel];

    fn predict(&self, tokens: &[String]) -> Result<Prediction, TaggerError>;
}

impl<T: Tagger + ?Sized> Tagger for std::sync::Arc<T> {
    fn labels(&self) -> &[SlotLabel] {
        (**self).labels()
    }

    fn predict(&self, tokens: &[String]) -> Result<Prediction, TaggerError> {
        (**self).predict(tokens)
    }
}

pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Numerically stable softmax in place.
pub(crate) fn softmax(scores: &mut [f64]) {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        sum += *s;
    }
    for s in scores.iter_mut() {
        *s /= sum;
    }
}
