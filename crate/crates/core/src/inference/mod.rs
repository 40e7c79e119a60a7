//! Multistep inference: Replace, Expand, Merge, then projection of the final
//! predict pass back onto the original tokens.
//!
//! ```text
//! tokens ──replace──▶ working sequence ──expand (predict, absorb)*──▶
//!        ──merge──▶ final predict ──project──▶ Frame
//! ```

mod frame;
mod steps;
mod working;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{tokenize_surfaces, DelexConfig, LexiconStore, Vocabulary};
use crate::tagger::{Tagger, TaggerError};

pub use frame::{detokenize, project_labels, Frame, SlotSource, SlotSpan};
pub use steps::{expand_step, greedy_lexicon_match, merge_step, replace_step, ExpandOutcome};
pub use working::{DelexSpan, Item, WorkingSequence};

pub const DEFAULT_THRESHOLD: f64 = 0.9;
pub const DEFAULT_MAX_EXPAND_ITERS: usize = 8;

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("no tokens to parse")]
    EmptyText,
    #[error("invalid inference config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Tagger(#[from] TaggerError),
}

/// Everything the inference steps need besides the tagger.
#[derive(Debug, Clone)]
pub struct InferenceConfig {
    /// `Tr`: neighbours at or above this confidence are never absorbed.
    pub threshold: f64,
    pub max_expand_iters: usize,
    pub vocabulary: Vocabulary,
    pub lexicons: LexiconStore,
    pub delex: DelexConfig,
}

impl InferenceConfig {
    pub fn new(vocabulary: Vocabulary, lexicons: LexiconStore, delex: DelexConfig) -> Result<Self, InferenceError> {
        let cfg = InferenceConfig {
            threshold: DEFAULT_THRESHOLD,
            max_expand_iters: DEFAULT_MAX_EXPAND_ITERS,
            vocabulary,
            lexicons,
            delex,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self, InferenceError> {
        self.threshold = threshold;
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_expand_iters(mut self, iters: usize) -> Result<Self, InferenceError> {
        self.max_expand_iters = iters;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), InferenceError> {
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(InferenceError::InvalidConfig(format!(
                "threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        if self.max_expand_iters == 0 {
            return Err(InferenceError::InvalidConfig(
                "max_expand_iters must be at least 1".into(),
            ));
        }
        self.delex
            .validate()
            .map_err(|e| InferenceError::InvalidConfig(e.to_string()))
    }
}

/// Intermediate working sequences of one parse.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub tokens: Vec<String>,
    pub replaced: WorkingSequence,
    /// One entry per absorbing Expand iteration.
    pub expand_rounds: Vec<WorkingSequence>,
    pub expanded: WorkingSequence,
    pub merged: WorkingSequence,
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "input:   {}", self.tokens.join(" "))?;
        writeln!(f, "replace: {}", self.replaced)?;
        for (i, round) in self.expand_rounds.iter().enumerate() {
            writeln!(f, "expand {}: {round}", i + 1)?;
        }
        writeln!(f, "expand:  {}", self.expanded)?;
        write!(f, "merge:   {}", self.merged)
    }
}

/// Tokenizes `text` and runs the full pipeline.
pub fn parse<T: Tagger + ?Sized>(tagger: &T, cfg: &InferenceConfig, text: &str) -> Result<Frame, InferenceError> {
    parse_traced(tagger, cfg, text).map(|(frame, _)| frame)
}

pub fn parse_traced<T: Tagger + ?Sized>(
    tagger: &T,
    cfg: &InferenceConfig,
    text: &str,
) -> Result<(Frame, Trace), InferenceError> {
    parse_tokens_traced(tagger, cfg, &tokenize_surfaces(text))
}

pub fn parse_tokens<T: Tagger + ?Sized>(
    tagger: &T,
    cfg: &InferenceConfig,
    tokens: &[String],
) -> Result<Frame, InferenceError> {
    parse_tokens_traced(tagger, cfg, tokens).map(|(frame, _)| frame)
}

pub fn parse_tokens_traced<T: Tagger + ?Sized>(
    tagger: &T,
    cfg: &InferenceConfig,
    tokens: &[String],
) -> Result<(Frame, Trace), InferenceError> {
    if tokens.is_empty() {
        return Err(InferenceError::EmptyText);
    }
    let replaced = replace_step(tokens, cfg);
    let expanded = expand_step(&replaced, tagger, cfg)?;
    let merged = merge_step(&expanded.sequence, &expanded.prediction.tags);
    let last = tagger.predict(&merged.model_tokens())?;
    // delexicalizing the incident mention hides the intent evidence, so the
    // intent is read from a pass over the undelexicalized tokens
    let plain = tagger.predict(&unk_sequence(tokens, cfg).model_tokens())?;
    let frame = project_labels(&merged, &last.tags, &plain.intent, &cfg.delex);
    let trace = Trace {
        tokens: tokens.to_vec(),
        replaced,
        expand_rounds: expanded.rounds,
        expanded: expanded.sequence,
        merged,
    };
    Ok((frame, trace))
}

/// Single-pass decoding without Replace/Expand/Merge: out-of-vocabulary
/// tokens become `<unk>`, one predict pass, projection. The ablation the
/// multistep pipeline is compared against.
pub fn decode_single_pass<T: Tagger + ?Sized>(
    tagger: &T,
    cfg: &InferenceConfig,
    tokens: &[String],
) -> Result<Frame, InferenceError> {
    if tokens.is_empty() {
        return Err(InferenceError::EmptyText);
    }
    let ws = unk_sequence(tokens, cfg);
    let pred = tagger.predict(&ws.model_tokens())?;
    Ok(project_labels(&ws, &pred.tags, &pred.intent, &cfg.delex))
}

fn unk_sequence(tokens: &[String], cfg: &InferenceConfig) -> WorkingSequence {
    let items = tokens
        .iter()
        .enumerate()
        .map(|(index, t)| {
            let surface = t.clone();
            if cfg.vocabulary.contains(t) {
                Item::Token { surface, index }
            } else {
                Item::Unk { surface, index }
            }
        })
        .collect();
    WorkingSequence::new(items, tokens.len())
}
