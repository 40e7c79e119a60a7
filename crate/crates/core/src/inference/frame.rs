use serde::{Deserialize, Serialize};

use super::working::{Item, WorkingSequence};
use crate::corpus::{DelexConfig, LabeledSpan, SlotLabel};
use crate::tagger::{IntentPosterior, TagPosterior};

/// How a slot span was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotSource {
    /// A lexicon or pattern match that kept its extent.
    Matched,
    /// A match grown by Expand.
    Expanded,
    /// A span that absorbed `<unk>` tokens during Merge.
    Merged,
    /// Read off the tagger's labels.
    Tagged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotSpan {
    pub class: String,
    pub start_token: usize,
    /// Exclusive.
    pub end_token: usize,
    pub text: String,
    pub source: SlotSource,
}

/// Final parse of one utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub tokens: Vec<String>,
    pub intent: String,
    pub intent_confidence: f64,
    pub slots: Vec<SlotSpan>,
    /// Original indices of tokens that were out of vocabulary.
    pub oov_tokens: Vec<usize>,
    /// Indices into `slots` of the spans that came from delexicalization.
    pub ood_spans: Vec<usize>,
}

impl Frame {
    pub fn spans(&self) -> Vec<LabeledSpan> {
        self.slots
            .iter()
            .map(|s| LabeledSpan {
                class: s.class.clone(),
                start: s.start_token,
                end: s.end_token,
            })
            .collect()
    }

    /// BIO labels over the original tokens.
    pub fn labels(&self) -> Vec<SlotLabel> {
        crate::corpus::labels_from_spans(self.tokens.len(), &self.spans())
    }
}

/// Joins tokens with spaces, dropping the space before closing punctuation
/// and after opening brackets.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    let mut glue_next = true;
    for t in tokens {
        let t = t.as_ref();
        let closing = matches!(t, "," | "." | "!" | "?" | ";" | ":" | ")" | "]" | "}" | "%");
        if !glue_next && !closing {
            out.push(' ');
        }
        out.push_str(t);
        glue_next = matches!(t, "(" | "[" | "{");
    }
    out
}

/// Turns the final working sequence and its predict pass into a [`Frame`].
///
/// Each delex span becomes one slot of its mapped slot class. Remaining
/// positions are chunked conlleval-style from their argmax labels: `B_c`
/// opens a chunk, `I_c` extends the chunk just before it when that chunk has
/// class `c` (a delex span counts as such a chunk) and otherwise opens one.
pub fn project_labels(
    ws: &WorkingSequence,
    posterior: &TagPosterior,
    intent: &IntentPosterior,
    delex: &DelexConfig,
) -> Frame {
    assert_eq!(
        ws.len(),
        posterior.len(),
        "posterior must be aligned with the working sequence"
    );
    let tokens: Vec<String> = ws.items().iter().flat_map(Item::surfaces).collect();
    let mut slots: Vec<SlotSpan> = Vec::new();
    // index into `slots` of the chunk an `I_` label may still extend
    let mut open: Option<usize> = None;

    for (k, item) in ws.items().iter().enumerate() {
        let range = item.range();
        if let Item::Delex(span) = item {
            let class = delex
                .for_delex(&span.delex_class)
                .map(|s| s.slot_class.clone())
                .unwrap_or_else(|| span.delex_class.to_lowercase());
            let source = if !span.merged_unks.is_empty() {
                SlotSource::Merged
            } else if span.expanded {
                SlotSource::Expanded
            } else {
                SlotSource::Matched
            };
            slots.push(SlotSpan {
                class,
                start_token: range.start,
                end_token: range.end,
                text: String::new(),
                source,
            });
            open = Some(slots.len() - 1);
            continue;
        }
        match posterior.label(k) {
            SlotLabel::Outside => open = None,
            SlotLabel::Inside(c) if open.is_some_and(|o| slots[o].class == *c) => {
                let o = open.unwrap();
                slots[o].end_token = range.end;
            }
            SlotLabel::Begin(c) | SlotLabel::Inside(c) => {
                slots.push(SlotSpan {
                    class: c.clone(),
                    start_token: range.start,
                    end_token: range.end,
                    text: String::new(),
                    source: SlotSource::Tagged,
                });
                open = Some(slots.len() - 1);
            }
        }
    }
    for s in &mut slots {
        s.text = detokenize(&tokens[s.start_token..s.end_token]);
    }
    let ood_spans = slots
        .iter()
        .enumerate()
        .filter(|(_, s)| s.source != SlotSource::Tagged)
        .map(|(i, _)| i)
        .collect();
    let (best, confidence) = intent.best();
    Frame {
        oov_tokens: ws.oov_indices(),
        tokens,
        intent: best.to_string(),
        intent_confidence: confidence,
        slots,
        ood_spans,
    }
}
