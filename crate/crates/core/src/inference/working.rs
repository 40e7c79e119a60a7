use std::fmt;

use serde::Serialize;

use crate::corpus::{delex_token, MatchKind, UNK};

/// A delexicalized span covering original tokens `start..end`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelexSpan {
    pub delex_class: String,
    pub start: usize,
    pub end: usize,
    pub surfaces: Vec<String>,
    /// `p_l^dex`, filled after a predict pass.
    pub left_confidence: Option<f64>,
    /// `p_r^dex`, filled after a predict pass.
    pub right_confidence: Option<f64>,
    pub match_kind: MatchKind,
    /// Grew by absorbing neighbours during expansion.
    pub expanded: bool,
    /// Original indices of `<unk>` tokens merged into the span.
    pub merged_unks: Vec<usize>,
}

impl DelexSpan {
    pub fn new(delex_class: &str, start: usize, surfaces: Vec<String>, match_kind: MatchKind) -> Self {
        DelexSpan {
            delex_class: delex_class.to_string(),
            start,
            end: start + surfaces.len(),
            surfaces,
            left_confidence: None,
            right_confidence: None,
            match_kind,
            expanded: false,
            merged_unks: Vec::new(),
        }
    }

    /// Original index of the left boundary token.
    pub fn left(&self) -> usize {
        self.start
    }

    /// Original index of the right boundary token.
    pub fn right(&self) -> usize {
        self.end - 1
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Item {
    Token { surface: String, index: usize },
    Unk { surface: String, index: usize },
    Delex(DelexSpan),
}

impl Item {
    /// Surface presented to the tagger.
    pub fn model_token(&self) -> String {
        match self {
            Item::Token { surface, .. } => surface.clone(),
            Item::Unk { .. } => UNK.to_string(),
            Item::Delex(span) => delex_token(&span.delex_class),
        }
    }

    /// Original token indices covered by the item.
    pub fn range(&self) -> std::ops::Range<usize> {
        match self {
            Item::Token { index, .. } | Item::Unk { index, .. } => *index..index + 1,
            Item::Delex(span) => span.start..span.end,
        }
    }

    pub fn surfaces(&self) -> Vec<String> {
        match self {
            Item::Token { surface, .. } | Item::Unk { surface, .. } => vec![surface.clone()],
            Item::Delex(span) => span.surfaces.clone(),
        }
    }

    pub fn as_delex(&self) -> Option<&DelexSpan> {
        match self {
            Item::Delex(span) => Some(span),
            _ => None,
        }
    }

    pub fn is_token(&self) -> bool {
        matches!(self, Item::Token { .. })
    }

    pub fn is_unk(&self) -> bool {
        matches!(self, Item::Unk { .. })
    }
}

/// The inference-time view of a sentence: ordinary tokens, `<unk>` tokens and
/// delexicalized spans, each aligned to original token indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkingSequence {
    items: Vec<Item>,
    source_len: usize,
}

impl WorkingSequence {
    /// Panics unless the items tile `0..source_len` in order.
    pub fn new(items: Vec<Item>, source_len: usize) -> Self {
        let ws = WorkingSequence { items, source_len };
        assert!(ws.is_aligned(), "items must tile 0..{source_len} in order");
        ws
    }

    /// Identity embedding of `tokens` as ordinary tokens.
    pub fn from_tokens(tokens: &[String]) -> Self {
        let items = tokens
            .iter()
            .enumerate()
            .map(|(index, surface)| Item::Token {
                surface: surface.clone(),
                index,
            })
            .collect();
        WorkingSequence::new(items, tokens.len())
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn model_tokens(&self) -> Vec<String> {
        self.items.iter().map(Item::model_token).collect()
    }

    pub fn spans(&self) -> impl Iterator<Item = &DelexSpan> {
        self.items.iter().filter_map(Item::as_delex)
    }

    pub(crate) fn items_mut(&mut self) -> &mut [Item] {
        &mut self.items
    }

    /// True when the item ranges partition `0..source_len` in ascending order.
    pub fn is_aligned(&self) -> bool {
        let mut next = 0;
        for item in &self.items {
            let r = item.range();
            if r.start != next || r.end <= r.start {
                return false;
            }
            if let Item::Delex(span) = item {
                if span.surfaces.len() != span.len() {
                    return false;
                }
            }
            next = r.end;
        }
        next == self.source_len
    }

    /// Original indices that are currently `<unk>` or were merged as `<unk>`.
    pub fn oov_indices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .items
            .iter()
            .flat_map(|item| match item {
                Item::Unk { index, .. } => vec![*index],
                Item::Delex(span) => span.merged_unks.clone(),
                Item::Token { .. } => Vec::new(),
            })
            .collect();
        out.sort_unstable();
        out
    }
}

impl fmt::Display for WorkingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&item.model_token())?;
        }
        Ok(())
    }
}
