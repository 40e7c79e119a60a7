use std::cmp::Reverse;

use super::working::{DelexSpan, Item, WorkingSequence};
use super::{InferenceConfig, InferenceError};
use crate::corpus::{LexiconMatch, LexiconStore, MatchKind};
use crate::tagger::{Prediction, TagPosterior, Tagger};

/// Left-to-right greedy longest match against the lexicon entries and
/// patterns. At each position the longest hit wins; on equal length a
/// lexicon entry beats a pattern, then the smallest class name wins. Matched
/// regions are skipped, so the result is non-overlapping.
pub fn greedy_lexicon_match<S: AsRef<str>>(tokens: &[S], store: &LexiconStore) -> Vec<LexiconMatch> {
    let mut matches = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let entries = store
            .entry_matches_at(tokens, i)
            .into_iter()
            .map(|(c, len)| (c, len, MatchKind::Lexicon));
        let patterns = store
            .pattern_matches_at(tokens, i)
            .into_iter()
            .map(|(c, len)| (c, len, MatchKind::Pattern));
        let best = entries
            .chain(patterns)
            .max_by_key(|&(class, len, kind)| (len, kind == MatchKind::Lexicon, Reverse(class)));
        match best {
            Some((class, len, kind)) => {
                matches.push(LexiconMatch {
                    delex_class: class.to_string(),
                    start: i,
                    end: i + len,
                    kind,
                });
                i += len;
            }
            None => i += 1,
        }
    }
    matches
}

/// Step 1: lexicon/pattern matches become delex spans; remaining tokens
/// outside the vocabulary become `<unk>`. A match wins over `<unk>`.
/// Matches of classes absent from the delex table are ignored.
pub fn replace_step<S: AsRef<str>>(tokens: &[S], cfg: &InferenceConfig) -> WorkingSequence {
    let matches: Vec<LexiconMatch> = greedy_lexicon_match(tokens, &cfg.lexicons)
        .into_iter()
        .filter(|m| cfg.delex.for_delex(&m.delex_class).is_some())
        .collect();
    let mut items = Vec::with_capacity(tokens.len());
    let mut pending = matches.iter().peekable();
    let mut i = 0;
    while i < tokens.len() {
        if let Some(m) = pending.next_if(|m| m.start == i) {
            let surfaces = tokens[m.start..m.end].iter().map(|t| t.as_ref().to_string()).collect();
            items.push(Item::Delex(DelexSpan::new(&m.delex_class, m.start, surfaces, m.kind)));
            i = m.end;
            continue;
        }
        let surface = tokens[i].as_ref().to_string();
        if cfg.vocabulary.contains(&surface) {
            items.push(Item::Token { surface, index: i });
        } else {
            items.push(Item::Unk { surface, index: i });
        }
        i += 1;
    }
    WorkingSequence::new(items, tokens.len())
}

/// Result of [`expand_step`]: the grown sequence and the predict pass aligned
/// with it.
#[derive(Debug, Clone)]
pub struct ExpandOutcome {
    pub sequence: WorkingSequence,
    pub prediction: Prediction,
    /// Iterations that absorbed at least one token.
    pub iterations: usize,
    /// The working sequence after each absorbing iteration.
    pub rounds: Vec<WorkingSequence>,
}

fn refresh_confidences(ws: &mut WorkingSequence, tags: &TagPosterior) {
    for (k, item) in ws.items_mut().iter_mut().enumerate() {
        if let Item::Delex(span) = item {
            // the span is one model position, so both boundaries share it
            let p = tags.confidence(k);
            span.left_confidence = Some(p);
            span.right_confidence = Some(p);
        }
    }
}

/// Merges consecutive items that share an owner id into one delex span, then
/// coalesces adjacent spans of the same delex class.
fn regroup(ws: &WorkingSequence, owner: &[usize], mark_expanded: bool) -> WorkingSequence {
    let items = ws.items();
    let mut out: Vec<Item> = Vec::with_capacity(items.len());
    let mut k = 0;
    while k < items.len() {
        let id = owner[k];
        let mut j = k;
        while j < items.len() && owner[j] == id {
            j += 1;
        }
        if j - k == 1 {
            out.push(items[k].clone());
        } else {
            let Item::Delex(anchor) = &items[id] else {
                unreachable!("groups are owned by spans")
            };
            let mut span = anchor.clone();
            span.start = items[k].range().start;
            span.end = items[j - 1].range().end;
            span.surfaces = items[k..j].iter().flat_map(Item::surfaces).collect();
            for item in &items[k..j] {
                if let Item::Unk { index, .. } = item {
                    span.merged_unks.push(*index);
                }
            }
            span.merged_unks.sort_unstable();
            if mark_expanded {
                span.expanded = true;
            }
            out.push(Item::Delex(span));
        }
        k = j;
    }
    WorkingSequence::new(coalesce(out), ws.source_len())
}

fn coalesce(items: Vec<Item>) -> Vec<Item> {
    let mut out: Vec<Item> = Vec::with_capacity(items.len());
    for item in items {
        if let (Some(Item::Delex(prev)), Item::Delex(next)) = (out.last_mut(), &item) {
            if prev.delex_class == next.delex_class {
                prev.end = next.end;
                prev.surfaces.extend(next.surfaces.iter().cloned());
                prev.merged_unks.extend(&next.merged_unks);
                prev.expanded |= next.expanded;
                prev.left_confidence = None;
                prev.right_confidence = None;
                continue;
            }
        }
        out.push(item);
    }
    out
}

/// Step 2: grow delex spans over low-confidence ordinary neighbours.
///
/// Each iteration runs the tagger on the working sequence. A span absorbs its
/// right neighbour `x_{r+1}` when it is an ordinary token with
/// `p_{r+1} < p_r^dex` and `p_{r+1} < Tr`; the left neighbour is tested the
/// same way against the same predict pass. Spans claim contested tokens in
/// left-to-right order. The loop stops after an iteration without absorption
/// or after `max_expand_iters` absorbing iterations; the returned prediction
/// is always aligned with the returned sequence.
pub fn expand_step<T: Tagger + ?Sized>(
    ws: &WorkingSequence,
    tagger: &T,
    cfg: &InferenceConfig,
) -> Result<ExpandOutcome, InferenceError> {
    let mut ws = ws.clone();
    let mut prediction = tagger.predict(&ws.model_tokens())?;
    let mut iterations = 0;
    let mut rounds = Vec::new();
    loop {
        refresh_confidences(&mut ws, &prediction.tags);
        if iterations >= cfg.max_expand_iters {
            break;
        }
        let tags = &prediction.tags;
        let items = ws.items();
        let mut owner: Vec<usize> = (0..items.len()).collect();
        let mut absorbed = false;
        for (k, item) in items.iter().enumerate() {
            let Item::Delex(span) = item else { continue };
            let (p_left, p_right) = (
                span.left_confidence.unwrap_or(1.0),
                span.right_confidence.unwrap_or(1.0),
            );
            let eligible = |j: usize, p_dex: f64, owner: &[usize]| {
                items[j].is_token() && owner[j] == j && {
                    let p = tags.confidence(j);
                    p < p_dex && p < cfg.threshold
                }
            };
            if k + 1 < items.len() && eligible(k + 1, p_right, &owner) {
                owner[k + 1] = k;
                absorbed = true;
            }
            if k > 0 && eligible(k - 1, p_left, &owner) {
                owner[k - 1] = k;
                absorbed = true;
            }
        }
        if !absorbed {
            break;
        }
        ws = regroup(&ws, &owner, true);
        iterations += 1;
        rounds.push(ws.clone());
        prediction = tagger.predict(&ws.model_tokens())?;
    }
    Ok(ExpandOutcome {
        sequence: ws,
        prediction,
        iterations,
        rounds,
    })
}

/// Step 3: merge `<unk>` neighbours into a delex span when their argmax slot
/// class (B/I ignored) equals the span's. Chains of `<unk>` merge
/// transitively; `posterior` must be aligned with `ws`.
pub fn merge_step(ws: &WorkingSequence, posterior: &TagPosterior) -> WorkingSequence {
    assert_eq!(
        ws.len(),
        posterior.len(),
        "posterior must be aligned with the working sequence"
    );
    let items = ws.items();
    let class = |k: usize| posterior.class(k);
    let mut owner: Vec<usize> = (0..items.len()).collect();
    for (k, item) in items.iter().enumerate() {
        if item.as_delex().is_none() {
            continue;
        }
        let Some(c) = class(k) else { continue };
        let mut j = k;
        while j > 0 && items[j - 1].is_unk() && owner[j - 1] == j - 1 && class(j - 1) == Some(c) {
            owner[j - 1] = k;
            j -= 1;
        }
        let mut j = k + 1;
        while j < items.len() && items[j].is_unk() && owner[j] == j && class(j) == Some(c) {
            owner[j] = k;
            j += 1;
        }
    }
    regroup(ws, &owner, false)
}
