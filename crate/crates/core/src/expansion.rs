//! Training-set expansion: every original utterance `q` becomes a group
//! `{q, q_ood..., q_oov...}`.
//!
//! `q_ood` variants collapse every gold span of one delex class into a single
//! placeholder token (`<Incident>`, `<Auxiliary_msg>`, ...). `q_oov` variants
//! replace tokens of substitutable slot classes by `<unk>` with probability
//! `p_r`. The two kinds are generated independently, so a token may be
//! delexicalized in one variant and replaced in another.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    delex_token, is_special, Corpus, DelexClassSpec, DelexConfig, LabeledSpan, Provenance, SlotLabel, TaggedUtterance,
    UNK,
};

pub const DEFAULT_OOV_COPIES: usize = 2;

/// An original utterance and the variants generated from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedGroup {
    pub original: TaggedUtterance,
    pub ood_variants: Vec<TaggedUtterance>,
    pub oov_variants: Vec<TaggedUtterance>,
}

impl ExpandedGroup {
    pub fn len(&self) -> usize {
        1 + self.ood_variants.len() + self.oov_variants.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_utterances(self) -> impl Iterator<Item = TaggedUtterance> {
        std::iter::once(self.original)
            .chain(self.ood_variants)
            .chain(self.oov_variants)
    }
}

/// One collapsed span: the placeholder at `position` in the variant stands for
/// `surfaces` of the original.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapsedSpan {
    pub position: usize,
    pub original: LabeledSpan,
    pub surfaces: Vec<String>,
}

/// A `q_ood` variant together with the spans it collapsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelexVariant {
    pub utterance: TaggedUtterance,
    pub collapsed: Vec<CollapsedSpan>,
}

/// Collapses every gold span of `spec.slot_class` in `u`. Returns `None` when
/// `u` has no such span.
pub fn delexicalize_class(u: &TaggedUtterance, spec: &DelexClassSpec) -> Option<DelexVariant> {
    let spans: Vec<LabeledSpan> = u.spans().into_iter().filter(|s| s.class == spec.slot_class).collect();
    if spans.is_empty() {
        return None;
    }
    let placeholder = delex_token(&spec.delex_class);
    let mut tokens = Vec::with_capacity(u.len());
    let mut labels = Vec::with_capacity(u.len());
    let mut collapsed = Vec::with_capacity(spans.len());
    let mut pending = spans.iter().peekable();
    let mut i = 0;
    while i < u.len() {
        if let Some(span) = pending.next_if(|s| s.start == i) {
            collapsed.push(CollapsedSpan {
                position: tokens.len(),
                original: span.clone(),
                surfaces: u.tokens()[span.start..span.end].to_vec(),
            });
            tokens.push(placeholder.clone());
            labels.push(SlotLabel::Begin(spec.slot_class.clone()));
            i = span.end;
        } else {
            tokens.push(u.tokens()[i].clone());
            labels.push(u.labels()[i].clone());
            i += 1;
        }
    }
    let utterance = TaggedUtterance::new(tokens, labels, u.intent(), Provenance::OodVariant)
        .expect("collapsing maximal spans keeps BIO well-formed");
    Some(DelexVariant { utterance, collapsed })
}

/// Restores the original utterance from a `q_ood` variant.
pub fn relexicalize(variant: &DelexVariant) -> TaggedUtterance {
    let u = &variant.utterance;
    let mut tokens = Vec::new();
    let mut labels = Vec::new();
    let mut collapsed = variant.collapsed.iter().peekable();
    for (i, (t, l)) in u.tokens().iter().zip(u.labels()).enumerate() {
        match collapsed.next_if(|c| c.position == i) {
            Some(c) => {
                for (k, s) in c.surfaces.iter().enumerate() {
                    tokens.push(s.clone());
                    labels.push(if k == 0 {
                        SlotLabel::Begin(c.original.class.clone())
                    } else {
                        SlotLabel::Inside(c.original.class.clone())
                    });
                }
            }
            None => {
                tokens.push(t.clone());
                labels.push(l.clone());
            }
        }
    }
    TaggedUtterance::new(tokens, labels, u.intent(), Provenance::Original)
        .expect("relexicalized variant is well-formed")
}

/// One `q_ood` variant per configured delex class that has at least one gold
/// span in `u`, in configuration order.
pub fn delexicalize_gold(u: &TaggedUtterance, cfg: &DelexConfig) -> Vec<TaggedUtterance> {
    cfg.classes
        .iter()
        .filter_map(|spec| delexicalize_class(u, spec))
        .map(|v| v.utterance)
        .collect()
}

/// Replaces each non-placeholder token of a substitutable slot class by
/// `<unk>` with probability `cfg.p_r`, independently per token.
pub fn substitute_unknown(u: &TaggedUtterance, cfg: &DelexConfig, rng_seed: u64) -> TaggedUtterance {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let tokens = u
        .tokens()
        .iter()
        .zip(u.labels())
        .map(|(t, l)| {
            let eligible = !is_special(t) && l.class().is_some_and(|c| cfg.is_substitutable(c));
            if eligible && rng.random::<f64>() < cfg.p_r {
                UNK.to_string()
            } else {
                t.clone()
            }
        })
        .collect();
    TaggedUtterance::new(tokens, u.labels().to_vec(), u.intent(), Provenance::OovVariant).expect("labels are unchanged")
}

/// SplitMix64 finalizer; derives independent per-utterance seeds.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the `copy`-th `q_oov` draw of the utterance at `index`.
pub fn variant_seed(seed: u64, index: usize, copy: usize) -> u64 {
    mix(mix(mix(seed) ^ index as u64) ^ copy as u64)
}

pub fn expand_utterance(u: &TaggedUtterance, cfg: &DelexConfig, seed: u64, oov_copies: usize) -> ExpandedGroup {
    ExpandedGroup {
        original: u.clone(),
        ood_variants: delexicalize_gold(u, cfg),
        oov_variants: (0..oov_copies)
            .map(|copy| substitute_unknown(u, cfg, mix(seed ^ copy as u64)))
            .collect(),
    }
}

/// Expands every original utterance into its group; utterances that are
/// already variants pass through unchanged. Output order is group by group in
/// input order, and the result does not depend on thread scheduling.
pub fn expand_corpus(c: &Corpus, cfg: &DelexConfig, rng_seed: u64, oov_copies: usize) -> Corpus {
    let groups: Vec<Vec<TaggedUtterance>> = c
        .utterances()
        .par_iter()
        .enumerate()
        .map(|(i, u)| {
            if u.provenance() != Provenance::Original {
                return vec![u.clone()];
            }
            expand_utterance(u, cfg, variant_seed(rng_seed, i, 0), oov_copies)
                .into_utterances()
                .collect()
        })
        .collect();
    Corpus::new(groups.into_iter().flatten().collect())
}
