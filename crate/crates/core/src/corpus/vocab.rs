use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{is_special, Corpus};

pub const DEFAULT_MIN_COUNT: usize = 2;

/// Case-insensitive token frequencies with a membership threshold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    counts: BTreeMap<String, usize>,
    min_count: usize,
}

impl Vocabulary {
    pub fn new(min_count: usize) -> Self {
        Vocabulary {
            counts: BTreeMap::new(),
            min_count: min_count.max(1),
        }
    }

    pub fn add(&mut self, surface: &str) {
        *self.counts.entry(surface.to_lowercase()).or_insert(0) += 1;
    }

    pub fn frequency(&self, surface: &str) -> usize {
        self.counts.get(&surface.to_lowercase()).copied().unwrap_or(0)
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.frequency(surface) >= self.min_count
    }

    pub fn min_count(&self) -> usize {
        self.min_count
    }

    /// Number of distinct surfaces that pass the threshold.
    pub fn len(&self) -> usize {
        self.counts.values().filter(|&&c| c >= self.min_count).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

/// Counts lowercased surfaces over the original utterances of `corpus`.
///
/// Generated variants repeat their source tokens, so counting them would push
/// every hapax over the threshold. Placeholders (`<unk>`, delex tokens) are
/// never counted. A corpus without originals falls back to counting all
/// utterances.
pub fn build_vocabulary(corpus: &Corpus, min_count: usize) -> Vocabulary {
    let mut vocab = Vocabulary::new(min_count);
    let has_originals = corpus.originals().next().is_some();
    let source: Box<dyn Iterator<Item = _>> = if has_originals {
        Box::new(corpus.originals())
    } else {
        Box::new(corpus.utterances().iter())
    };
    for u in source {
        for t in u.tokens().iter().filter(|t| !is_special(t)) {
            vocab.add(t);
        }
    }
    vocab
}
