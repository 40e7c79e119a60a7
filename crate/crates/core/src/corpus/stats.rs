use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{Corpus, Vocabulary};

/// Descriptive statistics of a corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub utterances: usize,
    pub tokens: usize,
    pub mean_tokens: f64,
    /// Fraction of utterances per intent.
    pub intent_ratios: BTreeMap<String, f64>,
    /// Fraction of tokens per slot class, with `O` for unlabeled tokens.
    pub tag_ratios: BTreeMap<String, f64>,
    /// Fraction of tokens outside the supplied vocabulary.
    pub oov_ratio: Option<f64>,
    /// Fraction of tokens under descriptive slot classes.
    pub ood_ratio: f64,
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

pub fn corpus_stats(corpus: &Corpus, vocab: Option<&Vocabulary>, ood_classes: &BTreeSet<String>) -> StatsReport {
    let mut intents: BTreeMap<String, usize> = BTreeMap::new();
    let mut tags: BTreeMap<String, usize> = BTreeMap::new();
    let mut tokens = 0;
    let mut oov = 0;
    let mut ood = 0;
    for u in corpus.utterances() {
        *intents.entry(u.intent().to_string()).or_default() += 1;
        for (t, l) in u.tokens().iter().zip(u.labels()) {
            tokens += 1;
            let class = l.class().unwrap_or("O");
            *tags.entry(class.to_string()).or_default() += 1;
            if ood_classes.contains(class) {
                ood += 1;
            }
            if vocab.is_some_and(|v| !v.contains(t)) {
                oov += 1;
            }
        }
    }
    StatsReport {
        utterances: corpus.len(),
        tokens,
        mean_tokens: ratio(tokens, corpus.len()),
        intent_ratios: intents.into_iter().map(|(k, v)| (k, ratio(v, corpus.len()))).collect(),
        tag_ratios: tags.into_iter().map(|(k, v)| (k, ratio(v, tokens))).collect(),
        oov_ratio: vocab.map(|_| ratio(oov, tokens)),
        ood_ratio: ratio(ood, tokens),
    }
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "utterances        {}", self.utterances)?;
        writeln!(f, "tokens            {}", self.tokens)?;
        writeln!(f, "tokens/utterance  {:.2}", self.mean_tokens)?;
        writeln!(f, "intents:")?;
        for (k, v) in &self.intent_ratios {
            writeln!(f, "  {k:<24}{:>7.2}%", v * 100.0)?;
        }
        writeln!(f, "tags:")?;
        for (k, v) in &self.tag_ratios {
            writeln!(f, "  {k:<24}{:>7.2}%", v * 100.0)?;
        }
        writeln!(f, "OOD patterns      {:.2}%", self.ood_ratio * 100.0)?;
        if let Some(oov) = self.oov_ratio {
            writeln!(f, "OOV tokens        {:.2}%", oov * 100.0)?;
        }
        Ok(())
    }
}
