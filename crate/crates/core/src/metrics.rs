//! Intent accuracy, CoNLL-style span F1 and the OOD/OOV subset protocol.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::{spans_from_labels, Corpus, LabeledSpan, SlotLabel, TaggedUtterance, Vocabulary};
use crate::inference::Frame;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("{gold} gold utterances but {predicted} predictions")]
    LengthMismatch { gold: usize, predicted: usize },
    #[error("utterance {index}: {gold} gold tokens but {predicted} predicted")]
    TokenMismatch {
        index: usize,
        gold: usize,
        predicted: usize,
    },
    #[error("nothing to evaluate")]
    Empty,
}

fn check_len(gold: usize, predicted: usize) -> Result<(), MetricsError> {
    if gold != predicted {
        return Err(MetricsError::LengthMismatch { gold, predicted });
    }
    Ok(())
}

pub fn intent_accuracy<S: AsRef<str>>(gold: &Corpus, predicted: &[S]) -> Result<f64, MetricsError> {
    check_len(gold.len(), predicted.len())?;
    if gold.is_empty() {
        return Err(MetricsError::Empty);
    }
    let hits = gold
        .utterances()
        .iter()
        .zip(predicted)
        .filter(|(u, p)| u.intent() == p.as_ref())
        .count();
    Ok(hits as f64 / gold.len() as f64)
}

/// Micro-averaged span counts and the scores derived from them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SlotScores {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl SlotScores {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        SlotScores {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision,
            recall,
            f1,
        }
    }

    pub fn gold_spans(&self) -> usize {
        self.true_positives + self.false_negatives
    }

    pub fn predicted_spans(&self) -> usize {
        self.true_positives + self.false_positives
    }
}

#[derive(Default)]
struct Counts {
    tp: usize,
    fp: usize,
    fn_: usize,
}

fn count_spans(
    pairs: impl Iterator<Item = (Vec<LabeledSpan>, Vec<LabeledSpan>)>,
    per_class: &mut BTreeMap<String, Counts>,
) -> Counts {
    let mut total = Counts::default();
    for (gold, pred) in pairs {
        let gold: BTreeSet<LabeledSpan> = gold.into_iter().collect();
        let pred: BTreeSet<LabeledSpan> = pred.into_iter().collect();
        for s in &pred {
            let c = per_class.entry(s.class.clone()).or_default();
            if gold.contains(s) {
                c.tp += 1;
                total.tp += 1;
            } else {
                c.fp += 1;
                total.fp += 1;
            }
        }
        for s in gold.difference(&pred) {
            per_class.entry(s.class.clone()).or_default().fn_ += 1;
            total.fn_ += 1;
        }
    }
    total
}

fn paired_spans<'a>(
    gold: &'a [&'a TaggedUtterance],
    frames: &'a [&'a Frame],
) -> impl Iterator<Item = (Vec<LabeledSpan>, Vec<LabeledSpan>)> + 'a {
    gold.iter().zip(frames).map(|(u, f)| (u.spans(), f.spans()))
}

fn check_tokens(gold: &Corpus, frames: &[Frame]) -> Result<(), MetricsError> {
    check_len(gold.len(), frames.len())?;
    for (index, (u, f)) in gold.utterances().iter().zip(frames).enumerate() {
        if u.len() != f.tokens.len() {
            return Err(MetricsError::TokenMismatch {
                index,
                gold: u.len(),
                predicted: f.tokens.len(),
            });
        }
    }
    Ok(())
}

/// Exact-match span F1: a predicted span is correct iff class, start and end
/// all equal those of a gold span.
pub fn slot_f1(gold: &Corpus, predicted: &[Frame]) -> Result<SlotScores, MetricsError> {
    check_tokens(gold, predicted)?;
    let g: Vec<&TaggedUtterance> = gold.utterances().iter().collect();
    let p: Vec<&Frame> = predicted.iter().collect();
    let c = count_spans(paired_spans(&g, &p), &mut BTreeMap::new());
    Ok(SlotScores::from_counts(c.tp, c.fp, c.fn_))
}

/// Span F1 over raw predicted label sequences. Stray `I_` labels are read as
/// the start of a new span.
pub fn slot_f1_labels(gold: &Corpus, predicted: &[Vec<SlotLabel>]) -> Result<SlotScores, MetricsError> {
    check_len(gold.len(), predicted.len())?;
    for (index, (u, p)) in gold.utterances().iter().zip(predicted).enumerate() {
        if u.len() != p.len() {
            return Err(MetricsError::TokenMismatch {
                index,
                gold: u.len(),
                predicted: p.len(),
            });
        }
    }
    let pairs = gold
        .utterances()
        .iter()
        .zip(predicted)
        .map(|(u, p)| (u.spans(), spans_from_labels(p)));
    let c = count_spans(pairs, &mut BTreeMap::new());
    Ok(SlotScores::from_counts(c.tp, c.fp, c.fn_))
}

/// Which test utterances a subset report covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Selector {
    All,
    /// Utterances with at least one token under a descriptive slot class.
    Ood,
    /// Utterances with at least one token outside the vocabulary.
    Oov,
}

impl Selector {
    pub fn selects(self, u: &TaggedUtterance, vocab: &Vocabulary, ood_classes: &BTreeSet<String>) -> bool {
        match self {
            Selector::All => true,
            Selector::Ood => u
                .labels()
                .iter()
                .any(|l| l.class().is_some_and(|c| ood_classes.contains(c))),
            Selector::Oov => u.tokens().iter().any(|t| !vocab.contains(t)),
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selector::All => "all",
            Selector::Ood => "ood",
            Selector::Oov => "oov",
        })
    }
}

/// Scores restricted to a subset. `slots` and `intent_accuracy` are `None`
/// when the subset is empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubsetReport {
    pub selector: Selector,
    pub utterances: usize,
    pub empty: bool,
    pub slots: Option<SlotScores>,
    pub intent_accuracy: Option<f64>,
}

pub fn subset_eval(
    gold: &Corpus,
    frames: &[Frame],
    selector: Selector,
    vocab: &Vocabulary,
    ood_classes: &BTreeSet<String>,
) -> Result<SubsetReport, MetricsError> {
    check_tokens(gold, frames)?;
    let (g, p): (Vec<&TaggedUtterance>, Vec<&Frame>) = gold
        .utterances()
        .iter()
        .zip(frames)
        .filter(|(u, _)| selector.selects(u, vocab, ood_classes))
        .unzip();
    if g.is_empty() {
        return Ok(SubsetReport {
            selector,
            utterances: 0,
            empty: true,
            slots: None,
            intent_accuracy: None,
        });
    }
    let c = count_spans(paired_spans(&g, &p), &mut BTreeMap::new());
    let hits = g.iter().zip(&p).filter(|(u, f)| u.intent() == f.intent).count();
    Ok(SubsetReport {
        selector,
        utterances: g.len(),
        empty: false,
        slots: Some(SlotScores::from_counts(c.tp, c.fp, c.fn_)),
        intent_accuracy: Some(hits as f64 / g.len() as f64),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub utterances: usize,
    pub intent_accuracy: f64,
    pub slots: SlotScores,
    pub per_class: BTreeMap<String, SlotScores>,
    pub ood: SubsetReport,
    pub oov: SubsetReport,
}

/// Global scores plus the OOD and OOV subsets.
pub fn evaluate(
    gold: &Corpus,
    frames: &[Frame],
    vocab: &Vocabulary,
    ood_classes: &BTreeSet<String>,
) -> Result<EvalReport, MetricsError> {
    check_tokens(gold, frames)?;
    if gold.is_empty() {
        return Err(MetricsError::Empty);
    }
    let g: Vec<&TaggedUtterance> = gold.utterances().iter().collect();
    let p: Vec<&Frame> = frames.iter().collect();
    let mut per_class = BTreeMap::new();
    let c = count_spans(paired_spans(&g, &p), &mut per_class);
    let intents: Vec<&str> = frames.iter().map(|f| f.intent.as_str()).collect();
    Ok(EvalReport {
        utterances: gold.len(),
        intent_accuracy: intent_accuracy(gold, &intents)?,
        slots: SlotScores::from_counts(c.tp, c.fp, c.fn_),
        per_class: per_class
            .into_iter()
            .map(|(k, c)| (k, SlotScores::from_counts(c.tp, c.fp, c.fn_)))
            .collect(),
        ood: subset_eval(gold, frames, Selector::Ood, vocab, ood_classes)?,
        oov: subset_eval(gold, frames, Selector::Oov, vocab, ood_classes)?,
    })
}

fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "utterances        {}", self.utterances)?;
        writeln!(f, "intent accuracy   {}%", pct(self.intent_accuracy))?;
        writeln!(f, "{:<18}{:>8}{:>8}{:>8}{:>7}", "slots", "P", "R", "F1", "gold")?;
        let row = |f: &mut fmt::Formatter<'_>, name: &str, s: &SlotScores| {
            writeln!(
                f,
                "{:<18}{:>8}{:>8}{:>8}{:>7}",
                name,
                pct(s.precision),
                pct(s.recall),
                pct(s.f1),
                s.gold_spans()
            )
        };
        row(f, "  overall", &self.slots)?;
        for (class, s) in &self.per_class {
            row(f, &format!("  {class}"), s)?;
        }
        for sub in [&self.ood, &self.oov] {
            let name = format!("{} subset (n={})", sub.selector, sub.utterances);
            match &sub.slots {
                Some(s) => row(f, &name, s)?,
                None => writeln!(f, "{name:<18}  empty")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(rows: &[(&str, &str, &str)]) -> Corpus {
        rows.iter()
            .map(|(t, l, i)| TaggedUtterance::from_strs(t, l, i).unwrap())
            .collect()
    }

    fn frame(tokens: &str, spans: &[(&str, usize, usize)], intent: &str) -> Frame {
        Frame {
            tokens: tokens.split(' ').map(str::to_string).collect(),
            intent: intent.into(),
            intent_confidence: 1.0,
            slots: spans
                .iter()
                .map(|&(c, s, e)| crate::inference::SlotSpan {
                    class: c.into(),
                    start_token: s,
                    end_token: e,
                    text: String::new(),
                    source: crate::inference::SlotSource::Tagged,
                })
                .collect(),
            oov_tokens: vec![],
            ood_spans: vec![],
        }
    }

    #[test]
    fn intent_accuracy_counts() {
        let c = corpus(&[("a", "O", "X"), ("b", "O", "Y"), ("c", "O", "X"), ("d", "O", "Y")]);
        assert_eq!(intent_accuracy(&c, &["X", "Y", "X", "Y"]), Ok(1.0));
        assert_eq!(intent_accuracy(&c, &["Y", "X", "Y", "X"]), Ok(0.0));
        assert_eq!(intent_accuracy(&c, &["X", "Y", "X", "X"]), Ok(0.75));
        assert!(matches!(
            intent_accuracy(&c, &["X"]),
            Err(MetricsError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn exact_boundaries_required() {
        let c = corpus(&[("fire on Elm St", "B_incident O B_address I_address", "Fire")]);
        let perfect = frame("fire on Elm St", &[("incident", 0, 1), ("address", 2, 4)], "Fire");
        assert_eq!(slot_f1(&c, &[perfect]).unwrap().f1, 1.0);

        let off = frame("fire on Elm St", &[("incident", 0, 1), ("address", 1, 4)], "Fire");
        let s = slot_f1(&c, &[off]).unwrap();
        assert_eq!((s.true_positives, s.false_positives, s.false_negatives), (1, 1, 1));
        assert_eq!(s.f1, 0.5);
    }

    #[test]
    fn stray_inside_starts_span() {
        let c = corpus(&[("on Elm St", "O B_address I_address", "Fire")]);
        let pred = vec!["O I_address I_address".split(' ').map(|l| l.parse().unwrap()).collect()];
        assert_eq!(slot_f1_labels(&c, &pred).unwrap().f1, 1.0);
    }

    #[test]
    fn no_spans_anywhere_scores_zero() {
        let c = corpus(&[("all quiet", "O O", "X")]);
        let s = slot_f1(&c, &[frame("all quiet", &[], "X")]).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn subsets() {
        let c = corpus(&[
            ("smoke seen near park", "O O B_aux I_aux", "Fire"),
            ("crash on Elm", "B_incident O B_address", "Traffic"),
        ]);
        let frames = vec![
            frame("smoke seen near park", &[("aux", 2, 4)], "Fire"),
            frame("crash on Elm", &[("incident", 0, 1)], "Traffic"),
        ];
        let mut vocab = Vocabulary::new(1);
        for w in ["smoke", "seen", "near", "park", "crash", "on", "Elm"] {
            vocab.add(w);
        }
        let ood: BTreeSet<String> = ["aux".to_string()].into();
        let r = subset_eval(&c, &frames, Selector::Ood, &vocab, &ood).unwrap();
        assert_eq!((r.utterances, r.slots.unwrap().f1), (1, 1.0));
        let r = subset_eval(&c, &frames, Selector::Oov, &vocab, &ood).unwrap();
        assert!(r.empty && r.slots.is_none());

        let all = subset_eval(&c, &frames, Selector::All, &vocab, &ood).unwrap();
        assert_eq!(all.slots.unwrap(), slot_f1(&c, &frames).unwrap());
        let report = evaluate(&c, &frames, &vocab, &ood).unwrap();
        assert_eq!(report.per_class["address"].false_negatives, 1);
        assert!(report.to_string().contains("oov subset (n=0)"));
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert_eq!(
            evaluate(&Corpus::default(), &[], &Vocabulary::new(1), &BTreeSet::new()),
            Err(MetricsError::Empty)
        );
    }
}
