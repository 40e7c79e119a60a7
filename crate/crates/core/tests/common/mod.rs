//! Strategies, fixtures and property checks shared by the integration tests
//! and the acceptance target. Each `check_*` returns `Err` on a violated
//! property so it can run under `proptest!` or a hand-driven `TestRunner`.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use slu_core::corpus::{
    build_vocabulary, harvest_lexicons, labels_from_spans, parse_conll_file, spans_from_labels, write_conll_file,
    Corpus, DelexConfig, LexiconStore, Provenance, SlotLabel, TaggedUtterance, Vocabulary,
};
use slu_core::inference::{
    expand_step, merge_step, project_labels, replace_step, InferenceConfig, Item, WorkingSequence,
};
use slu_core::tagger::{IntentPosterior, Prediction, TagPosterior, Tagger, TaggerError};

pub const CLASSES: [&str; 5] = ["incident", "address", "aux", "date", "time"];
pub const INTENTS: [&str; 3] = ["Crime", "Fire", "Traffic Accident"];

/// Tokens the inference fixtures know about; the last two are out of
/// vocabulary.
pub const POOL: [&str; 18] = [
    "the", "fire", "near", "Main", "St", "May", "14", "a", "suspect", "in", "of", "5/12", "3:10", "pm", ".", "on",
    "Queens", "burglary",
];

pub fn bio(choices: &[(u8, usize)]) -> Vec<SlotLabel> {
    let mut out: Vec<SlotLabel> = Vec::with_capacity(choices.len());
    for &(kind, class) in choices {
        let c = CLASSES[class % CLASSES.len()];
        let label = match kind % 3 {
            0 => SlotLabel::Outside,
            1 => SlotLabel::begin(c),
            _ => match out.last().and_then(SlotLabel::class) {
                Some(prev) => SlotLabel::inside(prev),
                None => SlotLabel::begin(c),
            },
        };
        out.push(label);
    }
    out
}

/// Well-formed BIO labels of length `n`.
pub fn labels(n: usize) -> impl Strategy<Value = Vec<SlotLabel>> {
    prop::collection::vec((0u8..3, 0usize..CLASSES.len()), n).prop_map(|c| bio(&c))
}

/// Arbitrary label sequences, stray `I_` included.
pub fn raw_labels(n: usize) -> impl Strategy<Value = Vec<SlotLabel>> {
    prop::collection::vec((0u8..3, 0usize..CLASSES.len()), n).prop_map(|c| {
        c.into_iter()
            .map(|(k, i)| match k {
                0 => SlotLabel::Outside,
                1 => SlotLabel::begin(CLASSES[i]),
                _ => SlotLabel::inside(CLASSES[i]),
            })
            .collect()
    })
}

fn build(tokens: Vec<String>, labels: Vec<SlotLabel>, intent: usize, provenance: Provenance) -> TaggedUtterance {
    TaggedUtterance::new(tokens, labels, INTENTS[intent], provenance).expect("strategy yields valid utterances")
}

/// Utterances over arbitrary non-whitespace tokens.
pub fn any_utterance() -> impl Strategy<Value = TaggedUtterance> {
    (1usize..14)
        .prop_flat_map(|n| {
            (
                prop::collection::vec("[^\\s]{1,6}", n),
                labels(n),
                0..INTENTS.len(),
                prop_oneof![
                    Just(Provenance::Original),
                    Just(Provenance::OodVariant),
                    Just(Provenance::OovVariant)
                ],
            )
        })
        .prop_map(|(t, l, i, p)| build(t, l, i, p))
}

/// Original utterances over [`POOL`].
pub fn pool_utterance() -> impl Strategy<Value = TaggedUtterance> {
    (1usize..16)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(prop::sample::select(&POOL[..]), n),
                labels(n),
                0..INTENTS.len(),
            )
        })
        .prop_map(|(t, l, i)| build(t.iter().map(|s| s.to_string()).collect(), l, i, Provenance::Original))
}

pub fn pool_corpus(max: usize) -> impl Strategy<Value = Corpus> {
    prop::collection::vec(pool_utterance(), 1..max).prop_map(Corpus::new)
}

pub fn pool_tokens() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(&POOL[..]), 1..20)
        .prop_map(|t| t.iter().map(|s| s.to_string()).collect())
}

pub fn slot_labels() -> Vec<SlotLabel> {
    let mut out = vec![SlotLabel::Outside];
    for c in CLASSES {
        out.push(SlotLabel::begin(c));
        out.push(SlotLabel::inside(c));
    }
    out
}

/// A deterministic tagger whose label and confidence at each position are a
/// hash of the token, its neighbours and a seed. Confidences fall in
/// `[0.5, 0.999]`, so they straddle any threshold worth testing.
#[derive(Debug, Clone)]
pub struct HashTagger {
    labels: Vec<SlotLabel>,
    seed: u64,
}

impl HashTagger {
    pub fn new(seed: u64) -> Self {
        HashTagger {
            labels: slot_labels(),
            seed,
        }
    }
}

impl Tagger for HashTagger {
    fn labels(&self) -> &[SlotLabel] {
        &self.labels
    }

    fn predict(&self, tokens: &[String]) -> Result<Prediction, TaggerError> {
        if tokens.is_empty() {
            return Err(TaggerError::EmptyInput);
        }
        let n = self.labels.len();
        let positions = (0..tokens.len())
            .map(|i| {
                let mut h = DefaultHasher::new();
                self.seed.hash(&mut h);
                tokens[i].hash(&mut h);
                i.checked_sub(1).map(|j| &tokens[j]).hash(&mut h);
                tokens.get(i + 1).hash(&mut h);
                let v = h.finish();
                let label = (v % n as u64) as usize;
                let conf = 0.5 + 0.499 * ((v >> 16) % 10_000) as f64 / 10_000.0;
                let rest = (1.0 - conf) / (n - 1) as f64;
                (0..n).map(|k| if k == label { conf } else { rest }).collect()
            })
            .collect();
        Ok(Prediction {
            tags: TagPosterior::new(self.labels.clone(), positions),
            intent: IntentPosterior::new(vec!["Crime".into()], vec![1.0]),
        })
    }
}

pub fn fixture_vocabulary() -> Vocabulary {
    let mut v = Vocabulary::new(1);
    for t in &POOL[..POOL.len() - 2] {
        v.add(t);
    }
    v
}

pub fn fixture_lexicons(delex: &DelexConfig) -> LexiconStore {
    let rows = [
        ("fire", "B_incident"),
        ("burglary", "B_incident"),
        ("Main St", "B_address I_address"),
        ("May 14", "B_date I_date"),
        ("a suspect", "B_aux I_aux"),
    ];
    let corpus: Corpus = rows
        .iter()
        .map(|(t, l)| TaggedUtterance::from_strs(t, l, "Crime").unwrap())
        .collect();
    harvest_lexicons(&corpus, delex).expect("default delex table is valid")
}

pub fn fixture_config(threshold: f64, iters: usize) -> InferenceConfig {
    static BASE: OnceLock<InferenceConfig> = OnceLock::new();
    let base = BASE.get_or_init(|| {
        let delex = DelexConfig::default();
        InferenceConfig::new(fixture_vocabulary(), fixture_lexicons(&delex), delex).unwrap()
    });
    // validation recompiles the delex patterns, so the fields are set directly
    assert!(threshold > 0.0 && threshold < 1.0 && iters > 0);
    let mut cfg = base.clone();
    cfg.threshold = threshold;
    cfg.max_expand_iters = iters;
    cfg
}

fn surfaces(ws: &WorkingSequence) -> Vec<String> {
    ws.items().iter().flat_map(Item::surfaces).collect()
}

/// Original index -> delex class of the span covering it.
fn coverage(ws: &WorkingSequence) -> BTreeMap<usize, String> {
    ws.spans()
        .flat_map(|s| (s.start..s.end).map(move |i| (i, s.delex_class.clone())))
        .collect()
}

/// Item ranges and model tokens, ignoring cached confidences.
fn shape(ws: &WorkingSequence) -> Vec<(std::ops::Range<usize>, String)> {
    ws.items().iter().map(|it| (it.range(), it.model_token())).collect()
}

fn unk_indices(ws: &WorkingSequence) -> BTreeSet<usize> {
    ws.items()
        .iter()
        .filter(|it| it.is_unk())
        .map(|it| it.range().start)
        .collect()
}

// ---- corpus ----

pub fn check_roundtrip(corpus: &Corpus) -> Result<(), TestCaseError> {
    let text = write_conll_file(corpus);
    let back = parse_conll_file(&text).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&back, corpus);
    prop_assert_eq!(write_conll_file(&back), text);
    Ok(())
}

pub fn check_harvest_order_independent(corpus: &Corpus, rotate: usize) -> Result<(), TestCaseError> {
    let delex = DelexConfig::default();
    let mut utts = corpus.utterances().to_vec();
    let k = rotate % utts.len().max(1);
    utts.rotate_left(k);
    utts.reverse();
    let a = harvest_lexicons(corpus, &delex).unwrap();
    let b = harvest_lexicons(&Corpus::new(utts), &delex).unwrap();
    prop_assert_eq!(a, b);
    Ok(())
}

// ---- expansion ----

pub fn check_variants(u: &TaggedUtterance, seed: u64) -> Result<(), TestCaseError> {
    use slu_core::expansion::{delexicalize_class, expand_utterance, relexicalize};
    let delex = DelexConfig::default();
    let group = expand_utterance(u, &delex, seed, 3);
    for v in group.ood_variants.iter().chain(&group.oov_variants) {
        prop_assert_eq!(v.tokens().len(), v.labels().len());
        prop_assert_eq!(v.intent(), u.intent());
    }
    for v in &group.oov_variants {
        prop_assert_eq!(v.provenance(), Provenance::OovVariant);
        prop_assert_eq!(v.labels(), u.labels());
        for (a, b) in u.tokens().iter().zip(v.tokens()) {
            if slu_core::corpus::is_special(a) {
                prop_assert_eq!(a, b);
            }
        }
    }
    for spec in &delex.classes {
        if let Some(variant) = delexicalize_class(u, spec) {
            prop_assert_eq!(variant.utterance.provenance(), Provenance::OodVariant);
            prop_assert_eq!(&relexicalize(&variant).with_provenance(Provenance::Original), u);
        }
    }
    Ok(())
}

// ---- inference ----

/// Expand: spans only grow, `<unk>` items are never absorbed, the iteration
/// count is bounded, and every absorbed token was below both `Tr` and the
/// absorbing span's confidence in the pass that absorbed it.
pub fn check_expand(tokens: &[String], seed: u64, threshold: f64, iters: usize) -> Result<(), TestCaseError> {
    let cfg = fixture_config(threshold, iters);
    let tagger = HashTagger::new(seed);
    let replaced = replace_step(tokens, &cfg);
    let out = expand_step(&replaced, &tagger, &cfg).unwrap();

    prop_assert!(out.iterations <= iters);
    prop_assert_eq!(out.rounds.len(), out.iterations);
    prop_assert_eq!(surfaces(&out.sequence), tokens.to_vec());
    prop_assert_eq!(unk_indices(&out.sequence), unk_indices(&replaced));
    prop_assert_eq!(out.prediction.tags.len(), out.sequence.len());

    let mut prev = replaced.clone();
    for round in &out.rounds {
        let before = coverage(&prev);
        let after = coverage(round);
        for (i, class) in &before {
            prop_assert_eq!(after.get(i), Some(class), "span shrank at {}", i);
        }
        prop_assert!(after.len() > before.len(), "absorbing round without growth");
        let pred = tagger.predict(&prev.model_tokens()).unwrap();
        for (k, item) in prev.items().iter().enumerate() {
            let idx = item.range().start;
            if after.contains_key(&idx) && !before.contains_key(&idx) {
                prop_assert!(item.is_token(), "non-ordinary item absorbed at {}", idx);
                let p = pred.tags.confidence(k);
                prop_assert!(p < threshold, "absorbed {} with p={} >= Tr", idx, p);
                let neighbour_dex = [k.checked_sub(1), Some(k + 1)]
                    .into_iter()
                    .flatten()
                    .filter(|&j| j < prev.len() && prev.items()[j].as_delex().is_some())
                    .any(|j| p < pred.tags.confidence(j));
                prop_assert!(neighbour_dex, "absorbed {} without a more confident adjacent span", idx);
            }
        }
        prev = round.clone();
    }
    let last = out.rounds.last().unwrap_or(&replaced);
    prop_assert_eq!(shape(last), shape(&out.sequence));
    Ok(())
}

/// Merge: only `<unk>` items join spans, each shares the class its span
/// anchor was tagged with, the result is a fixpoint and alignment holds.
pub fn check_merge(tokens: &[String], seed: u64) -> Result<(), TestCaseError> {
    let cfg = fixture_config(0.9, 8);
    let tagger = HashTagger::new(seed);
    let expanded = expand_step(&replace_step(tokens, &cfg), &tagger, &cfg).unwrap();
    let ws = &expanded.sequence;
    let tags = &expanded.prediction.tags;
    let merged = merge_step(ws, tags);
    prop_assert_eq!(surfaces(&merged), tokens.to_vec());
    prop_assert!(merged.is_aligned());

    let class_at: BTreeMap<usize, Option<String>> = ws
        .items()
        .iter()
        .enumerate()
        .map(|(k, it)| (it.range().start, tags.class(k).map(str::to_string)))
        .collect();
    let item_at: BTreeMap<usize, &Item> = ws.items().iter().map(|it| (it.range().start, it)).collect();
    for span in merged.spans() {
        let inner: Vec<&Item> = item_at.range(span.start..span.end).map(|(_, it)| *it).collect();
        let anchors: BTreeSet<Option<String>> = inner
            .iter()
            .filter(|it| it.as_delex().is_some())
            .map(|it| class_at[&it.range().start].clone())
            .collect();
        prop_assert!(!anchors.is_empty());
        for it in &inner {
            prop_assert!(!it.is_token(), "merge absorbed an ordinary token");
            if it.is_unk() {
                let c = &class_at[&it.range().start];
                prop_assert!(c.is_some() && anchors.contains(c), "unk merged across classes");
            }
        }
        // fixpoint: an adjacent <unk> left outside must disagree with the item it touches
        for (edge, outside) in [(span.start, span.start.checked_sub(1)), (span.end - 1, Some(span.end))] {
            let Some(o) = outside else { continue };
            let Some(it) = item_at.get(&o) else { continue };
            if it.is_unk() && merged.items().iter().any(|m| m.is_unk() && m.range().start == o) {
                let inner_edge = item_at.range(..=edge).next_back().map(|(k, _)| *k).unwrap();
                let c = &class_at[&inner_edge];
                prop_assert!(c.is_none() || &class_at[&o] != c, "merge stopped early at {}", o);
            }
        }
    }
    Ok(())
}

/// Projection: slots are disjoint, ordered, in range, survive a BIO round
/// trip, and every delex span becomes (part of) a slot of its class.
pub fn check_projection(tokens: &[String], seed: u64) -> Result<(), TestCaseError> {
    let cfg = fixture_config(0.9, 8);
    let tagger = HashTagger::new(seed);
    let expanded = expand_step(&replace_step(tokens, &cfg), &tagger, &cfg).unwrap();
    let merged = merge_step(&expanded.sequence, &expanded.prediction.tags);
    let pred = tagger.predict(&merged.model_tokens()).unwrap();
    let frame = project_labels(&merged, &pred.tags, &pred.intent, &cfg.delex);

    prop_assert_eq!(frame.tokens.len(), tokens.len());
    let mut last_end = 0;
    for s in &frame.slots {
        prop_assert!(s.start_token >= last_end && s.start_token < s.end_token && s.end_token <= tokens.len());
        last_end = s.end_token;
    }
    let spans = frame.spans();
    prop_assert_eq!(
        spans_from_labels(&labels_from_spans(tokens.len(), &spans)),
        spans.clone()
    );
    for d in merged.spans() {
        let slot_class = &cfg.delex.for_delex(&d.delex_class).unwrap().slot_class;
        prop_assert!(
            spans
                .iter()
                .any(|s| &s.class == slot_class && s.start <= d.start && d.end <= s.end),
            "delex span {}..{} lost",
            d.start,
            d.end
        );
    }
    Ok(())
}

// ---- metrics ----

/// Brute-force chunk extractor: `start..end` is a chunk iff it opens a run
/// of class `c`, every later position continues it with `I_c`, and the next
/// position does not.
pub fn oracle_spans(labels: &[SlotLabel]) -> BTreeSet<(String, usize, usize)> {
    let mut out = BTreeSet::new();
    let n = labels.len();
    for start in 0..n {
        let Some(c) = labels[start].class() else { continue };
        let opens = match &labels[start] {
            SlotLabel::Begin(_) => true,
            _ => start == 0 || labels[start - 1].class() != Some(c),
        };
        if !opens {
            continue;
        }
        for end in start + 1..=n {
            let body = labels[start + 1..end].iter().all(|l| *l == SlotLabel::inside(c));
            let closed = end == n || labels[end] != SlotLabel::inside(c);
            if body && closed {
                out.insert((c.to_string(), start, end));
            }
        }
    }
    out
}

pub fn oracle_counts(gold: &[Vec<SlotLabel>], pred: &[Vec<SlotLabel>]) -> (usize, usize, usize) {
    let tag = |seqs: &[Vec<SlotLabel>]| -> BTreeSet<(usize, String, usize, usize)> {
        seqs.iter()
            .enumerate()
            .flat_map(|(u, l)| oracle_spans(l).into_iter().map(move |(c, s, e)| (u, c, s, e)))
            .collect()
    };
    let (g, p) = (tag(gold), tag(pred));
    let tp = g.intersection(&p).count();
    (tp, p.len() - tp, g.len() - tp)
}

pub fn gold_and_predictions() -> impl Strategy<Value = (Vec<Vec<SlotLabel>>, Vec<Vec<SlotLabel>>)> {
    prop::collection::vec(1usize..12, 1..8).prop_flat_map(|lens| {
        let gold: Vec<_> = lens.iter().map(|&n| labels(n)).collect();
        let pred: Vec<_> = lens.iter().map(|&n| raw_labels(n)).collect();
        (gold, pred)
    })
}

pub fn corpus_from_labels(labels: &[Vec<SlotLabel>]) -> Corpus {
    labels
        .iter()
        .enumerate()
        .map(|(u, l)| {
            let tokens = (0..l.len()).map(|i| format!("u{u}t{i}")).collect();
            TaggedUtterance::new(tokens, l.clone(), "Crime", Provenance::Original).unwrap()
        })
        .collect()
}

pub fn check_slot_f1_oracle(gold: &[Vec<SlotLabel>], pred: &[Vec<SlotLabel>]) -> Result<(), TestCaseError> {
    let corpus = corpus_from_labels(gold);
    let scores = slu_core::metrics::slot_f1_labels(&corpus, pred).unwrap();
    let (tp, fp, fn_) = oracle_counts(gold, pred);
    prop_assert_eq!(
        (scores.true_positives, scores.false_positives, scores.false_negatives),
        (tp, fp, fn_)
    );
    let p = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let r = if tp + fn_ == 0 {
        0.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let f1 = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    prop_assert_eq!((scores.precision, scores.recall, scores.f1), (p, r, f1));
    Ok(())
}

pub fn vocabulary_of(corpus: &Corpus) -> Vocabulary {
    build_vocabulary(corpus, 1)
}

pub fn frame_from_labels(tokens: &[String], labels: &[SlotLabel], intent: &str) -> slu_core::inference::Frame {
    use slu_core::inference::{Frame, SlotSource, SlotSpan};
    Frame {
        tokens: tokens.to_vec(),
        intent: intent.to_string(),
        intent_confidence: 1.0,
        slots: spans_from_labels(labels)
            .into_iter()
            .map(|s| SlotSpan {
                text: tokens[s.start..s.end].join(" "),
                class: s.class,
                start_token: s.start,
                end_token: s.end,
                source: SlotSource::Tagged,
            })
            .collect(),
        oov_tokens: Vec::new(),
        ood_spans: Vec::new(),
    }
}

/// Subsets: `All` reproduces the global scores, and `Ood`/`Oov` scores equal
/// those of the corpus filtered by an independent membership test.
pub fn check_subsets(
    gold: &[Vec<SlotLabel>],
    pred: &[Vec<SlotLabel>],
    vocab_mask: &[bool],
) -> Result<(), TestCaseError> {
    use slu_core::metrics::{slot_f1, subset_eval, Selector};
    let corpus = corpus_from_labels(gold);
    let frames: Vec<_> = corpus
        .utterances()
        .iter()
        .zip(pred)
        .map(|(u, p)| frame_from_labels(u.tokens(), p, "Crime"))
        .collect();
    let mut vocab = Vocabulary::new(1);
    let all_tokens: Vec<&String> = corpus.utterances().iter().flat_map(|u| u.tokens()).collect();
    for (t, keep) in all_tokens.iter().zip(vocab_mask.iter().cycle()) {
        if *keep {
            vocab.add(t);
        }
    }
    let ood: BTreeSet<String> = ["aux".to_string()].into();

    let global = slot_f1(&corpus, &frames).unwrap();
    let all = subset_eval(&corpus, &frames, Selector::All, &vocab, &ood).unwrap();
    prop_assert_eq!(all.slots.as_ref(), Some(&global));

    for selector in [Selector::Ood, Selector::Oov] {
        let member = |u: &TaggedUtterance| match selector {
            Selector::Ood => u.labels().iter().any(|l| l.class() == Some("aux")),
            _ => u.tokens().iter().any(|t| {
                !all_tokens
                    .iter()
                    .zip(vocab_mask.iter().cycle())
                    .any(|(x, k)| *k && *x == t)
            }),
        };
        let keep: Vec<usize> = (0..corpus.len()).filter(|&i| member(&corpus.utterances()[i])).collect();
        let report = subset_eval(&corpus, &frames, selector, &vocab, &ood).unwrap();
        prop_assert_eq!(report.utterances, keep.len());
        prop_assert_eq!(report.empty, keep.is_empty());
        if !keep.is_empty() {
            let sub = Corpus::new(keep.iter().map(|&i| corpus.utterances()[i].clone()).collect());
            let sub_pred: Vec<Vec<SlotLabel>> = keep.iter().map(|&i| pred[i].clone()).collect();
            let (tp, fp, fn_) = oracle_counts(&keep.iter().map(|&i| gold[i].clone()).collect::<Vec<_>>(), &sub_pred);
            let s = report.slots.unwrap();
            prop_assert_eq!((s.true_positives, s.false_positives, s.false_negatives), (tp, fp, fn_));
            prop_assert_eq!(
                Some(s),
                slot_f1(&sub, &keep.iter().map(|&i| frames[i].clone()).collect::<Vec<_>>()).ok()
            );
        }
    }
    Ok(())
}

/// The analytic gradient of the log-linear loss agrees with central
/// differences on every active parameter.
pub fn check_gradient(seed: u64, n_features: usize, n_classes: usize, l2: f64) -> Result<(), TestCaseError> {
    use rand::{Rng, SeedableRng};
    use slu_core::tagger::LogLinear;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut m = LogLinear::new(n_features, n_classes);
    for w in m.params_mut() {
        *w = rng.random_range(-2.0..2.0);
    }
    let mut features: Vec<usize> = (0..n_features).filter(|_| rng.random_bool(0.5)).collect();
    if features.is_empty() {
        features.push(0);
    }
    let gold = rng.random_range(0..n_classes);
    let h = 1e-5;
    for (idx, g) in m.gradient(&features, gold, l2) {
        let mut plus = m.clone();
        plus.params_mut()[idx] += h;
        let mut minus = m.clone();
        minus.params_mut()[idx] -= h;
        let numeric = (plus.loss(&features, gold, l2) - minus.loss(&features, gold, l2)) / (2.0 * h);
        prop_assert!(
            (numeric - g).abs() < 1e-4,
            "param {}: analytic {} numeric {}",
            idx,
            g,
            numeric
        );
    }
    // one SGD step moves exactly along the negative gradient
    let lr = 0.1;
    let mut stepped = m.clone();
    stepped.sgd_step(&features, gold, lr, l2);
    let mut expected = m.params().to_vec();
    for (idx, g) in m.gradient(&features, gold, l2) {
        expected[idx] -= lr * g;
    }
    for (a, b) in stepped.params().iter().zip(&expected) {
        prop_assert!((a - b).abs() < 1e-12);
    }
    Ok(())
}
