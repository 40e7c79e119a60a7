use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{IntentPosterior, LogLinear, Prediction, TagPosterior, Tagger, TaggerError};
use crate::corpus::{
    build_vocabulary, delex_class_of, is_special, write_conll_file, Corpus, DelexConfig, SlotLabel, Vocabulary,
    DEFAULT_MIN_COUNT, UNK,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Context tokens on each side of the current token.
    pub window: usize,
    pub l2: f64,
    pub seed: u64,
    pub min_count: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            learning_rate: 0.2,
            epochs: 12,
            window: 2,
            l2: 1e-5,
            seed: 0,
            min_count: DEFAULT_MIN_COUNT,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), TaggerError> {
        let bad = |m: &str| Err(TaggerError::InvalidHyperparams(m.to_string()));
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            return bad("l2 must be non-negative");
        }
        if self.min_count == 0 {
            return bad("min_count must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    /// Mean token cross-entropy of each epoch, measured during the pass.
    pub epoch_losses: Vec<f64>,
    /// False when some epoch's loss exceeded the previous one.
    pub loss_monotone: bool,
    pub token_accuracy: f64,
    pub intent_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub hyperparams: Hyperparams,
    /// SHA-256 of the training corpus in its TSV serialization.
    pub corpus_fingerprint: String,
    pub training_utterances: usize,
    /// Placeholder surfaces seen in training, always including `<unk>`.
    pub special_tokens: Vec<String>,
    pub report: TrainReport,
    /// Delex table the training corpus was expanded with, if any.
    pub delex: Option<DelexConfig>,
}

/// Interned feature strings; the lookup table is rebuilt after loading.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
struct FeatureIndex {
    names: Vec<String>,
    lookup: HashMap<String, usize>,
}

impl PartialEq for FeatureIndex {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl From<Vec<String>> for FeatureIndex {
    fn from(names: Vec<String>) -> Self {
        let lookup = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        FeatureIndex { names, lookup }
    }
}

impl From<FeatureIndex> for Vec<String> {
    fn from(index: FeatureIndex) -> Self {
        index.names
    }
}

impl FeatureIndex {
    fn len(&self) -> usize {
        self.names.len()
    }

    /// Indices of the known features, sorted and deduplicated.
    fn encode(&self, features: &[String]) -> Vec<usize> {
        let mut idx: Vec<usize> = features.iter().filter_map(|f| self.lookup.get(f).copied()).collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }
}

/// Trained reference tagger. Immutable; safe to share across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    meta: ModelMeta,
    labels: Vec<SlotLabel>,
    intents: Vec<String>,
    vocabulary: Vocabulary,
    slot_features: FeatureIndex,
    slot_model: LogLinear,
    intent_features: FeatureIndex,
    intent_model: LogLinear,
}

const BOS: &str = "<s>";
const EOS: &str = "</s>";

/// Feature strings of position `i` in an already-normalized sequence.
pub fn token_features(tokens: &[String], i: usize, window: usize) -> Vec<String> {
    let at = |offset: isize| -> &str {
        let j = i as isize + offset;
        if j < 0 {
            BOS
        } else if j as usize >= tokens.len() {
            EOS
        } else {
            &tokens[j as usize]
        }
    };
    let current = &tokens[i];
    let lower = current.to_lowercase();
    let mut feats = vec!["bias".to_string(), format!("w={lower}")];
    if *current != lower {
        feats.push(format!("W={current}"));
    }
    for d in 1..=window as isize {
        feats.push(format!("w-{d}={}", at(-d).to_lowercase()));
        feats.push(format!("w+{d}={}", at(d).to_lowercase()));
    }
    for (name, offset) in [("0", 0isize), ("-1", -1), ("+1", 1)] {
        let t = at(offset);
        if t == UNK {
            feats.push(format!("unk{name}"));
        } else if delex_class_of(t).is_some() {
            feats.push(format!("delex{name}"));
        }
    }
    feats
}

fn intent_features(tokens: &[String]) -> Vec<String> {
    let lower: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
    let mut feats = vec!["bias".to_string()];
    feats.extend(lower.iter().map(|t| format!("u={t}")));
    feats.extend(lower.windows(2).map(|w| format!("b={}|{}", w[0], w[1])));
    feats
}

fn normalize(vocab: &Vocabulary, tokens: &[String]) -> Vec<String> {
    tokens
        .iter()
        .map(|t| {
            if is_special(t) || vocab.contains(t) {
                t.clone()
            } else {
                UNK.to_string()
            }
        })
        .collect()
}

pub fn corpus_fingerprint(corpus: &Corpus) -> String {
    hex::encode(Sha256::digest(write_conll_file(corpus).as_bytes()))
}

struct Encoded {
    tokens: Vec<(Vec<usize>, usize)>,
    intent: (Vec<usize>, usize),
}

/// Trains the reference tagger. Deterministic given the corpus and
/// hyperparameters (including the seed).
pub fn train(corpus: &Corpus, hyper: &Hyperparams) -> Result<Model, TaggerError> {
    hyper.validate()?;
    if corpus.is_empty() {
        return Err(TaggerError::EmptyCorpus);
    }
    let mut specials: BTreeSet<String> = [UNK.to_string()].into();
    for u in corpus.utterances() {
        for (t, l) in u.tokens().iter().zip(u.labels()) {
            if delex_class_of(t).is_some() {
                if !matches!(l, SlotLabel::Begin(_)) {
                    return Err(TaggerError::InventoryMismatch(format!(
                        "placeholder `{t}` labeled `{l}`; collapsed spans must carry a B_ label"
                    )));
                }
                specials.insert(t.clone());
            }
        }
    }

    let vocabulary = build_vocabulary(corpus, hyper.min_count);
    let labels: Vec<SlotLabel> = corpus
        .utterances()
        .iter()
        .flat_map(|u| u.labels().iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let intents: Vec<String> = corpus.intents().iter().cloned().collect();
    let label_id: HashMap<&SlotLabel, usize> = labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let intent_id: HashMap<&str, usize> = intents.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();

    let raw: Vec<(Vec<Vec<String>>, Vec<String>)> = corpus
        .utterances()
        .iter()
        .map(|u| {
            let norm = normalize(&vocabulary, u.tokens());
            let feats = (0..norm.len())
                .map(|i| token_features(&norm, i, hyper.window))
                .collect();
            (feats, intent_features(&norm))
        })
        .collect();
    let slot_features = FeatureIndex::from(
        raw.iter()
            .flat_map(|(tf, _)| tf.iter().flatten().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect::<Vec<_>>(),
    );
    let intent_index = FeatureIndex::from(
        raw.iter()
            .flat_map(|(_, f)| f.iter().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect::<Vec<_>>(),
    );
    let data: Vec<Encoded> = corpus
        .utterances()
        .iter()
        .zip(&raw)
        .map(|(u, (tf, inf))| Encoded {
            tokens: tf
                .iter()
                .zip(u.labels())
                .map(|(f, l)| (slot_features.encode(f), label_id[l]))
                .collect(),
            intent: (intent_index.encode(inf), intent_id[u.intent()]),
        })
        .collect();

    let mut slot_model = LogLinear::new(slot_features.len(), labels.len());
    let mut intent_model = LogLinear::new(intent_index.len(), intents.len());
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut epoch_losses = Vec::with_capacity(hyper.epochs);
    for epoch in 0..hyper.epochs {
        order.shuffle(&mut rng);
        // inverse square-root decay
        let lr = hyper.learning_rate / ((epoch + 1) as f64).sqrt();
        let mut total = 0.0;
        let mut count = 0usize;
        for &i in &order {
            let ex = &data[i];
            for (feats, gold) in &ex.tokens {
                total += slot_model.sgd_step(feats, *gold, lr, hyper.l2);
                count += 1;
            }
            intent_model.sgd_step(&ex.intent.0, ex.intent.1, lr, hyper.l2);
        }
        epoch_losses.push(total / count.max(1) as f64);
    }
    let loss_monotone = epoch_losses.windows(2).all(|w| w[1] <= w[0]);

    let mut correct = 0usize;
    let mut tokens = 0usize;
    let mut intent_correct = 0usize;
    for ex in &data {
        for (feats, gold) in &ex.tokens {
            tokens += 1;
            if super::argmax(&slot_model.probabilities(feats)) == *gold {
                correct += 1;
            }
        }
        if super::argmax(&intent_model.probabilities(&ex.intent.0)) == ex.intent.1 {
            intent_correct += 1;
        }
    }

    Ok(Model {
        meta: ModelMeta {
            hyperparams: hyper.clone(),
            corpus_fingerprint: corpus_fingerprint(corpus),
            training_utterances: corpus.len(),
            special_tokens: specials.into_iter().collect(),
            report: TrainReport {
                epoch_losses,
                loss_monotone,
                token_accuracy: correct as f64 / tokens.max(1) as f64,
                intent_accuracy: intent_correct as f64 / data.len() as f64,
            },
            delex: None,
        },
        labels,
        intents,
        vocabulary,
        slot_features,
        slot_model,
        intent_features: intent_index,
        intent_model,
    })
}

impl Model {
    pub fn meta(&self) -> &ModelMeta {
        &self.meta
    }

    pub fn report(&self) -> &TrainReport {
        &self.meta.report
    }

    pub fn intents(&self) -> &[String] {
        &self.intents
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn delex_config(&self) -> Option<&DelexConfig> {
        self.meta.delex.as_ref()
    }

    /// Records the delex table the training corpus was expanded with.
    pub fn with_delex_config(mut self, delex: DelexConfig) -> Self {
        self.meta.delex = Some(delex);
        self
    }

    /// Input as the model sees it: placeholders kept, out-of-vocabulary
    /// tokens mapped to `<unk>`.
    pub fn normalize(&self, tokens: &[String]) -> Vec<String> {
        normalize(&self.vocabulary, tokens)
    }

    pub(super) fn check_shapes(&self) -> Result<(), TaggerError> {
        let corrupt = |m: &str| Err(TaggerError::CorruptPayload(m.to_string()));
        if self.labels.is_empty() || self.intents.is_empty() {
            return corrupt("empty inventory");
        }
        if self.slot_model.n_features() != self.slot_features.len()
            || self.slot_model.n_classes() != self.labels.len()
            || self.slot_model.params().len() != self.slot_features.len() * self.labels.len()
        {
            return corrupt("slot model shape does not match its inventories");
        }
        if self.intent_model.n_features() != self.intent_features.len()
            || self.intent_model.n_classes() != self.intents.len()
            || self.intent_model.params().len() != self.intent_features.len() * self.intents.len()
        {
            return corrupt("intent model shape does not match its inventories");
        }
        Ok(())
    }
}

impl Tagger for Model {
    fn labels(&self) -> &[SlotLabel] {
        &self.labels
    }

    fn predict(&self, tokens: &[String]) -> Result<Prediction, TaggerError> {
        if tokens.is_empty() {
            return Err(TaggerError::EmptyInput);
        }
        let norm = self.normalize(tokens);
        let window = self.meta.hyperparams.window;
        let positions = (0..norm.len())
            .map(|i| {
                let feats = self.slot_features.encode(&token_features(&norm, i, window));
                self.slot_model.probabilities(&feats)
            })
            .collect();
        let intent_feats = self.intent_features.encode(&intent_features(&norm));
        Ok(Prediction {
            tags: TagPosterior::new(self.labels.clone(), positions),
            intent: IntentPosterior::new(self.intents.clone(), self.intent_model.probabilities(&intent_feats)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::TaggedUtterance;

    pub(crate) fn toy_corpus() -> Corpus {
        let rows = [
            (
                "fire at Main St today",
                "B_incident O B_address I_address B_date",
                "Fire",
            ),
            (
                "fire at Oak Ave today",
                "B_incident O B_address I_address B_date",
                "Fire",
            ),
            (
                "fire near Main St tonight",
                "B_incident O B_address I_address B_time",
                "Fire",
            ),
            (
                "crash at Oak Ave today",
                "B_incident O B_address I_address B_date",
                "Traffic",
            ),
            (
                "crash near Main St tonight",
                "B_incident O B_address I_address B_time",
                "Traffic",
            ),
            (
                "crash at Main St tonight",
                "B_incident O B_address I_address B_time",
                "Traffic",
            ),
            (
                "robbery at Oak Ave today",
                "B_incident O B_address I_address B_date",
                "Crime",
            ),
            (
                "robbery near Oak Ave tonight",
                "B_incident O B_address I_address B_time",
                "Crime",
            ),
            (
                "robbery at Main St today",
                "B_incident O B_address I_address B_date",
                "Crime",
            ),
            (
                "fire near Oak Ave today",
                "B_incident O B_address I_address B_date",
                "Fire",
            ),
        ];
        rows.iter()
            .map(|(t, l, i)| TaggedUtterance::from_strs(t, l, i).unwrap())
            .collect()
    }

    fn hyper() -> Hyperparams {
        Hyperparams {
            epochs: 20,
            ..Hyperparams::default()
        }
    }

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn memorizes_toy_corpus() {
        let corpus = toy_corpus();
        let model = train(&corpus, &hyper()).unwrap();
        assert!(model.report().token_accuracy >= 0.95, "{:?}", model.report());
        for u in corpus.utterances() {
            let p = model.predict(u.tokens()).unwrap();
            assert_eq!(p.tags.argmax_labels(), u.labels());
        }
        assert!(model.report().loss_monotone, "{:?}", model.report().epoch_losses);
    }

    #[test]
    fn distributions_are_normalized() {
        let model = train(&toy_corpus(), &hyper()).unwrap();
        let p = model.predict(&toks("a totally novel <unk> input <Address>")).unwrap();
        assert_eq!(p.tags.len(), 6);
        for i in 0..p.tags.len() {
            let sum: f64 = p.tags.distribution(i).iter().sum();
            assert!((sum - 1.0).abs() < 1e-6);
            assert!(p.tags.confidence(i) > 0.0 && p.tags.confidence(i) <= 1.0);
        }
        assert!((p.intent.probs().iter().sum::<f64>() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn unseen_token_equals_literal_unk() {
        let model = train(&toy_corpus(), &hyper()).unwrap();
        let a = model.predict(&toks("fire at Zanzibar St today")).unwrap();
        let b = model.predict(&toks("fire at <unk> St today")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_label_corpus() {
        let c: Corpus = ["a b", "b c", "c a"]
            .iter()
            .map(|t| TaggedUtterance::from_strs(t, "O O", "X").unwrap())
            .collect();
        let model = train(&c, &hyper()).unwrap();
        let p = model.predict(&toks("a q")).unwrap();
        assert_eq!(p.tags.confidence(0), 1.0);
        assert_eq!(p.tags.confidence(1), 1.0);
    }

    #[test]
    fn deterministic_retrain() {
        let a = train(&toy_corpus(), &hyper()).unwrap();
        let b = train(&toy_corpus(), &hyper()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            train(&Corpus::default(), &hyper()),
            Err(TaggerError::EmptyCorpus)
        ));
        let bad = Hyperparams { epochs: 0, ..hyper() };
        assert!(matches!(
            train(&toy_corpus(), &bad),
            Err(TaggerError::InvalidHyperparams(_))
        ));
        let model = train(&toy_corpus(), &hyper()).unwrap();
        assert!(matches!(model.predict(&[]), Err(TaggerError::EmptyInput)));
        let c: Corpus = [TaggedUtterance::from_strs("<Address> x", "O O", "X").unwrap()]
            .into_iter()
            .collect();
        assert!(matches!(train(&c, &hyper()), Err(TaggerError::InventoryMismatch(_))));
    }

    #[test]
    fn features_cover_window_and_flags() {
        let f = token_features(&toks("<unk> Main <Address>"), 1, 2);
        for want in [
            "bias",
            "w=main",
            "W=Main",
            "w-1=<unk>",
            "w+1=<address>",
            "w-2=<s>",
            "w+2=</s>",
            "unk-1",
            "delex+1",
        ] {
            assert!(f.iter().any(|x| x == want), "missing {want} in {f:?}");
        }
    }
}
