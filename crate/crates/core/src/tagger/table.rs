use super::{IntentPosterior, Prediction, TagPosterior, Tagger, TaggerError};
use crate::corpus::SlotLabel;

#[derive(Debug, Clone)]
struct Rule {
    token: String,
    next: Option<String>,
    label: usize,
    confidence: f64,
}

/// A tagger driven by a lookup table instead of learned weights.
///
/// Each position gets the label and confidence of the first rule whose token
/// (and, optionally, following token) matches; the leftover probability mass
/// is spread evenly over the other labels. Unmatched positions use the
/// default. The intent distribution is fixed. Handy for exercising the
/// inference steps with exactly the confidences a scenario needs.
#[derive(Debug, Clone)]
pub struct TableTagger {
    labels: Vec<SlotLabel>,
    rules: Vec<Rule>,
    default: (usize, f64),
    intents: Vec<String>,
    intent_probs: Vec<f64>,
}

impl TableTagger {
    /// Panics if `default_label` is not in `labels` or the confidence would
    /// not make it the argmax.
    pub fn new(labels: Vec<SlotLabel>, default_label: &SlotLabel, default_confidence: f64) -> Self {
        let mut t = TableTagger {
            labels,
            rules: Vec::new(),
            default: (0, 1.0),
            intents: vec!["unknown".into()],
            intent_probs: vec![1.0],
        };
        t.default = (t.index(default_label), t.check(default_confidence));
        t
    }

    fn index(&self, label: &SlotLabel) -> usize {
        self.labels
            .iter()
            .position(|l| l == label)
            .unwrap_or_else(|| panic!("label {label} not in the inventory"))
    }

    fn check(&self, confidence: f64) -> f64 {
        let n = self.labels.len() as f64;
        assert!(
            confidence <= 1.0 && (n == 1.0 || confidence > (1.0 - confidence) / (n - 1.0)),
            "confidence {confidence} would not be the argmax over {n} labels"
        );
        confidence
    }

    pub fn rule(mut self, token: &str, label: &SlotLabel, confidence: f64) -> Self {
        let label = self.index(label);
        let confidence = self.check(confidence);
        self.rules.push(Rule {
            token: token.to_string(),
            next: None,
            label,
            confidence,
        });
        self
    }

    /// Like [`TableTagger::rule`], but only when `token` is followed by `next`.
    pub fn rule_before(mut self, token: &str, next: &str, label: &SlotLabel, confidence: f64) -> Self {
        let label = self.index(label);
        let confidence = self.check(confidence);
        self.rules.push(Rule {
            token: token.to_string(),
            next: Some(next.to_string()),
            label,
            confidence,
        });
        self
    }

    /// Fixed intent distribution, returned for every input.
    pub fn intents(mut self, intents: &[(&str, f64)]) -> Self {
        self.intents = intents.iter().map(|(i, _)| i.to_string()).collect();
        self.intent_probs = intents.iter().map(|&(_, p)| p).collect();
        self
    }

    fn lookup(&self, tokens: &[String], i: usize) -> (usize, f64) {
        let next = tokens.get(i + 1).map(String::as_str);
        self.rules
            .iter()
            .find(|r| r.token == tokens[i] && r.next.as_deref().is_none_or(|n| Some(n) == next))
            .map(|r| (r.label, r.confidence))
            .unwrap_or(self.default)
    }
}

impl Tagger for TableTagger {
    fn labels(&self) -> &[SlotLabel] {
        &self.labels
    }

    fn predict(&self, tokens: &[String]) -> Result<Prediction, TaggerError> {
        if tokens.is_empty() {
            return Err(TaggerError::EmptyInput);
        }
        let n = self.labels.len();
        let rows = (0..tokens.len())
            .map(|i| {
                let (label, p) = self.lookup(tokens, i);
                let rest = if n > 1 { (1.0 - p) / (n - 1) as f64 } else { 0.0 };
                let mut row = vec![rest; n];
                row[label] = p;
                row
            })
            .collect();
        Ok(Prediction {
            tags: TagPosterior::new(self.labels.clone(), rows),
            intent: IntentPosterior::new(self.intents.clone(), self.intent_probs.clone()),
        })
    }
}
