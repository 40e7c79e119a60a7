//! Data model for tagged utterances and the tab-separated corpus format.
//!
//! A corpus file is a sequence of blocks separated by blank lines. Each block
//! starts with an `# intent: <name>` header, optionally followed by a
//! `# provenance: <kind>` line for generated variants, then one
//! `token<TAB>label` line per token:
//!
//! ```text
//! # intent: Crime
//! shooting	B_incident
//! on	O
//! 5/12	B_date
//! ```

// The example above shows the real separator.
#![allow(clippy::tabs_in_doc_comments)]

mod config;
mod lexicon;
mod stats;
mod tokenize;
mod vocab;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{DelexClassSpec, DelexConfig, MatchStrategy};
pub use lexicon::{harvest_lexicons, LexiconClass, LexiconMatch, LexiconStore, MatchKind, MAX_PATTERN_TOKENS};
pub use stats::{corpus_stats, StatsReport};
pub use tokenize::{tokenize, tokenize_surfaces, Token};
pub use vocab::{build_vocabulary, Vocabulary, DEFAULT_MIN_COUNT};

/// Surface of the unknown-token placeholder.
pub const UNK: &str = "<unk>";

/// Placeholder surface for a delexicalized span of `delex_class`, e.g. `<Address>`.
pub fn delex_token(delex_class: &str) -> String {
    format!("<{delex_class}>")
}

/// True for `<unk>` and for delex placeholders such as `<Auxiliary_msg>`.
pub fn is_special(surface: &str) -> bool {
    surface == UNK || delex_class_of(surface).is_some()
}

/// Extracts the class name from a delex placeholder surface.
pub fn delex_class_of(surface: &str) -> Option<&str> {
    let inner = surface.strip_prefix('<')?.strip_suffix('>')?;
    let mut chars = inner.chars();
    let first = chars.next()?;
    if inner == "unk" || !first.is_ascii_alphabetic() {
        return None;
    }
    if chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
        Some(inner)
    } else {
        None
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid label `{0}`")]
    InvalidLabel(String),
    #[error("utterance has {tokens} tokens but {labels} labels")]
    LengthMismatch { tokens: usize, labels: usize },
    #[error("ill-formed BIO sequence at position {position}: `{label}` does not continue a span")]
    IllFormedBio { position: usize, label: String },
    #[error("invalid token `{0}`: tokens must be non-empty and contain no whitespace")]
    InvalidToken(String),
    #[error("empty intent name")]
    EmptyIntent,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("lexicon error: {0}")]
    Lexicon(String),
    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` wrapper that keeps `CorpusError` comparable in tests.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{path}: {message}")]
pub struct IoError {
    pub path: String,
    pub message: String,
}

impl IoError {
    pub fn new(path: impl fmt::Display, err: std::io::Error) -> Self {
        IoError {
            path: path.to_string(),
            message: err.to_string(),
        }
    }
}

/// BIO slot label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SlotLabel {
    Outside,
    Begin(String),
    Inside(String),
}

impl SlotLabel {
    pub fn begin(class: impl Into<String>) -> Self {
        SlotLabel::Begin(class.into())
    }

    pub fn inside(class: impl Into<String>) -> Self {
        SlotLabel::Inside(class.into())
    }

    /// Slot class regardless of the B/I prefix; `None` for `O`.
    pub fn class(&self) -> Option<&str> {
        match self {
            SlotLabel::Outside => None,
            SlotLabel::Begin(c) | SlotLabel::Inside(c) => Some(c),
        }
    }

    pub fn is_outside(&self) -> bool {
        matches!(self, SlotLabel::Outside)
    }
}

impl fmt::Display for SlotLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlotLabel::Outside => f.write_str("O"),
            SlotLabel::Begin(c) => write!(f, "B_{c}"),
            SlotLabel::Inside(c) => write!(f, "I_{c}"),
        }
    }
}

impl FromStr for SlotLabel {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "O" {
            return Ok(SlotLabel::Outside);
        }
        let (prefix, class) = s
            .split_once('_')
            .ok_or_else(|| CorpusError::InvalidLabel(s.to_string()))?;
        if class.is_empty() || class.chars().any(char::is_whitespace) {
            return Err(CorpusError::InvalidLabel(s.to_string()));
        }
        match prefix {
            "B" => Ok(SlotLabel::Begin(class.to_string())),
            "I" => Ok(SlotLabel::Inside(class.to_string())),
            _ => Err(CorpusError::InvalidLabel(s.to_string())),
        }
    }
}

impl Serialize for SlotLabel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SlotLabel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Where an utterance came from: a real example or a generated training variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Original,
    OodVariant,
    OovVariant,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Original => "original",
            Provenance::OodVariant => "ood_variant",
            Provenance::OovVariant => "oov_variant",
        }
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "original" => Ok(Provenance::Original),
            "ood_variant" => Ok(Provenance::OodVariant),
            "oov_variant" => Ok(Provenance::OovVariant),
            other => Err(format!("unknown provenance `{other}`")),
        }
    }
}

/// A labeled gold span: `tokens[start..end]` carries slot `class`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabeledSpan {
    pub class: String,
    pub start: usize,
    pub end: usize,
}

/// Checks that every `Inside(c)` continues a `Begin(c)`/`Inside(c)` run.
pub fn check_bio(labels: &[SlotLabel]) -> Result<(), CorpusError> {
    let mut prev: Option<&str> = None;
    for (position, label) in labels.iter().enumerate() {
        if let SlotLabel::Inside(c) = label {
            if prev != Some(c.as_str()) {
                return Err(CorpusError::IllFormedBio {
                    position,
                    label: label.to_string(),
                });
            }
        }
        prev = label.class();
    }
    Ok(())
}

/// Chunks a well-formed BIO sequence into spans. A stray `Inside` starts a
/// new span, which makes this usable on unvalidated predictions as well.
pub fn spans_from_labels(labels: &[SlotLabel]) -> Vec<LabeledSpan> {
    let mut spans: Vec<LabeledSpan> = Vec::new();
    let mut open = false;
    for (i, label) in labels.iter().enumerate() {
        match label {
            SlotLabel::Outside => open = false,
            SlotLabel::Begin(c) => {
                spans.push(LabeledSpan {
                    class: c.clone(),
                    start: i,
                    end: i + 1,
                });
                open = true;
            }
            SlotLabel::Inside(c) => match spans.last_mut() {
                Some(last) if open && last.end == i && &last.class == c => last.end = i + 1,
                _ => {
                    spans.push(LabeledSpan {
                        class: c.clone(),
                        start: i,
                        end: i + 1,
                    });
                    open = true;
                }
            },
        }
    }
    spans
}

/// Writes spans back as BIO labels over `len` positions.
pub fn labels_from_spans(len: usize, spans: &[LabeledSpan]) -> Vec<SlotLabel> {
    let mut labels = vec![SlotLabel::Outside; len];
    for span in spans {
        for (offset, label) in labels[span.start..span.end].iter_mut().enumerate() {
            *label = if offset == 0 {
                SlotLabel::Begin(span.class.clone())
            } else {
                SlotLabel::Inside(span.class.clone())
            };
        }
    }
    labels
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedUtterance {
    tokens: Vec<String>,
    labels: Vec<SlotLabel>,
    intent: String,
    provenance: Provenance,
}

impl TaggedUtterance {
    pub fn new(
        tokens: Vec<String>,
        labels: Vec<SlotLabel>,
        intent: impl Into<String>,
        provenance: Provenance,
    ) -> Result<Self, CorpusError> {
        let intent = intent.into();
        if tokens.len() != labels.len() {
            return Err(CorpusError::LengthMismatch {
                tokens: tokens.len(),
                labels: labels.len(),
            });
        }
        if let Some(bad) = tokens
            .iter()
            .find(|t| t.is_empty() || t.chars().any(char::is_whitespace))
        {
            return Err(CorpusError::InvalidToken(bad.clone()));
        }
        if intent.trim().is_empty() || intent.trim() != intent {
            return Err(CorpusError::EmptyIntent);
        }
        check_bio(&labels)?;
        Ok(TaggedUtterance {
            tokens,
            labels,
            intent,
            provenance,
        })
    }

    /// Convenience constructor from whitespace-separated tokens and labels.
    pub fn from_strs(tokens: &str, labels: &str, intent: &str) -> Result<Self, CorpusError> {
        let tokens = tokens.split_whitespace().map(str::to_string).collect();
        let labels = labels
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()?;
        TaggedUtterance::new(tokens, labels, intent, Provenance::Original)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn labels(&self) -> &[SlotLabel] {
        &self.labels
    }

    pub fn intent(&self) -> &str {
        &self.intent
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn spans(&self) -> Vec<LabeledSpan> {
        spans_from_labels(&self.labels)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn text(&self) -> String {
        self.tokens.join(" ")
    }
}

/// An immutable collection of utterances with derived intent and slot-class
/// inventories.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    utterances: Vec<TaggedUtterance>,
    intents: BTreeSet<String>,
    slot_classes: BTreeSet<String>,
}

impl Corpus {
    pub fn new(utterances: Vec<TaggedUtterance>) -> Self {
        let intents = utterances.iter().map(|u| u.intent.clone()).collect();
        let slot_classes = utterances
            .iter()
            .flat_map(|u| u.labels.iter().filter_map(|l| l.class().map(str::to_string)))
            .collect();
        Corpus {
            utterances,
            intents,
            slot_classes,
        }
    }

    pub fn utterances(&self) -> &[TaggedUtterance] {
        &self.utterances
    }

    pub fn into_utterances(self) -> Vec<TaggedUtterance> {
        self.utterances
    }

    pub fn intents(&self) -> &BTreeSet<String> {
        &self.intents
    }

    pub fn slot_classes(&self) -> &BTreeSet<String> {
        &self.slot_classes
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    /// Utterances with `Provenance::Original`, i.e. not generated variants.
    pub fn originals(&self) -> impl Iterator<Item = &TaggedUtterance> {
        self.utterances.iter().filter(|u| u.provenance == Provenance::Original)
    }

    pub fn concat(&self, other: &Corpus) -> Corpus {
        let mut utterances = self.utterances.clone();
        utterances.extend(other.utterances.iter().cloned());
        Corpus::new(utterances)
    }

    /// Deterministic shuffled split; the first part receives
    /// `round(len * fraction)` utterances.
    pub fn split(&self, fraction: f64, seed: u64) -> (Corpus, Corpus) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;

        let mut order: Vec<usize> = (0..self.len()).collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        order.shuffle(&mut rng);
        let cut = ((self.len() as f64) * fraction.clamp(0.0, 1.0)).round() as usize;
        let pick = |idx: &[usize]| Corpus::new(idx.iter().map(|&i| self.utterances[i].clone()).collect());
        (pick(&order[..cut]), pick(&order[cut..]))
    }
}

impl FromIterator<TaggedUtterance> for Corpus {
    fn from_iter<I: IntoIterator<Item = TaggedUtterance>>(iter: I) -> Self {
        Corpus::new(iter.into_iter().collect())
    }
}

const INTENT_HEADER: &str = "# intent:";
const PROVENANCE_HEADER: &str = "# provenance:";

fn parse_error(line: usize, message: impl Into<String>) -> CorpusError {
    CorpusError::Parse {
        line,
        message: message.into(),
    }
}

/// Parses the tab-separated corpus format. Errors carry 1-based line numbers.
pub fn parse_conll_file(text: &str) -> Result<Corpus, CorpusError> {
    struct Block {
        intent: String,
        provenance: Provenance,
        tokens: Vec<String>,
        labels: Vec<SlotLabel>,
    }

    let mut utterances = Vec::new();
    let mut current: Option<Block> = None;

    let finish = |block: Block, utterances: &mut Vec<TaggedUtterance>, line: usize| {
        if block.tokens.is_empty() {
            return Err(parse_error(line, "utterance has no tokens"));
        }
        let u = TaggedUtterance::new(block.tokens, block.labels, block.intent, block.provenance)
            .map_err(|e| parse_error(line, e.to_string()))?;
        utterances.push(u);
        Ok(())
    };

    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            if let Some(block) = current.take() {
                finish(block, &mut utterances, line_no - 1)?;
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix(INTENT_HEADER) {
            if current.is_some() {
                return Err(parse_error(line_no, "intent header inside an utterance block"));
            }
            let intent = rest.trim();
            if intent.is_empty() {
                return Err(parse_error(line_no, "empty intent name"));
            }
            current = Some(Block {
                intent: intent.to_string(),
                provenance: Provenance::Original,
                tokens: Vec::new(),
                labels: Vec::new(),
            });
            continue;
        }
        let block = current
            .as_mut()
            .ok_or_else(|| parse_error(line_no, "missing `# intent: <name>` header"))?;
        if let Some(rest) = line.strip_prefix(PROVENANCE_HEADER) {
            if !block.tokens.is_empty() {
                return Err(parse_error(line_no, "provenance header after token lines"));
            }
            block.provenance = rest.trim().parse().map_err(|e: String| parse_error(line_no, e))?;
            continue;
        }
        let columns: Vec<&str> = line.split('\t').collect();
        if columns.len() != 2 {
            return Err(parse_error(
                line_no,
                format!("expected 2 tab-separated columns, found {}", columns.len()),
            ));
        }
        let (token, label) = (columns[0], columns[1]);
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(parse_error(line_no, format!("invalid token `{token}`")));
        }
        let label: SlotLabel = label
            .parse()
            .map_err(|e: CorpusError| parse_error(line_no, e.to_string()))?;
        if let SlotLabel::Inside(c) = &label {
            let continues = block.labels.last().and_then(SlotLabel::class) == Some(c.as_str());
            if !continues {
                return Err(parse_error(
                    line_no,
                    format!("`{label}` does not continue a `{c}` span"),
                ));
            }
        }
        block.tokens.push(token.to_string());
        block.labels.push(label);
    }
    if let Some(block) = current.take() {
        finish(block, &mut utterances, last_line)?;
    }
    Ok(Corpus::new(utterances))
}

/// All parse errors of `text`, at most one per blank-line separated block,
/// with line numbers relative to the whole text. Empty when
/// [`parse_conll_file`] would succeed.
pub fn conll_errors(text: &str) -> Vec<CorpusError> {
    let mut errors = Vec::new();
    let mut block = String::new();
    let mut first_line = 1;
    let mut check = |block: &mut String, first_line: usize| {
        if block.trim().is_empty() {
            return;
        }
        if let Err(e) = parse_conll_file(block) {
            errors.push(match e {
                CorpusError::Parse { line, message } => parse_error(first_line + line - 1, message),
                other => other,
            });
        }
        block.clear();
    };
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            check(&mut block, first_line);
            block.clear();
            first_line = idx + 2;
        } else {
            block.push_str(line);
            block.push('\n');
        }
    }
    check(&mut block, first_line);
    errors
}

/// Serializes a corpus; blocks are separated by one blank line and the output
/// carries no trailing blank line.
pub fn write_conll_file(corpus: &Corpus) -> String {
    let mut out = String::new();
    for (i, u) in corpus.utterances.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(INTENT_HEADER);
        out.push(' ');
        out.push_str(&u.intent);
        out.push('\n');
        if u.provenance != Provenance::Original {
            out.push_str(PROVENANCE_HEADER);
            out.push(' ');
            out.push_str(u.provenance.as_str());
            out.push('\n');
        }
        for (token, label) in u.tokens.iter().zip(&u.labels) {
            out.push_str(token);
            out.push('\t');
            out.push_str(&label.to_string());
            out.push('\n');
        }
    }
    out
}

pub fn read_corpus(path: &std::path::Path) -> Result<Corpus, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::new(path.display(), e))?;
    parse_conll_file(&text)
}

pub fn write_corpus(path: &std::path::Path, corpus: &Corpus) -> Result<(), CorpusError> {
    std::fs::write(path, write_conll_file(corpus)).map_err(|e| IoError::new(path.display(), e).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conll_errors_lists_every_bad_block() {
        let text = "# intent: Fire\nfire\tB_incident\n\n# intent: Fire\nfire\tI_address\n\n\nx\tO\n";
        let errors = conll_errors(text);
        let lines: Vec<usize> = errors
            .iter()
            .map(|e| match e {
                CorpusError::Parse { line, .. } => *line,
                _ => 0,
            })
            .collect();
        assert_eq!(lines, [5, 8]);
        assert!(conll_errors("# intent: Fire\nfire\tO\n").is_empty());
    }

    #[test]
    fn minimal_block() {
        let corpus = parse_conll_file("# intent: Crime\nshooting\tB_incident\n").unwrap();
        assert_eq!(corpus.len(), 1);
        let u = &corpus.utterances()[0];
        assert_eq!(u.intent(), "Crime");
        assert_eq!(u.tokens(), ["shooting"]);
        assert_eq!(u.labels(), [SlotLabel::begin("incident")]);
    }

    #[test]
    fn tweet_with_aux_description() {
        let text = "# intent: Crime\n\
            Shooting\tB_incident\n\
            on\tO\n\
            5/12\tB_date\n\
            in\tO\n\
            Queens\tB_address\n\
            .\tO\n\
            Victim\tB_aux\n\
            was\tI_aux\n\
            taken\tI_aux\n\
            to\tI_aux\n\
            hospital\tI_aux\n";
        let corpus = parse_conll_file(text).unwrap();
        let spans = corpus.utterances()[0].spans();
        let aux = spans.iter().find(|s| s.class == "aux").unwrap();
        assert_eq!((aux.start, aux.end), (6, 11));
        assert_eq!(write_conll_file(&corpus), text);
    }

    #[test]
    fn inside_without_begin_is_rejected_at_its_line() {
        let err = parse_conll_file("# intent: Fire\nMay\tI_date\n").unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 2, .. }), "{err}");
        let err = parse_conll_file("# intent: Fire\nfire\tB_incident\nMay\tI_date\n").unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn malformed_lines() {
        let err = parse_conll_file("# intent: Fire\nfire\tB_incident\textra\n").unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 2, .. }));
        let err = parse_conll_file("fire\tO\n").unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 1, .. }));
        let err = parse_conll_file("# intent: Fire\nfire\tX_incident\n").unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 2, .. }));
        let err = parse_conll_file("# intent: \nfire\tO\n").unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 1, .. }));
    }

    #[test]
    fn write_shapes() {
        assert_eq!(write_conll_file(&Corpus::default()), "");
        let c = parse_conll_file("# intent: A\nx\tO\n\n\n# intent: B\ny\tB_c\n").unwrap();
        assert_eq!(write_conll_file(&c), "# intent: A\nx\tO\n\n# intent: B\ny\tB_c\n");
    }

    #[test]
    fn provenance_roundtrips() {
        let u = TaggedUtterance::from_strs("<unk> st", "B_address I_address", "Fire")
            .unwrap()
            .with_provenance(Provenance::OovVariant);
        let c = Corpus::new(vec![u]);
        let text = write_conll_file(&c);
        assert!(text.contains("# provenance: oov_variant\n"));
        assert_eq!(parse_conll_file(&text).unwrap(), c);
    }

    #[test]
    fn label_parsing() {
        assert_eq!(
            "B_object_name".parse::<SlotLabel>().unwrap(),
            SlotLabel::begin("object_name")
        );
        assert!("B_".parse::<SlotLabel>().is_err());
        assert!("Q".parse::<SlotLabel>().is_err());
    }

    #[test]
    fn stray_inside_starts_a_span() {
        let labels: Vec<SlotLabel> = ["I_a", "I_a", "B_a", "I_b", "O"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let spans = spans_from_labels(&labels);
        let got: Vec<_> = spans.iter().map(|s| (s.class.as_str(), s.start, s.end)).collect();
        assert_eq!(got, [("a", 0, 2), ("a", 2, 3), ("b", 3, 4)]);
    }

    #[test]
    fn special_tokens() {
        assert!(is_special(UNK));
        assert!(is_special("<Auxiliary_msg>"));
        assert_eq!(delex_class_of("<Address>"), Some("Address"));
        assert!(!is_special("<3"));
        assert!(!is_special("<>"));
        assert!(!is_special("<a b>"));
    }

    #[test]
    fn split_is_deterministic_and_partitions() {
        let utts: Vec<_> = (0..10)
            .map(|i| TaggedUtterance::from_strs(&format!("t{i}"), "O", "X").unwrap())
            .collect();
        let c = Corpus::new(utts);
        let (a, b) = c.split(0.7, 3);
        assert_eq!((a.len(), b.len()), (7, 3));
        assert_eq!(c.split(0.7, 3), (a.clone(), b.clone()));
        let mut all: Vec<_> = a.concat(&b).utterances().iter().map(|u| u.text()).collect();
        all.sort();
        let mut want: Vec<_> = c.utterances().iter().map(|u| u.text()).collect();
        want.sort();
        assert_eq!(all, want);
    }
}
