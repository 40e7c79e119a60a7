use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use regex::Regex;
use serde::Serialize;

use super::{is_special, Corpus, CorpusError, DelexConfig, IoError, MatchStrategy};

/// Longest token window a structured pattern is tried against.
pub const MAX_PATTERN_TOKENS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchKind {
    Lexicon,
    Pattern,
}

/// A lexicon or pattern hit covering `tokens[start..end]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LexiconMatch {
    pub delex_class: String,
    pub start: usize,
    pub end: usize,
    pub kind: MatchKind,
}

#[derive(Debug, Clone)]
struct CompiledPattern {
    source: String,
    regex: Regex,
}

/// Entries and patterns of one delex class.
#[derive(Debug, Clone, Default)]
pub struct LexiconClass {
    entries: BTreeSet<Vec<String>>,
    patterns: Vec<CompiledPattern>,
}

impl LexiconClass {
    pub fn entries(&self) -> &BTreeSet<Vec<String>> {
        &self.entries
    }

    pub fn patterns(&self) -> impl Iterator<Item = &str> {
        self.patterns.iter().map(|p| p.source.as_str())
    }
}

#[derive(Debug, Clone, Default)]
struct TrieNode {
    children: HashMap<String, usize>,
    classes: BTreeSet<String>,
}

/// Per-class gazetteers plus structured patterns. Entry lookup is
/// case-insensitive through a token trie keyed on lowercased surfaces.
#[derive(Debug, Clone)]
pub struct LexiconStore {
    classes: BTreeMap<String, LexiconClass>,
    trie: Vec<TrieNode>,
}

impl Default for LexiconStore {
    fn default() -> Self {
        LexiconStore {
            classes: BTreeMap::new(),
            trie: vec![TrieNode::default()],
        }
    }
}

impl PartialEq for LexiconStore {
    fn eq(&self, other: &Self) -> bool {
        self.classes.len() == other.classes.len()
            && self
                .classes
                .iter()
                .zip(&other.classes)
                .all(|((a, ca), (b, cb))| a == b && ca.entries == cb.entries && ca.patterns().eq(cb.patterns()))
    }
}

impl LexiconStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a class with no entries, so that it exists even when empty.
    pub fn ensure_class(&mut self, delex_class: &str) {
        self.classes.entry(delex_class.to_string()).or_default();
    }

    pub fn insert_entry<S: AsRef<str>>(&mut self, delex_class: &str, tokens: &[S]) -> Result<(), CorpusError> {
        if tokens.is_empty() {
            return Err(CorpusError::Lexicon(format!("empty entry for {delex_class}")));
        }
        let entry: Vec<String> = tokens.iter().map(|t| t.as_ref().to_string()).collect();
        if let Some(bad) = entry
            .iter()
            .find(|t| t.is_empty() || t.chars().any(char::is_whitespace))
        {
            return Err(CorpusError::Lexicon(format!("invalid entry token `{bad}`")));
        }
        let mut node = 0;
        for t in &entry {
            let key = t.to_lowercase();
            node = match self.trie[node].children.get(&key) {
                Some(&next) => next,
                None => {
                    self.trie.push(TrieNode::default());
                    let next = self.trie.len() - 1;
                    self.trie[node].children.insert(key, next);
                    next
                }
            };
        }
        self.trie[node].classes.insert(delex_class.to_string());
        self.classes
            .entry(delex_class.to_string())
            .or_default()
            .entries
            .insert(entry);
        Ok(())
    }

    pub fn insert_pattern(&mut self, delex_class: &str, pattern: &str) -> Result<(), CorpusError> {
        let regex = Regex::new(&format!("^(?:{pattern})$"))
            .map_err(|e| CorpusError::Lexicon(format!("pattern `{pattern}`: {e}")))?;
        let class = self.classes.entry(delex_class.to_string()).or_default();
        if !class.patterns.iter().any(|p| p.source == pattern) {
            class.patterns.push(CompiledPattern {
                source: pattern.to_string(),
                regex,
            });
        }
        Ok(())
    }

    pub fn class(&self, delex_class: &str) -> Option<&LexiconClass> {
        self.classes.get(delex_class)
    }

    pub fn class_names(&self) -> impl Iterator<Item = &str> {
        self.classes.keys().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.classes
            .values()
            .all(|c| c.entries.is_empty() && c.patterns.is_empty())
    }

    /// All lexicon entries that start at `start`, as `(class, token_count)`.
    pub fn entry_matches_at<S: AsRef<str>>(&self, tokens: &[S], start: usize) -> Vec<(&str, usize)> {
        let mut hits = Vec::new();
        let mut node = 0;
        for (depth, t) in tokens[start..].iter().enumerate() {
            match self.trie[node].children.get(&t.as_ref().to_lowercase()) {
                Some(&next) => node = next,
                None => break,
            }
            for class in &self.trie[node].classes {
                hits.push((class.as_str(), depth + 1));
            }
        }
        hits
    }

    /// All pattern hits starting at `start`, as `(class, token_count)`. A
    /// pattern matches a window when it matches the single-space join of the
    /// window's tokens in full.
    pub fn pattern_matches_at<S: AsRef<str>>(&self, tokens: &[S], start: usize) -> Vec<(&str, usize)> {
        let mut hits = Vec::new();
        let max_len = (tokens.len() - start).min(MAX_PATTERN_TOKENS);
        let mut joined = String::new();
        for len in 1..=max_len {
            if len > 1 {
                joined.push(' ');
            }
            joined.push_str(tokens[start + len - 1].as_ref());
            for (name, class) in &self.classes {
                if class.patterns.iter().any(|p| p.regex.is_match(&joined)) {
                    hits.push((name.as_str(), len));
                }
            }
        }
        hits
    }

    /// Reads `<Class>.txt` entry files and `<Class>.patterns` files.
    pub fn load_dir(dir: &Path) -> Result<Self, CorpusError> {
        let mut store = LexiconStore::new();
        let mut paths: Vec<_> = fs::read_dir(dir)
            .map_err(|e| IoError::new(dir.display(), e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .collect();
        paths.sort();
        for path in paths {
            let (Some(stem), Some(ext)) = (
                path.file_stem().and_then(|s| s.to_str()),
                path.extension().and_then(|s| s.to_str()),
            ) else {
                continue;
            };
            if ext != "txt" && ext != "patterns" {
                continue;
            }
            let text = fs::read_to_string(&path).map_err(|e| IoError::new(path.display(), e))?;
            store.ensure_class(stem);
            for line in text
                .lines()
                .map(|l| l.trim_end_matches('\r'))
                .filter(|l| !l.trim().is_empty())
            {
                if ext == "txt" {
                    let tokens: Vec<&str> = line.split(' ').collect();
                    store.insert_entry(stem, &tokens)?;
                } else {
                    store.insert_pattern(stem, line)?;
                }
            }
        }
        Ok(store)
    }

    pub fn save_dir(&self, dir: &Path) -> Result<(), CorpusError> {
        fs::create_dir_all(dir).map_err(|e| IoError::new(dir.display(), e))?;
        for (name, class) in &self.classes {
            let mut text = String::new();
            for entry in &class.entries {
                text.push_str(&entry.join(" "));
                text.push('\n');
            }
            let path = dir.join(format!("{name}.txt"));
            fs::write(&path, text).map_err(|e| IoError::new(path.display(), e))?;
            if !class.patterns.is_empty() {
                let mut text = String::new();
                for p in class.patterns() {
                    text.push_str(p);
                    text.push('\n');
                }
                let path = dir.join(format!("{name}.patterns"));
                fs::write(&path, text).map_err(|e| IoError::new(path.display(), e))?;
            }
        }
        Ok(())
    }
}

/// Builds the inference-time lexicons from gold spans.
///
/// Lexicon and descriptive classes receive every gold span surface of their
/// slot class; pattern classes receive only their configured patterns.
/// Configured patterns are attached to every class that lists them. Only
/// original utterances are read, and spans holding placeholders are skipped.
pub fn harvest_lexicons(corpus: &Corpus, config: &DelexConfig) -> Result<LexiconStore, CorpusError> {
    let mut store = LexiconStore::new();
    for spec in &config.classes {
        store.ensure_class(&spec.delex_class);
        for p in &spec.patterns {
            store.insert_pattern(&spec.delex_class, p)?;
        }
    }
    for u in corpus.originals() {
        for span in u.spans() {
            let Some(spec) = config.for_slot(&span.class) else {
                continue;
            };
            if spec.strategy == MatchStrategy::Pattern {
                continue;
            }
            let tokens = &u.tokens()[span.start..span.end];
            if tokens.iter().any(|t| is_special(t)) {
                continue;
            }
            store.insert_entry(&spec.delex_class, tokens)?;
        }
    }
    Ok(store)
}
