use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::CorpusError;

/// How spans of a delex class are recognized at inference time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchStrategy {
    /// Gazetteer harvested from gold spans.
    Lexicon,
    /// Structured patterns supplied in the config.
    Pattern,
    /// Free-form descriptive text; harvested like a lexicon and counted as OOD.
    Descriptive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelexClassSpec {
    pub slot_class: String,
    pub delex_class: String,
    pub strategy: MatchStrategy,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub patterns: Vec<String>,
}

impl DelexClassSpec {
    pub fn new(slot_class: &str, delex_class: &str, strategy: MatchStrategy) -> Self {
        DelexClassSpec {
            slot_class: slot_class.to_string(),
            delex_class: delex_class.to_string(),
            strategy,
            patterns: Vec::new(),
        }
    }

    pub fn with_patterns<I, S>(mut self, patterns: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.patterns = patterns.into_iter().map(Into::into).collect();
        self
    }
}

/// Slot-class to delex-class table plus the knobs of training-set expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DelexConfig {
    pub classes: Vec<DelexClassSpec>,
    /// Probability of replacing an eligible token with `<unk>`.
    pub p_r: f64,
    pub min_count: usize,
    /// Slot classes whose tokens may be replaced by `<unk>`.
    pub substitutable: Vec<String>,
}

impl Default for DelexConfig {
    /// Incident-tweet defaults: incident/date/address/time gazetteers and a
    /// descriptive auxiliary class.
    fn default() -> Self {
        DelexConfig {
            classes: vec![
                DelexClassSpec::new("incident", "Incident", MatchStrategy::Lexicon),
                DelexClassSpec::new("date", "Date", MatchStrategy::Lexicon)
                    .with_patterns([r"\d{1,2}/\d{1,2}(/\d{2,4})?"]),
                DelexClassSpec::new("time", "Time", MatchStrategy::Pattern)
                    .with_patterns([r"(?i)\d{1,2}:\d{2}\s?(am|pm)?", r"(?i)\d{1,2}\s?(am|pm)"]),
                DelexClassSpec::new("address", "Address", MatchStrategy::Lexicon),
                DelexClassSpec::new("aux", "Auxiliary_msg", MatchStrategy::Descriptive),
            ],
            p_r: 0.3,
            min_count: super::DEFAULT_MIN_COUNT,
            substitutable: vec!["date".into(), "time".into(), "address".into()],
        }
    }
}

impl DelexConfig {
    pub fn validate(&self) -> Result<(), CorpusError> {
        if !(self.p_r > 0.0 && self.p_r < 1.0) {
            return Err(CorpusError::Config(format!("p_r must lie in (0, 1), got {}", self.p_r)));
        }
        if self.min_count == 0 {
            return Err(CorpusError::Config("min_count must be at least 1".into()));
        }
        let mut delex = BTreeSet::new();
        let mut slots = BTreeSet::new();
        for spec in &self.classes {
            if super::delex_class_of(&super::delex_token(&spec.delex_class)).is_none() {
                return Err(CorpusError::Config(format!(
                    "delex class `{}` must be alphanumeric/underscore and start with a letter",
                    spec.delex_class
                )));
            }
            if spec.slot_class.is_empty() {
                return Err(CorpusError::Config("empty slot class".into()));
            }
            if !delex.insert(spec.delex_class.as_str()) {
                return Err(CorpusError::Config(format!(
                    "delex class `{}` listed twice",
                    spec.delex_class
                )));
            }
            if !slots.insert(spec.slot_class.as_str()) {
                return Err(CorpusError::Config(format!(
                    "slot class `{}` mapped to more than one delex class",
                    spec.slot_class
                )));
            }
            for p in &spec.patterns {
                regex::Regex::new(p)
                    .map_err(|e| CorpusError::Config(format!("pattern `{p}` for {}: {e}", spec.delex_class)))?;
            }
        }
        Ok(())
    }

    pub fn for_slot(&self, slot_class: &str) -> Option<&DelexClassSpec> {
        self.classes.iter().find(|c| c.slot_class == slot_class)
    }

    pub fn for_delex(&self, delex_class: &str) -> Option<&DelexClassSpec> {
        self.classes.iter().find(|c| c.delex_class == delex_class)
    }

    /// Slot classes whose tokens count as OOD patterns.
    pub fn descriptive_slot_classes(&self) -> BTreeSet<String> {
        self.classes
            .iter()
            .filter(|c| c.strategy == MatchStrategy::Descriptive)
            .map(|c| c.slot_class.clone())
            .collect()
    }

    pub fn is_substitutable(&self, slot_class: &str) -> bool {
        self.substitutable.iter().any(|s| s == slot_class)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        DelexConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = DelexConfig {
            p_r: 1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        c.p_r = 0.0;
        assert!(c.validate().is_err());

        let mut c = DelexConfig::default();
        c.classes
            .push(DelexClassSpec::new("aux", "Other", MatchStrategy::Lexicon));
        assert!(c.validate().is_err());

        let mut c = DelexConfig::default();
        c.classes
            .push(DelexClassSpec::new("x", "Address", MatchStrategy::Lexicon));
        assert!(c.validate().is_err());

        let mut c = DelexConfig::default();
        c.classes[0].patterns.push("(".into());
        assert!(c.validate().is_err());

        let mut c = DelexConfig::default();
        c.classes[0].delex_class = "bad name".into();
        assert!(c.validate().is_err());
    }
}
