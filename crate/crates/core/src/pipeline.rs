//! End-to-end wiring: config file, expand → train → harvest, persistence of
//! the model and lexicons, parsing and evaluation.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{harvest_lexicons, Corpus, CorpusError, DelexConfig, LexiconStore, Provenance};
use crate::expansion::{expand_corpus, DEFAULT_OOV_COPIES};
use crate::inference::{
    decode_single_pass, parse_tokens, parse_tokens_traced, parse_traced, Frame, InferenceConfig, InferenceError, Trace,
    DEFAULT_MAX_EXPAND_ITERS, DEFAULT_THRESHOLD,
};
use crate::metrics::{evaluate, EvalReport, MetricsError};
use crate::tagger::{load_model_file, save_model_file, train, Hyperparams, Model, TaggerError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Tagger(#[from] TaggerError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    /// Where `expand` writes, and `train` reads, the expanded corpus.
    pub expanded: Option<PathBuf>,
    pub lexicons: Option<PathBuf>,
    pub model: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InferenceParams {
    pub threshold: f64,
    pub max_expand_iters: usize,
}

impl Default for InferenceParams {
    fn default() -> Self {
        InferenceParams {
            threshold: DEFAULT_THRESHOLD,
            max_expand_iters: DEFAULT_MAX_EXPAND_ITERS,
        }
    }
}

/// Everything one experiment needs, loadable from TOML:
///
/// ```toml
/// seed = 7
/// oov_copies = 2
///
/// [paths]
/// train = "data/train.tsv"
/// model = "out/model.slu"
///
/// [delex]
/// p_r = 0.3
///
/// [inference]
/// threshold = 0.9
///
/// [hyper]
/// epochs = 12
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Drives both expansion sampling and training order.
    pub seed: u64,
    pub oov_copies: usize,
    pub paths: Paths,
    pub delex: DelexConfig,
    pub inference: InferenceParams,
    pub hyper: Hyperparams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            oov_copies: DEFAULT_OOV_COPIES,
            paths: Paths::default(),
            delex: DelexConfig::default(),
            inference: InferenceParams::default(),
            hyper: Hyperparams::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.delex.validate()?;
        self.hyperparams().validate()?;
        if !(self.inference.threshold > 0.0 && self.inference.threshold < 1.0) {
            return Err(PipelineError::Config("inference.threshold must lie in (0, 1)".into()));
        }
        if self.inference.max_expand_iters == 0 {
            return Err(PipelineError::Config(
                "inference.max_expand_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Training hyperparameters with the pipeline seed and the delex
    /// vocabulary threshold applied.
    pub fn hyperparams(&self) -> Hyperparams {
        Hyperparams {
            seed: self.seed,
            min_count: self.delex.min_count,
            ..self.hyper.clone()
        }
    }

    pub fn expand(&self, train: &Corpus) -> Corpus {
        expand_corpus(train, &self.delex, self.seed, self.oov_copies)
    }
}

/// How a [`Pipeline`] decodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decoding {
    /// Replace, Expand, Merge, final predict.
    Multistep,
    /// One predict pass over the raw tokens.
    SinglePass,
}

/// A trained model plus the inference-time tables it is used with.
#[derive(Debug, Clone)]
pub struct Pipeline {
    model: Arc<Model>,
    config: InferenceConfig,
    decoding: Decoding,
}

impl Pipeline {
    pub fn new(
        model: Model,
        lexicons: LexiconStore,
        delex: DelexConfig,
        params: &InferenceParams,
    ) -> Result<Self, PipelineError> {
        let config = InferenceConfig::new(model.vocabulary().clone(), lexicons, delex)?
            .with_threshold(params.threshold)?
            .with_max_expand_iters(params.max_expand_iters)?;
        Ok(Pipeline {
            model: Arc::new(model),
            config,
            decoding: Decoding::Multistep,
        })
    }

    /// Expands `train`, trains the tagger on the result and harvests lexicons
    /// from the original utterances.
    pub fn train(train: &Corpus, cfg: &PipelineConfig) -> Result<Self, PipelineError> {
        cfg.validate()?;
        let expanded = cfg.expand(train);
        Self::train_expanded(&expanded, cfg)
    }

    /// Trains on an already expanded corpus.
    pub fn train_expanded(expanded: &Corpus, cfg: &PipelineConfig) -> Result<Self, PipelineError> {
        cfg.validate()?;
        let model = train_model(expanded, cfg)?;
        let originals: Corpus = expanded
            .utterances()
            .iter()
            .filter(|u| u.provenance() == Provenance::Original)
            .cloned()
            .collect();
        let lexicons = harvest_lexicons(&originals, &cfg.delex)?;
        Self::new(model, lexicons, cfg.delex.clone(), &cfg.inference)
    }

    /// The ablation: the same tagger trained on the unexpanded originals,
    /// decoded in a single pass.
    pub fn train_baseline(train: &Corpus, cfg: &PipelineConfig) -> Result<Self, PipelineError> {
        cfg.validate()?;
        let originals: Corpus = train
            .utterances()
            .iter()
            .filter(|u| u.provenance() == Provenance::Original)
            .cloned()
            .collect();
        let model = train_model(&originals, cfg)?;
        let mut p = Self::new(model, LexiconStore::new(), cfg.delex.clone(), &cfg.inference)?;
        p.decoding = Decoding::SinglePass;
        Ok(p)
    }

    pub fn with_decoding(mut self, decoding: Decoding) -> Self {
        self.decoding = decoding;
        self
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn shared_model(&self) -> Arc<Model> {
        Arc::clone(&self.model)
    }

    pub fn config(&self) -> &InferenceConfig {
        &self.config
    }

    pub fn decoding(&self) -> Decoding {
        self.decoding
    }

    pub fn parse(&self, text: &str) -> Result<Frame, PipelineError> {
        self.parse_tokens(&crate::corpus::tokenize_surfaces(text))
    }

    pub fn parse_tokens(&self, tokens: &[String]) -> Result<Frame, PipelineError> {
        Ok(match self.decoding {
            Decoding::Multistep => parse_tokens(&*self.model, &self.config, tokens)?,
            Decoding::SinglePass => decode_single_pass(&*self.model, &self.config, tokens)?,
        })
    }

    /// Multistep parse with its step trace, whatever the decoding mode.
    pub fn parse_traced(&self, text: &str) -> Result<(Frame, Trace), PipelineError> {
        Ok(parse_traced(&*self.model, &self.config, text)?)
    }

    pub fn parse_tokens_traced(&self, tokens: &[String]) -> Result<(Frame, Trace), PipelineError> {
        Ok(parse_tokens_traced(&*self.model, &self.config, tokens)?)
    }

    /// Parses every gold utterance (on its gold tokenization) in parallel;
    /// frames come back in corpus order.
    pub fn predict_corpus(&self, gold: &Corpus) -> Result<Vec<Frame>, PipelineError> {
        gold.utterances()
            .par_iter()
            .map(|u| self.parse_tokens(u.tokens()))
            .collect()
    }

    pub fn evaluate(&self, gold: &Corpus) -> Result<EvalReport, PipelineError> {
        if gold.is_empty() {
            return Err(MetricsError::Empty.into());
        }
        let frames = self.predict_corpus(gold)?;
        Ok(evaluate(
            gold,
            &frames,
            self.model.vocabulary(),
            &self.config.delex.descriptive_slot_classes(),
        )?)
    }

    pub fn save(&self, model_path: &Path, lexicon_dir: &Path) -> Result<(), PipelineError> {
        save_model_file(&self.model, model_path)?;
        self.config.lexicons.save_dir(lexicon_dir)?;
        Ok(())
    }

    /// Loads a saved model and lexicon directory. The delex table stored in
    /// the model wins over `fallback_delex`.
    pub fn load(
        model_path: &Path,
        lexicon_dir: &Path,
        fallback_delex: &DelexConfig,
        params: &InferenceParams,
    ) -> Result<Self, PipelineError> {
        let model = load_model_file(model_path)?;
        let lexicons = LexiconStore::load_dir(lexicon_dir)?;
        let delex = model.delex_config().cloned().unwrap_or_else(|| fallback_delex.clone());
        Self::new(model, lexicons, delex, params)
    }
}

fn train_model(corpus: &Corpus, cfg: &PipelineConfig) -> Result<Model, PipelineError> {
    Ok(train(corpus, &cfg.hyperparams())?.with_delex_config(cfg.delex.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_toml_roundtrip_and_defaults() {
        let cfg = PipelineConfig::from_toml("seed = 7\n[delex]\np_r = 0.25\n[hyper]\nepochs = 3\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.delex.p_r, 0.25);
        assert_eq!(cfg.delex.classes, DelexConfig::default().classes);
        assert_eq!(cfg.hyperparams().seed, 7);
        assert_eq!(PipelineConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_values() {
        assert!(PipelineConfig::from_toml("sede = 1\n").is_err());
        assert!(PipelineConfig::from_toml("[delex]\np_r = 1.5\n").is_err());
        assert!(PipelineConfig::from_toml("[inference]\nthreshold = 0\n").is_err());
    }
}
