//! The single background training worker. Jobs arrive over a channel in
//! submission order and run one at a time, so the queue is FIFO.

use std::path::Path;
use std::sync::Arc;

use slu_core::corpus::{read_corpus, Corpus};
use slu_core::pipeline::{Pipeline, PipelineConfig, PipelineError};
use tokio::sync::mpsc;

use crate::store::{now_ms, EvalSummary, ModelRecord};
use crate::AppState;

/// Datasets smaller than this are scored on their own training data.
const MIN_HELD_OUT_SPLIT: usize = 10;
const TRAIN_FRACTION: f64 = 0.8;

/// Merges JSON `overrides` into the default config. Unknown keys are
/// rejected, exactly as in a TOML config file.
pub fn config_with_overrides(overrides: &serde_json::Value) -> Result<PipelineConfig, String> {
    fn merge(base: &mut serde_json::Value, patch: &serde_json::Value) {
        match (base, patch) {
            (serde_json::Value::Object(b), serde_json::Value::Object(p)) => {
                for (k, v) in p {
                    merge(b.entry(k.clone()).or_insert(serde_json::Value::Null), v);
                }
            }
            // null means "keep the default"
            (_, serde_json::Value::Null) => {}
            (b, p) => *b = p.clone(),
        }
    }
    if !(overrides.is_null() || overrides.is_object()) {
        return Err("config overrides must be a JSON object".into());
    }
    let mut value = serde_json::to_value(PipelineConfig::default()).expect("config serializes");
    merge(&mut value, overrides);
    let cfg: PipelineConfig = serde_json::from_value(value).map_err(|e| e.to_string())?;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

/// Expansion, training and evaluation of one dataset.
pub fn retrain(corpus: &Corpus, cfg: &PipelineConfig) -> Result<(Pipeline, EvalSummary), PipelineError> {
    let (train, test, evaluated_on) = if corpus.len() >= MIN_HELD_OUT_SPLIT {
        let (a, b) = corpus.split(TRAIN_FRACTION, cfg.seed);
        (a, b, "held_out")
    } else {
        (corpus.clone(), corpus.clone(), "train")
    };
    let pipeline = Pipeline::train(&train, cfg)?;
    let report = pipeline.evaluate(&test)?;
    let summary = EvalSummary {
        evaluated_on: evaluated_on.into(),
        utterances: report.utterances,
        intent_accuracy: report.intent_accuracy,
        precision: report.slots.precision,
        recall: report.slots.recall,
        slot_f1: report.slots.f1,
        ood_f1: report.ood.slots.map(|s| s.f1),
        oov_f1: report.oov.slots.map(|s| s.f1),
    };
    Ok((pipeline, summary))
}

fn train_and_save(dataset: &Path, cfg: &PipelineConfig, model_dir: &Path) -> Result<EvalSummary, String> {
    let corpus = read_corpus(dataset).map_err(|e| e.to_string())?;
    let (pipeline, summary) = retrain(&corpus, cfg).map_err(|e| e.to_string())?;
    pipeline
        .save(&model_dir.join("model.slu"), &model_dir.join("lexicons"))
        .map_err(|e| e.to_string())?;
    Ok(summary)
}

async fn run_job(state: &AppState, job_id: &str) -> Result<(), crate::store::StoreError> {
    let (job, dataset, model_id, model_dir) = {
        let mut store = state.store.lock().expect("store lock");
        let job = store.start_job(job_id)?;
        let dataset = store.dataset_file(&job.dataset_id);
        let (model_id, model_dir) = store.reserve_model()?;
        (job, dataset, model_id, model_dir)
    };
    let outcome = match config_with_overrides(&job.config) {
        Err(e) => Err(e),
        Ok(cfg) => {
            let dir = model_dir.clone();
            let inference = cfg.inference.clone();
            tokio::task::spawn_blocking(move || train_and_save(&dataset, &cfg, &dir))
                .await
                .unwrap_or_else(|e| Err(format!("training task panicked: {e}")))
                .map(|eval| (eval, inference))
        }
    };
    let mut store = state.store.lock().expect("store lock");
    match outcome {
        Ok((eval, inference)) => {
            store.register_model(ModelRecord {
                id: model_id.clone(),
                created_at: now_ms(),
                dataset_id: job.dataset_id.clone(),
                job_id: job.id.clone(),
                eval,
                inference,
            })?;
            store.finish_job(job_id, Ok(model_id))?;
        }
        Err(e) => {
            // best effort: the reserved directory holds no manifest, so it is invisible anyway
            let _ = std::fs::remove_dir_all(&model_dir);
            store.finish_job(job_id, Err(e))?;
        }
    }
    Ok(())
}

pub fn spawn(state: Arc<AppState>, mut rx: mpsc::UnboundedReceiver<String>) -> tokio::task::JoinHandle<()> {
    tokio::spawn(async move {
        while let Some(job_id) = rx.recv().await {
            if let Err(e) = run_job(&state, &job_id).await {
                eprintln!("job {job_id}: store error: {e}");
                let mut store = state.store.lock().expect("store lock");
                let _ = store.finish_job(&job_id, Err(e.to_string()));
            }
        }
    })
}
