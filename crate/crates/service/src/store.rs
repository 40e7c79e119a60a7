//! File-system persistence: `datasets/`, `models/` and `jobs/` under one
//! data directory, each record a JSON manifest. All mutations go through
//! one `Store` behind a mutex, so the registry has a single writer.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use slu_core::pipeline::InferenceParams;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    /// SHA-256 of the uploaded bytes.
    pub fingerprint: String,
    pub created_at: u64,
    pub utterances: usize,
    pub stats: serde_json::Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    Retrain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobState {
    Queued,
    Running,
    Succeeded,
    Failed,
}

impl JobState {
    pub fn can_become(self, next: JobState) -> bool {
        matches!(
            (self, next),
            (JobState::Queued, JobState::Running)
                | (JobState::Running, JobState::Succeeded)
                | (JobState::Running, JobState::Failed)
                // a queued job can fail without running when the store is unusable
                | (JobState::Queued, JobState::Failed)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub id: String,
    pub kind: JobKind,
    pub state: JobState,
    pub dataset_id: String,
    /// Config overrides as submitted, merged over the defaults.
    pub config: serde_json::Value,
    pub submitted_at: u64,
    pub started_at: Option<u64>,
    pub finished_at: Option<u64>,
    pub model_id: Option<String>,
    pub error: Option<String>,
}

/// Scores of a freshly trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    /// `held_out` when a split of the dataset was scored, `train` when the
    /// dataset was too small to split.
    pub evaluated_on: String,
    pub utterances: usize,
    pub intent_accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub slot_f1: f64,
    pub ood_f1: Option<f64>,
    pub oov_f1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRecord {
    pub id: String,
    pub created_at: u64,
    pub dataset_id: String,
    pub job_id: String,
    pub eval: EvalSummary,
    pub inference: InferenceParams,
}

#[derive(Debug)]
pub struct Store {
    root: PathBuf,
    datasets: BTreeMap<String, DatasetRecord>,
    jobs: BTreeMap<String, JobRecord>,
    models: BTreeMap<String, ModelRecord>,
    active: Option<String>,
    next_id: u64,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, StoreError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| StoreError::Json {
        path: path.display().to_string(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), StoreError> {
    let text = serde_json::to_string_pretty(value).expect("records serialize");
    // write-then-rename so a crash never leaves a torn manifest
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, text).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn load_all<T: DeserializeOwned>(dir: &Path, file: impl Fn(&Path) -> PathBuf) -> Result<Vec<T>, StoreError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        let path = file(&entry.path());
        if path.extension().is_some_and(|e| e == "json") && path.exists() {
            out.push(read_json(&path)?);
        }
    }
    Ok(out)
}

fn numeric_suffix(id: &str) -> u64 {
    id.rsplit('-').next().and_then(|n| n.parse().ok()).unwrap_or(0)
}

impl Store {
    /// Opens (creating if needed) the data directory and loads every
    /// manifest. Jobs left `running` by a previous process are marked
    /// failed; `queued` ones are returned for resubmission.
    pub fn open(root: &Path) -> Result<(Self, Vec<String>), StoreError> {
        for sub in ["datasets", "models", "jobs"] {
            let dir = root.join(sub);
            fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        }
        let datasets: Vec<DatasetRecord> = load_all(&root.join("datasets"), |p| p.join("manifest.json"))?;
        let models: Vec<ModelRecord> = load_all(&root.join("models"), |p| p.join("manifest.json"))?;
        let jobs: Vec<JobRecord> = load_all(&root.join("jobs"), Path::to_path_buf)?;
        let active_path = root.join("models").join("ACTIVE");
        let active = fs::read_to_string(&active_path).ok().map(|s| s.trim().to_string());

        let next_id = datasets
            .iter()
            .map(|d| numeric_suffix(&d.id))
            .chain(models.iter().map(|m| numeric_suffix(&m.id)))
            .chain(jobs.iter().map(|j| numeric_suffix(&j.id)))
            .max()
            .unwrap_or(0)
            + 1;
        let mut store = Store {
            root: root.to_path_buf(),
            datasets: datasets.into_iter().map(|d| (d.id.clone(), d)).collect(),
            models: models.into_iter().map(|m| (m.id.clone(), m)).collect(),
            jobs: jobs.into_iter().map(|j| (j.id.clone(), j)).collect(),
            active: None,
            next_id,
        };
        store.active = active.filter(|id| store.models.contains_key(id));

        let mut requeue: Vec<&JobRecord> = store.jobs.values().filter(|j| j.state == JobState::Queued).collect();
        requeue.sort_by_key(|j| (j.submitted_at, numeric_suffix(&j.id)));
        let requeue = requeue.into_iter().map(|j| j.id.clone()).collect();
        let interrupted: Vec<String> = store
            .jobs
            .values()
            .filter(|j| j.state == JobState::Running)
            .map(|j| j.id.clone())
            .collect();
        for id in interrupted {
            store.finish_job(&id, Err("interrupted by a service restart".into()))?;
        }
        Ok((store, requeue))
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn fresh_id(&mut self, prefix: &str) -> String {
        let id = format!("{prefix}-{:06}", self.next_id);
        self.next_id += 1;
        id
    }

    pub fn dataset_file(&self, id: &str) -> PathBuf {
        self.root.join("datasets").join(id).join("data.tsv")
    }

    pub fn model_dir(&self, id: &str) -> PathBuf {
        self.root.join("models").join(id)
    }

    pub fn add_dataset(
        &mut self,
        raw: &[u8],
        utterances: usize,
        stats: serde_json::Value,
    ) -> Result<DatasetRecord, StoreError> {
        use sha2::{Digest, Sha256};
        let record = DatasetRecord {
            id: self.fresh_id("ds"),
            fingerprint: hex::encode(Sha256::digest(raw)),
            created_at: now_ms(),
            utterances,
            stats,
        };
        let dir = self.root.join("datasets").join(&record.id);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let data = dir.join("data.tsv");
        fs::write(&data, raw).map_err(io_err(&data))?;
        write_json(&dir.join("manifest.json"), &record)?;
        self.datasets.insert(record.id.clone(), record.clone());
        Ok(record)
    }

    pub fn dataset(&self, id: &str) -> Option<&DatasetRecord> {
        self.datasets.get(id)
    }

    pub fn datasets(&self) -> impl Iterator<Item = &DatasetRecord> {
        self.datasets.values()
    }

    pub fn add_job(&mut self, dataset_id: &str, config: serde_json::Value) -> Result<JobRecord, StoreError> {
        let record = JobRecord {
            id: self.fresh_id("job"),
            kind: JobKind::Retrain,
            state: JobState::Queued,
            dataset_id: dataset_id.to_string(),
            config,
            submitted_at: now_ms(),
            started_at: None,
            finished_at: None,
            model_id: None,
            error: None,
        };
        self.save_job(record.clone())?;
        Ok(record)
    }

    fn save_job(&mut self, job: JobRecord) -> Result<(), StoreError> {
        write_json(&self.root.join("jobs").join(format!("{}.json", job.id)), &job)?;
        self.jobs.insert(job.id.clone(), job);
        Ok(())
    }

    pub fn job(&self, id: &str) -> Option<&JobRecord> {
        self.jobs.get(id)
    }

    pub fn jobs(&self) -> impl Iterator<Item = &JobRecord> {
        self.jobs.values()
    }

    fn transition(&self, id: &str, next: JobState) -> JobRecord {
        let mut job = self.jobs.get(id).cloned().expect("job ids come from the store");
        assert!(
            job.state.can_become(next),
            "illegal job transition {:?} -> {next:?}",
            job.state
        );
        job.state = next;
        job
    }

    pub fn start_job(&mut self, id: &str) -> Result<JobRecord, StoreError> {
        let mut job = self.transition(id, JobState::Running);
        job.started_at = Some(now_ms());
        self.save_job(job.clone())?;
        Ok(job)
    }

    /// Marks a job finished; `Ok` carries the id of the registered model.
    pub fn finish_job(&mut self, id: &str, result: Result<String, String>) -> Result<JobRecord, StoreError> {
        let next = if result.is_ok() {
            JobState::Succeeded
        } else {
            JobState::Failed
        };
        let mut job = self.transition(id, next);
        job.finished_at = Some(now_ms());
        match result {
            Ok(model) => job.model_id = Some(model),
            Err(e) => job.error = Some(e),
        }
        self.save_job(job.clone())?;
        Ok(job)
    }

    /// Reserves a model id and its directory; the model becomes visible only
    /// once [`Store::register_model`] writes its manifest.
    pub fn reserve_model(&mut self) -> Result<(String, PathBuf), StoreError> {
        let id = self.fresh_id("model");
        let dir = self.model_dir(&id);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        Ok((id, dir))
    }

    pub fn register_model(&mut self, record: ModelRecord) -> Result<(), StoreError> {
        write_json(&self.model_dir(&record.id).join("manifest.json"), &record)?;
        self.models.insert(record.id.clone(), record);
        Ok(())
    }

    pub fn model(&self, id: &str) -> Option<&ModelRecord> {
        self.models.get(id)
    }

    pub fn models(&self) -> impl Iterator<Item = &ModelRecord> {
        self.models.values()
    }

    pub fn active(&self) -> Option<&str> {
        self.active.as_deref()
    }

    pub fn set_active(&mut self, id: &str) -> Result<(), StoreError> {
        let path = self.root.join("models").join("ACTIVE");
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, id).map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))?;
        self.active = Some(id.to_string());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transitions_only_move_forward() {
        use JobState::*;
        assert!(Queued.can_become(Running));
        assert!(Running.can_become(Succeeded));
        assert!(!Succeeded.can_become(Running));
        assert!(!Failed.can_become(Queued));
        assert!(!Running.can_become(Queued));
    }

    #[test]
    fn reopen_restores_records_and_fails_interrupted_jobs() {
        let dir = tempfile::tempdir().unwrap();
        let (mut store, _) = Store::open(dir.path()).unwrap();
        let ds = store
            .add_dataset(b"# intent: Fire\nfire\tB_incident\n", 1, serde_json::json!({}))
            .unwrap();
        let a = store.add_job(&ds.id, serde_json::json!({})).unwrap();
        let b = store.add_job(&ds.id, serde_json::json!({})).unwrap();
        store.start_job(&a.id).unwrap();

        let (store, requeue) = Store::open(dir.path()).unwrap();
        assert_eq!(store.dataset(&ds.id), Some(&ds));
        assert_eq!(requeue, std::slice::from_ref(&b.id));
        let a = store.job(&a.id).unwrap();
        assert_eq!(a.state, JobState::Failed);
        assert!(a.error.as_deref().unwrap().contains("restart"));
        // ids keep increasing across restarts
        let (mut store, _) = Store::open(dir.path()).unwrap();
        let c = store.add_job(&ds.id, serde_json::json!({})).unwrap();
        assert!(numeric_suffix(&c.id) > numeric_suffix(&b.id));
    }

    #[test]
    fn identical_uploads_share_a_fingerprint() {
        let dir = tempfile::tempdir().unwrap();
        let (mut store, _) = Store::open(dir.path()).unwrap();
        let a = store.add_dataset(b"abc", 0, serde_json::Value::Null).unwrap();
        let b = store.add_dataset(b"abc", 0, serde_json::Value::Null).unwrap();
        assert_ne!(a.id, b.id);
        assert_eq!(a.fingerprint, b.fingerprint);
        // sha256("abc")
        assert_eq!(
            a.fingerprint,
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
