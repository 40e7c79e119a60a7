//! Model file layout:
//!
//! ```text
//! SLU-MODEL <format_version>\n
//! <payload byte length> <sha256 of payload, hex>\n
//! <payload: JSON object>
//! ```
//!
//! The payload holds `meta` (hyperparameters, corpus fingerprint, training
//! report, delex table), the label/intent inventories, the vocabulary, the
//! feature tables and the weight matrices. Serialization is deterministic, so
//! retraining with the same seed writes byte-identical files.

use std::path::Path;

use sha2::{Digest, Sha256};

use super::{Model, TaggerError};

pub const MAGIC: &str = "SLU-MODEL";
pub const FORMAT_VERSION: u32 = 1;

pub fn save_model(model: &Model) -> Vec<u8> {
    let payload = serde_json::to_vec(model).expect("model serializes to JSON");
    let digest = hex::encode(Sha256::digest(&payload));
    let mut out = format!("{MAGIC} {FORMAT_VERSION}\n{} {digest}\n", payload.len()).into_bytes();
    out.extend_from_slice(&payload);
    out
}

fn split_line(bytes: &[u8]) -> Option<(&str, &[u8])> {
    let end = bytes.iter().position(|&b| b == b'\n')?;
    let line = std::str::from_utf8(&bytes[..end]).ok()?;
    Some((line, &bytes[end + 1..]))
}

pub fn load_model(bytes: &[u8]) -> Result<Model, TaggerError> {
    let corrupt = |m: &str| TaggerError::CorruptPayload(m.to_string());
    let (header, rest) = split_line(bytes).ok_or_else(|| corrupt("missing header line"))?;
    let version = header
        .strip_prefix(MAGIC)
        .and_then(|v| v.strip_prefix(' '))
        .ok_or_else(|| corrupt("not a model file"))?;
    let version: u32 = version
        .trim()
        .parse()
        .map_err(|_| corrupt("unreadable format version"))?;
    if version != FORMAT_VERSION {
        return Err(TaggerError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let (integrity, payload) = split_line(rest).ok_or_else(|| corrupt("missing integrity line"))?;
    let (len, digest) = integrity.split_once(' ').ok_or_else(|| corrupt("bad integrity line"))?;
    let len: usize = len.parse().map_err(|_| corrupt("bad payload length"))?;
    if payload.len() != len {
        return Err(TaggerError::CorruptPayload(format!(
            "payload is {} bytes, header says {len}",
            payload.len()
        )));
    }
    if hex::encode(Sha256::digest(payload)) != digest {
        return Err(corrupt("checksum mismatch"));
    }
    let model: Model = serde_json::from_slice(payload).map_err(|e| TaggerError::CorruptPayload(e.to_string()))?;
    model.check_shapes()?;
    Ok(model)
}

pub fn save_model_file(model: &Model, path: &Path) -> Result<(), TaggerError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
    }
    std::fs::write(path, save_model(model)).map_err(|e| io_err(path, e))
}

pub fn load_model_file(path: &Path) -> Result<Model, TaggerError> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    load_model(&bytes)
}

fn io_err(path: &Path, e: std::io::Error) -> TaggerError {
    TaggerError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}
