//! JSON view of the binary update-information format.

use serde::{Deserialize, Serialize};
use svc_core::lattice::NodeVector;
use svc_core::merkle::Hash32;
use svc_core::verkle::VerkleNode;
use svc_core::{BackendId, FormatError, G1Projective, NodePath, RawUpdateInfo, UpdateInfo};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonUpdateInfo {
    pub backend: String,
    pub height: u8,
    pub entries: Vec<JsonEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonEntry {
    /// Display form, e.g. `⊥01`.
    pub path: String,
    /// Value bytes in hex.
    pub value: String,
}

/// Decodes the values with the backend's own codec, so points, scalars and
/// vectors are checked, not just framed.
fn check_values(bytes: &[u8], backend: BackendId) -> Result<(), FormatError> {
    match backend {
        BackendId::Merkle => UpdateInfo::<Hash32>::from_bytes(bytes).map(drop),
        BackendId::Kzg => UpdateInfo::<std::convert::Infallible>::from_bytes(bytes).map(drop),
        BackendId::Amt => UpdateInfo::<G1Projective>::from_bytes(bytes).map(drop),
        BackendId::Lattice => UpdateInfo::<NodeVector>::from_bytes(bytes).map(drop),
        BackendId::Verkle => UpdateInfo::<VerkleNode>::from_bytes(bytes).map(drop),
    }
}

pub fn encode(json: &str) -> Result<Vec<u8>, String> {
    let doc: JsonUpdateInfo = serde_json::from_str(json).map_err(|e| format!("invalid JSON: {e}"))?;
    let backend = BackendId::from_name(&doc.backend).ok_or_else(|| format!("unknown backend {}", doc.backend))?;
    let mut entries = Vec::with_capacity(doc.entries.len());
    for e in &doc.entries {
        let path: NodePath = e.path.parse().map_err(|err: FormatError| err.to_string())?;
        let value = hex::decode(&e.value).map_err(|err| format!("value of {}: {err}", e.path))?;
        entries.push((path, value));
    }
    entries.sort_by_key(|e| e.0);
    let raw = RawUpdateInfo { backend: backend as u8, height: doc.height, entries };
    let bytes = raw.to_bytes();
    // Re-reading catches duplicates and paths deeper than the tree.
    RawUpdateInfo::from_bytes(&bytes).map_err(|e| e.to_string())?;
    check_values(&bytes, backend).map_err(|e| e.to_string())?;
    Ok(bytes)
}

pub fn decode(bytes: &[u8]) -> Result<JsonUpdateInfo, String> {
    let raw = RawUpdateInfo::from_bytes(bytes).map_err(|e| e.to_string())?;
    let backend = BackendId::from_u8(raw.backend).ok_or_else(|| format!("unknown backend id {}", raw.backend))?;
    check_values(bytes, backend).map_err(|e| e.to_string())?;
    Ok(JsonUpdateInfo {
        backend: backend.name().to_string(),
        height: raw.height,
        entries: raw.entries.iter().map(|(p, v)| JsonEntry { path: p.to_string(), value: hex::encode(v) }).collect(),
    })
}
