//! Content digests of serializable configuration.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Compact JSON with object keys sorted at every level.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json::Value stores objects in a BTreeMap, so a round trip sorts keys.
    let v = serde_json::to_value(value).map_err(|e| Error::Config(format!("serialize: {e}")))?;
    serde_json::to_string(&v).map_err(|e| Error::Config(format!("serialize: {e}")))
}

/// Hex SHA-256 of the canonical JSON form.
pub fn config_digest<T: Serialize>(value: &T) -> Result<String> {
    let json = canonical_json(value)?;
    Ok(hex::encode(Sha256::digest(json.as_bytes())))
}
