//! Index file format.
//!
//! Two newline-terminated JSON documents:
//!
//! 1. the header: `{format, format_version, checksum, lsh, embedder, provenance, columns}`
//! 2. the payload: `{entries: [{column, vector}], tables: [[[key, [slot, ...]], ...], ...]}`
//!
//! `checksum` is `"sha256:" + hex(SHA-256(H ‖ "\n" ‖ P))` where `H` is the
//! header serialized with `checksum` set to the empty string and `P` is the
//! payload line including its trailing newline. Buckets are written in
//! ascending key order, so equal indexes produce equal bytes.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::index::Slot;
use super::{LshConfig, LshIndex};
use crate::embed::{EmbedderConfig, EmbeddingVector};
use crate::error::{Error, Result};
use crate::ingest::{ColumnRef, CorpusSource, SampleSpec};

pub const FORMAT_VERSION: u32 = 1;
const FORMAT_NAME: &str = "warpgate-index";

/// How the indexed vectors were produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexProvenance {
    pub corpus: Option<CorpusSource>,
    pub sample: SampleSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexHeader {
    pub format: String,
    pub format_version: u32,
    pub checksum: String,
    pub lsh: LshConfig,
    pub embedder: EmbedderConfig,
    pub provenance: Option<IndexProvenance>,
    pub columns: usize,
}

#[derive(Serialize)]
struct EntryRef<'a> {
    column: &'a ColumnRef,
    vector: &'a EmbeddingVector,
}

#[derive(Serialize)]
struct PayloadRef<'a> {
    entries: Vec<EntryRef<'a>>,
    tables: Vec<Vec<(u64, &'a [u32])>>,
}

#[derive(Deserialize)]
struct Entry {
    column: ColumnRef,
    vector: EmbeddingVector,
}

#[derive(Deserialize)]
struct Payload {
    entries: Vec<Entry>,
    tables: Vec<Vec<(u64, Vec<u32>)>>,
}

fn checksum(header: &IndexHeader, payload: &[u8]) -> Result<String> {
    let mut unsigned = header.clone();
    unsigned.checksum.clear();
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(&unsigned)?);
    hasher.update(b"\n");
    hasher.update(payload);
    let digest = hasher.finalize();
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    Ok(format!("sha256:{hex}"))
}

/// Serialize `index` to bytes in the index file format.
pub fn encode_index(index: &LshIndex) -> Result<Vec<u8>> {
    let tables = index
        .tables
        .iter()
        .map(|t| {
            let mut buckets: Vec<(u64, &[u32])> = t.iter().map(|(k, v)| (*k, v.as_slice())).collect();
            buckets.sort_unstable_by_key(|(k, _)| *k);
            buckets
        })
        .collect();
    let payload = PayloadRef {
        entries: index
            .slots
            .iter()
            .map(|s| EntryRef {
                column: &s.column,
                vector: &s.vector,
            })
            .collect(),
        tables,
    };
    let mut payload_bytes = serde_json::to_vec(&payload)?;
    payload_bytes.push(b'\n');

    let mut header = IndexHeader {
        format: FORMAT_NAME.to_string(),
        format_version: FORMAT_VERSION,
        checksum: String::new(),
        lsh: index.config.clone(),
        embedder: index.embedder.clone(),
        provenance: index.provenance.clone(),
        columns: index.slots.len(),
    };
    header.checksum = checksum(&header, &payload_bytes)?;

    let mut out = serde_json::to_vec(&header)?;
    out.push(b'\n');
    out.extend_from_slice(&payload_bytes);
    Ok(out)
}

/// Write atomically: a temp file next to `path` is renamed over it.
pub fn save_index(index: &LshIndex, path: &Path) -> Result<()> {
    let bytes = encode_index(index)?;
    let tmp = path.with_extension("tmp-write");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_index(path: &Path) -> Result<LshIndex> {
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    decode_index(&bytes)
}

/// Load and require the file's embedder to equal `expected`.
pub fn load_index_expecting(path: &Path, expected: &EmbedderConfig) -> Result<LshIndex> {
    let index = load_index(path)?;
    if &index.embedder != expected {
        return Err(Error::ConfigMismatch(format!(
            "index was built with embedder {:?} (dimension {}), engine expects {:?} (dimension {})",
            index.embedder.model, index.embedder.dimension, expected.model, expected.dimension
        )));
    }
    Ok(index)
}

pub fn decode_index(bytes: &[u8]) -> Result<LshIndex> {
    let split = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::CorruptFile("missing header line".into()))?;
    let (head, payload) = (&bytes[..split], &bytes[split + 1..]);

    let raw: serde_json::Value =
        serde_json::from_slice(head).map_err(|e| Error::CorruptFile(format!("header: {e}")))?;
    if raw.get("format").and_then(|f| f.as_str()) != Some(FORMAT_NAME) {
        return Err(Error::CorruptFile("not an index file".into()));
    }
    let version = raw
        .get("format_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::CorruptFile("missing format_version".into()))?;
    if version != FORMAT_VERSION as u64 {
        return Err(Error::VersionMismatch {
            found: version as u32,
            expected: FORMAT_VERSION,
        });
    }
    let header: IndexHeader =
        serde_json::from_value(raw).map_err(|e| Error::CorruptFile(format!("header: {e}")))?;
    if checksum(&header, payload)? != header.checksum {
        return Err(Error::CorruptFile("checksum mismatch".into()));
    }
    let payload: Payload =
        serde_json::from_slice(payload).map_err(|e| Error::CorruptFile(format!("payload: {e}")))?;

    let mut index = LshIndex::new(header.lsh.clone(), header.embedder.clone())
        .map_err(|e| Error::ConfigMismatch(e.to_string()))?;
    index.provenance = header.provenance;
    rebuild(&mut index, payload)?;
    Ok(index)
}

fn rebuild(index: &mut LshIndex, payload: Payload) -> Result<()> {
    let n = payload.entries.len();
    if payload.tables.len() != index.config.num_tables {
        return Err(Error::CorruptFile("table count differs from header".into()));
    }
    let dim = index.config.dimension;
    let mut keys: Vec<Vec<Option<u64>>> = vec![vec![None; index.config.num_tables]; n];
    let mut tables = Vec::with_capacity(payload.tables.len());
    for (t, buckets) in payload.tables.into_iter().enumerate() {
        let mut table = HashMap::with_capacity(buckets.len());
        for (key, ids) in buckets {
            for &id in &ids {
                let slot = keys
                    .get_mut(id as usize)
                    .ok_or_else(|| Error::CorruptFile(format!("slot {id} out of range")))?;
                if slot[t].replace(key).is_some() {
                    return Err(Error::CorruptFile(format!("slot {id} appears twice in table {t}")));
                }
            }
            table.insert(key, ids);
        }
        tables.push(table);
    }
    let mut slots = Vec::with_capacity(n);
    let mut positions = HashMap::with_capacity(n);
    for (id, (entry, slot_keys)) in payload.entries.into_iter().zip(keys).enumerate() {
        if entry.vector.dimension() != dim {
            return Err(Error::ConfigMismatch(format!(
                "stored vector has dimension {}, header says {dim}",
                entry.vector.dimension()
            )));
        }
        let slot_keys: Option<Vec<u64>> = slot_keys.into_iter().collect();
        let slot_keys =
            slot_keys.ok_or_else(|| Error::CorruptFile(format!("slot {id} missing from a table")))?;
        positions.insert(entry.column.clone(), id as u32);
        slots.push(Slot {
            column: entry.column,
            vector: entry.vector,
            keys: slot_keys,
        });
    }
    index.tables = tables;
    index.slots = slots;
    index.positions = positions;
    Ok(())
}
