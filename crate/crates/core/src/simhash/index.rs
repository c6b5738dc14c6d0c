use std::collections::{BTreeSet, HashMap};

use super::{signature, HyperplaneSet, IndexProvenance, LshConfig, SimHashSignature};
use crate::embed::{check_dims, EmbedderConfig, EmbeddingVector};
use crate::error::{Error, Result};
use crate::ingest::ColumnRef;

#[derive(Debug, Clone)]
pub(super) struct Slot {
    pub column: ColumnRef,
    pub vector: EmbeddingVector,
    pub keys: Vec<u64>,
}

/// Banded SimHash index: `L` hash tables keyed by `b`-bit signatures, plus
/// the stored vectors for exact re-ranking.
#[derive(Debug, Clone)]
pub struct LshIndex {
    pub(super) config: LshConfig,
    pub(super) embedder: EmbedderConfig,
    pub(super) provenance: Option<IndexProvenance>,
    pub(super) planes: HyperplaneSet,
    pub(super) slots: Vec<Slot>,
    pub(super) positions: HashMap<ColumnRef, u32>,
    /// Per table: key → slot ids in insertion order.
    pub(super) tables: Vec<HashMap<u64, Vec<u32>>>,
}

impl LshIndex {
    pub fn new(config: LshConfig, embedder: EmbedderConfig) -> Result<Self> {
        embedder.validate()?;
        if config.dimension != embedder.dimension {
            return Err(Error::ConfigMismatch(format!(
                "LSH dimension {} differs from embedder dimension {}",
                config.dimension, embedder.dimension
            )));
        }
        let planes = HyperplaneSet::generate(&config)?;
        Ok(Self {
            tables: vec![HashMap::new(); config.num_tables],
            config,
            embedder,
            provenance: None,
            planes,
            slots: Vec::new(),
            positions: HashMap::new(),
        })
    }

    pub fn config(&self) -> &LshConfig {
        &self.config
    }

    pub fn embedder_config(&self) -> &EmbedderConfig {
        &self.embedder
    }

    pub fn planes(&self) -> &HyperplaneSet {
        &self.planes
    }

    pub fn provenance(&self) -> Option<&IndexProvenance> {
        self.provenance.as_ref()
    }

    pub fn set_provenance(&mut self, provenance: IndexProvenance) {
        self.provenance = Some(provenance);
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn signature(&self, v: &EmbeddingVector) -> Result<SimHashSignature> {
        signature(v, &self.planes)
    }

    /// Index `column` under `vector`. Re-inserting a column replaces its
    /// previous entry.
    pub fn insert(&mut self, column: ColumnRef, vector: EmbeddingVector) -> Result<()> {
        let keys = self.signature(&vector)?.keys().to_vec();
        let id = match self.positions.get(&column) {
            Some(&id) => {
                log::info!("re-indexing {column}");
                let old = std::mem::take(&mut self.slots[id as usize].keys);
                for (table, key) in self.tables.iter_mut().zip(old) {
                    if let Some(bucket) = table.get_mut(&key) {
                        bucket.retain(|&s| s != id);
                        if bucket.is_empty() {
                            table.remove(&key);
                        }
                    }
                }
                self.slots[id as usize] = Slot {
                    column,
                    vector,
                    keys: keys.clone(),
                };
                id
            }
            None => {
                let id = u32::try_from(self.slots.len())
                    .map_err(|_| Error::InvalidConfig("index is full".into()))?;
                self.positions.insert(column.clone(), id);
                self.slots.push(Slot {
                    column,
                    vector,
                    keys: keys.clone(),
                });
                id
            }
        };
        for (table, key) in self.tables.iter_mut().zip(keys) {
            table.entry(key).or_default().push(id);
        }
        Ok(())
    }

    pub fn contains(&self, column: &ColumnRef) -> bool {
        self.positions.contains_key(column)
    }

    pub fn vector(&self, column: &ColumnRef) -> Option<&EmbeddingVector> {
        self.positions
            .get(column)
            .map(|&id| &self.slots[id as usize].vector)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ColumnRef, &EmbeddingVector)> {
        self.slots.iter().map(|s| (&s.column, &s.vector))
    }

    /// Slot ids sharing at least one per-table key with `sig`, ascending.
    fn candidate_slots(&self, sig: &SimHashSignature) -> Vec<u32> {
        let mut ids: Vec<u32> = self
            .tables
            .iter()
            .zip(sig.keys())
            .filter_map(|(table, key)| table.get(key))
            .flatten()
            .copied()
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Union of the buckets `v` hashes to, one per table. No similarity
    /// filtering happens here.
    pub fn query_candidates(&self, v: &EmbeddingVector) -> Result<BTreeSet<ColumnRef>> {
        let sig = self.signature(v)?;
        Ok(self
            .candidate_slots(&sig)
            .into_iter()
            .map(|id| self.slots[id as usize].column.clone())
            .collect())
    }

    /// Candidates together with their stored vectors, in insertion order.
    pub fn candidates_with_vectors(
        &self,
        v: &EmbeddingVector,
    ) -> Result<Vec<(&ColumnRef, &EmbeddingVector)>> {
        check_dims(self.config.dimension, v.dimension())?;
        let sig = self.signature(v)?;
        Ok(self
            .candidate_slots(&sig)
            .into_iter()
            .map(|id| {
                let s = &self.slots[id as usize];
                (&s.column, &s.vector)
            })
            .collect())
    }

    /// Entries per table; every table holds each indexed column exactly once.
    pub fn bucket_sizes(&self) -> Vec<usize> {
        self.tables
            .iter()
            .map(|t| t.values().map(Vec::len).sum())
            .collect()
    }
}
