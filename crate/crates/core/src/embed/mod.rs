//! Column embeddings and the cosine join-ability score.
//!
//! A [`ColumnEmbedder`] maps single values to vectors; the provided
//! [`ColumnEmbedder::embed_column`] pools them into one unit vector per column
//! by taking the mean over the column's *distinct* non-null values. Join-ability
//! of two columns is the cosine of their column vectors.

mod first_char;
mod ngram;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use first_char::FirstCharEmbedder;
pub use ngram::HashingEmbedder;

use crate::error::{Error, Result};
use crate::ingest::{is_null_marker, ColumnValues};

/// Dense real vector with its cached L2 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector {
    components: Vec<f64>,
    norm: f64,
}

impl EmbeddingVector {
    pub fn new(components: Vec<f64>) -> Self {
        let norm = l2(&components);
        Self { components, norm }
    }

    pub fn zeros(dimension: usize) -> Self {
        Self {
            components: vec![0.0; dimension],
            norm: 0.0,
        }
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn is_zero(&self) -> bool {
        self.norm == 0.0
    }

    /// Unit-length copy; the zero vector stays zero.
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = 1.0 / self.norm;
        Self::new(self.components.iter().map(|x| x * inv).collect())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.components.iter().map(|x| x * factor).collect())
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        check_dims(self.dimension(), other.dimension())?;
        Ok(self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a * b)
            .sum())
    }
}

impl Serialize for EmbeddingVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.components.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for EmbeddingVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Vec::<f64>::deserialize(deserializer).map(Self::new)
    }
}

fn l2(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Cosine similarity in `[-1, 1]`, defined as 0 when either side is zero.
pub fn cosine(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64> {
    let dot = u.dot(v)?;
    if u.is_zero() || v.is_zero() {
        return Ok(0.0);
    }
    Ok((dot / (u.norm * v.norm)).clamp(-1.0, 1.0))
}

pub const DEFAULT_MODEL: &str = "char-ngram-hash";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbedderConfig {
    /// Which embedder produced the vectors: `char-ngram-hash` or `first-char`.
    pub model: String,
    pub dimension: usize,
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub hash_seed: u64,
    pub lowercase: bool,
}

impl Default for EmbedderConfig {
    fn default() -> Self {
        Self {
            model: DEFAULT_MODEL.to_string(),
            dimension: 128,
            ngram_min: 2,
            ngram_max: 3,
            hash_seed: 42,
            lowercase: true,
        }
    }
}

impl EmbedderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dimension < 8 {
            return Err(Error::InvalidConfig(format!(
                "embedding dimension must be >= 8, got {}",
                self.dimension
            )));
        }
        if self.ngram_min == 0 || self.ngram_min > self.ngram_max {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= ngram_min <= ngram_max, got {}..{}",
                self.ngram_min, self.ngram_max
            )));
        }
        Ok(())
    }

    /// Instantiate the embedder named by `model`.
    pub fn build(&self) -> Result<Arc<dyn ColumnEmbedder>> {
        match self.model.as_str() {
            DEFAULT_MODEL => Ok(Arc::new(HashingEmbedder::new(self.clone())?)),
            first_char::MODEL => Ok(Arc::new(FirstCharEmbedder::new(self.dimension)?)),
            other => Err(Error::InvalidConfig(format!("unknown embedder model `{other}`"))),
        }
    }
}

/// Maps values to vectors. Implementors provide per-value embeddings; column
/// pooling is shared.
pub trait ColumnEmbedder: Send + Sync + std::fmt::Debug {
    /// Recorded in index files so vectors can be traced to their producer.
    fn config(&self) -> &EmbedderConfig;

    fn embed_value(&self, value: &str) -> EmbeddingVector;

    fn dimension(&self) -> usize {
        self.config().dimension
    }

    /// Mean of the per-value embeddings over distinct non-null values, then
    /// L2-normalized. Values are visited in sorted order so the result is
    /// bit-identical under any permutation or duplication of the input.
    fn embed_column(&self, values: &ColumnValues) -> EmbeddingVector {
        embed_distinct(self, values.values.iter().map(String::as_str))
    }
}

pub(crate) fn embed_distinct<'a, E, I>(embedder: &E, values: I) -> EmbeddingVector
where
    E: ColumnEmbedder + ?Sized,
    I: IntoIterator<Item = &'a str>,
{
    let distinct: BTreeSet<&str> = values.into_iter().filter(|v| !is_null_marker(v)).collect();
    let dim = embedder.dimension();
    if distinct.is_empty() {
        return EmbeddingVector::zeros(dim);
    }
    let mut acc = vec![0.0; dim];
    for v in &distinct {
        for (a, x) in acc.iter_mut().zip(embedder.embed_value(v).components()) {
            *a += x;
        }
    }
    let n = distinct.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    EmbeddingVector::new(acc).normalized()
}

/// `J(a, b)`: cosine of the two column embeddings.
pub fn joinability(embedder: &dyn ColumnEmbedder, a: &ColumnValues, b: &ColumnValues) -> f64 {
    let (ea, eb) = (embedder.embed_column(a), embedder.embed_column(b));
    cosine(&ea, &eb).expect("one embedder produces one dimension")
}
