use super::{ColumnEmbedder, EmbedderConfig, EmbeddingVector};
use crate::error::Result;

pub(super) const MODEL: &str = "first-char";

/// One-hot of the first character's code point modulo the dimension.
///
/// Deliberately crude; it exists to show the engine works with any
/// [`ColumnEmbedder`].
#[derive(Debug, Clone)]
pub struct FirstCharEmbedder {
    config: EmbedderConfig,
}

impl FirstCharEmbedder {
    pub fn new(dimension: usize) -> Result<Self> {
        let config = EmbedderConfig {
            model: MODEL.to_string(),
            dimension,
            ngram_min: 1,
            ngram_max: 1,
            hash_seed: 0,
            lowercase: false,
        };
        config.validate()?;
        Ok(Self { config })
    }
}

impl ColumnEmbedder for FirstCharEmbedder {
    fn config(&self) -> &EmbedderConfig {
        &self.config
    }

    fn embed_value(&self, value: &str) -> EmbeddingVector {
        let mut v = vec![0.0; self.config.dimension];
        if let Some(c) = value.chars().next() {
            v[c as usize % self.config.dimension] = 1.0;
        }
        EmbeddingVector::new(v)
    }
}
