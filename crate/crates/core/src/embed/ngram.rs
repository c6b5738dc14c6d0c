use super::{ColumnEmbedder, EmbedderConfig, EmbeddingVector};
use crate::error::Result;
use crate::hash::seeded_hash;

/// Signed feature hashing of character n-grams.
///
/// Each n-gram of sizes `ngram_min..=ngram_max` (over Unicode scalar values,
/// lowercased when configured) is hashed with [`seeded_hash`]; the low bits
/// modulo `dimension` pick the bucket and bit 63 picks the sign (`1` → −1).
/// A non-empty value shorter than `ngram_min` is hashed whole as one gram.
#[derive(Debug, Clone, Default)]
pub struct HashingEmbedder {
    config: EmbedderConfig,
}

impl HashingEmbedder {
    pub fn new(config: EmbedderConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self { config })
    }

    fn accumulate(&self, text: &str, acc: &mut [f64]) {
        // byte offset of every char boundary, including the end
        let bounds: Vec<usize> = text
            .char_indices()
            .map(|(i, _)| i)
            .chain(std::iter::once(text.len()))
            .collect();
        let chars = bounds.len() - 1;
        if chars == 0 {
            return;
        }
        let mut add = |gram: &str| {
            let h = seeded_hash(self.config.hash_seed, gram.as_bytes());
            let bucket = (h % acc.len() as u64) as usize;
            acc[bucket] += if h >> 63 == 1 { -1.0 } else { 1.0 };
        };
        if chars < self.config.ngram_min {
            add(text);
            return;
        }
        for n in self.config.ngram_min..=self.config.ngram_max.min(chars) {
            for start in 0..=chars - n {
                add(&text[bounds[start]..bounds[start + n]]);
            }
        }
    }
}


impl ColumnEmbedder for HashingEmbedder {
    fn config(&self) -> &EmbedderConfig {
        &self.config
    }

    fn embed_value(&self, value: &str) -> EmbeddingVector {
        let mut acc = vec![0.0; self.config.dimension];
        if self.config.lowercase {
            self.accumulate(&value.to_lowercase(), &mut acc);
        } else {
            self.accumulate(value, &mut acc);
        }
        EmbeddingVector::new(acc).normalized()
    }
}
