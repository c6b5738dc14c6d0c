//! The combined sampling / embedding / LSH configuration, as read from a JSON
//! file by the CLI and accepted by `POST /index`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embed::EmbedderConfig;
use crate::error::Result;
use crate::ingest::SampleSpec;
use crate::simhash::LshConfig;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub sample: SampleSpec,
    pub embedder: EmbedderConfig,
    pub lsh: LshConfig,
}

impl PipelineConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => crate::Error::FileNotFound(path.to_path_buf()),
            _ => e.into(),
        })?;
        Ok(serde_json::from_str::<Self>(&text)?.normalized())
    }

    /// The LSH dimension always follows the embedder's.
    pub fn normalized(mut self) -> Self {
        self.lsh.dimension = self.embedder.dimension;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.sample.validate()?;
        self.embedder.validate()?;
        self.lsh.validate()?;
        if self.lsh.dimension != self.embedder.dimension {
            return Err(crate::Error::ConfigMismatch(format!(
                "lsh.dimension {} != embedder.dimension {}",
                self.lsh.dimension, self.embedder.dimension
            )));
        }
        Ok(())
    }
}
