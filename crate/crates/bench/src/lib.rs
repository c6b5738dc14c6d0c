//! Fixtures shared by the benchmarks.

use std::path::Path;
use std::sync::Arc;

use warpgate_core::eval::{generate_testbed, TestbedSpec};
use warpgate_core::{build_index, Catalog, DatabaseNaming, DiscoveryEngine, EmbedderConfig, LshConfig, Result, SampleSpec};

/// Generate a testbed under `dir` and build an engine over it.
pub fn testbed_engine(dir: &Path, spec: &TestbedSpec, sample: &SampleSpec) -> Result<DiscoveryEngine> {
    let tb = generate_testbed(spec, dir)?;
    let mut catalog = Catalog::new();
    catalog.register_corpus(&tb.corpus_dir, DatabaseNaming::PerSubdirectory)?;
    let embedder = EmbedderConfig::default().build()?;
    let built = build_index(&catalog, sample, embedder.as_ref(), &LshConfig::default())?;
    Ok(DiscoveryEngine::from_build(Arc::new(catalog), embedder, built))
}
