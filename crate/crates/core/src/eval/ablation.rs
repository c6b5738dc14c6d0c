use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{measure_timing, precision_recall_at_k, GroundTruthSet, MetricsReport};
use crate::config::PipelineConfig;
use crate::engine::{build_index, DiscoveryEngine, Query, SearchParams};
use crate::error::Result;
use crate::ingest::{Catalog, SampleSpec, SampleStrategy};

/// `metric(run) − metric(full)` at one k.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricDelta {
    pub k: usize,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRun {
    pub label: String,
    pub sample: SampleSpec,
    pub build_seconds: f64,
    pub metrics: MetricsReport,
    pub deltas: Vec<MetricDelta>,
}

impl AblationRun {
    pub fn max_abs_delta(&self) -> f64 {
        self.deltas
            .iter()
            .flat_map(|d| [d.precision.abs(), d.recall.abs()])
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    /// The full-data run every delta is measured against.
    pub baseline: AblationRun,
    pub runs: Vec<AblationRun>,
}

impl AblationReport {
    pub fn run(&self, label: &str) -> Option<&AblationRun> {
        std::iter::once(&self.baseline)
            .chain(&self.runs)
            .find(|r| r.label == label)
    }

    /// Plot-ready rows: `k,precision,recall,size`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,precision,recall,size\n");
        for run in std::iter::once(&self.baseline).chain(&self.runs) {
            for m in &run.metrics.at_k {
                out.push_str(&format!("{},{:.6},{:.6},{}\n", m.k, m.precision, m.recall, run.label));
            }
        }
        out
    }
}

impl fmt::Display for AblationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>6}  {:>4}  {:>9}  {:>9}  {:>8}  {:>8}  {:>10}  {:>10}",
            "size", "k", "precision", "recall", "dP", "dR", "lookup_ms", "e2e_ms"
        )?;
        for run in std::iter::once(&self.baseline).chain(&self.runs) {
            let (lookup, e2e) = run
                .metrics
                .timing
                .as_ref()
                .map_or((f64::NAN, f64::NAN), |t| (t.mean_lookup_secs * 1e3, t.mean_end_to_end_secs * 1e3));
            for (m, d) in run.metrics.at_k.iter().zip(&run.deltas) {
                writeln!(
                    f,
                    "{:>6}  {:>4}  {:>9.4}  {:>9.4}  {:>+8.4}  {:>+8.4}  {:>10.3}  {:>10.3}",
                    run.label, m.k, m.precision, m.recall, d.precision, d.recall, lookup, e2e
                )?;
            }
        }
        Ok(())
    }
}

/// Search every truth query and score the results. Timing is measured over
/// the same queries when `timing_repeats > 0`.
pub fn evaluate(
    engine: &DiscoveryEngine,
    truth: &GroundTruthSet,
    ks: &[usize],
    timing_repeats: usize,
) -> Result<MetricsReport> {
    let params = SearchParams::with_k(ks.iter().copied().max().unwrap_or(10).max(1));
    let mut results = HashMap::new();
    for q in truth.queries() {
        let hits = engine.search_topk(&Query::Column(q.clone()), &params)?;
        results.insert(q.clone(), hits.into_iter().map(|h| h.column).collect());
    }
    let mut report = precision_recall_at_k(&results, truth, ks);
    if timing_repeats > 0 {
        let queries: Vec<Query> = truth.queries().cloned().map(Query::Column).collect();
        report.timing = Some(measure_timing(engine, &queries, &params, timing_repeats)?);
    }
    if let Some(index) = engine.index() {
        report.config = Some(PipelineConfig {
            sample: *engine.sample_spec(),
            embedder: index.embedder_config().clone(),
            lsh: index.config().clone(),
        });
    }
    Ok(report)
}

fn run_one(
    catalog: &Arc<Catalog>,
    sample: SampleSpec,
    config: &PipelineConfig,
    truth: &GroundTruthSet,
    ks: &[usize],
    timing_repeats: usize,
) -> Result<AblationRun> {
    let embedder = config.embedder.build()?;
    let build = build_index(catalog, &sample, embedder.as_ref(), &config.lsh)?;
    let build_seconds = build.manifest.build_seconds;
    let engine = DiscoveryEngine::from_build(catalog.clone(), embedder, build);
    Ok(AblationRun {
        label: sample.label(),
        sample,
        build_seconds,
        metrics: evaluate(&engine, truth, ks, timing_repeats)?,
        deltas: Vec::new(),
    })
}

fn deltas(run: &MetricsReport, base: &MetricsReport) -> Vec<MetricDelta> {
    run.at_k
        .iter()
        .zip(&base.at_k)
        .map(|(r, b)| MetricDelta {
            k: r.k,
            precision: r.precision - b.precision,
            recall: r.recall - b.recall,
        })
        .collect()
}

/// Rebuild and evaluate the index once per sample spec, plus a full-data
/// baseline. All other settings come from `config`.
pub fn sampling_ablation(
    catalog: &Arc<Catalog>,
    samples: &[SampleSpec],
    truth: &GroundTruthSet,
    ks: &[usize],
    config: &PipelineConfig,
    timing_repeats: usize,
) -> Result<AblationReport> {
    let full = SampleSpec::full().with_seed(config.sample.seed);
    let mut baseline = run_one(catalog, full, config, truth, ks, timing_repeats)?;
    baseline.deltas = deltas(&baseline.metrics, &baseline.metrics);

    let mut runs = Vec::new();
    for &sample in samples {
        if sample.strategy == SampleStrategy::Full {
            continue;
        }
        let mut run = run_one(catalog, sample, config, truth, ks, timing_repeats)?;
        run.deltas = deltas(&run.metrics, &baseline.metrics);
        runs.push(run);
    }
    Ok(AblationReport { baseline, runs })
}
