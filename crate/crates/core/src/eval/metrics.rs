use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{GroundTruthSet, TimingReport};
use crate::config::PipelineConfig;
use crate::ingest::ColumnRef;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMetrics {
    pub k: usize,
    pub precision: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryOutcome {
    pub query: ColumnRef,
    pub returned: Vec<ColumnRef>,
    pub answers: usize,
    /// Per requested k, in the report's `ks` order.
    pub at_k: Vec<KMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub ks: Vec<usize>,
    /// Unweighted means over queries.
    pub at_k: Vec<KMetrics>,
    pub queries: usize,
    pub per_query: Vec<QueryOutcome>,
    pub timing: Option<TimingReport>,
    pub config: Option<PipelineConfig>,
}

impl MetricsReport {
    pub fn at(&self, k: usize) -> Option<&KMetrics> {
        self.at_k.iter().find(|m| m.k == k)
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>4}  {:>9}  {:>9}", "k", "precision", "recall")?;
        for m in &self.at_k {
            writeln!(f, "{:>4}  {:>9.4}  {:>9.4}", m.k, m.precision, m.recall)?;
        }
        write!(f, "queries: {}", self.queries)?;
        if let Some(t) = &self.timing {
            write!(
                f,
                "\nmean lookup {:.3} ms, mean end-to-end {:.3} ms",
                t.mean_lookup_secs * 1e3,
                t.mean_end_to_end_secs * 1e3
            )?;
        }
        Ok(())
    }
}

/// Precision@k = hits / min(k, |returned|) (0 when nothing is returned);
/// recall@k = hits / |answers|. Truth queries without a result list count as
/// empty results.
pub fn precision_recall_at_k(
    results: &HashMap<ColumnRef, Vec<ColumnRef>>,
    truth: &GroundTruthSet,
    ks: &[usize],
) -> MetricsReport {
    let mut ks: Vec<usize> = ks.iter().copied().filter(|&k| k > 0).collect();
    ks.sort_unstable();
    ks.dedup();

    let empty = Vec::new();
    let per_query: Vec<QueryOutcome> = truth
        .entries
        .iter()
        .map(|entry| {
            let returned = results.get(&entry.query).unwrap_or(&empty);
            let at_k = ks
                .iter()
                .map(|&k| {
                    let top = &returned[..returned.len().min(k)];
                    let hits = top.iter().filter(|c| entry.answers.contains(c)).count() as f64;
                    let precision = if top.is_empty() { 0.0 } else { hits / top.len() as f64 };
                    let recall = if entry.answers.is_empty() {
                        0.0
                    } else {
                        hits / entry.answers.len() as f64
                    };
                    KMetrics { k, precision, recall }
                })
                .collect();
            QueryOutcome {
                query: entry.query.clone(),
                returned: returned.clone(),
                answers: entry.answers.len(),
                at_k,
            }
        })
        .collect();

    let n = per_query.len();
    let at_k = ks
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let (p, r) = per_query
                .iter()
                .fold((0.0, 0.0), |(p, r), q| (p + q.at_k[i].precision, r + q.at_k[i].recall));
            let denom = n.max(1) as f64;
            KMetrics {
                k,
                precision: p / denom,
                recall: r / denom,
            }
        })
        .collect();

    MetricsReport {
        ks,
        at_k,
        queries: n,
        per_query,
        timing: None,
        config: None,
    }
}
