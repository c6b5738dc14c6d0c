use serde::{Deserialize, Serialize};

use crate::engine::{DiscoveryEngine, Query, SearchParams};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryTiming {
    pub lookup_secs: f64,
    pub end_to_end_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub mean_lookup_secs: f64,
    pub mean_end_to_end_secs: f64,
    /// Per query, averaged over repeats.
    pub per_query: Vec<QueryTiming>,
    pub repeats: usize,
    /// Coefficient of variation of the per-repeat means.
    pub cv_lookup: f64,
    pub cv_end_to_end: f64,
}

impl TimingReport {
    pub fn lookup_within_end_to_end(&self) -> bool {
        self.per_query.iter().all(|q| q.lookup_secs <= q.end_to_end_secs)
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn coefficient_of_variation(xs: &[f64]) -> f64 {
    let m = mean(xs);
    if xs.len() < 2 || m == 0.0 {
        return 0.0;
    }
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
    var.sqrt() / m
}

/// Wall-clock search timing. One untimed warm-up pass over all queries runs
/// first, then `repeats` timed passes.
pub fn measure_timing(
    engine: &DiscoveryEngine,
    queries: &[Query],
    params: &SearchParams,
    repeats: usize,
) -> Result<TimingReport> {
    let repeats = repeats.max(1);
    for q in queries {
        engine.search_timed(q, params)?;
    }
    let mut sums = vec![(0.0, 0.0); queries.len()];
    let mut pass_lookup = Vec::with_capacity(repeats);
    let mut pass_e2e = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let (mut l, mut e) = (0.0, 0.0);
        for (q, sum) in queries.iter().zip(sums.iter_mut()) {
            let (_, t) = engine.search_timed(q, params)?;
            let (lookup, e2e) = (t.lookup.as_secs_f64(), t.end_to_end.as_secs_f64());
            sum.0 += lookup;
            sum.1 += e2e;
            l += lookup;
            e += e2e;
        }
        let n = queries.len().max(1) as f64;
        pass_lookup.push(l / n);
        pass_e2e.push(e / n);
    }
    let per_query: Vec<QueryTiming> = sums
        .into_iter()
        .map(|(l, e)| QueryTiming {
            lookup_secs: l / repeats as f64,
            end_to_end_secs: e / repeats as f64,
        })
        .collect();
    Ok(TimingReport {
        mean_lookup_secs: mean(&per_query.iter().map(|q| q.lookup_secs).collect::<Vec<_>>()),
        mean_end_to_end_secs: mean(&per_query.iter().map(|q| q.end_to_end_secs).collect::<Vec<_>>()),
        per_query,
        repeats,
        cv_lookup: coefficient_of_variation(&pass_lookup),
        cv_end_to_end: coefficient_of_variation(&pass_e2e),
    })
}
