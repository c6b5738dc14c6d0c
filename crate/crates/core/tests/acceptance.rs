//! Acceptance criteria, one line each. Runs sequentially so timings are not
//! disturbed by other work; exits non-zero when any criterion fails.

mod common;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use common::{agreement_fraction, pair_at_angle, wide_planes};
use warpgate_core::eval::*;
use warpgate_core::simhash::save_index;
use warpgate_core::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn catalog_for(tb: &Testbed) -> Arc<Catalog> {
    let mut cat = Catalog::new();
    cat.register_corpus(&tb.corpus_dir, DatabaseNaming::PerSubdirectory).unwrap();
    Arc::new(cat)
}

fn engine_for(cat: &Arc<Catalog>, sample: SampleSpec) -> DiscoveryEngine {
    let emb = EmbedderConfig::default().build().unwrap();
    let build = build_index(cat, &sample, emb.as_ref(), &LshConfig::default()).unwrap();
    DiscoveryEngine::from_build(cat.clone(), emb, build)
}

fn standard(dir: &Path) -> (Arc<Catalog>, GroundTruthSet) {
    let tb = generate_testbed(&TestbedSpec::standard(), dir).unwrap();
    let cat = catalog_for(&tb);
    let truth = load_ground_truth(&tb.truth_path, &cat).unwrap().truth;
    (cat, truth)
}

fn collision_law() -> Outcome {
    let started = Instant::now();
    let planes = wide_planes(128, 2024);
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (i, theta) in [PI / 6.0, PI / 4.0, PI / 3.0].into_iter().enumerate() {
        let (u, v) = pair_at_angle(100 + i as u64, 128, theta);
        let f = agreement_fraction(&u, &v, &planes);
        let p = 1.0 - theta / PI;
        let z = (f - p).abs() / (p * (1.0 - p) / 4096.0).sqrt();
        worst = worst.max(z);
        parts.push(format!("{f:.4}/{p:.4}"));
    }
    let secs = started.elapsed().as_secs_f64();
    outcome(
        worst <= 3.0 && secs < 10.0,
        format!("agreement/expected {} max |z| {worst:.2} (<= 3), {secs:.2}s (< 10s)", parts.join(" ")),
    )
}

fn oracle_parity(dir: &Path) -> Outcome {
    let started = Instant::now();
    let (cat, _) = standard(dir);
    let engine = engine_for(&cat, SampleSpec::default());
    let oracle = BruteForceOracle::new(&cat, engine.embedder().as_ref(), *engine.sample_spec());
    let params = SearchParams::with_k(10);
    let min = LshConfig::default().similarity_threshold;
    let (mut recall_sum, mut counted, mut mismatches) = (0.0, 0usize, 0usize);
    for c in cat.column_refs() {
        let got = engine.search_topk(&Query::Column(c.clone()), &params).unwrap();
        let want = oracle.topk(&c, &params, min);
        if !want.is_empty() {
            let hits = want.iter().filter(|w| got.iter().any(|g| g.column == w.column)).count();
            recall_sum += hits as f64 / want.len() as f64;
            counted += 1;
        }
        let clear = |xs: &[JoinCandidate]| -> Vec<(ColumnRef, f64)> {
            xs.iter().filter(|x| x.score >= min + 0.02).map(|x| (x.column.clone(), x.score)).collect()
        };
        let (g, w) = (clear(&got), clear(&want));
        let same = g.len() == w.len() && g.iter().zip(&w).all(|(a, b)| a.0 == b.0 && (a.1 - b.1).abs() < 1e-12);
        mismatches += usize::from(!same);
    }
    let recall = if counted == 0 { 1.0 } else { recall_sum / counted as f64 };
    let secs = started.elapsed().as_secs_f64();
    outcome(
        recall >= 0.9 && mismatches == 0 && secs < 60.0,
        format!(
            "recall@10 vs exact {recall:.4} (>= 0.9) over {counted} queries, {mismatches} margin mismatches, {secs:.2}s (< 60s)"
        ),
    )
}

fn sampling_robustness(dir: &Path) -> Outcome {
    let (cat, truth) = standard(dir);
    let sizes: Vec<SampleSpec> = [10, 100, 1000].iter().map(|&n| SampleSpec::reservoir(n, 42)).collect();
    let report = sampling_ablation(&cat, &sizes, &truth, &[1, 3, 5, 10], &PipelineConfig::default(), 0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for run in &report.runs {
        let d = run.max_abs_delta();
        let bound = if run.sample.size == 1000 { 0.02 } else { 0.05 };
        pass &= d <= bound;
        parts.push(format!("size {} max|delta| {d:.4} (<= {bound})", run.label));
    }
    let base = report.baseline.metrics.at(10).map(|m| m.recall).unwrap_or(0.0);
    outcome(pass, format!("full recall@10 {base:.4}; {}", parts.join(", ")))
}

fn interactive_latency(dir: &Path) -> Outcome {
    let (cat, truth) = standard(dir);
    let engine = engine_for(&cat, SampleSpec::reservoir(100, 42));
    let queries: Vec<Query> = truth.queries().cloned().map(Query::Column).collect();
    let t = measure_timing(&engine, &queries, &SearchParams::default(), 5).unwrap();
    let ms = |s: f64| s * 1e3;
    outcome(
        t.mean_end_to_end_secs < 0.1 && t.mean_lookup_secs < 0.02 && t.lookup_within_end_to_end(),
        format!(
            "mean end-to-end {:.3} ms (< 100), mean lookup {:.3} ms (< 20), lookup <= end-to-end for all {} queries: {}",
            ms(t.mean_end_to_end_secs),
            ms(t.mean_lookup_secs),
            t.per_query.len(),
            t.lookup_within_end_to_end()
        ),
    )
}

fn sampling_speedup(dir: &Path) -> Outcome {
    let tb = generate_testbed(&TestbedSpec::new(4, 3, 100_000, 2, 11), dir).unwrap();
    let cat = catalog_for(&tb);
    let truth = load_ground_truth(&tb.truth_path, &cat).unwrap().truth;
    let queries: Vec<Query> = truth.queries().cloned().map(Query::Column).collect();
    let time = |sample| {
        let engine = engine_for(&cat, sample);
        measure_timing(&engine, &queries, &SearchParams::default(), 3).unwrap().mean_end_to_end_secs
    };
    let full = time(SampleSpec::full());
    let sampled = time(SampleSpec::reservoir(100, 42));
    let speedup = full / sampled;
    outcome(
        speedup >= 5.0,
        format!(
            "100k-row columns: full {:.2} ms, sample 100 {:.3} ms, speedup {speedup:.1}x (>= 5x)",
            full * 1e3,
            sampled * 1e3
        ),
    )
}

/// Generate, index and search everything under `work`, returning the index
/// bytes and the serialized result lists.
fn pipeline_run(work: &Path) -> (Vec<u8>, Vec<u8>) {
    if work.exists() {
        std::fs::remove_dir_all(work).unwrap();
    }
    let tb = generate_testbed(&TestbedSpec::standard(), &work.join("testbed")).unwrap();
    let cat = catalog_for(&tb);
    let engine = engine_for(&cat, SampleSpec::default());
    let index_path = work.join("index.wgi");
    save_index(engine.index().unwrap(), &index_path).unwrap();
    let results: Vec<Vec<JoinCandidate>> = cat
        .column_refs()
        .map(|c| engine.search_topk(&Query::Column(c), &SearchParams::default()).unwrap())
        .collect();
    (std::fs::read(&index_path).unwrap(), serde_json::to_vec(&results).unwrap())
}

fn determinism(dir: &Path) -> Outcome {
    let work = dir.join("run");
    let (index_a, results_a) = pipeline_run(&work);
    let (index_b, results_b) = pipeline_run(&work);
    outcome(
        index_a == index_b && results_a == results_b,
        format!(
            "index files {} bytes identical: {}, result lists identical: {}",
            index_a.len(),
            index_a == index_b,
            results_a == results_b
        ),
    )
}

fn quality_gate(dir: &Path) -> Outcome {
    let (cat, truth) = standard(dir);
    let emb = EmbedderConfig::default().build().unwrap();
    let oracle = BruteForceOracle::new(&cat, emb.as_ref(), SampleSpec::default());
    let results: HashMap<ColumnRef, Vec<ColumnRef>> = truth
        .queries()
        .map(|q| {
            let hits = oracle.topk(q, &SearchParams::with_k(5), LshConfig::default().similarity_threshold);
            (q.clone(), hits.into_iter().map(|h| h.column).collect())
        })
        .collect();
    let recall = precision_recall_at_k(&results, &truth, &[5]).at(5).unwrap().recall;
    outcome(recall >= 0.8, format!("exact-search recall@5 {recall:.4} (>= 0.8) over {} queries", truth.len()))
}

fn main() -> ExitCode {
    type Criterion = fn(&Path) -> Outcome;
    let criteria: [(&str, Criterion); 7] = [
        ("simhash collision law", |_| collision_law()),
        ("oracle parity", oracle_parity),
        ("sampling robustness", sampling_robustness),
        ("interactive latency", interactive_latency),
        ("sampling speedup", sampling_speedup),
        ("determinism", determinism),
        ("planted-pair quality gate", quality_gate),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let dir = tempfile::tempdir().unwrap();
        let o = run(dir.path());
        failed += usize::from(!o.pass);
        println!("criterion {} {name}: {} | {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
