use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context;
use serde_json::{json, Map, Value};
use warpgate_core::eval::{generate_testbed, load_ground_truth, sampling_ablation, AblationReport, TestbedSpec};
use warpgate_core::simhash::{load_index, save_index};
use warpgate_core::{
    build_index, Catalog, DatabaseNaming, DiscoveryEngine, PipelineConfig, Query, SampleSpec, SampleStrategy,
    SearchParams,
};

use crate::args::{Cli, Command, EvalArgs, GenArgs, IndexArgs, PipelineFlags, SearchArgs, ServeArgs};
use crate::Failure;

type Outcome = Result<(), Failure>;

pub fn run(cli: Cli) -> Outcome {
    let file = cli.config.as_deref();
    match cli.command {
        Command::Index(a) => index(file, a),
        Command::Search(a) => search(a),
        Command::Eval(a) => eval(file, a),
        Command::GenTestbed(a) => gen_testbed(a),
        Command::Serve(a) => serve(a),
    }
}

/// Defaults, then the config file, then flags.
fn effective_config(file: Option<&Path>, flags: &PipelineFlags) -> Result<PipelineConfig, Failure> {
    let mut cfg = match file {
        Some(p) => PipelineConfig::from_file(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = flags.sample_strategy {
        cfg.sample.strategy = s;
    }
    if let Some(n) = flags.sample_size {
        cfg.sample.size = n;
    }
    if let Some(seed) = flags.seed {
        cfg.sample.seed = seed;
    }
    if let Some(d) = flags.dim {
        cfg.embedder.dimension = d;
    }
    if let Some(t) = flags.tables {
        cfg.lsh.num_tables = t;
    }
    if let Some(b) = flags.bits {
        cfg.lsh.bits_per_table = b;
    }
    if let Some(t) = flags.threshold {
        cfg.lsh.similarity_threshold = t;
    }
    let cfg = cfg.normalized();
    cfg.validate()?;
    Ok(cfg)
}

/// Config echo; goes to stderr when stdout must stay machine-readable.
fn echo_config(cfg: &impl serde::Serialize, to_stderr: bool) -> Outcome {
    let line = format!("# config {}", serde_json::to_string(cfg)?);
    if to_stderr {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
    Ok(())
}

fn register(root: &Path, naming: DatabaseNaming) -> Result<Catalog, Failure> {
    let mut catalog = Catalog::new();
    let report = catalog.register_corpus(root, naming)?;
    for r in &report.rejected {
        eprintln!("warning: skipped {}: {}", r.path.display(), r.error);
    }
    log::info!("registered {} tables from {}", report.loaded, root.display());
    Ok(catalog)
}

fn manifest_path(index: &Path) -> PathBuf {
    let mut s = index.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn index(file: Option<&Path>, a: IndexArgs) -> Outcome {
    let cfg = effective_config(file, &a.pipeline)?;
    echo_config(&cfg, false)?;
    let catalog = register(&a.corpus, a.naming)?;
    let embedder = cfg.embedder.build()?;
    let built = build_index(&catalog, &cfg.sample, embedder.as_ref(), &cfg.lsh)?;
    save_index(&built.index, &a.out)?;
    let m = &built.manifest;
    std::fs::write(manifest_path(&a.out), serde_json::to_vec_pretty(m)?)
        .with_context(|| format!("writing manifest next to {}", a.out.display()))?;
    println!(
        "indexed {} of {} columns from {} tables in {:.3}s -> {}",
        m.columns_indexed,
        m.total_columns,
        m.tables_indexed,
        m.build_seconds,
        a.out.display()
    );
    for s in &m.columns_skipped {
        println!("skipped {}.{}: {}", s.table, s.column.column_name, s.reason);
    }
    Ok(())
}

fn engine_from_index(index_path: &Path, corpus: Option<&Path>) -> Result<DiscoveryEngine, Failure> {
    let index = load_index(index_path)?;
    let source = index.provenance().and_then(|p| p.corpus.clone());
    let (root, naming) = match (corpus, source) {
        (Some(root), src) => (root.to_path_buf(), src.map(|s| s.naming).unwrap_or_default()),
        (None, Some(src)) => (src.root, src.naming),
        (None, None) => {
            return Err(Failure::User(anyhow::anyhow!(
                "{} does not record its corpus; pass --corpus",
                index_path.display()
            )))
        }
    };
    let catalog = register(&root, naming)?;
    Ok(DiscoveryEngine::with_index(Arc::new(catalog), index)?)
}

fn search(a: SearchArgs) -> Outcome {
    let engine = engine_from_index(&a.index, a.corpus.as_deref())?;
    let index = engine.index().expect("engine was built from an index");
    echo_config(
        &PipelineConfig {
            sample: *engine.sample_spec(),
            embedder: index.embedder_config().clone(),
            lsh: index.config().clone(),
        },
        a.json,
    )?;
    let column = engine.resolve_column(&a.table, &a.column)?;
    let params = SearchParams {
        k: a.k,
        min_score: a.min_score,
        exclude_query_table: !a.include_query_table,
    };
    let hits = engine.search_topk(&Query::Column(column), &params)?;
    let mut out = std::io::stdout().lock();
    if a.json {
        serde_json::to_writer(&mut out, &hits)?;
        writeln!(out)?;
        return Ok(());
    }
    if hits.is_empty() {
        writeln!(out, "no joinable columns above the threshold")?;
    }
    for (rank, h) in hits.iter().enumerate() {
        writeln!(
            out,
            "{:>3}. {:.4}  {}.{}.{}",
            rank + 1,
            h.score,
            h.database,
            h.table,
            h.column.column_name
        )?;
    }
    Ok(())
}

/// Flat `precision@k` / `recall@k` fields per sample label.
fn summary(report: &AblationReport) -> Value {
    let mut out = Map::new();
    for run in std::iter::once(&report.baseline).chain(&report.runs) {
        let mut row = Map::new();
        for m in &run.metrics.at_k {
            row.insert(format!("precision@{}", m.k), json!(m.precision));
            row.insert(format!("recall@{}", m.k), json!(m.recall));
        }
        if let Some(t) = &run.metrics.timing {
            row.insert("mean_lookup_secs".into(), json!(t.mean_lookup_secs));
            row.insert("mean_end_to_end_secs".into(), json!(t.mean_end_to_end_secs));
        }
        out.insert(run.label.clone(), Value::Object(row));
    }
    Value::Object(out)
}

fn eval(file: Option<&Path>, a: EvalArgs) -> Outcome {
    let cfg = effective_config(file, &a.pipeline)?;
    echo_config(&cfg, false)?;
    let catalog = Arc::new(register(&a.corpus, a.naming)?);
    let truth = load_ground_truth(&a.truth, &catalog)?;
    if truth.dropped > 0 {
        eprintln!("warning: dropped {} unresolvable ground-truth rows", truth.dropped);
    }
    if truth.truth.is_empty() {
        return Err(Failure::User(anyhow::anyhow!("{} has no usable rows", a.truth.display())));
    }
    let strategy = match cfg.sample.strategy {
        SampleStrategy::Full => SampleStrategy::Reservoir,
        s => s,
    };
    let samples: Vec<SampleSpec> = a
        .sample_sizes
        .iter()
        .map(|&size| SampleSpec {
            strategy,
            size,
            seed: cfg.sample.seed,
        })
        .collect();
    let report = sampling_ablation(&catalog, &samples, &truth.truth, &a.ks, &cfg, a.timing_repeats)?;
    println!("queries: {}", truth.truth.len());
    print!("{report}");
    if let Some(path) = &a.report {
        let doc = json!({
            "config": cfg,
            "queries": truth.truth.len(),
            "dropped_truth_rows": truth.dropped,
            "summary": summary(&report),
            "ablation": report,
        });
        std::fs::write(path, serde_json::to_vec_pretty(&doc)?)
            .with_context(|| format!("writing {}", path.display()))?;
        let csv = path.with_extension("csv");
        std::fs::write(&csv, report.to_csv()).with_context(|| format!("writing {}", csv.display()))?;
        println!("report: {} and {}", path.display(), csv.display());
    }
    Ok(())
}

fn gen_testbed(a: GenArgs) -> Outcome {
    let spec = TestbedSpec {
        num_databases: a.databases,
        ..TestbedSpec::new(a.tables, a.cols, a.rows, a.pairs, a.seed)
    };
    echo_config(&spec, false)?;
    let tb = generate_testbed(&spec, &a.out)?;
    println!(
        "wrote {} tables and {} planted pairs: corpus {} truth {}",
        a.tables,
        tb.pairs.len(),
        tb.corpus_dir.display(),
        tb.truth_path.display()
    );
    Ok(())
}

fn serve(a: ServeArgs) -> Outcome {
    let engine = match (&a.index, &a.corpus) {
        (Some(index), corpus) => engine_from_index(index, corpus.as_deref())?,
        (None, Some(corpus)) => DiscoveryEngine::new(Arc::new(register(corpus, DatabaseNaming::default())?)),
        (None, None) => DiscoveryEngine::new(Arc::new(Catalog::new())),
    };
    let addr = a.addr.unwrap_or_else(warpgate_server::default_addr);
    let addr: std::net::SocketAddr = addr
        .parse()
        .map_err(|e| Failure::User(anyhow::anyhow!("bad address {addr}: {e}")))?;
    let state = Arc::new(warpgate_server::AppState::new(engine));
    let rt = tokio::runtime::Runtime::new()?;
    eprintln!("serving on http://{addr}");
    rt.block_on(warpgate_server::serve(state, addr))?;
    Ok(())
}
