mod common;

use std::collections::HashSet;
use std::sync::Arc;

use common::write;
use warpgate_core::eval::{BruteForceOracle, ValueDomain};
use warpgate_core::rng::SplitMix64;
use warpgate_core::simhash::encode_index;
use warpgate_core::{
    build_index, Catalog, ColumnEmbedder, ColumnValues, DatabaseNaming, DiscoveryEngine, EmbedderConfig,
    EmbeddingVector, Error, LshConfig, LshIndex, PreviewRequest, Query, SampleSpec, SearchParams, TableId,
};

fn engine_over(root: &std::path::Path, lsh: &LshConfig) -> DiscoveryEngine {
    let mut cat = Catalog::new();
    cat.register_corpus(root, DatabaseNaming::PerSubdirectory).unwrap();
    let embedder = EmbedderConfig::default().build().unwrap();
    let build = build_index(&cat, &SampleSpec::default(), embedder.as_ref(), lsh).unwrap();
    DiscoveryEngine::from_build(Arc::new(cat), embedder, build)
}

fn csv(header: &str, cols: &[Vec<String>]) -> String {
    let rows = cols.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = format!("{header}\n");
    for r in 0..rows {
        let cells: Vec<&str> = cols.iter().map(|c| c.get(r).map(String::as_str).unwrap_or("")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// A query column, three noisy relatives in other tables and unrelated
/// distractors.
fn planted_corpus(root: &std::path::Path) {
    let mut rng = SplitMix64::new(99);
    let shared = ValueDomain::random(&mut rng);
    let base = shared.distinct_values(150, &mut rng, &HashSet::new());
    let mut other = || {
        let d = ValueDomain::random(&mut rng);
        d.distinct_values(150, &mut rng, &HashSet::new())
    };
    let distractors: Vec<Vec<String>> = (0..8).map(|_| other()).collect();
    let variant = |f: &dyn Fn(&str) -> String, skip: usize| -> Vec<String> {
        base.iter().skip(skip).map(|v| f(v)).collect()
    };
    write(root, "sales/orders.csv", &csv("customer,noise", &[base.clone(), distractors[0].clone()]));
    write(
        root,
        "sales/accounts.csv",
        &csv("account,misc", &[variant(&|v| v.to_uppercase(), 0), distractors[1].clone()]),
    );
    write(
        root,
        "crm/contacts.csv",
        &csv("who,tag", &[variant(&|v| format!("{v}."), 30), distractors[2].clone()]),
    );
    write(
        root,
        "crm/leads.csv",
        &csv("ref,code", &[distractors[3].clone(), variant(&|v| format!("id-{v}"), 60)]),
    );
    write(
        root,
        "ops/misc.csv",
        &csv("a,b,c,d", &[distractors[4].clone(), distractors[5].clone(), distractors[6].clone(), distractors[7].clone()]),
    );
}

#[test]
fn duplicate_column_ranks_first_with_score_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "db/a.csv", "k,x\nann,1\nbob,2\ncid,3\n");
    write(dir.path(), "db/b.csv", "name,y\nann,q\nbob,r\ncid,s\n");
    write(dir.path(), "db/c.csv", "city\nrome\nparis\noslo\n");
    let engine = engine_over(dir.path(), &LshConfig::default());
    let q = engine.resolve_column("db.a", "k").unwrap();
    let hits = engine.search_topk(&Query::Column(q.clone()), &SearchParams::default()).unwrap();
    assert_eq!(hits[0].table, "b");
    assert_eq!(hits[0].column.column_name, "name");
    assert!((hits[0].score - 1.0).abs() < 1e-9);
    assert!(hits.iter().all(|h| h.column != q));

    let none = SearchParams {
        min_score: Some(1.01),
        ..SearchParams::default()
    };
    assert!(engine.search_topk(&Query::Column(q), &none).unwrap().is_empty());
}

#[test]
fn planted_columns_take_the_top_ranks() {
    let dir = tempfile::tempdir().unwrap();
    planted_corpus(dir.path());
    let engine = engine_over(dir.path(), &LshConfig::default());
    let q = engine.resolve_column("sales.orders", "customer").unwrap();
    let hits = engine.search_topk(&Query::Column(q.clone()), &SearchParams::with_k(5)).unwrap();
    let top3: HashSet<(String, String)> =
        hits.iter().take(3).map(|h| (h.table.clone(), h.column.column_name.clone())).collect();
    let want: HashSet<(String, String)> = [("accounts", "account"), ("contacts", "who"), ("leads", "code")]
        .into_iter()
        .map(|(t, c)| (t.to_string(), c.to_string()))
        .collect();
    assert_eq!(top3, want);

    let oracle = BruteForceOracle::new(engine.catalog(), engine.embedder().as_ref(), *engine.sample_spec());
    let exact = oracle.topk(&q, &SearchParams::with_k(5), 0.7);
    assert_eq!(hits, exact);
}

#[test]
fn degenerate_lsh_matches_oracle_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    planted_corpus(dir.path());
    // one bit per table: a pair at cosine >= 0 misses all 64 tables with
    // probability below 2^-64
    let lsh = LshConfig {
        num_tables: 64,
        bits_per_table: 1,
        ..LshConfig::default()
    };
    let engine = engine_over(dir.path(), &lsh);
    let oracle = BruteForceOracle::new(engine.catalog(), engine.embedder().as_ref(), *engine.sample_spec());
    let params = SearchParams {
        k: 50,
        min_score: Some(0.0),
        exclude_query_table: false,
    };
    for c in engine.catalog().column_refs() {
        let got = engine.search_topk(&Query::Column(c.clone()), &params).unwrap();
        assert_eq!(got, oracle.topk(&c, &params, 0.7), "{c}");
    }
}

#[test]
fn results_for_k_prefix_results_for_k_plus_one() {
    let dir = tempfile::tempdir().unwrap();
    planted_corpus(dir.path());
    let engine = engine_over(dir.path(), &LshConfig::default());
    for c in engine.catalog().column_refs() {
        let mut prev: Vec<_> = Vec::new();
        for k in 1..8 {
            let params = SearchParams {
                k,
                min_score: Some(0.2),
                exclude_query_table: false,
            };
            let now = engine.search_topk(&Query::Column(c.clone()), &params).unwrap();
            assert!(now.len() <= k);
            assert_eq!(&now[..prev.len()], &prev[..]);
            assert!(now.iter().all(|h| h.column != c));
            prev = now;
        }
    }
}

#[test]
fn exclude_query_table_flag() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "db/t.csv", "a,b\nx1,x1\nx2,x2\nx3,x3\n");
    write(dir.path(), "db/u.csv", "c\nzz\nyy\n");
    let engine = engine_over(dir.path(), &LshConfig::default());
    let q = Query::Column(engine.resolve_column("db.t", "a").unwrap());
    assert!(engine.search_topk(&q, &SearchParams::default()).unwrap().is_empty());
    let keep = SearchParams {
        exclude_query_table: false,
        ..SearchParams::default()
    };
    let hits = engine.search_topk(&q, &keep).unwrap();
    assert_eq!(hits.len(), 1);
    assert_eq!(hits[0].column.column_name, "b");
}

#[test]
fn raw_value_query() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "db/t.csv", "a\nalpha\nbeta\ngamma\n");
    let engine = engine_over(dir.path(), &LshConfig::default());
    let q = Query::Values {
        values: vec!["gamma".into(), "alpha".into(), "beta".into(), "NULL".into()],
        table: None,
    };
    let hits = engine.search_topk(&q, &SearchParams::default()).unwrap();
    assert_eq!(hits.len(), 1);
    assert!((hits[0].score - 1.0).abs() < 1e-9);
}

#[test]
fn search_errors() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "db/t.csv", "a\n1\n");
    let mut cat = Catalog::new();
    cat.register_corpus(dir.path(), DatabaseNaming::PerSubdirectory).unwrap();
    let cat = Arc::new(cat);
    let bare = DiscoveryEngine::new(cat.clone());
    let q = Query::Column(bare.resolve_column("db.t", "a").unwrap());
    assert!(matches!(bare.search_topk(&q, &SearchParams::default()), Err(Error::IndexNotBuilt)));
    assert!(matches!(bare.resolve_column("db.t", "zzz"), Err(Error::UnknownColumn(_))));
    let engine = engine_over(dir.path(), &LshConfig::default());
    let ghost = Query::Column(warpgate_core::ColumnRef {
        table_id: TableId::from("t0000000000000000"),
        column_index: 0,
        column_name: "a".into(),
    });
    assert!(engine.search_topk(&ghost, &SearchParams::default()).is_err());
    assert!(engine.search_topk(&q, &SearchParams::with_k(0)).is_err());
}

#[test]
fn manifest_accounts_for_every_column() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "db/t.csv", "a,b,empty\n1,x,\n2,y,NULL\n");
    let engine = engine_over(dir.path(), &LshConfig::default());
    let m = engine.manifest().unwrap();
    assert_eq!(m.columns_indexed, 2);
    assert_eq!(m.columns_skipped.len(), 1);
    assert_eq!(m.columns_skipped[0].reason, "empty");
    assert_eq!(m.columns_skipped[0].column.column_name, "empty");
    assert_eq!(m.columns_indexed + m.columns_skipped.len(), m.total_columns);
}

#[test]
fn all_null_corpus_indexes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "db/t.csv", "a\nNULL\n");
    let mut cat = Catalog::new();
    cat.register_corpus(dir.path(), DatabaseNaming::PerSubdirectory).unwrap();
    let e = EmbedderConfig::default().build().unwrap();
    let r = build_index(&cat, &SampleSpec::default(), e.as_ref(), &LshConfig::default());
    assert!(matches!(r, Err(Error::NothingIndexed(_))));
    let r = build_index(&Catalog::new(), &SampleSpec::default(), e.as_ref(), &LshConfig::default());
    assert!(matches!(r, Err(Error::NothingIndexed(_))));
}

#[test]
fn identical_builds_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    planted_corpus(dir.path());
    let a = engine_over(dir.path(), &LshConfig::default());
    let b = engine_over(dir.path(), &LshConfig::default());
    assert_eq!(
        encode_index(a.index().unwrap()).unwrap(),
        encode_index(b.index().unwrap()).unwrap()
    );
}

#[test]
fn common_rescaling_keeps_the_ranking() {
    let dir = tempfile::tempdir().unwrap();
    planted_corpus(dir.path());
    let engine = engine_over(dir.path(), &LshConfig::default());
    let index = engine.index().unwrap();
    let mut scaled = LshIndex::new(index.config().clone(), index.embedder_config().clone()).unwrap();
    for (c, v) in index.entries() {
        scaled.insert(c.clone(), v.scaled(3.5)).unwrap();
    }
    let other = DiscoveryEngine::with_index(engine.catalog().clone(), scaled).unwrap();
    let params = SearchParams {
        k: 20,
        min_score: Some(-1.0),
        exclude_query_table: false,
    };
    for c in engine.catalog().column_refs() {
        let q = Query::Column(c);
        let names = |e: &DiscoveryEngine| -> Vec<_> {
            e.search_topk(&q, &params).unwrap().into_iter().map(|h| h.column).collect()
        };
        assert_eq!(names(&engine), names(&other));
    }
}

/// One-hot of the first character, defined here to show that the engine
/// needs nothing beyond the trait.
#[derive(Debug)]
struct Initial {
    config: EmbedderConfig,
}

impl ColumnEmbedder for Initial {
    fn config(&self) -> &EmbedderConfig {
        &self.config
    }

    fn embed_value(&self, value: &str) -> EmbeddingVector {
        let mut v = vec![0.0; self.config.dimension];
        if let Some(c) = value.chars().next() {
            v[c.to_ascii_lowercase() as usize % self.config.dimension] = 1.0;
        }
        EmbeddingVector::new(v)
    }
}

#[test]
fn custom_embedder_slots_in() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "db/a.csv", "k\napple\navocado\n");
    write(dir.path(), "db/b.csv", "k\nant\naxe\n");
    write(dir.path(), "db/c.csv", "k\nzebra\nzoo\n");
    let mut cat = Catalog::new();
    cat.register_corpus(dir.path(), DatabaseNaming::PerSubdirectory).unwrap();
    let embedder: Arc<dyn ColumnEmbedder> = Arc::new(Initial {
        config: EmbedderConfig {
            model: "test-initial".into(),
            dimension: 32,
            ..EmbedderConfig::default()
        },
    });
    let lsh = LshConfig {
        dimension: 32,
        ..LshConfig::default()
    };
    let build = build_index(&cat, &SampleSpec::default(), embedder.as_ref(), &lsh).unwrap();
    let engine = DiscoveryEngine::from_build(Arc::new(cat), embedder.clone(), build);
    let q = Query::Column(engine.resolve_column("db.a", "k").unwrap());
    let hits = engine.search_topk(&q, &SearchParams::default()).unwrap();
    assert_eq!(hits.len(), 1);
    assert_eq!(hits[0].table, "b");
    assert!((hits[0].score - 1.0).abs() < 1e-12);
    assert_eq!(embedder.embed_column(&ColumnValues::from_values(["ant", "axe"])).components()[b'a' as usize % 32], 1.0);
}

#[test]
fn list_columns_with_counts() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "db/t.csv", "a,b\n1,x\n1,\n2,y\n3,NULL\n3,x\n");
    let engine = engine_over(dir.path(), &LshConfig::default());
    let id = engine.catalog().resolve_table("db.t").unwrap().meta.table_id.clone();
    let cols = engine.list_candidate_columns(&id).unwrap();
    let names: Vec<_> = cols.iter().map(|c| c.name.as_str()).collect();
    assert_eq!(names, ["a", "b"]);
    assert_eq!((cols[0].distinct_count, cols[0].null_count), (3, 0));
    assert_eq!((cols[1].distinct_count, cols[1].null_count), (2, 2));
    assert!(matches!(
        engine.list_candidate_columns(&TableId::from("nope")),
        Err(Error::UnknownTable(_))
    ));
}

fn preview_engine(candidate: &str) -> (tempfile::TempDir, DiscoveryEngine) {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "db/q.csv", "id,name\n1,ann\n2,bob\n3,cid\n");
    write(dir.path(), "db/c.csv", candidate);
    let engine = engine_over(dir.path(), &LshConfig::default());
    (dir, engine)
}

fn request(engine: &DiscoveryEngine, selected: &[&str]) -> PreviewRequest {
    let id = |t: &str| engine.catalog().resolve_table(t).unwrap().meta.table_id.clone();
    PreviewRequest {
        query_table: id("db.q"),
        query_column: "name".into(),
        candidate_table: id("db.c"),
        candidate_column: "who".into(),
        selected_columns: selected.iter().map(|s| s.to_string()).collect(),
        limit: 50,
    }
}

#[test]
fn preview_all_keys_match() {
    let (_d, engine) = preview_engine("who,age\ncid,30\nann,10\nbob,20\n");
    let p = engine.join_preview(&request(&engine, &["age"])).unwrap();
    assert_eq!(p.columns, ["id", "name", "c.age"]);
    assert_eq!(p.rows.len(), 3);
    assert_eq!(p.total_rows, 3);
    assert_eq!(p.matched_rows, 3);
    assert!(p.rows.iter().all(|r| r.iter().all(Option::is_some)));
    assert_eq!(p.rows[0][2].as_deref(), Some("10"));
    assert!(p.warnings.is_empty());
}

#[test]
fn preview_no_keys_match() {
    let (_d, engine) = preview_engine("who,age\nzed,1\nyan,2\n");
    let p = engine.join_preview(&request(&engine, &["age"])).unwrap();
    assert_eq!(p.rows.len(), 3);
    assert_eq!(p.matched_rows, 0);
    assert!(p.rows.iter().all(|r| r[2].is_none()));
}

#[test]
fn preview_duplicate_key_warns_and_keeps_cardinality() {
    let (_d, engine) = preview_engine("who,age\nbob,20\nann,10\nbob,99\n");
    let p = engine.join_preview(&request(&engine, &["age"])).unwrap();
    assert_eq!(p.rows.len(), 3);
    assert_eq!(p.rows[1][2].as_deref(), Some("20"));
    assert_eq!(p.warnings.len(), 1);
    assert_eq!(p.warnings[0].key, "bob");
    assert_eq!(p.warnings[0].candidate_rows, 2);
}

#[test]
fn preview_limit_and_errors() {
    let (_d, engine) = preview_engine("who,age\nann,10\n");
    let mut req = request(&engine, &["age"]);
    req.limit = 2;
    let p = engine.join_preview(&req).unwrap();
    assert_eq!(p.rows.len(), 2);
    assert_eq!(p.total_rows, 3);

    let mut bad = request(&engine, &["nope"]);
    assert!(matches!(engine.join_preview(&bad), Err(Error::UnknownColumn(_))));
    bad = request(&engine, &["age"]);
    bad.candidate_table = TableId::from("missing");
    assert!(matches!(engine.join_preview(&bad), Err(Error::UnknownTable(_))));
}
