use std::collections::HashSet;

use proptest::prelude::*;
use warpgate_core::ingest::disambiguate_headers;
use warpgate_core::simhash::{decode_index, encode_index, signature, HyperplaneSet};
use warpgate_core::{
    joinability, ColumnEmbedder, ColumnRef, ColumnValues, EmbedderConfig, EmbeddingVector, HashingEmbedder, LshConfig,
    LshIndex, TableId,
};

fn small_lsh(dim: usize) -> LshConfig {
    LshConfig {
        num_tables: 6,
        bits_per_table: 7,
        dimension: dim,
        ..LshConfig::default()
    }
}

fn vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim)
}

fn cref(i: usize) -> ColumnRef {
    ColumnRef {
        table_id: TableId::from(format!("t{}", i % 3).as_str()),
        column_index: i,
        column_name: format!("c{i}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn headers_become_unique(names in prop::collection::vec("[ab_2]{0,3}", 0..12)) {
        let out = disambiguate_headers(&names);
        prop_assert_eq!(out.len(), names.len());
        let set: HashSet<_> = out.iter().collect();
        prop_assert_eq!(set.len(), out.len());
    }

    #[test]
    fn column_vectors_are_unit_or_zero(values in prop::collection::vec("[a-e ]{0,6}", 0..10)) {
        let e = HashingEmbedder::default();
        let v = e.embed_column(&ColumnValues::from_values(values));
        prop_assert!(v.is_zero() || (v.norm() - 1.0).abs() < 1e-9);
        prop_assert_eq!(v.dimension(), 128);
    }

    #[test]
    fn joinability_is_symmetric(
        a in prop::collection::vec("[a-f]{1,5}", 1..8),
        b in prop::collection::vec("[a-f]{1,5}", 1..8),
    ) {
        let e = HashingEmbedder::default();
        let (a, b) = (ColumnValues::from_values(a), ColumnValues::from_values(b));
        let (ab, ba) = (joinability(&e, &a, &b), joinability(&e, &b, &a));
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&ab));
    }

    #[test]
    fn signature_ignores_positive_scale_and_flips_under_negation(v in vector(16), s in 0.01f64..100.0) {
        let planes = HyperplaneSet::generate(&small_lsh(16)).unwrap();
        let v = EmbeddingVector::new(v);
        let base = signature(&v, &planes).unwrap();
        prop_assert_eq!(&base, &signature(&v.scaled(s), &planes).unwrap());
        let neg = signature(&v.scaled(-1.0), &planes).unwrap();
        for (t, (&k, &n)) in base.keys().iter().zip(neg.keys()).enumerate() {
            prop_assert!(k < 1 << 7);
            let mut mask = 0u64;
            for bit in 0..7 {
                let dot: f64 = planes.plane(t, bit).iter().zip(v.components()).map(|(p, x)| p * x).sum();
                if dot != 0.0 {
                    mask |= 1 << (6 - bit);
                }
            }
            prop_assert_eq!((k ^ n) & mask, mask);
        }
    }

    #[test]
    fn buckets_conserve_entries_under_reinsert(
        vs in prop::collection::vec(vector(16), 1..40),
        ids in prop::collection::vec(0usize..25, 1..40),
    ) {
        let mut index = LshIndex::new(small_lsh(16), EmbedderConfig { dimension: 16, ..EmbedderConfig::default() }).unwrap();
        let mut distinct = HashSet::new();
        for (v, &id) in vs.iter().zip(&ids) {
            index.insert(cref(id), EmbeddingVector::new(v.clone())).unwrap();
            distinct.insert(id);
        }
        prop_assert_eq!(index.len(), distinct.len());
        prop_assert!(index.bucket_sizes().iter().all(|&n| n == distinct.len()));
        for (c, v) in index.entries() {
            prop_assert!(index.query_candidates(v).unwrap().contains(c));
        }
    }

    #[test]
    fn encode_decode_round_trips(vs in prop::collection::vec(vector(16), 0..20)) {
        let mut index = LshIndex::new(small_lsh(16), EmbedderConfig { dimension: 16, ..EmbedderConfig::default() }).unwrap();
        for (i, v) in vs.iter().enumerate() {
            index.insert(cref(i), EmbeddingVector::new(v.clone())).unwrap();
        }
        let bytes = encode_index(&index).unwrap();
        let back = decode_index(&bytes).unwrap();
        prop_assert_eq!(encode_index(&back).unwrap(), bytes);
        for v in &vs {
            let v = EmbeddingVector::new(v.clone());
            prop_assert_eq!(back.query_candidates(&v).unwrap(), index.query_candidates(&v).unwrap());
        }
    }
}
