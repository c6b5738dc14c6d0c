#![allow(dead_code)]

use std::path::{Path, PathBuf};

pub fn write(dir: &Path, rel: &str, contents: &str) -> PathBuf {
    let path = dir.join(rel);
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(&path, contents).unwrap();
    path
}

use warpgate_core::rng::Gaussian;
use warpgate_core::simhash::{signature, HyperplaneSet};
use warpgate_core::{EmbeddingVector, LshConfig};

pub fn random_unit(g: &mut Gaussian, dim: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| g.sample()).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Two unit vectors at exactly `theta` radians.
pub fn pair_at_angle(seed: u64, dim: usize, theta: f64) -> (EmbeddingVector, EmbeddingVector) {
    let mut g = Gaussian::new(seed);
    let u = random_unit(&mut g, dim);
    let w = random_unit(&mut g, dim);
    let proj: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
    let mut w: Vec<f64> = w.iter().zip(&u).map(|(b, a)| b - proj * a).collect();
    let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    w.iter_mut().for_each(|x| *x /= n);
    let v = u.iter().zip(&w).map(|(a, b)| theta.cos() * a + theta.sin() * b).collect();
    (EmbeddingVector::new(u), EmbeddingVector::new(v))
}

/// 4096 hyperplanes as 64 tables of 64 bits.
pub fn wide_planes(dim: usize, seed: u64) -> HyperplaneSet {
    HyperplaneSet::generate(&LshConfig {
        num_tables: 64,
        bits_per_table: 64,
        dimension: dim,
        hyperplane_seed: seed,
        similarity_threshold: 0.7,
    })
    .unwrap()
}

/// Fraction of agreeing bits between the signatures of `u` and `v`.
pub fn agreement_fraction(u: &EmbeddingVector, v: &EmbeddingVector, planes: &HyperplaneSet) -> f64 {
    let (a, b) = (signature(u, planes).unwrap(), signature(v, planes).unwrap());
    a.agreement(&b).unwrap() as f64 / a.total_bits() as f64
}
