//! Random-hyperplane (SimHash) locality-sensitive hashing for cosine similarity.
//!
//! A [`HyperplaneSet`] holds `L × b` Gaussian hyperplanes. A vector's
//! [`SimHashSignature`] has one `b`-bit key per table: bit `i` is 1 iff the dot
//! product with plane `i` is `>= 0`, and plane 0 is the most significant bit.
//! For unit vectors at angle θ each bit agrees with probability `1 − θ/π`, so
//! a pair collides in at least one table with probability `1 − (1 − pᵇ)ᴸ`.

mod index;
mod persist;

use serde::{Deserialize, Serialize};

pub use index::LshIndex;
pub use persist::{
    decode_index, encode_index, load_index, load_index_expecting, save_index, IndexHeader,
    IndexProvenance, FORMAT_VERSION,
};

use crate::embed::{check_dims, EmbeddingVector};
use crate::error::{Error, Result};
use crate::hash::fnv1a;
use crate::rng::Gaussian;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LshConfig {
    pub num_tables: usize,
    pub bits_per_table: usize,
    pub dimension: usize,
    pub hyperplane_seed: u64,
    /// Minimum exact cosine for a candidate to be reported.
    pub similarity_threshold: f64,
}

impl Default for LshConfig {
    fn default() -> Self {
        Self {
            num_tables: 32,
            bits_per_table: 10,
            dimension: 128,
            hyperplane_seed: 42,
            similarity_threshold: 0.7,
        }
    }
}

impl LshConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_tables == 0 {
            return Err(Error::InvalidConfig("num_tables must be positive".into()));
        }
        if !(1..=64).contains(&self.bits_per_table) {
            return Err(Error::InvalidConfig("bits_per_table must be in 1..=64".into()));
        }
        if self.dimension == 0 {
            return Err(Error::InvalidConfig("dimension must be positive".into()));
        }
        if !(self.similarity_threshold > 0.0 && self.similarity_threshold < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "similarity_threshold must be in (0, 1), got {}",
                self.similarity_threshold
            )));
        }
        Ok(())
    }

    pub fn total_bits(&self) -> usize {
        self.num_tables * self.bits_per_table
    }

    /// Probability that two vectors with the given cosine share a key in at
    /// least one table.
    pub fn collision_probability(&self, cosine: f64) -> f64 {
        let p = 1.0 - cosine.clamp(-1.0, 1.0).acos() / std::f64::consts::PI;
        1.0 - (1.0 - p.powi(self.bits_per_table as i32)).powi(self.num_tables as i32)
    }

    /// Identifies the hyperplane set; signatures are only comparable when equal.
    fn planes_fingerprint(&self) -> u64 {
        let mut bytes = Vec::with_capacity(32);
        for x in [
            self.dimension as u64,
            self.num_tables as u64,
            self.bits_per_table as u64,
            self.hyperplane_seed,
        ] {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
        fnv1a(&bytes)
    }
}

/// `L × b × dimension` standard-normal hyperplanes, row-major
/// (table, bit, component), drawn in that order from one
/// [`Gaussian`] stream seeded with `hyperplane_seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperplaneSet {
    num_tables: usize,
    bits_per_table: usize,
    dimension: usize,
    fingerprint: u64,
    planes: Vec<f64>,
}

impl HyperplaneSet {
    pub fn generate(config: &LshConfig) -> Result<Self> {
        config.validate()?;
        let mut gauss = Gaussian::new(config.hyperplane_seed);
        let n = config.total_bits() * config.dimension;
        Ok(Self {
            num_tables: config.num_tables,
            bits_per_table: config.bits_per_table,
            dimension: config.dimension,
            fingerprint: config.planes_fingerprint(),
            planes: (0..n).map(|_| gauss.sample()).collect(),
        })
    }

    /// Build from explicit planes, `planes[table][bit]` each of length `dimension`.
    pub fn from_planes(planes: &[Vec<Vec<f64>>]) -> Result<Self> {
        let num_tables = planes.len();
        let bits_per_table = planes.first().map_or(0, Vec::len);
        let dimension = planes
            .first()
            .and_then(|t| t.first())
            .map_or(0, Vec::len);
        if num_tables == 0 || bits_per_table == 0 || bits_per_table > 64 || dimension == 0 {
            return Err(Error::InvalidConfig("empty hyperplane set".into()));
        }
        let mut flat = Vec::with_capacity(num_tables * bits_per_table * dimension);
        for table in planes {
            check_dims(bits_per_table, table.len())?;
            for plane in table {
                check_dims(dimension, plane.len())?;
                flat.extend_from_slice(plane);
            }
        }
        Ok(Self {
            num_tables,
            bits_per_table,
            dimension,
            fingerprint: fnv1a(&flat.iter().flat_map(|x| x.to_le_bytes()).collect::<Vec<_>>()),
            planes: flat,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn num_tables(&self) -> usize {
        self.num_tables
    }

    pub fn bits_per_table(&self) -> usize {
        self.bits_per_table
    }

    /// The `bit`-th plane of table `table`.
    pub fn plane(&self, table: usize, bit: usize) -> &[f64] {
        let start = (table * self.bits_per_table + bit) * self.dimension;
        &self.planes[start..start + self.dimension]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimHashSignature {
    keys: Vec<u64>,
    bits_per_table: usize,
    fingerprint: u64,
}

impl SimHashSignature {
    /// One `b`-bit key per table.
    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn bits_per_table(&self) -> usize {
        self.bits_per_table
    }

    pub fn total_bits(&self) -> usize {
        self.keys.len() * self.bits_per_table
    }

    /// Number of agreeing bits with `other`.
    pub fn agreement(&self, other: &Self) -> Result<usize> {
        if self.fingerprint != other.fingerprint || self.keys.len() != other.keys.len() {
            return Err(Error::ConfigMismatch(
                "signatures come from different hyperplane sets".into(),
            ));
        }
        let differing: u32 = self
            .keys
            .iter()
            .zip(&other.keys)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum();
        Ok(self.total_bits() - differing as usize)
    }
}

pub fn signature(v: &EmbeddingVector, planes: &HyperplaneSet) -> Result<SimHashSignature> {
    check_dims(planes.dimension, v.dimension())?;
    let x = v.components();
    let keys = (0..planes.num_tables)
        .map(|t| {
            (0..planes.bits_per_table).fold(0u64, |key, bit| {
                let dot: f64 = planes.plane(t, bit).iter().zip(x).map(|(p, c)| p * c).sum();
                (key << 1) | u64::from(dot >= 0.0)
            })
        })
        .collect();
    Ok(SimHashSignature {
        keys,
        bits_per_table: planes.bits_per_table,
        fingerprint: planes.fingerprint,
    })
}

/// Cosine estimate `cos(π · (1 − f))` from the fraction `f` of agreeing bits.
pub fn estimate_similarity(a: &SimHashSignature, b: &SimHashSignature) -> Result<f64> {
    let agree = a.agreement(b)?;
    let f = agree as f64 / a.total_bits() as f64;
    Ok((std::f64::consts::PI * (1.0 - f)).cos())
}
