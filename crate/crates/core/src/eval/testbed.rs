//! Seeded synthetic corpora with planted joinable column pairs.
//!
//! Every column draws its values from a [`ValueDomain`]: a small syllable
//! inventory plus formatting habits. The two columns of a planted pair share
//! a domain and overlap in values (containment drawn from the noise
//! profile); the second column also gets per-value surface noise (case,
//! punctuation, affixes). All other columns get a domain of their own.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::truth::{write_ground_truth, TruthRow};
use crate::error::{Error, Result};
use crate::rng::{mix64, SplitMix64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseProfile {
    /// Fraction of the noisy column's distinct values taken from its partner.
    pub containment_min: f64,
    pub containment_max: f64,
    pub case_rate: f64,
    pub punctuation_rate: f64,
    pub affix_rate: f64,
    /// Probability that a cell is written empty.
    pub null_rate: f64,
}

impl Default for NoiseProfile {
    fn default() -> Self {
        Self {
            containment_min: 0.5,
            containment_max: 1.0,
            case_rate: 0.3,
            punctuation_rate: 0.2,
            affix_rate: 0.2,
            null_rate: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestbedSpec {
    pub num_tables: usize,
    pub columns_per_table: usize,
    pub rows_per_table: usize,
    pub planted_pairs: usize,
    #[serde(default)]
    pub noise: NoiseProfile,
    pub seed: u64,
    #[serde(default = "default_databases")]
    pub num_databases: usize,
}

fn default_databases() -> usize {
    3
}

impl TestbedSpec {
    pub fn new(num_tables: usize, columns_per_table: usize, rows_per_table: usize, planted_pairs: usize, seed: u64) -> Self {
        Self {
            num_tables,
            columns_per_table,
            rows_per_table,
            planted_pairs,
            noise: NoiseProfile::default(),
            seed,
            num_databases: default_databases(),
        }
    }

    /// 10 tables × 5 columns × 1000 rows, 20 planted pairs, seed 7.
    pub fn standard() -> Self {
        Self::new(10, 5, 1000, 20, 7)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.num_tables == 0 || self.columns_per_table == 0 || self.rows_per_table == 0 {
            return bad("tables, columns and rows must all be positive".into());
        }
        if self.num_databases == 0 {
            return bad("num_databases must be positive".into());
        }
        let n = self.num_tables * self.columns_per_table;
        if self.planted_pairs > n * (n - 1) / 2 {
            return bad(format!("{} pairs exceed the {} column pairs", self.planted_pairs, n * (n - 1) / 2));
        }
        if self.planted_pairs > 0 && self.num_tables < 2 {
            return bad("planted pairs need at least two tables".into());
        }
        if self.planted_pairs > n / 2 {
            return bad(format!(
                "planted pairs are disjoint, so at most {} fit in {n} columns",
                n / 2
            ));
        }
        let nz = &self.noise;
        if !(0.0 < nz.containment_min && nz.containment_min <= nz.containment_max && nz.containment_max <= 1.0) {
            return bad("containment range must satisfy 0 < min <= max <= 1".into());
        }
        for (name, r) in [
            ("case_rate", nz.case_rate),
            ("punctuation_rate", nz.punctuation_rate),
            ("affix_rate", nz.affix_rate),
            ("null_rate", nz.null_rate),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return bad(format!("{name} must be in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Two columns planted as joinable, as `(database.table, column)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedPair {
    pub left: (String, String),
    pub right: (String, String),
    pub containment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Testbed {
    pub root: PathBuf,
    /// Register this directory with per-subdirectory database naming.
    pub corpus_dir: PathBuf,
    pub truth_path: PathBuf,
    pub pairs: Vec<PlantedPair>,
}

const CONSONANTS: &[u8] = b"bcdfghjklmnpqrstvwxz";
const VOWELS: &[u8] = b"aeiouy";
const SEPARATORS: [&str; 4] = ["", "-", " ", "_"];
const PREFIXES: [&str; 4] = ["id-", "x_", "no. ", "ref:"];
const SUFFIXES: [&str; 4] = ["-01", " ltd", "_v2", "#"];

fn pick<'a, T>(rng: &mut SplitMix64, items: &'a [T]) -> &'a T {
    &items[rng.below(items.len() as u64) as usize]
}

fn chance(rng: &mut SplitMix64, p: f64) -> bool {
    rng.next_f64() < p
}

/// A family of string values with a recognizable surface form.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueDomain {
    syllables: Vec<String>,
    separator: &'static str,
    max_syllables: usize,
    digit_rate: f64,
}

impl ValueDomain {
    pub fn random(rng: &mut SplitMix64) -> Self {
        let mut consonants = CONSONANTS.to_vec();
        rng.shuffle(&mut consonants);
        consonants.truncate(5);
        let mut vowels = VOWELS.to_vec();
        rng.shuffle(&mut vowels);
        vowels.truncate(2);

        let mut all = Vec::new();
        for &c in &consonants {
            for &v in &vowels {
                all.push(format!("{}{}", c as char, v as char));
                for &t in &consonants {
                    all.push(format!("{}{}{}", c as char, v as char, t as char));
                }
            }
        }
        rng.shuffle(&mut all);
        all.truncate(16);
        Self {
            syllables: all,
            separator: *pick(rng, &SEPARATORS),
            max_syllables: 4,
            digit_rate: if chance(rng, 0.4) { 0.3 } else { 0.0 },
        }
    }

    pub fn value(&self, rng: &mut SplitMix64) -> String {
        let n = 2 + rng.below(self.max_syllables as u64 - 1) as usize;
        let mut parts: Vec<&str> = Vec::with_capacity(n);
        for _ in 0..n {
            parts.push(pick(rng, &self.syllables));
        }
        let mut out = parts.join(self.separator);
        if chance(rng, self.digit_rate) {
            out.push_str(self.separator);
            out.push_str(&format!("{:02}", rng.below(100)));
        }
        out
    }

    /// Up to `n` distinct values not in `exclude`. Gives up early when the
    /// domain runs dry.
    pub fn distinct_values(&self, n: usize, rng: &mut SplitMix64, exclude: &HashSet<String>) -> Vec<String> {
        let mut seen: HashSet<String> = HashSet::with_capacity(n);
        let mut out = Vec::with_capacity(n);
        let mut misses = 0;
        while out.len() < n && misses < 20 * n + 100 {
            let v = self.value(rng);
            if exclude.contains(&v) || !seen.insert(v.clone()) {
                misses += 1;
                continue;
            }
            out.push(v);
        }
        out
    }
}

struct Affix {
    text: &'static str,
    prefix: bool,
}

fn add_noise(value: &str, noise: &NoiseProfile, affix: &Affix, rng: &mut SplitMix64) -> String {
    let mut v = value.to_string();
    if chance(rng, noise.case_rate) {
        v = if chance(rng, 0.5) {
            v.to_uppercase()
        } else {
            let mut cs = v.chars();
            cs.next()
                .map(|c| c.to_uppercase().chain(cs).collect())
                .unwrap_or_default()
        };
    }
    if chance(rng, noise.punctuation_rate) {
        let replaced: String = v
            .chars()
            .map(|c| if matches!(c, '-' | '_' | ' ') { '.' } else { c })
            .collect();
        v = if replaced == v { format!("{v}.") } else { replaced };
    }
    if chance(rng, noise.affix_rate) {
        v = if affix.prefix {
            format!("{}{v}", affix.text)
        } else {
            format!("{v}{}", affix.text)
        };
    }
    v
}

struct ColumnPlan {
    name: String,
    values: Vec<String>,
}

/// Write a corpus under `out/corpus/<database>/<table>.csv` and its ground
/// truth to `out/ground_truth.csv` (both directions of every pair).
pub fn generate_testbed(spec: &TestbedSpec, out: &Path) -> Result<Testbed> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let (nt, nc) = (spec.num_tables, spec.columns_per_table);
    let n = nt * nc;
    let distinct_per_column = (spec.rows_per_table / 2).max(1);

    // disjoint cross-table pairs
    let mut order: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut order);
    let mut used = vec![false; n];
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        if pairs.len() == spec.planted_pairs {
            break;
        }
        if used[order[i]] {
            continue;
        }
        let a = order[i];
        if let Some(j) = (i + 1..n).find(|&j| !used[order[j]] && order[j] / nc != a / nc) {
            used[a] = true;
            used[order[j]] = true;
            pairs.push((a, order[j]));
        }
    }
    if pairs.len() < spec.planted_pairs {
        return Err(Error::InvalidSpec(format!(
            "could only plant {} of {} cross-table pairs",
            pairs.len(),
            spec.planted_pairs
        )));
    }

    let name_domain = ValueDomain::random(&mut rng);
    let mut plans: Vec<Option<ColumnPlan>> = (0..n).map(|_| None).collect();
    let column_name = |rng: &mut SplitMix64, idx: usize| {
        let stem: String = name_domain.value(rng).chars().filter(|c| c.is_ascii_alphanumeric()).collect();
        format!("{stem}_{}", idx % nc)
    };

    let mut containments = Vec::with_capacity(pairs.len());
    for &(a, b) in &pairs {
        let domain = ValueDomain::random(&mut rng);
        let left = domain.distinct_values(distinct_per_column, &mut rng, &HashSet::new());
        let c = spec.noise.containment_min
            + (spec.noise.containment_max - spec.noise.containment_min) * rng.next_f64();
        containments.push(c);
        let shared = ((c * left.len() as f64).round() as usize).clamp(1, left.len());
        let mut borrowed = left.clone();
        rng.shuffle(&mut borrowed);
        borrowed.truncate(shared);
        let exclude: HashSet<String> = left.iter().cloned().collect();
        let fresh = domain.distinct_values(left.len() - shared, &mut rng, &exclude);
        let affix = Affix {
            prefix: chance(&mut rng, 0.5),
            text: if chance(&mut rng, 0.5) { pick(&mut rng, &PREFIXES) } else { pick(&mut rng, &SUFFIXES) },
        };
        let right: Vec<String> = borrowed
            .into_iter()
            .chain(fresh)
            .map(|v| add_noise(&v, &spec.noise, &affix, &mut rng))
            .collect();
        plans[a] = Some(ColumnPlan {
            name: column_name(&mut rng, a),
            values: left,
        });
        plans[b] = Some(ColumnPlan {
            name: column_name(&mut rng, b),
            values: right,
        });
    }
    for (idx, plan) in plans.iter_mut().enumerate() {
        if plan.is_none() {
            let domain = ValueDomain::random(&mut rng);
            *plan = Some(ColumnPlan {
                name: column_name(&mut rng, idx),
                values: domain.distinct_values(distinct_per_column, &mut rng, &HashSet::new()),
            });
        }
    }
    let plans: Vec<ColumnPlan> = plans.into_iter().map(|p| p.expect("every column planned")).collect();

    let corpus_dir = out.join("corpus");
    let table_db = |t: usize| format!("db{}", t % spec.num_databases);
    let table_name = |t: usize| format!("t{t:02}");
    for t in 0..nt {
        let dir = corpus_dir.join(table_db(t));
        std::fs::create_dir_all(&dir)?;
        let cols = &plans[t * nc..(t + 1) * nc];
        let mut col_rngs: Vec<SplitMix64> = (0..nc)
            .map(|c| SplitMix64::new(mix64(spec.seed ^ ((t * nc + c) as u64).wrapping_mul(0x9E37_79B9))))
            .collect();
        let mut w = csv::Writer::from_path(dir.join(format!("{}.csv", table_name(t))))?;
        w.write_record(cols.iter().map(|c| c.name.as_str()))?;
        let mut record: Vec<&str> = Vec::with_capacity(nc);
        for _ in 0..spec.rows_per_table {
            record.clear();
            for (plan, r) in cols.iter().zip(col_rngs.iter_mut()) {
                if chance(r, spec.noise.null_rate) || plan.values.is_empty() {
                    record.push("");
                } else {
                    record.push(&plan.values[r.below(plan.values.len() as u64) as usize]);
                }
            }
            w.write_record(&record)?;
        }
        w.flush()?;
    }

    let locate = |idx: usize| {
        let t = idx / nc;
        (format!("{}.{}", table_db(t), table_name(t)), plans[idx].name.clone())
    };
    let planted: Vec<PlantedPair> = pairs
        .iter()
        .zip(containments)
        .map(|(&(a, b), containment)| PlantedPair {
            left: locate(a),
            right: locate(b),
            containment,
        })
        .collect();
    let rows: Vec<TruthRow> = planted
        .iter()
        .flat_map(|p| {
            [(&p.left, &p.right), (&p.right, &p.left)].map(|(q, a)| TruthRow {
                query_table: q.0.clone(),
                query_column: q.1.clone(),
                answer_table: a.0.clone(),
                answer_column: a.1.clone(),
            })
        })
        .collect();
    let truth_path = out.join("ground_truth.csv");
    write_ground_truth(&truth_path, &rows)?;

    Ok(Testbed {
        root: out.to_path_buf(),
        corpus_dir,
        truth_path,
        pairs: planted,
    })
}
