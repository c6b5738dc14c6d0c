use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{is_null, ColumnRef, ColumnValues};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleStrategy {
    Full,
    Head,
    Reservoir,
}

impl std::str::FromStr for SampleStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Self::Full),
            "head" => Ok(Self::Head),
            "reservoir" => Ok(Self::Reservoir),
            other => Err(format!("unknown sample strategy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SampleSpec {
    pub strategy: SampleStrategy,
    /// Ignored for [`SampleStrategy::Full`].
    pub size: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            strategy: SampleStrategy::Reservoir,
            size: 1000,
            seed: 42,
        }
    }
}

impl SampleSpec {
    pub fn full() -> Self {
        Self {
            strategy: SampleStrategy::Full,
            ..Self::default()
        }
    }

    pub fn reservoir(size: usize, seed: u64) -> Self {
        Self {
            strategy: SampleStrategy::Reservoir,
            size,
            seed,
        }
    }

    pub fn head(size: usize) -> Self {
        Self {
            strategy: SampleStrategy::Head,
            size,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.strategy != SampleStrategy::Full && self.size == 0 {
            return Err(Error::InvalidConfig("sample size must be at least 1".into()));
        }
        Ok(())
    }

    /// Short label used in reports: `full` or the sample size.
    pub fn label(&self) -> String {
        match self.strategy {
            SampleStrategy::Full => "full".to_string(),
            SampleStrategy::Head => format!("head{}", self.size),
            SampleStrategy::Reservoir => self.size.to_string(),
        }
    }
}

/// Sample non-null cells according to `spec`.
///
/// Nulls are filtered before sampling and counted over the whole scan. Head
/// keeps the first `size` non-null values; reservoir runs Algorithm R over the
/// non-null values with a [`SplitMix64`] seeded by `spec.seed`, returning the
/// reservoir in slot order.
pub fn sample_cells<I, S>(cells: I, spec: &SampleSpec, column: Option<ColumnRef>) -> ColumnValues
where
    I: IntoIterator<Item = Option<S>>,
    S: AsRef<str>,
{
    let mut null_count = 0u64;
    let mut values: Vec<String> = Vec::new();
    let non_null = cells.into_iter().filter_map(|cell| {
        if is_null(cell.as_ref().map(|c| c.as_ref())) {
            null_count += 1;
            None
        } else {
            cell
        }
    });

    match spec.strategy {
        SampleStrategy::Full => values.extend(non_null.map(|v| v.as_ref().to_string())),
        SampleStrategy::Head => {
            let mut kept = 0usize;
            for v in non_null {
                if kept < spec.size {
                    values.push(v.as_ref().to_string());
                    kept += 1;
                }
            }
        }
        SampleStrategy::Reservoir => {
            let k = spec.size;
            let mut rng = SplitMix64::new(spec.seed);
            for (i, v) in non_null.enumerate() {
                if i < k {
                    values.push(v.as_ref().to_string());
                } else {
                    let j = rng.below(i as u64 + 1) as usize;
                    if j < k {
                        values[j] = v.as_ref().to_string();
                    }
                }
            }
        }
    }

    let distinct_count = values.iter().collect::<HashSet<_>>().len() as u64;
    ColumnValues {
        column,
        values,
        null_count,
        distinct_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cells(vals: &[&str]) -> Vec<Option<String>> {
        vals.iter().map(|v| Some(v.to_string())).collect()
    }

    #[test]
    fn head_takes_prefix() {
        let out = sample_cells(cells(&["a", "b", "c"]), &SampleSpec::head(2), None);
        assert_eq!(out.values, vec!["a", "b"]);
    }

    #[test]
    fn all_null_column() {
        let mut c = cells(&["", "NULL", "null", "NaN"]);
        c.push(None);
        let out = sample_cells(c, &SampleSpec::default(), None);
        assert!(out.values.is_empty());
        assert_eq!(out.null_count, 5);
        assert_eq!(out.distinct_count, 0);
    }

    #[test]
    fn reservoir_is_deterministic_for_a_seed() {
        let col: Vec<Option<String>> = (0..1000).map(|i| Some(i.to_string())).collect();
        let spec = SampleSpec::reservoir(100, 7);
        let a = sample_cells(col.clone(), &spec, None);
        let b = sample_cells(col.clone(), &spec, None);
        assert_eq!(a.values.len(), 100);
        assert_eq!(a, b);
        let c = sample_cells(col, &SampleSpec::reservoir(100, 8), None);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn reservoir_larger_than_column_keeps_everything() {
        let out = sample_cells(cells(&["x", "y", "x"]), &SampleSpec::reservoir(10, 1), None);
        assert_eq!(out.values, vec!["x", "y", "x"]);
        assert_eq!(out.distinct_count, 2);
    }

    #[test]
    fn reservoir_is_roughly_uniform() {
        // each of 100 positions should be picked ~ 10/100 of the time
        let col: Vec<Option<String>> = (0..100).map(|i| Some(i.to_string())).collect();
        let mut hits = vec![0u32; 100];
        for seed in 0..2000 {
            for v in sample_cells(col.clone(), &SampleSpec::reservoir(10, seed), None).values {
                hits[v.parse::<usize>().unwrap()] += 1;
            }
        }
        // expected 200 per position; binomial sd ~ 13.4
        assert!(hits.iter().all(|&h| (130..=270).contains(&h)), "{hits:?}");
    }

    #[test]
    fn zero_size_is_rejected() {
        assert!(SampleSpec::reservoir(0, 1).validate().is_err());
        let mut full = SampleSpec::full();
        full.size = 0;
        assert!(full.validate().is_ok());
    }

    proptest! {
        #[test]
        fn samples_are_deterministic_and_contained(
            raw in proptest::collection::vec(prop_oneof![Just(String::new()), "[a-e]{1,3}"], 0..200),
            size in 1usize..50,
            seed in any::<u64>(),
            strategy in prop_oneof![Just(SampleStrategy::Full), Just(SampleStrategy::Head), Just(SampleStrategy::Reservoir)],
        ) {
            let col: Vec<Option<String>> = raw.iter().cloned().map(Some).collect();
            let spec = SampleSpec { strategy, size, seed };
            let a = sample_cells(col.clone(), &spec, None);
            let b = sample_cells(col, &spec, None);
            prop_assert_eq!(&a, &b);
            let non_null: Vec<&String> = raw.iter().filter(|v| !v.is_empty()).collect();
            prop_assert_eq!(a.null_count as usize, raw.len() - non_null.len());
            for v in &a.values {
                prop_assert!(non_null.contains(&v));
            }
            match strategy {
                SampleStrategy::Full => prop_assert_eq!(a.values.len(), non_null.len()),
                _ => prop_assert_eq!(a.values.len(), non_null.len().min(size)),
            }
        }
    }
}
