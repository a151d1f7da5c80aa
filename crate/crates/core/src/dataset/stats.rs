use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AttributeKind, Dataset, Measure};
use crate::error::{Error, Result};

/// Summary statistics over the non-missing cells of one numeric column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub attribute: String,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub distinct_count: usize,
    #[serde(skip)]
    sorted: Vec<f64>,
}

/// Nearest-rank percentile of an ascending slice: the smallest value such
/// that at least `p` percent of the data is less than or equal to it.
/// `p = 0` yields the minimum.
pub fn nearest_rank(sorted: &[f64], p: f64) -> Result<f64> {
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::PercentileRange(p));
    }
    let n = sorted.len();
    if n == 0 {
        return Err(Error::NoValues(String::new()));
    }
    let rank = (p * n as f64 / 100.0).ceil() as usize;
    Ok(sorted[rank.clamp(1, n) - 1])
}

impl ColumnStats {
    pub fn from_values(attribute: &str, values: &[Option<f64>]) -> Result<Self> {
        let mut sorted: Vec<f64> = values.iter().flatten().copied().collect();
        if sorted.is_empty() {
            return Err(Error::NoValues(attribute.to_string()));
        }
        sorted.sort_by(f64::total_cmp);
        let count = sorted.len();
        let mean = sorted.iter().sum::<f64>() / count as f64;
        let mut distinct = sorted.clone();
        distinct.dedup();
        Ok(Self {
            attribute: attribute.to_string(),
            count,
            mean,
            median: nearest_rank(&sorted, 50.0)?,
            min: sorted[0],
            max: sorted[count - 1],
            distinct_count: distinct.len(),
            sorted,
        })
    }

    pub fn percentile(&self, p: f64) -> Result<f64> {
        nearest_rank(&self.sorted, p)
    }
}

/// Statistics for a base numeric (or year-valued temporal) attribute.
pub fn column_stats(d: &Dataset, attr: &str) -> Result<ColumnStats> {
    let values = d.numeric_column(attr)?;
    ColumnStats::from_values(attr, &values)
}

/// Statistics for a base or derived measure.
pub fn measure_stats(d: &Dataset, measure: &Measure) -> Result<ColumnStats> {
    let values = d.measure_values(measure)?;
    ColumnStats::from_values(&measure.name(), &values)
}

/// Precomputed statistics for every numeric column of a dataset.
#[derive(Debug, Clone, Default)]
pub struct StatsCache {
    by_attribute: BTreeMap<String, ColumnStats>,
}

impl StatsCache {
    pub fn build(d: &Dataset) -> Self {
        let by_attribute = d
            .schema()
            .attributes
            .iter()
            .filter(|a| a.kind != AttributeKind::Categorical)
            .filter_map(|a| column_stats(d, &a.name).ok().map(|s| (a.name.clone(), s)))
            .collect();
        Self { by_attribute }
    }

    pub fn get(&self, attr: &str) -> Option<&ColumnStats> {
        self.by_attribute.get(attr)
    }

    /// Cached stats for base attributes, computed on demand for derived ones.
    pub fn for_measure(&self, d: &Dataset, measure: &Measure) -> Result<ColumnStats> {
        match measure {
            Measure::Attribute(name) => match self.get(name) {
                Some(s) => Ok(s.clone()),
                None => column_stats(d, name),
            },
            Measure::Derived(_) => measure_stats(d, measure),
        }
    }
}
