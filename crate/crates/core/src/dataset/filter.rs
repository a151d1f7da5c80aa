use std::fmt;

use serde::{Deserialize, Serialize};

use super::{format_number, ColumnStats, Dataset, Measure};
use crate::error::{Error, Result};
use crate::par::{self, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Gt => ">",
            Comparator::Lt => "<",
            Comparator::Ge => ">=",
            Comparator::Le => "<=",
            Comparator::Eq => "=",
        }
    }

    pub fn holds(self, value: f64, threshold: f64) -> bool {
        match self {
            Comparator::Gt => value > threshold,
            Comparator::Lt => value < threshold,
            Comparator::Ge => value >= threshold,
            Comparator::Le => value <= threshold,
            Comparator::Eq => value == threshold,
        }
    }
}

/// Threshold policy; everything except a constant needs column statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase")]
pub enum Threshold {
    Mean,
    Median,
    Percentile { p: f64 },
    Constant { value: f64 },
}

impl Threshold {
    pub fn resolve(&self, stats: Option<&ColumnStats>) -> Result<f64> {
        match (self, stats) {
            (Threshold::Constant { value }, _) => Ok(*value),
            (Threshold::Mean, Some(s)) => Ok(s.mean),
            (Threshold::Median, Some(s)) => Ok(s.median),
            (Threshold::Percentile { p }, Some(s)) => s.percentile(*p),
            (_, None) => Err(Error::UnresolvableThreshold(self.to_string())),
        }
    }

    pub fn needs_stats(&self) -> bool {
        !matches!(self, Threshold::Constant { .. })
    }

    fn describe(&self, measure: &str) -> String {
        match self {
            Threshold::Mean => format!("mean({measure})"),
            Threshold::Median => format!("median({measure})"),
            Threshold::Percentile { p } => format!("P{}({measure})", format_number(*p)),
            Threshold::Constant { value } => format_number(*value),
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Mean => write!(f, "mean"),
            Threshold::Median => write!(f, "median"),
            Threshold::Percentile { p } => write!(f, "percentile {}", format_number(*p)),
            Threshold::Constant { value } => write!(f, "{}", format_number(*value)),
        }
    }
}

/// `measure comparator threshold`, e.g. `Height > mean(Height)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub measure: Measure,
    pub comparator: Comparator,
    pub threshold: Threshold,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl Predicate {
    pub fn new(measure: Measure, comparator: Comparator, threshold: Threshold) -> Self {
        Self {
            measure,
            comparator,
            threshold,
            unit: None,
        }
    }

    pub fn attribute(&self) -> String {
        self.measure.name()
    }

    /// Replaces a statistical threshold with the constant it resolves to.
    pub fn to_constant(&self, stats: Option<&ColumnStats>) -> Result<Predicate> {
        Ok(Predicate {
            threshold: Threshold::Constant {
                value: self.threshold.resolve(stats)?,
            },
            ..self.clone()
        })
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.measure.name();
        write!(
            f,
            "{name} {} {}",
            self.comparator.symbol(),
            self.threshold.describe(&name)
        )?;
        if let (Threshold::Constant { .. }, Some(unit)) = (&self.threshold, &self.unit) {
            write!(f, " {unit}")?;
        }
        Ok(())
    }
}

/// Rows whose measure satisfies the predicate. Missing cells never match.
pub fn apply_filter(d: &Dataset, p: &Predicate, stats: Option<&ColumnStats>) -> Result<Vec<usize>> {
    apply_filter_with(d, p, stats, Execution::Sequential)
}

pub fn apply_filter_with(
    d: &Dataset,
    p: &Predicate,
    stats: Option<&ColumnStats>,
    exec: Execution,
) -> Result<Vec<usize>> {
    let values = d.measure_values(&p.measure)?;
    let threshold = p.threshold.resolve(stats)?;
    let cmp = p.comparator;
    Ok(par::filter_indices(values.len(), exec, |i| {
        values[i].is_some_and(|v| cmp.holds(v, threshold))
    }))
}
