//! Typed tabular data: loading, schema inference, column statistics,
//! derived measures and row filters.

mod derive;
mod filter;
mod load;
mod stats;

pub use derive::{derive_attribute, DerivedAttributeFormula, FormulaKind, Measure};
pub use filter::{apply_filter, apply_filter_with, Comparator, Predicate, Threshold};
pub use load::{infer_schema, load_dataset, load_dataset_with_metadata, Metadata, ColumnOverride};
pub use stats::{column_stats, measure_stats, nearest_rank, ColumnStats, StatsCache};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::match_key;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    Categorical,
    Numeric,
    Temporal,
}

impl AttributeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttributeKind::Categorical => "categorical",
            AttributeKind::Numeric => "numeric",
            AttributeKind::Temporal => "temporal",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeDescriptor {
    pub name: String,
    pub kind: AttributeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

/// A schema: attribute descriptors in column order plus the column that
/// names individual entities (titles, athletes, states).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSchema {
    pub attributes: Vec<AttributeDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity: Option<String>,
}

impl DataSchema {
    pub fn new(attributes: Vec<AttributeDescriptor>) -> Result<Self> {
        let mut seen: Vec<(String, &str)> = Vec::with_capacity(attributes.len());
        for attr in &attributes {
            if attr.name.trim().is_empty() {
                return Err(Error::Metadata("empty column name".into()));
            }
            let key = match_key(&attr.name);
            if let Some((_, existing)) = seen.iter().find(|(k, _)| *k == key) {
                return Err(Error::DuplicateColumn {
                    name: attr.name.clone(),
                    existing: existing.to_string(),
                });
            }
            seen.push((key, &attr.name));
        }
        Ok(Self {
            attributes,
            entity: None,
        })
    }

    pub fn len(&self) -> usize {
        self.attributes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.attributes.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn get(&self, name: &str) -> Option<&AttributeDescriptor> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.attributes.iter().map(|a| a.name.as_str())
    }
}

/// One cell. Missing cells are explicit and never read as zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Missing,
    Number(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Number(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    /// Display form used for labels and value matching.
    pub fn display(&self) -> String {
        match self {
            Cell::Missing => String::new(),
            Cell::Number(v) => format_number(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Formats integers without a trailing `.0`.
pub fn format_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// An immutable table. Every row has exactly one cell per attribute.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: DataSchema,
    rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn new(schema: DataSchema, rows: Vec<Vec<Cell>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::MalformedRow {
                    row: i + 1,
                    message: format!("expected {} cells, found {}", schema.len(), row.len()),
                });
            }
            for (cell, attr) in row.iter().zip(&schema.attributes) {
                if let Cell::Number(v) = cell {
                    if !v.is_finite() {
                        return Err(Error::MalformedRow {
                            row: i + 1,
                            message: format!("non-finite number in '{}'", attr.name),
                        });
                    }
                }
            }
        }
        let mut ds = Self { schema, rows };
        if ds.schema.entity.is_none() {
            ds.schema.entity = ds.guess_entity();
        }
        Ok(ds)
    }

    pub fn schema(&self) -> &DataSchema {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// The categorical column that labels individual entities.
    pub fn entity_attribute(&self) -> Option<&str> {
        self.schema.entity.as_deref()
    }

    pub(crate) fn set_entity(&mut self, name: String) -> Result<()> {
        match self.schema.get(&name) {
            Some(a) if a.kind == AttributeKind::Categorical => {
                self.schema.entity = Some(name);
                Ok(())
            }
            Some(a) => Err(Error::AttributeKind {
                attribute: name,
                expected: "categorical",
                actual: a.kind.as_str(),
            }),
            None => Err(Error::UnknownAttribute(name)),
        }
    }

    /// Categorical column with the most distinct values; first wins ties.
    fn guess_entity(&self) -> Option<String> {
        let mut best: Option<(usize, &str)> = None;
        for (idx, attr) in self.schema.attributes.iter().enumerate() {
            if attr.kind != AttributeKind::Categorical {
                continue;
            }
            let mut distinct: Vec<&str> = self
                .rows
                .iter()
                .filter_map(|r| match &r[idx] {
                    Cell::Text(s) => Some(s.as_str()),
                    _ => None,
                })
                .collect();
            distinct.sort_unstable();
            distinct.dedup();
            if best.map_or(true, |(n, _)| distinct.len() > n) {
                best = Some((distinct.len(), &attr.name));
            }
        }
        best.map(|(_, name)| name.to_string())
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.schema
            .index_of(name)
            .ok_or_else(|| Error::UnknownAttribute(name.to_string()))
    }

    pub fn cell(&self, row: usize, column: usize) -> &Cell {
        &self.rows[row][column]
    }

    /// Numeric view of a column; `None` marks missing cells.
    pub fn numeric_column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let idx = self.column_index(name)?;
        let attr = &self.schema.attributes[idx];
        if attr.kind == AttributeKind::Categorical {
            return Err(Error::AttributeKind {
                attribute: name.to_string(),
                expected: "numeric",
                actual: attr.kind.as_str(),
            });
        }
        let values: Vec<Option<f64>> = self.rows.iter().map(|r| r[idx].as_f64()).collect();
        if attr.kind == AttributeKind::Temporal
            && self.rows.iter().any(|r| matches!(r[idx], Cell::Text(_)))
        {
            return Err(Error::AttributeKind {
                attribute: name.to_string(),
                expected: "numeric",
                actual: "temporal (dates)",
            });
        }
        Ok(values)
    }

    /// Values of a base or derived measure, computing derived ones on the fly
    /// when the dataset does not carry them yet.
    pub fn measure_values(&self, measure: &Measure) -> Result<Vec<Option<f64>>> {
        match measure {
            Measure::Attribute(name) => self.numeric_column(name),
            Measure::Derived(formula) => match self.schema.index_of(&formula.name()) {
                Some(_) => self.numeric_column(&formula.name()),
                None => formula.evaluate(self),
            },
        }
    }

    pub(crate) fn with_column(&self, attr: AttributeDescriptor, cells: Vec<Cell>) -> Self {
        debug_assert_eq!(cells.len(), self.rows.len());
        let mut schema = self.schema.clone();
        schema.attributes.push(attr);
        let rows = self
            .rows
            .iter()
            .zip(cells)
            .map(|(r, c)| {
                let mut r = r.clone();
                r.push(c);
                r
            })
            .collect();
        Self { schema, rows }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_normalized_names_are_rejected() {
        let attrs = vec![
            AttributeDescriptor {
                name: "Rating".into(),
                kind: AttributeKind::Numeric,
                unit: None,
            },
            AttributeDescriptor {
                name: "ratings".into(),
                kind: AttributeKind::Numeric,
                unit: None,
            },
        ];
        assert!(matches!(
            DataSchema::new(attrs),
            Err(Error::DuplicateColumn { .. })
        ));
    }

    #[test]
    fn entity_is_most_distinct_categorical() {
        let ds = load_dataset(b"Genre,Title,Score\nA,x,1\nA,y,2\nB,z,3\n").unwrap();
        assert_eq!(ds.entity_attribute(), Some("Title"));
    }

    #[test]
    fn numbers_format_without_trailing_zero() {
        assert_eq!(format_number(2021.0), "2021");
        assert_eq!(format_number(4.5), "4.5");
    }
}
