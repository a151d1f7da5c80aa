use serde::{Deserialize, Serialize};

use super::{format_number, AttributeDescriptor, AttributeKind, Cell, Dataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaKind {
    SumOf,
    /// First input minus the sum of the rest.
    DifferenceOf,
    WeightedSumOf,
}

/// A numeric attribute computed from other numeric attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedAttributeFormula {
    pub kind: FormulaKind,
    pub inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl DerivedAttributeFormula {
    pub fn sum_of(inputs: &[&str]) -> Self {
        Self {
            kind: FormulaKind::SumOf,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            weights: None,
        }
    }

    pub fn difference_of(minuend: &str, subtrahend: &str) -> Self {
        Self {
            kind: FormulaKind::DifferenceOf,
            inputs: vec![minuend.to_string(), subtrahend.to_string()],
            weights: None,
        }
    }

    pub fn weighted_sum_of(inputs: &[&str], weights: &[f64]) -> Self {
        Self {
            kind: FormulaKind::WeightedSumOf,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            weights: Some(weights.to_vec()),
        }
    }

    /// Column name of the derived attribute. Mentions every input.
    pub fn name(&self) -> String {
        match self.kind {
            FormulaKind::SumOf => format!("SUM({})", self.inputs.join(", ")),
            FormulaKind::DifferenceOf => self.inputs.join(" - "),
            FormulaKind::WeightedSumOf => {
                let weights = self.weights.as_deref().unwrap_or(&[]);
                let terms: Vec<String> = self
                    .inputs
                    .iter()
                    .enumerate()
                    .map(|(i, input)| {
                        let w = weights.get(i).copied().unwrap_or(1.0);
                        format!("{}*{input}", format_number(w))
                    })
                    .collect();
                format!("WEIGHTED({})", terms.join(", "))
            }
        }
    }

    pub fn validate(&self, d: &Dataset) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::UnknownAttribute("(no formula inputs)".into()));
        }
        if self.kind == FormulaKind::DifferenceOf && self.inputs.len() < 2 {
            return Err(Error::UnknownAttribute("(difference needs two inputs)".into()));
        }
        match (&self.kind, &self.weights) {
            (FormulaKind::WeightedSumOf, None) => {
                return Err(Error::WeightMismatch {
                    inputs: self.inputs.len(),
                    weights: 0,
                })
            }
            (_, Some(w)) if w.len() != self.inputs.len() => {
                return Err(Error::WeightMismatch {
                    inputs: self.inputs.len(),
                    weights: w.len(),
                })
            }
            _ => {}
        }
        for input in &self.inputs {
            let attr = d
                .schema()
                .get(input)
                .ok_or_else(|| Error::UnknownAttribute(input.clone()))?;
            if attr.kind != AttributeKind::Numeric {
                return Err(Error::AttributeKind {
                    attribute: input.clone(),
                    expected: "numeric",
                    actual: attr.kind.as_str(),
                });
            }
        }
        Ok(())
    }

    /// Row-wise values; a row with any missing input is missing.
    pub fn evaluate(&self, d: &Dataset) -> Result<Vec<Option<f64>>> {
        self.validate(d)?;
        let columns = self
            .inputs
            .iter()
            .map(|i| d.numeric_column(i))
            .collect::<Result<Vec<_>>>()?;
        let weights: Vec<f64> = match (self.kind, &self.weights) {
            (FormulaKind::DifferenceOf, _) => (0..self.inputs.len())
                .map(|i| if i == 0 { 1.0 } else { -1.0 })
                .collect(),
            (_, Some(w)) => w.clone(),
            (_, None) => vec![1.0; self.inputs.len()],
        };
        Ok((0..d.row_count())
            .map(|row| {
                columns
                    .iter()
                    .zip(&weights)
                    .try_fold(0.0, |acc, (col, w)| col[row].map(|v| acc + w * v))
            })
            .collect())
    }
}

/// A quantity to plot or filter on: a base attribute or a derived formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Attribute(String),
    Derived(DerivedAttributeFormula),
}

impl Measure {
    pub fn name(&self) -> String {
        match self {
            Measure::Attribute(a) => a.clone(),
            Measure::Derived(f) => f.name(),
        }
    }

    /// Base attributes this measure reads.
    pub fn inputs(&self) -> Vec<&str> {
        match self {
            Measure::Attribute(a) => vec![a.as_str()],
            Measure::Derived(f) => f.inputs.iter().map(String::as_str).collect(),
        }
    }
}

/// Returns a new dataset with the formula's column appended. Existing
/// columns are untouched; deriving a column that already exists returns an
/// identical copy.
pub fn derive_attribute(d: &Dataset, f: &DerivedAttributeFormula) -> Result<Dataset> {
    f.validate(d)?;
    if d.schema().index_of(&f.name()).is_some() {
        return Ok(d.clone());
    }
    let values = f.evaluate(d)?;
    let cells = values
        .into_iter()
        .map(|v| v.map_or(Cell::Missing, Cell::Number))
        .collect();
    let unit = f
        .inputs
        .iter()
        .map(|i| d.schema().get(i).and_then(|a| a.unit.clone()))
        .reduce(|a, b| if a == b { a } else { None })
        .flatten();
    Ok(d.with_column(
        AttributeDescriptor {
            name: f.name(),
            kind: AttributeKind::Numeric,
            unit,
        },
        cells,
    ))
}
