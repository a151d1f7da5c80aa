use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AttributeDescriptor, AttributeKind, Cell, DataSchema, Dataset};
use crate::error::{Error, Result};
use crate::text::normalize_words;

/// Sidecar document describing columns: kind and unit overrides plus an
/// optional entity column.
///
/// ```json
/// { "entity": "Name", "columns": { "Height": { "kind": "numeric", "unit": "cm" } } }
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity: Option<String>,
    #[serde(default)]
    pub columns: BTreeMap<String, ColumnOverride>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<AttributeKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl Metadata {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| Error::Metadata(e.to_string()))
    }
}

fn is_missing(raw: &str) -> bool {
    raw.trim().is_empty()
}

fn parse_number(raw: &str) -> Option<f64> {
    raw.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

fn parse_year(raw: &str) -> Option<f64> {
    let t = raw.trim();
    if t.len() == 4 && t.bytes().all(|b| b.is_ascii_digit()) {
        let y: u32 = t.parse().ok()?;
        (1000..=2999).contains(&y).then_some(y as f64)
    } else {
        None
    }
}

fn is_iso_date(raw: &str) -> bool {
    let b = raw.trim().as_bytes();
    let digits = |r: std::ops::Range<usize>| b[r].iter().all(u8::is_ascii_digit);
    if b.len() != 10 || b[4] != b'-' || b[7] != b'-' {
        return false;
    }
    if !(digits(0..4) && digits(5..7) && digits(8..10)) {
        return false;
    }
    let month: u32 = raw.trim()[5..7].parse().unwrap_or(0);
    let day: u32 = raw.trim()[8..10].parse().unwrap_or(0);
    (1..=12).contains(&month) && (1..=31).contains(&day)
}

const TIME_WORDS: &[&str] = &["year", "date", "time", "day", "period", "season", "released"];

fn names_time(header: &str) -> bool {
    normalize_words(header)
        .iter()
        .any(|w| TIME_WORDS.contains(&w.as_str()))
}

/// Infers a kind per column from the header and sample rows.
///
/// ISO dates make a column temporal. Columns of four-digit years are
/// temporal when the header names a time unit; otherwise they stay numeric so
/// that e.g. a price column of four-digit values is not misread as years.
pub fn infer_schema(header: &[String], sample: &[Vec<String>]) -> Result<DataSchema> {
    if header.is_empty() {
        return Err(Error::EmptyInput);
    }
    let attributes = header
        .iter()
        .enumerate()
        .map(|(idx, name)| {
            let cells: Vec<&str> = sample
                .iter()
                .filter_map(|r| r.get(idx).map(String::as_str))
                .filter(|c| !is_missing(c))
                .collect();
            let kind = if cells.is_empty() {
                AttributeKind::Categorical
            } else if cells.iter().all(|c| is_iso_date(c))
                || (names_time(name) && cells.iter().all(|c| parse_year(c).is_some()))
            {
                AttributeKind::Temporal
            } else if cells.iter().all(|c| parse_number(c).is_some()) {
                AttributeKind::Numeric
            } else {
                AttributeKind::Categorical
            };
            AttributeDescriptor {
                name: name.trim().to_string(),
                kind,
                unit: None,
            }
        })
        .collect();
    DataSchema::new(attributes)
}

/// Parses RFC-4180 CSV with a header row into a dataset with an inferred
/// schema. Row order is preserved.
pub fn load_dataset(bytes: &[u8]) -> Result<Dataset> {
    load_dataset_with_metadata(bytes, None)
}

pub fn load_dataset_with_metadata(bytes: &[u8], metadata: Option<&Metadata>) -> Result<Dataset> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Err(Error::EmptyInput);
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes);
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(Error::EmptyInput);
    }
    let mut raw_rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::MalformedRow {
            row: i + 1,
            message: e.to_string(),
        })?;
        if record.len() != header.len() {
            return Err(Error::MalformedRow {
                row: i + 1,
                message: format!("expected {} cells, found {}", header.len(), record.len()),
            });
        }
        raw_rows.push(record.iter().map(|c| c.trim().to_string()).collect::<Vec<_>>());
    }

    let mut schema = infer_schema(&header, &raw_rows)?;
    if let Some(meta) = metadata {
        for (name, ov) in &meta.columns {
            let attr = schema
                .attributes
                .iter_mut()
                .find(|a| &a.name == name)
                .ok_or_else(|| Error::Metadata(format!("unknown column '{name}'")))?;
            if let Some(kind) = ov.kind {
                attr.kind = kind;
            }
            if ov.unit.is_some() {
                attr.unit = ov.unit.clone();
            }
        }
    }

    let rows = raw_rows
        .into_iter()
        .enumerate()
        .map(|(i, raw)| {
            raw.into_iter()
                .zip(&schema.attributes)
                .map(|(c, attr)| convert(i + 1, &c, attr))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut ds = Dataset::new(schema, rows)?;
    if let Some(entity) = metadata.and_then(|m| m.entity.clone()) {
        ds.set_entity(entity)?;
    }
    Ok(ds)
}

fn convert(row: usize, raw: &str, attr: &AttributeDescriptor) -> Result<Cell> {
    if is_missing(raw) {
        return Ok(Cell::Missing);
    }
    match attr.kind {
        AttributeKind::Categorical => Ok(Cell::Text(raw.to_string())),
        AttributeKind::Numeric => parse_number(raw).map(Cell::Number).ok_or_else(|| {
            Error::MalformedRow {
                row,
                message: format!("'{raw}' in numeric column '{}' is not a number", attr.name),
            }
        }),
        AttributeKind::Temporal => {
            if let Some(y) = parse_year(raw) {
                Ok(Cell::Number(y))
            } else if is_iso_date(raw) {
                Ok(Cell::Text(raw.to_string()))
            } else {
                Err(Error::MalformedRow {
                    row,
                    message: format!("'{raw}' in temporal column '{}' is not a year or date", attr.name),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn header_only_file_has_no_rows() {
        let ds = load_dataset(b"a,b\n").unwrap();
        assert_eq!(ds.row_count(), 0);
        assert_eq!(ds.schema().len(), 2);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(load_dataset(b""), Err(Error::EmptyInput)));
        assert!(matches!(load_dataset(b"  \n"), Err(Error::EmptyInput)));
    }

    #[test]
    fn short_row_names_its_index() {
        let err = load_dataset(b"a,b\n1,2\n3\n").unwrap_err();
        match err {
            Error::MalformedRow { row, .. } => assert_eq!(row, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn kinds_are_inferred() {
        let header = strings(&["Year", "Title", "Price", "Date"]);
        let rows = vec![
            strings(&["2012", "Squid Game", "8", "2021-09-17"]),
            strings(&["2015", "Dark", "12.5", ""]),
        ];
        let schema = infer_schema(&header, &rows).unwrap();
        let kinds: Vec<_> = schema.attributes.iter().map(|a| a.kind).collect();
        assert_eq!(
            kinds,
            [
                AttributeKind::Temporal,
                AttributeKind::Categorical,
                AttributeKind::Numeric,
                AttributeKind::Temporal
            ]
        );
    }

    #[test]
    fn year_like_values_without_time_header_stay_numeric() {
        let schema = infer_schema(&strings(&["Price"]), &[strings(&["1999"]), strings(&["2500"])]).unwrap();
        assert_eq!(schema.attributes[0].kind, AttributeKind::Numeric);
    }

    #[test]
    fn missing_cells_are_explicit() {
        let ds = load_dataset(b"name,score\na,\nb,3\n").unwrap();
        assert_eq!(ds.schema().attributes[1].kind, AttributeKind::Numeric);
        assert!(ds.cell(0, 1).is_missing());
        assert_eq!(ds.cell(1, 1).as_f64(), Some(3.0));
    }

    #[test]
    fn duplicate_columns_fail() {
        assert!(matches!(
            load_dataset(b"Price,price\n1,2\n"),
            Err(Error::DuplicateColumn { .. })
        ));
    }

    #[test]
    fn metadata_overrides_kind_unit_and_entity() {
        let meta = Metadata::from_json(
            br#"{"entity":"Team","columns":{"Height":{"unit":"cm"},"Code":{"kind":"categorical"}}}"#,
        )
        .unwrap();
        let ds = load_dataset_with_metadata(
            b"Name,Team,Code,Height\nA,X,1,180\nB,X,2,170\n",
            Some(&meta),
        )
        .unwrap();
        let s = ds.schema();
        assert_eq!(s.get("Height").unwrap().unit.as_deref(), Some("cm"));
        assert_eq!(s.get("Code").unwrap().kind, AttributeKind::Categorical);
        assert_eq!(ds.entity_attribute(), Some("Team"));
    }

    #[test]
    fn quoted_fields_follow_rfc4180() {
        let ds = load_dataset(b"Name,Price\n\"Pride, and \"\"Prejudice\"\"\",9\n").unwrap();
        assert_eq!(ds.cell(0, 0).display(), "Pride, and \"Prejudice\"");
    }
}
