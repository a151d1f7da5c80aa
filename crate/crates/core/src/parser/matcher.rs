use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeKind, Cell, Dataset};
use crate::error::{Error, Result};
use crate::text::{edit_distance_at_most_one, match_key};

/// A categorical (or temporal) cell value named in an utterance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ValueMatch {
    pub attribute: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "match", rename_all = "lowercase")]
pub enum ReferenceMatch {
    Attribute { attribute: String },
    Value(ValueMatch),
    None,
}

/// Trailing nouns that name a measure's unit rather than the measure
/// ("silver medals" for `Silver`).
const MEASURE_NOUNS: &[&str] = &[
    "medal", "score", "value", "count", "total", "figure", "amount", "number", "level", "point",
];

/// Lookup tables from normalized keys to schema attributes and cell values.
#[derive(Debug, Clone)]
pub struct SchemaIndex {
    attributes: Vec<(String, String)>,
    values: BTreeMap<String, BTreeSet<ValueMatch>>,
    entity: Option<String>,
    fuzzy: bool,
}

impl SchemaIndex {
    pub fn new(d: &Dataset, fuzzy: bool) -> Self {
        let schema = d.schema();
        let attributes = schema
            .attributes
            .iter()
            .map(|a| (match_key(&a.name), a.name.clone()))
            .collect();
        let mut values: BTreeMap<String, BTreeSet<ValueMatch>> = BTreeMap::new();
        for (idx, attr) in schema.attributes.iter().enumerate() {
            if attr.kind == AttributeKind::Numeric {
                continue;
            }
            for row in d.rows() {
                let cell = &row[idx];
                if matches!(cell, Cell::Missing) {
                    continue;
                }
                let text = cell.display();
                let m = ValueMatch {
                    attribute: attr.name.clone(),
                    value: text.clone(),
                };
                let key = match_key(&text);
                if key.is_empty() {
                    continue;
                }
                values.entry(key).or_default().insert(m.clone());
                for article in ["the ", "a ", "an "] {
                    if let Some(rest) = text.to_lowercase().strip_prefix(article) {
                        let k = match_key(rest);
                        if !k.is_empty() {
                            values.entry(k).or_default().insert(m.clone());
                        }
                    }
                }
            }
        }
        Self {
            attributes,
            values,
            entity: d.entity_attribute().map(str::to_string),
            fuzzy,
        }
    }

    pub fn entity(&self) -> Option<&str> {
        self.entity.as_deref()
    }

    pub(crate) fn attribute_key_matches(&self, key: &str) -> bool {
        self.attributes.iter().any(|(k, _)| k == key)
    }

    /// Attribute whose normalized name equals `key`, retrying without a
    /// trailing measure noun and, when enabled, at edit distance one.
    pub fn lookup_attribute(&self, words: &[String]) -> Result<Option<String>> {
        let mut words: Vec<&str> = words.iter().map(String::as_str).collect();
        loop {
            let key: String = words.concat();
            if key.is_empty() {
                return Ok(None);
            }
            if let Some((_, name)) = self.attributes.iter().find(|(k, _)| *k == key) {
                return Ok(Some(name.clone()));
            }
            if self.fuzzy && key.chars().count() >= 4 {
                let near: Vec<&String> = self
                    .attributes
                    .iter()
                    .filter(|(k, _)| edit_distance_at_most_one(k, &key))
                    .map(|(_, n)| n)
                    .collect();
                match near.len() {
                    0 => {}
                    1 => return Ok(Some(near[0].clone())),
                    _ => {
                        return Err(Error::Ambiguous {
                            phrase: words.join(" "),
                            candidates: near.into_iter().cloned().collect(),
                        })
                    }
                }
            }
            match words.last() {
                Some(last) if words.len() > 1 && MEASURE_NOUNS.contains(last) => {
                    words.pop();
                }
                _ => return Ok(None),
            }
        }
    }

    /// Cell values whose normalized text equals `key`.
    pub fn lookup_value(&self, key: &str) -> Result<Option<ValueMatch>> {
        if key.is_empty() {
            return Ok(None);
        }
        let found = match self.values.get(key) {
            Some(found) => found.clone(),
            None if self.fuzzy && key.chars().count() >= 5 => self
                .values
                .iter()
                .filter(|(k, _)| edit_distance_at_most_one(k, key))
                .flat_map(|(_, v)| v.iter().cloned())
                .collect(),
            None => BTreeSet::new(),
        };
        let mut distinct: Vec<ValueMatch> = found.into_iter().collect();
        // The same text under several spellings collapses to one value.
        distinct.dedup_by(|a, b| a.attribute == b.attribute && match_key(&a.value) == match_key(&b.value));
        match distinct.len() {
            0 => Ok(None),
            1 => Ok(distinct.pop()),
            _ => Err(Error::Ambiguous {
                phrase: key.to_string(),
                candidates: distinct
                    .iter()
                    .map(|m| format!("{} = {}", m.attribute, m.value))
                    .collect(),
            }),
        }
    }
}

/// Matches a phrase against attribute names first, then categorical cell
/// values, after normalization.
pub fn match_reference(phrase: &str, d: &Dataset) -> Result<ReferenceMatch> {
    match_reference_in(&SchemaIndex::new(d, false), phrase)
}

pub fn match_reference_in(index: &SchemaIndex, phrase: &str) -> Result<ReferenceMatch> {
    let words = crate::text::normalize_words(phrase);
    if let Some(attribute) = index.lookup_attribute(&words)? {
        return Ok(ReferenceMatch::Attribute { attribute });
    }
    Ok(match index.lookup_value(&match_key(phrase))? {
        Some(m) => ReferenceMatch::Value(m),
        None => ReferenceMatch::None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_dataset;

    fn netflix() -> Dataset {
        load_dataset(
            b"Title,Genre,Rated,IMDB rating\nSquid Game,Thriller,TV-MA,8\nThe Starling,Drama,PG-13,6.4\nDark,Thriller,TV-MA,8.7\n",
        )
        .unwrap()
    }

    #[test]
    fn attribute_with_plural_and_case() {
        assert_eq!(
            match_reference("IMDB ratings", &netflix()).unwrap(),
            ReferenceMatch::Attribute {
                attribute: "IMDB rating".into()
            }
        );
    }

    #[test]
    fn value_under_title() {
        assert_eq!(
            match_reference("squid game", &netflix()).unwrap(),
            ReferenceMatch::Value(ValueMatch {
                attribute: "Title".into(),
                value: "Squid Game".into()
            })
        );
        assert!(matches!(
            match_reference("Starling", &netflix()).unwrap(),
            ReferenceMatch::Value(ValueMatch { ref value, .. }) if value == "The Starling"
        ));
    }

    #[test]
    fn unknown_is_no_match() {
        assert_eq!(match_reference("popularity", &netflix()).unwrap(), ReferenceMatch::None);
    }

    #[test]
    fn same_value_in_two_columns_is_ambiguous() {
        let d = load_dataset(b"Name,Home,Away\nx,Lyon,Paris\ny,Paris,Nice\n").unwrap();
        assert!(matches!(match_reference("paris", &d), Err(Error::Ambiguous { .. })));
    }

    #[test]
    fn measure_noun_is_dropped() {
        let d = load_dataset(b"Name,Silver\nx,1\n").unwrap();
        assert_eq!(
            match_reference("silver medals", &d).unwrap(),
            ReferenceMatch::Attribute {
                attribute: "Silver".into()
            }
        );
    }

    #[test]
    fn fuzzy_matching_is_opt_in() {
        let d = netflix();
        let strict = SchemaIndex::new(&d, false);
        let fuzzy = SchemaIndex::new(&d, true);
        assert_eq!(match_reference_in(&strict, "thriler").unwrap(), ReferenceMatch::None);
        assert!(matches!(
            match_reference_in(&fuzzy, "thriler").unwrap(),
            ReferenceMatch::Value(ValueMatch { ref value, .. }) if value == "Thriller"
        ));
    }
}
