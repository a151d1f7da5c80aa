use serde::{Deserialize, Serialize};

use super::{AttributeRefKind, AttributeReference, Plurality, ValueReference};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cardinality {
    #[serde(rename = "1-1")]
    OneToOne,
    #[serde(rename = "1-n")]
    OneToMany,
    #[serde(rename = "n")]
    Many,
    #[serde(rename = "n-m")]
    ManyToMany,
}

impl Cardinality {
    pub const ALL: [Cardinality; 4] = [
        Cardinality::OneToOne,
        Cardinality::OneToMany,
        Cardinality::Many,
        Cardinality::ManyToMany,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Cardinality::OneToOne => "1-1",
            Cardinality::OneToMany => "1-n",
            Cardinality::Many => "n",
            Cardinality::ManyToMany => "n-m",
        }
    }
}

impl std::fmt::Display for Cardinality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Cardinality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Cardinality::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnsupportedArity(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Explicit,
    Implicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConcretenessCell {
    #[serde(rename = "ev-ea")]
    EvEa,
    #[serde(rename = "ev-ia")]
    EvIa,
    #[serde(rename = "iv-ea")]
    IvEa,
    #[serde(rename = "iv-ia")]
    IvIa,
}

impl ConcretenessCell {
    pub const ALL: [ConcretenessCell; 4] = [
        ConcretenessCell::EvEa,
        ConcretenessCell::EvIa,
        ConcretenessCell::IvEa,
        ConcretenessCell::IvIa,
    ];

    pub fn of(values: Level, attribute: Level) -> Self {
        match (values, attribute) {
            (Level::Explicit, Level::Explicit) => ConcretenessCell::EvEa,
            (Level::Explicit, Level::Implicit) => ConcretenessCell::EvIa,
            (Level::Implicit, Level::Explicit) => ConcretenessCell::IvEa,
            (Level::Implicit, Level::Implicit) => ConcretenessCell::IvIa,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ConcretenessCell::EvEa => "ev-ea",
            ConcretenessCell::EvIa => "ev-ia",
            ConcretenessCell::IvEa => "iv-ea",
            ConcretenessCell::IvIa => "iv-ia",
        }
    }
}

impl std::fmt::Display for ConcretenessCell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Concreteness {
    pub values: Level,
    pub attribute: Level,
    pub cell: ConcretenessCell,
    pub mixed_flag: bool,
}

/// Two singletons are 1-1, a singleton and a set 1-n, one set n and two
/// sets n-m.
pub fn classify_cardinality(refs: &[ValueReference]) -> Result<Cardinality> {
    let sets = refs.iter().filter(|r| r.plurality == Plurality::Set).count();
    match (refs.len(), sets) {
        (0, _) => Err(Error::UnsupportedArity("no value references".into())),
        (1, 1) => Ok(Cardinality::Many),
        (1, _) => Err(Error::UnsupportedArity(
            "a single entity has nothing to be compared with".into(),
        )),
        (2, 0) => Ok(Cardinality::OneToOne),
        (2, 1) => Ok(Cardinality::OneToMany),
        (2, _) => Ok(Cardinality::ManyToMany),
        (n, _) => Err(Error::UnsupportedArity(format!(
            "{n} reference groups; at most two are supported"
        ))),
    }
}

pub fn classify_concreteness(refs: &[ValueReference], attr: &AttributeReference) -> Concreteness {
    let explicit = refs.iter().filter(|r| r.is_explicit()).count();
    let values = if explicit == refs.len() {
        Level::Explicit
    } else {
        Level::Implicit
    };
    let attribute = match attr.kind {
        AttributeRefKind::Explicit { .. } => Level::Explicit,
        AttributeRefKind::Implicit { .. } => Level::Implicit,
    };
    Concreteness {
        values,
        attribute,
        cell: ConcretenessCell::of(values, attribute),
        mixed_flag: explicit != 0 && explicit != refs.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{ValueKind, ValueMatch};

    fn explicit(plurality: Plurality) -> ValueReference {
        ValueReference {
            surface: "x".into(),
            kind: ValueKind::Explicit {
                matches: vec![ValueMatch {
                    attribute: "Title".into(),
                    value: "x".into(),
                }],
            },
            plurality,
            excludes_singleton: false,
        }
    }

    fn implicit(plurality: Plurality) -> ValueReference {
        ValueReference {
            surface: "cheap book".into(),
            kind: ValueKind::Implicit {
                phrase: "cheap book".into(),
                modifier: Some("cheap".into()),
                scope: vec![],
            },
            plurality,
            excludes_singleton: false,
        }
    }

    #[test]
    fn cardinality_table() {
        use Plurality::*;
        assert_eq!(classify_cardinality(&[explicit(Singleton), explicit(Singleton)]).unwrap(), Cardinality::OneToOne);
        assert_eq!(classify_cardinality(&[explicit(Singleton), explicit(Set)]).unwrap(), Cardinality::OneToMany);
        assert_eq!(classify_cardinality(&[explicit(Set)]).unwrap(), Cardinality::Many);
        assert_eq!(classify_cardinality(&[explicit(Set), implicit(Set)]).unwrap(), Cardinality::ManyToMany);
        assert!(classify_cardinality(&vec![explicit(Singleton); 3]).is_err());
        assert!(classify_cardinality(&[explicit(Singleton)]).is_err());
    }

    #[test]
    fn mixed_values_are_implicit_and_flagged() {
        let attr = AttributeReference {
            surface: "price".into(),
            kind: AttributeRefKind::Explicit {
                attribute: "Price".into(),
            },
        };
        let c = classify_concreteness(&[explicit(Plurality::Singleton), implicit(Plurality::Singleton)], &attr);
        assert_eq!(c.cell, ConcretenessCell::IvEa);
        assert!(c.mixed_flag);
        let c = classify_concreteness(&[explicit(Plurality::Singleton)], &attr);
        assert_eq!(c.cell, ConcretenessCell::EvEa);
        assert!(!c.mixed_flag);
    }
}
