//! The sixteen chart designs, four per cardinality, and their preference
//! tiers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parser::Cardinality;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DesignId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
    K,
    L,
    M,
    N,
    O,
    P,
}

impl DesignId {
    pub const ALL: [DesignId; 16] = [
        DesignId::A,
        DesignId::B,
        DesignId::C,
        DesignId::D,
        DesignId::E,
        DesignId::F,
        DesignId::G,
        DesignId::H,
        DesignId::I,
        DesignId::J,
        DesignId::K,
        DesignId::L,
        DesignId::M,
        DesignId::N,
        DesignId::O,
        DesignId::P,
    ];

    pub fn letter(self) -> char {
        (b'A' + self as u8) as char
    }

    pub fn cardinality(self) -> Cardinality {
        Cardinality::ALL[self as usize / 4]
    }

    pub fn from_letter(c: char) -> Option<Self> {
        let i = (c.to_ascii_uppercase() as u32).checked_sub('A' as u32)? as usize;
        DesignId::ALL.get(i).copied()
    }
}

impl fmt::Display for DesignId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartType {
    Bar,
    Unit,
    Dot,
    Scatter,
    Box,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Vertical,
    Horizontal,
    #[serde(rename = "n/a")]
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arrangement {
    Single,
    Grouped,
    StackedAdjacent,
    SmallMultiples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnnotationRule {
    ValueLabelsOnBars,
    LargeValueLabels,
    HighlightQuerySingleton,
    LegendForImplicitTitles,
    SortedDescending,
    AggregateLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignDescriptor {
    pub id: DesignId,
    pub cardinality: Cardinality,
    pub name: String,
    pub chart_type: ChartType,
    pub orientation: Orientation,
    pub arrangement: Arrangement,
    pub annotation_rules: Vec<AnnotationRule>,
}

impl DesignDescriptor {
    pub fn has(&self, rule: AnnotationRule) -> bool {
        self.annotation_rules.contains(&rule)
    }

    /// Whether the design shows an aggregate of the set instead of its rows.
    pub fn aggregates(&self) -> bool {
        self.has(AnnotationRule::AggregateLabel)
    }
}

fn d(
    id: DesignId,
    name: &'static str,
    chart_type: ChartType,
    orientation: Orientation,
    arrangement: Arrangement,
    rules: &[AnnotationRule],
) -> DesignDescriptor {
    DesignDescriptor {
        id,
        cardinality: id.cardinality(),
        name: name.to_string(),
        chart_type,
        orientation,
        arrangement,
        annotation_rules: rules.to_vec(),
    }
}

/// The fixed catalog in letter order.
pub fn design_catalog() -> Vec<DesignDescriptor> {
    use AnnotationRule::*;
    use Arrangement::*;
    use ChartType::*;
    use DesignId as Id;
    use Orientation::*;
    vec![
        d(Id::A, "simple bar chart", Bar, Vertical, Single, &[ValueLabelsOnBars, LegendForImplicitTitles]),
        d(Id::B, "adjacent unit chart", Unit, Vertical, StackedAdjacent, &[LargeValueLabels, LegendForImplicitTitles]),
        d(Id::C, "horizontal unit chart", Unit, Horizontal, Single, &[ValueLabelsOnBars, LegendForImplicitTitles]),
        d(Id::D, "grouped bar chart", Bar, Vertical, Grouped, &[LegendForImplicitTitles]),
        d(Id::E, "horizontal multi-bar chart", Bar, Horizontal, Single, &[SortedDescending, HighlightQuerySingleton, LegendForImplicitTitles]),
        d(Id::F, "horizontal simple bar chart", Bar, Horizontal, Single, &[ValueLabelsOnBars, HighlightQuerySingleton, AggregateLabel, LegendForImplicitTitles]),
        d(Id::G, "dot plot", Dot, Horizontal, Single, &[SortedDescending, HighlightQuerySingleton, LegendForImplicitTitles]),
        d(Id::H, "scatterplot", Scatter, NotApplicable, Single, &[HighlightQuerySingleton, LegendForImplicitTitles]),
        d(Id::I, "horizontal multi-bar chart", Bar, Horizontal, Single, &[SortedDescending, LegendForImplicitTitles]),
        d(Id::J, "small multiples bar chart", Bar, Vertical, SmallMultiples, &[SortedDescending, LegendForImplicitTitles]),
        d(Id::K, "scatterplot", Scatter, NotApplicable, Single, &[LegendForImplicitTitles]),
        d(Id::L, "box plot", ChartType::Box, Vertical, Single, &[LegendForImplicitTitles]),
        d(Id::M, "grouped bar chart", Bar, Vertical, Grouped, &[SortedDescending, LegendForImplicitTitles]),
        d(Id::N, "small multiples bar chart", Bar, Vertical, SmallMultiples, &[SortedDescending, LegendForImplicitTitles]),
        d(Id::O, "simple vertical bar chart", Bar, Vertical, Single, &[ValueLabelsOnBars, AggregateLabel, LegendForImplicitTitles]),
        d(Id::P, "scatterplot", Scatter, NotApplicable, Single, &[LegendForImplicitTitles]),
    ]
}

pub fn lookup(id: DesignId) -> DesignDescriptor {
    design_catalog().swap_remove(id as usize)
}

/// Preference tiers per cardinality, most preferred first. Letters within a
/// tier are tied.
pub fn preference_tiers(c: Cardinality) -> Vec<Vec<DesignId>> {
    use DesignId::*;
    match c {
        Cardinality::OneToOne => vec![vec![A, B], vec![C, D]],
        Cardinality::OneToMany => vec![vec![E], vec![F], vec![G, H]],
        Cardinality::Many => vec![vec![I, J], vec![K], vec![L]],
        Cardinality::ManyToMany => vec![vec![M, N, O], vec![P]],
    }
}

/// Catalog and tier table in one auditable document.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogDocument {
    pub designs: Vec<DesignDescriptor>,
    pub tiers: Vec<TierRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TierRow {
    pub cardinality: Cardinality,
    pub tiers: Vec<Vec<DesignId>>,
}

pub fn catalog_document() -> CatalogDocument {
    CatalogDocument {
        designs: design_catalog(),
        tiers: Cardinality::ALL
            .into_iter()
            .map(|cardinality| TierRow {
                cardinality,
                tiers: preference_tiers(cardinality),
            })
            .collect(),
    }
}

impl std::str::FromStr for DesignId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => DesignId::from_letter(c),
            _ => None,
        }
        .ok_or_else(|| Error::UnknownReference(format!("design {s}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_designs_in_letter_order() {
        let c = design_catalog();
        assert_eq!(c.len(), 16);
        for (i, d) in c.iter().enumerate() {
            assert_eq!(d.id as usize, i);
            assert_eq!(d.cardinality, Cardinality::ALL[i / 4]);
        }
    }

    #[test]
    fn e_highlights_and_sorts() {
        let e = lookup(DesignId::E);
        assert_eq!(e.chart_type, ChartType::Bar);
        assert_eq!(e.orientation, Orientation::Horizontal);
        assert!(e.has(AnnotationRule::HighlightQuerySingleton));
        assert!(e.has(AnnotationRule::SortedDescending));
    }

    #[test]
    fn b_is_a_labeled_unit_chart() {
        let b = lookup(DesignId::B);
        assert_eq!(b.chart_type, ChartType::Unit);
        assert!(b.has(AnnotationRule::LargeValueLabels));
    }

    #[test]
    fn tiers_cover_each_group_once() {
        for c in Cardinality::ALL {
            let mut letters: Vec<DesignId> = preference_tiers(c).concat();
            letters.sort();
            let expected: Vec<DesignId> = DesignId::ALL.into_iter().filter(|d| d.cardinality() == c).collect();
            assert_eq!(letters, expected);
        }
    }

    #[test]
    fn letters_round_trip() {
        for id in DesignId::ALL {
            assert_eq!(DesignId::from_letter(id.letter()), Some(id));
            assert_eq!(id.to_string().parse::<DesignId>().unwrap(), id);
        }
        assert!("Q".parse::<DesignId>().is_err());
    }
}
