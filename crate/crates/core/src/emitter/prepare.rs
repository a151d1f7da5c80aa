//! Row selection shared by the four designs of one comparison.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::dataset::{apply_filter, nearest_rank, Cell, Comparator, Dataset, Measure, StatsCache};
use crate::error::{Error, Result};
use crate::parser::{value_ref_id, Cardinality, Level, ParsedComparison, Plurality, ValueReference};
use crate::resolver::ResolutionPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregate {
    #[default]
    Mean,
    Median,
    Sum,
}

impl Aggregate {
    pub fn as_str(self) -> &'static str {
        match self {
            Aggregate::Mean => "mean",
            Aggregate::Median => "median",
            Aggregate::Sum => "sum",
        }
    }

    pub fn title(self, field: &str) -> String {
        let op = match self {
            Aggregate::Mean => "Mean",
            Aggregate::Median => "Median",
            Aggregate::Sum => "Sum",
        };
        format!("{op} of {field}")
    }

    pub fn apply(self, values: &[f64]) -> f64 {
        match self {
            Aggregate::Sum => values.iter().sum(),
            Aggregate::Mean => values.iter().sum::<f64>() / values.len() as f64,
            Aggregate::Median => {
                let mut sorted = values.to_vec();
                sorted.sort_by(f64::total_cmp);
                nearest_rank(&sorted, 50.0).unwrap_or(f64::NAN)
            }
        }
    }
}

impl std::str::FromStr for Aggregate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Aggregate::Mean),
            "median" => Ok(Aggregate::Median),
            "sum" => Ok(Aggregate::Sum),
            other => Err(Error::Metadata(format!("unknown aggregate '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmitterConfig {
    pub top_k: usize,
    pub aggregate: Aggregate,
}

impl Default for EmitterConfig {
    fn default() -> Self {
        Self {
            top_k: 10,
            aggregate: Aggregate::Mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub entity: String,
    pub value: f64,
}

/// Rows selected for one value reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub reference: String,
    pub label: String,
    pub plurality: Plurality,
    pub implicit: bool,
    /// Selected rows, descending by measure for sets.
    pub items: Vec<Item>,
    /// Rows matched before the top-k cut.
    pub matched: usize,
    /// Aggregate over all matched rows.
    pub aggregate: f64,
    pub predicate: Option<String>,
    pub resolved: Option<String>,
    pub provenance: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub entity_field: String,
    pub measure: Measure,
    pub measure_field: String,
    pub measure_title: String,
    pub cardinality: Cardinality,
    pub cell: String,
    pub mixed_flag: bool,
    pub groups: Vec<Group>,
    pub caption: Vec<String>,
    pub config: EmitterConfig,
    pub interpretable: bool,
}

impl Prepared {
    /// Whether the inline data carries the synthetic `Group` field.
    pub fn has_group(&self) -> bool {
        match self.cardinality {
            Cardinality::OneToMany | Cardinality::ManyToMany => true,
            Cardinality::OneToOne => self.groups.iter().any(|g| g.implicit),
            Cardinality::Many => false,
        }
    }

    /// Legend text for a lone implicit set.
    pub fn lone_legend(&self) -> Option<String> {
        match (self.cardinality, self.groups.first()) {
            (Cardinality::Many, Some(g)) if g.implicit => g.provenance.clone(),
            _ => None,
        }
    }
}

fn text_of(cell: &Cell) -> Option<String> {
    match cell {
        Cell::Missing => None,
        other => Some(other.display()),
    }
}

/// Rows matching every attribute in the reference's scope; values of one
/// attribute are alternatives.
fn scope_rows(d: &Dataset, r: &ValueReference) -> Result<Vec<usize>> {
    let mut by_attr: Vec<(usize, Vec<&str>)> = Vec::new();
    for m in r.scope() {
        let col = d.column_index(&m.attribute)?;
        match by_attr.iter_mut().find(|(c, _)| *c == col) {
            Some((_, vals)) => vals.push(&m.value),
            None => by_attr.push((col, vec![&m.value])),
        }
    }
    Ok((0..d.row_count())
        .filter(|&row| {
            by_attr.iter().all(|(col, vals)| {
                text_of(d.cell(row, *col)).is_some_and(|t| vals.iter().any(|v| *v == t))
            })
        })
        .collect())
}

/// Selects, orders and labels the rows of every value reference.
pub fn prepare(
    p: &ParsedComparison,
    plan: &ResolutionPlan,
    d: &Dataset,
    stats: &StatsCache,
    config: EmitterConfig,
) -> Result<Prepared> {
    plan.check(p)?;
    let entity_field = d
        .entity_attribute()
        .ok_or_else(|| Error::MissingAttribute("no categorical column names the entities".into()))?
        .to_string();
    let entity_col = d.column_index(&entity_field)?;
    let measure = plan.measure(p)?;
    let values = d.measure_values(&measure)?;
    let measure_field = measure.name();
    let unit = match &measure {
        Measure::Attribute(a) => d.schema().get(a).and_then(|a| a.unit.clone()),
        Measure::Derived(_) => None,
    };
    let measure_title = match unit {
        Some(u) => format!("{measure_field} ({u})"),
        None => measure_field.clone(),
    };

    let mut groups = Vec::with_capacity(p.value_refs.len());
    let mut singleton_entities: HashSet<String> = HashSet::new();
    for (i, r) in p.value_refs.iter().enumerate() {
        let id = value_ref_id(i);
        let mut rows = scope_rows(d, r)?;
        let mut predicate = None;
        let mut resolved = None;
        let mut provenance = None;
        let mut descending = true;
        let mut keys: Option<Vec<Option<f64>>> = None;
        if !r.is_explicit() {
            let pred = plan.predicate(&id)?;
            let s = if pred.threshold.needs_stats() {
                Some(stats.for_measure(d, &pred.measure)?)
            } else {
                None
            };
            let keep: HashSet<usize> = apply_filter(d, pred, s.as_ref())?.into_iter().collect();
            rows.retain(|row| keep.contains(row));
            predicate = Some(pred.to_string());
            provenance = plan.get(&id).map(|e| e.current().provenance.clone());
            resolved = Some(pred.to_constant(s.as_ref())?.to_string());
            descending = !matches!(pred.comparator, Comparator::Lt | Comparator::Le);
            keys = Some(d.measure_values(&pred.measure)?);
        }
        let mut keyed: Vec<(Item, f64)> = rows
            .into_iter()
            .filter_map(|row| {
                let v = values[row]?;
                let entity = text_of(d.cell(row, entity_col))?;
                let key = keys.as_ref().map_or(Some(v), |k| k[row])?;
                Some((Item { entity, value: v }, key))
            })
            .collect();
        if r.plurality == Plurality::Set && p.cardinality == Cardinality::OneToMany {
            keyed.retain(|(it, _)| !singleton_entities.contains(&it.entity));
        }
        if r.plurality == Plurality::Singleton && !r.is_explicit() {
            keyed = representative(keyed, descending).into_iter().collect();
        }
        let items: Vec<Item> = keyed.into_iter().map(|(it, _)| it).collect();
        if items.is_empty() {
            return Err(Error::EmptyResult {
                reference: r.surface.clone(),
                predicate: predicate.unwrap_or_else(|| format!("{measure_field} present")),
            });
        }
        let all: Vec<f64> = items.iter().map(|it| it.value).collect();
        let (items, matched, label) = match r.plurality {
            Plurality::Singleton => select_singleton(r, items, config.aggregate),
            Plurality::Set => {
                let matched = items.len();
                let mut items = stable_desc(items);
                dedupe_entities(&mut items);
                items.truncate(config.top_k);
                (items, matched, r.label())
            }
        };
        if r.plurality == Plurality::Singleton {
            singleton_entities.extend(items.iter().map(|it| it.entity.clone()));
        }
        groups.push(Group {
            reference: id,
            label,
            plurality: r.plurality,
            implicit: !r.is_explicit(),
            aggregate: config.aggregate.apply(&all),
            items,
            matched,
            predicate,
            resolved,
            provenance,
        });
    }
    distinct_labels(&mut groups);
    Ok(Prepared {
        entity_field,
        measure,
        measure_field,
        measure_title,
        cardinality: p.cardinality,
        cell: p.concreteness.cell.as_str().to_string(),
        mixed_flag: p.concreteness.mixed_flag,
        groups,
        caption: plan.provenance(),
        config,
        interpretable: !plan.is_empty() || p.concreteness.values == Level::Implicit,
    })
}

/// Explicit singleton: its rows collapse into one with the configured
/// aggregate. Implicit singleton: already reduced to its representative.
fn select_singleton(r: &ValueReference, items: Vec<Item>, aggregate: Aggregate) -> (Vec<Item>, usize, String) {
    let matched = items.len();
    if !r.is_explicit() {
        let label = format!("{}: {}", r.label(), items[0].entity);
        return (items, matched, label);
    }
    let entity = if items.iter().all(|it| it.entity == items[0].entity) {
        items[0].entity.clone()
    } else {
        r.label()
    };
    let values: Vec<f64> = items.iter().map(|it| it.value).collect();
    let value = if values.len() == 1 { values[0] } else { aggregate.apply(&values) };
    (vec![Item { entity: entity.clone(), value }], matched, entity)
}

/// The most extreme matching row in the modifier's direction; the first
/// row wins ties.
fn representative(keyed: Vec<(Item, f64)>, descending: bool) -> Option<(Item, f64)> {
    let mut best: Option<(Item, f64)> = None;
    for (it, k) in keyed {
        let better = match &best {
            None => true,
            Some((_, b)) if descending => k > *b,
            Some((_, b)) => k < *b,
        };
        if better {
            best = Some((it, k));
        }
    }
    best
}

fn stable_desc(mut items: Vec<Item>) -> Vec<Item> {
    items.sort_by(|a, b| b.value.total_cmp(&a.value));
    items
}

/// Keeps the first (largest) row per entity so categorical axes never merge
/// bars.
fn dedupe_entities(items: &mut Vec<Item>) {
    let mut seen = HashSet::new();
    items.retain(|it| seen.insert(it.entity.clone()));
}

fn distinct_labels(groups: &mut [Group]) {
    if groups.len() == 2 && groups[0].label == groups[1].label {
        groups[1].label.push_str(" (2)");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_dataset;
    use crate::lexicon::Lexicon;
    use crate::parser::parse;
    use crate::resolver::{build_plan, ResolverConfig};

    fn books() -> Dataset {
        load_dataset(include_bytes!("../../../../data/books.csv")).unwrap()
    }

    fn prep(d: &Dataset, u: &str) -> Result<Prepared> {
        let p = parse(u, d)?;
        let stats = StatsCache::build(d);
        let plan = build_plan(&p, d, &stats, &Lexicon::default(), &ResolverConfig::default())?;
        prepare(&p, &plan, d, &stats, EmitterConfig::default())
    }

    #[test]
    fn singleton_is_excluded_from_its_set() {
        let d = books();
        let prep = prep(&d, "compare the price of The Alchemist to other fiction books").unwrap();
        assert_eq!(prep.groups[0].label, "The Alchemist");
        assert!(prep.groups[1].items.iter().all(|it| it.entity != "The Alchemist"));
        assert!(prep.groups[1].items.len() <= 10);
        let vals: Vec<f64> = prep.groups[1].items.iter().map(|it| it.value).collect();
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        assert!(prep.has_group());
    }

    #[test]
    fn aggregates() {
        assert_eq!(Aggregate::Mean.apply(&[1.0, 2.0, 6.0]), 3.0);
        assert_eq!(Aggregate::Median.apply(&[5.0, 1.0, 3.0, 2.0]), 2.0);
        assert_eq!(Aggregate::Sum.apply(&[1.0, 2.0]), 3.0);
        assert_eq!(Aggregate::Mean.title("Price"), "Mean of Price");
    }
}
