//! Vega-Lite documents for the catalog designs.

mod prepare;
pub mod spec;

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Value};

pub use prepare::{prepare, Aggregate, EmitterConfig, Group, Item, Prepared};
pub use spec::*;

use crate::canonical::to_canonical_string;
use crate::catalog::{AnnotationRule, DesignId};
use crate::dataset::{Dataset, Measure, StatsCache};
use crate::error::Result;
use crate::parser::{Cardinality, ParsedComparison, Plurality};
use crate::recommend::Recommendation;
use crate::resolver::ResolutionPlan;

pub const GROUP_FIELD: &str = "Group";
pub const ACCENT: &str = "#e45756";
pub const NEUTRAL: &str = "#bab0ac";
pub const PAIR: [&str; 2] = ["#4c78a8", "#f58518"];
pub const SINGLE: &str = "#4c78a8";
const VALUE_FORMAT: &str = ",.2~f";

/// Emits one design with default emitter settings.
pub fn emit(r: &Recommendation, p: &ParsedComparison, plan: &ResolutionPlan, d: &Dataset) -> Result<ChartSpec> {
    let prep = prepare(p, plan, d, &StatsCache::build(d), EmitterConfig::default())?;
    Ok(emit_prepared(r, &prep))
}

pub fn emit_prepared(r: &Recommendation, prep: &Prepared) -> ChartSpec {
    let id = r.design.id;
    let aggregated = r.design.aggregates();
    let data = if aggregated { aggregate_rows(prep) } else { item_rows(prep) };
    let body = match id {
        DesignId::A => design_a(prep),
        DesignId::B => design_b(prep),
        DesignId::C => design_c(prep),
        DesignId::D => design_d(prep),
        DesignId::E => design_e(prep),
        DesignId::F => design_f(prep),
        DesignId::G => design_g(prep),
        DesignId::H => scatter(prep, highlight(prep)),
        DesignId::I => design_i(prep),
        DesignId::J => design_j(prep),
        DesignId::K => scatter(prep, single_color(prep)),
        DesignId::L => design_l(prep),
        DesignId::M => design_m(prep),
        DesignId::N => design_n(prep),
        DesignId::O => design_o(prep),
        DesignId::P => scatter(prep, pair_color(prep)),
    };
    let text = title_text(prep);
    let description = if prep.caption.is_empty() {
        text.clone()
    } else {
        prep.caption.join("\n")
    };
    ChartSpec {
        schema: VEGA_LITE_SCHEMA.to_string(),
        title: Title {
            text,
            subtitle: prep.caption.clone(),
        },
        description,
        data: InlineData { values: data },
        body,
        config: Some(Config {
            view: Some(ViewConfig {
                stroke: Some("transparent".into()),
            }),
            legend: Some(LegendConfig {
                label_limit: Some(400.0),
                orient: Some("bottom".into()),
            }),
        }),
        usermeta: usermeta(r, prep),
    }
}

pub fn serialize_spec(s: &ChartSpec) -> Result<String> {
    to_canonical_string(s)
}

pub fn parse_spec(text: &str) -> Result<ChartSpec> {
    Ok(serde_json::from_str(text)?)
}

/// Every data field a document reads: inline data keys plus each `field`
/// reference outside `usermeta`, unescaped.
pub fn referenced_fields(spec: &Value) -> BTreeSet<String> {
    fn walk(v: &Value, out: &mut BTreeSet<String>) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    match (k.as_str(), v) {
                        ("usermeta", _) => {}
                        ("field", Value::String(s)) => {
                            out.insert(unescape_field(s));
                        }
                        _ => walk(v, out),
                    }
                }
            }
            Value::Array(items) => items.iter().for_each(|i| walk(i, out)),
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    if let Some(rows) = spec.pointer("/data/values").and_then(Value::as_array) {
        for row in rows {
            if let Some(obj) = row.as_object() {
                out.extend(obj.keys().cloned());
            }
        }
    }
    walk(spec, &mut out);
    out
}

fn number(v: f64) -> Value {
    if v.is_finite() && v.fract() == 0.0 && v.abs() < 9.0e15 {
        Value::from(v as i64)
    } else {
        serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
    }
}

fn item_rows(prep: &Prepared) -> Vec<BTreeMap<String, Value>> {
    let group = prep.has_group();
    let mut rows = Vec::new();
    for g in &prep.groups {
        for it in &g.items {
            let mut row = BTreeMap::new();
            row.insert(prep.entity_field.clone(), Value::from(it.entity.clone()));
            row.insert(prep.measure_field.clone(), number(it.value));
            if group {
                row.insert(GROUP_FIELD.to_string(), Value::from(g.label.clone()));
            }
            rows.push(row);
        }
    }
    rows
}

/// One row per group: a singleton's own value or the set aggregate.
fn aggregate_rows(prep: &Prepared) -> Vec<BTreeMap<String, Value>> {
    prep.groups
        .iter()
        .map(|g| {
            let v = match g.plurality {
                Plurality::Singleton => g.items[0].value,
                Plurality::Set => g.aggregate,
            };
            BTreeMap::from([
                (GROUP_FIELD.to_string(), Value::from(g.label.clone())),
                (prep.measure_field.clone(), number(v)),
            ])
        })
        .collect()
}

fn nominal(field: &str) -> FieldDef {
    FieldDef {
        field: Some(field_ref(field)),
        kind: Some(FieldType::Nominal),
        ..Default::default()
    }
}

fn quant(prep: &Prepared) -> FieldDef {
    FieldDef {
        field: Some(field_ref(&prep.measure_field)),
        kind: Some(FieldType::Quantitative),
        title: Some(prep.measure_title.clone()),
        ..Default::default()
    }
}

fn aggregate_quant(prep: &Prepared) -> FieldDef {
    FieldDef {
        title: Some(prep.config.aggregate.title(&prep.measure_title)),
        ..quant(prep)
    }
}

fn labels(prep: &Prepared) -> Vec<String> {
    prep.groups.iter().map(|g| g.label.clone()).collect()
}

/// Category field of 1-1 charts and its values in utterance order.
fn pair_category(prep: &Prepared) -> (String, Vec<String>) {
    if prep.has_group() {
        (GROUP_FIELD.to_string(), labels(prep))
    } else {
        let names = prep.groups.iter().flat_map(|g| g.items.iter().map(|i| i.entity.clone())).collect();
        (prep.entity_field.clone(), names)
    }
}

fn category(field: &str, order: Vec<String>) -> FieldDef {
    FieldDef {
        sort: Some(Sort::Values(order)),
        axis: Some(Axis {
            label_limit: Some(180.0),
            ..Default::default()
        }),
        ..nominal(field)
    }
}

fn sorted_entity(prep: &Prepared, channel: &str) -> FieldDef {
    FieldDef {
        sort: Some(Sort::Keyword(format!("-{channel}"))),
        axis: Some(Axis {
            label_limit: Some(180.0),
            ..Default::default()
        }),
        ..nominal(&prep.entity_field)
    }
}

fn colored(field: &str, domain: Vec<String>, range: Vec<String>, title: Option<String>) -> FieldDef {
    FieldDef {
        scale: Some(Scale {
            domain: Some(domain),
            range: Some(range),
            zero: None,
        }),
        legend: Some(Legend {
            title,
            label_limit: Some(320.0),
            orient: Some("bottom".into()),
        }),
        ..nominal(field)
    }
}

/// Singleton in the accent color, the set in a neutral one.
fn highlight(prep: &Prepared) -> FieldDef {
    colored(
        GROUP_FIELD,
        labels(prep),
        vec![ACCENT.to_string(), NEUTRAL.to_string()],
        Some(prep.entity_field.clone()),
    )
}

fn pair_color(prep: &Prepared) -> FieldDef {
    colored(
        GROUP_FIELD,
        labels(prep),
        PAIR.iter().map(|c| c.to_string()).collect(),
        None,
    )
}

fn pair_category_color(prep: &Prepared) -> FieldDef {
    let (field, order) = pair_category(prep);
    let title = prep.has_group().then(|| prep.entity_field.clone());
    colored(&field, order, PAIR.iter().map(|c| c.to_string()).collect(), title)
}

/// A lone set: one hue, with the interpretation as its legend entry when
/// the set is implicit.
fn single_color(prep: &Prepared) -> FieldDef {
    match prep.lone_legend() {
        Some(text) => FieldDef {
            datum: Some(Value::from(text)),
            kind: Some(FieldType::Nominal),
            ..Default::default()
        },
        None => FieldDef {
            value: Some(Value::from(SINGLE)),
            ..Default::default()
        },
    }
}

fn tooltip(prep: &Prepared) -> Vec<FieldDef> {
    let mut t = vec![
        nominal(&prep.entity_field),
        FieldDef {
            format: Some(VALUE_FORMAT.into()),
            ..quant(prep)
        },
    ];
    if prep.has_group() {
        t.push(nominal(GROUP_FIELD));
    }
    t
}

fn value_text(prep: &Prepared) -> FieldDef {
    FieldDef {
        format: Some(VALUE_FORMAT.into()),
        title: None,
        ..quant(prep)
    }
}

fn mark(kind: MarkType, props: MarkProps) -> Mark {
    Mark { kind, props }
}

fn tooltip_mark(kind: MarkType) -> Mark {
    mark(
        kind,
        MarkProps {
            tooltip: Some(true),
            ..Default::default()
        },
    )
}

fn text_mark(props: MarkProps) -> LayerUnit {
    LayerUnit {
        mark: mark(MarkType::Text, props),
        encoding: Encoding::default(),
    }
}

fn with_text(unit: LayerUnit, text: FieldDef) -> LayerUnit {
    LayerUnit {
        encoding: Encoding {
            text: Some(text),
            ..unit.encoding
        },
        ..unit
    }
}

fn design_a(prep: &Prepared) -> Body {
    let (field, order) = pair_category(prep);
    Body::Layer(LayerBody {
        encoding: Encoding {
            x: Some(category(&field, order)),
            y: Some(quant(prep)),
            ..Default::default()
        },
        layer: vec![
            LayerUnit {
                mark: tooltip_mark(MarkType::Bar),
                encoding: Encoding {
                    color: Some(pair_category_color(prep)),
                    tooltip: tooltip(prep),
                    ..Default::default()
                },
            },
            with_text(
                text_mark(MarkProps {
                    dy: Some(-4.0),
                    baseline: Some("bottom".into()),
                    ..Default::default()
                }),
                value_text(prep),
            ),
        ],
        width: Some(Value::from(240)),
        height: None,
    })
}

fn design_b(prep: &Prepared) -> Body {
    let (field, order) = pair_category(prep);
    Body::Layer(LayerBody {
        encoding: Encoding {
            x: Some(category(&field, order)),
            ..Default::default()
        },
        layer: vec![
            LayerUnit {
                mark: tooltip_mark(MarkType::Circle),
                encoding: Encoding {
                    size: Some(FieldDef {
                        legend: None,
                        ..quant(prep)
                    }),
                    color: Some(pair_category_color(prep)),
                    tooltip: tooltip(prep),
                    ..Default::default()
                },
            },
            with_text(
                text_mark(MarkProps {
                    font_size: Some(28.0),
                    font_weight: Some("bold".into()),
                    dy: Some(-48.0),
                    ..Default::default()
                }),
                value_text(prep),
            ),
        ],
        width: Some(Value::from(240)),
        height: Some(Value::from(160)),
    })
}

fn design_c(prep: &Prepared) -> Body {
    let (field, order) = pair_category(prep);
    Body::Layer(LayerBody {
        encoding: Encoding {
            y: Some(category(&field, order)),
            x: Some(quant(prep)),
            ..Default::default()
        },
        layer: vec![
            LayerUnit {
                mark: mark(
                    MarkType::Circle,
                    MarkProps {
                        tooltip: Some(true),
                        size: Some(300.0),
                        ..Default::default()
                    },
                ),
                encoding: Encoding {
                    color: Some(pair_category_color(prep)),
                    tooltip: tooltip(prep),
                    ..Default::default()
                },
            },
            with_text(
                text_mark(MarkProps {
                    dx: Some(14.0),
                    align: Some("left".into()),
                    ..Default::default()
                }),
                value_text(prep),
            ),
        ],
        width: Some(Value::from(320)),
        height: None,
    })
}

fn design_d(prep: &Prepared) -> Body {
    let (field, order) = pair_category(prep);
    Body::Unit(UnitBody {
        mark: tooltip_mark(MarkType::Bar),
        encoding: Encoding {
            x: Some(FieldDef {
                datum: Some(Value::from(prep.measure_field.clone())),
                kind: Some(FieldType::Nominal),
                axis: Some(Axis {
                    title: Some(String::new()),
                    ..Default::default()
                }),
                ..Default::default()
            }),
            x_offset: Some(FieldDef {
                sort: Some(Sort::Values(order)),
                ..nominal(&field)
            }),
            y: Some(quant(prep)),
            color: Some(pair_category_color(prep)),
            tooltip: tooltip(prep),
            ..Default::default()
        },
        width: Some(Value::from(200)),
        height: None,
    })
}

fn design_e(prep: &Prepared) -> Body {
    Body::Unit(UnitBody {
        mark: tooltip_mark(MarkType::Bar),
        encoding: Encoding {
            y: Some(sorted_entity(prep, "x")),
            x: Some(quant(prep)),
            color: Some(highlight(prep)),
            tooltip: tooltip(prep),
            ..Default::default()
        },
        width: Some(Value::from(360)),
        height: None,
    })
}

fn design_f(prep: &Prepared) -> Body {
    Body::Layer(LayerBody {
        encoding: Encoding {
            y: Some(category(GROUP_FIELD, labels(prep))),
            x: Some(aggregate_quant(prep)),
            ..Default::default()
        },
        layer: vec![
            LayerUnit {
                mark: tooltip_mark(MarkType::Bar),
                encoding: Encoding {
                    color: Some(highlight(prep)),
                    ..Default::default()
                },
            },
            with_text(
                text_mark(MarkProps {
                    dx: Some(4.0),
                    align: Some("left".into()),
                    ..Default::default()
                }),
                value_text(prep),
            ),
        ],
        width: Some(Value::from(360)),
        height: None,
    })
}

fn design_g(prep: &Prepared) -> Body {
    Body::Unit(UnitBody {
        mark: mark(
            MarkType::Point,
            MarkProps {
                tooltip: Some(true),
                filled: Some(true),
                size: Some(80.0),
                ..Default::default()
            },
        ),
        encoding: Encoding {
            y: Some(sorted_entity(prep, "x")),
            x: Some(FieldDef {
                scale: Some(Scale {
                    zero: Some(false),
                    ..Default::default()
                }),
                ..quant(prep)
            }),
            color: Some(highlight(prep)),
            tooltip: tooltip(prep),
            ..Default::default()
        },
        width: Some(Value::from(360)),
        height: None,
    })
}

/// Entities spread along x without labels, measure on y.
fn scatter(prep: &Prepared, color: FieldDef) -> Body {
    Body::Unit(UnitBody {
        mark: mark(
            MarkType::Point,
            MarkProps {
                tooltip: Some(true),
                size: Some(60.0),
                ..Default::default()
            },
        ),
        encoding: Encoding {
            x: Some(FieldDef {
                axis: Some(Axis {
                    labels: Some(false),
                    ticks: Some(false),
                    ..Default::default()
                }),
                ..nominal(&prep.entity_field)
            }),
            y: Some(FieldDef {
                scale: Some(Scale {
                    zero: Some(false),
                    ..Default::default()
                }),
                ..quant(prep)
            }),
            color: Some(color),
            tooltip: tooltip(prep),
            ..Default::default()
        },
        width: Some(Value::from(360)),
        height: Some(Value::from(240)),
    })
}

fn design_i(prep: &Prepared) -> Body {
    Body::Unit(UnitBody {
        mark: tooltip_mark(MarkType::Bar),
        encoding: Encoding {
            y: Some(sorted_entity(prep, "x")),
            x: Some(quant(prep)),
            color: Some(single_color(prep)),
            tooltip: tooltip(prep),
            ..Default::default()
        },
        width: Some(Value::from(360)),
        height: None,
    })
}

fn design_j(prep: &Prepared) -> Body {
    Body::Facet(FacetBody {
        facet: FieldDef {
            sort: Some(Sort::Field(SortField {
                field: field_ref(&prep.measure_field),
                op: Some("max".into()),
                order: "descending".into(),
            })),
            title: Some(String::new()),
            ..nominal(&prep.entity_field)
        },
        spec: Box::new(InnerSpec::Layer(LayerBody {
            encoding: Encoding {
                y: Some(quant(prep)),
                ..Default::default()
            },
            layer: vec![
                LayerUnit {
                    mark: tooltip_mark(MarkType::Bar),
                    encoding: Encoding {
                        color: Some(single_color(prep)),
                        tooltip: tooltip(prep),
                        ..Default::default()
                    },
                },
                with_text(
                    text_mark(MarkProps {
                        dy: Some(-4.0),
                        baseline: Some("bottom".into()),
                        ..Default::default()
                    }),
                    value_text(prep),
                ),
            ],
            width: Some(Value::from(60)),
            height: Some(Value::from(120)),
        })),
        columns: Some(5),
        resolve: None,
    })
}

fn design_l(prep: &Prepared) -> Body {
    Body::Unit(UnitBody {
        mark: mark(
            MarkType::Boxplot,
            MarkProps {
                extent: Some("min-max".into()),
                size: Some(40.0),
                ..Default::default()
            },
        ),
        encoding: Encoding {
            y: Some(FieldDef {
                scale: Some(Scale {
                    zero: Some(false),
                    ..Default::default()
                }),
                ..quant(prep)
            }),
            color: Some(single_color(prep)),
            ..Default::default()
        },
        width: Some(Value::from(120)),
        height: Some(Value::from(240)),
    })
}

fn design_m(prep: &Prepared) -> Body {
    let mut order: Vec<String> = Vec::new();
    for g in &prep.groups {
        for it in &g.items {
            if !order.contains(&it.entity) {
                order.push(it.entity.clone());
            }
        }
    }
    Body::Unit(UnitBody {
        mark: tooltip_mark(MarkType::Bar),
        encoding: Encoding {
            x: Some(category(&prep.entity_field, order)),
            y: Some(quant(prep)),
            color: Some(pair_color(prep)),
            tooltip: tooltip(prep),
            ..Default::default()
        },
        width: None,
        height: None,
    })
}

fn design_n(prep: &Prepared) -> Body {
    Body::Facet(FacetBody {
        facet: FieldDef {
            sort: Some(Sort::Values(labels(prep))),
            title: Some(String::new()),
            ..nominal(GROUP_FIELD)
        },
        spec: Box::new(InnerSpec::Unit(UnitBody {
            mark: tooltip_mark(MarkType::Bar),
            encoding: Encoding {
                x: Some(sorted_entity(prep, "y")),
                y: Some(quant(prep)),
                color: Some(pair_color(prep)),
                tooltip: tooltip(prep),
                ..Default::default()
            },
            width: None,
            height: Some(Value::from(200)),
        })),
        columns: Some(2),
        resolve: Some(Resolve {
            scale: BTreeMap::from([("x".to_string(), "independent".to_string())]),
        }),
    })
}

fn design_o(prep: &Prepared) -> Body {
    Body::Layer(LayerBody {
        encoding: Encoding {
            x: Some(category(GROUP_FIELD, labels(prep))),
            y: Some(aggregate_quant(prep)),
            ..Default::default()
        },
        layer: vec![
            LayerUnit {
                mark: tooltip_mark(MarkType::Bar),
                encoding: Encoding {
                    color: Some(pair_color(prep)),
                    ..Default::default()
                },
            },
            with_text(
                text_mark(MarkProps {
                    dy: Some(-4.0),
                    baseline: Some("bottom".into()),
                    ..Default::default()
                }),
                value_text(prep),
            ),
        ],
        width: Some(Value::from(240)),
        height: None,
    })
}

fn title_text(prep: &Prepared) -> String {
    let labels = labels(prep);
    match prep.cardinality {
        Cardinality::Many => format!("{} of {}", prep.measure_field, labels[0]),
        _ => format!("{}: {} vs {}", prep.measure_field, labels[0], labels[1]),
    }
}

fn usermeta(r: &Recommendation, prep: &Prepared) -> Value {
    let id = r.design.id;
    let aggregated = r.design.aggregates();
    let filters: Vec<Value> = prep
        .groups
        .iter()
        .filter(|g| g.predicate.is_some())
        .map(|g| {
            json!({
                "reference": g.reference,
                "label": g.label,
                "predicate": g.predicate,
                "resolved": g.resolved,
                "matched": g.matched,
            })
        })
        .collect();
    let top_k: Vec<Value> = prep
        .groups
        .iter()
        .filter(|g| g.plurality == Plurality::Set && !aggregated)
        .map(|g| json!({"reference": g.reference, "k": prep.config.top_k, "matched": g.matched, "kept": g.items.len()}))
        .collect();
    let derivation = match &prep.measure {
        Measure::Derived(f) => json!({"field": prep.measure_field, "formula": f}),
        Measure::Attribute(_) => Value::Null,
    };
    let aggregate = if aggregated {
        json!({
            "op": prep.config.aggregate.as_str(),
            "field": prep.measure_field,
            "title": prep.config.aggregate.title(&prep.measure_title),
            "groupby": GROUP_FIELD,
        })
    } else {
        Value::Null
    };
    let highlight = if r.design.has(AnnotationRule::HighlightQuerySingleton) {
        prep.groups
            .iter()
            .find(|g| g.plurality == Plurality::Singleton)
            .map_or(Value::Null, |g| {
                json!({"field": GROUP_FIELD, "value": g.label, "entity": g.items[0].entity, "color": ACCENT})
            })
    } else {
        Value::Null
    };
    let mut interactions = vec!["tooltip"];
    if prep.interpretable {
        interactions.push("choose-interpretation");
    }
    if prep.groups.iter().any(|g| g.predicate.is_some()) {
        interactions.push("adjust-threshold");
    }
    let mut fields = vec![prep.measure_field.clone()];
    if !aggregated {
        fields.insert(0, prep.entity_field.clone());
    }
    if prep.has_group() || aggregated {
        fields.push(GROUP_FIELD.to_string());
    }
    json!({
        "design": id.to_string(),
        "design_name": r.design.name,
        "rank": r.rank,
        "tier": r.tier,
        "cardinality": prep.cardinality,
        "cell": prep.cell,
        "mixed_flag": prep.mixed_flag,
        "fields": fields,
        "category_field": if aggregated { GROUP_FIELD } else { prep.entity_field.as_str() },
        "measure_field": prep.measure_field,
        "highlight": highlight,
        "transforms": {
            "filters": filters,
            "derivation": derivation,
            "top_k": top_k,
            "aggregate": aggregate,
        },
        "interactions": interactions,
        "caption": prep.caption,
    })
}
