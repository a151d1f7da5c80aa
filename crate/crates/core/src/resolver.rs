//! Turns implicit references into concrete predicates and measures.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{
    AttributeKind, Dataset, DerivedAttributeFormula, Measure, Predicate, StatsCache,
};
use crate::error::{Error, Result};
use crate::lexicon::{pattern_matches, FormulaHint, Lexicon, LexiconEntry, PolicySpec, Role, CONTEXT_ATTRIBUTE};
use crate::parser::{ImplicitRef, ParsedComparison, ValueReference};
use crate::text::match_key;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResolverConfig {
    /// Interpretations kept per reference.
    pub fan_out: usize,
}

impl Default for ResolverConfig {
    fn default() -> Self {
        Self { fan_out: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Realization {
    Predicate { predicate: Predicate },
    Measure { measure: Measure },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interpretation {
    pub target: String,
    pub realization: Realization,
    pub confidence: f64,
    pub provenance: String,
}

impl Interpretation {
    /// Attributes the realization reads.
    pub fn attributes(&self) -> Vec<&str> {
        match &self.realization {
            Realization::Predicate { predicate } => predicate.measure.inputs(),
            Realization::Measure { measure } => measure.inputs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub phrase: String,
    pub interpretations: Vec<Interpretation>,
    pub chosen: usize,
}

impl PlanEntry {
    pub fn current(&self) -> &Interpretation {
        &self.interpretations[self.chosen]
    }
}

/// Interpretations for every implicit reference, keyed by reference id
/// (`attribute`, `value:0`, `value:1`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResolutionPlan {
    pub entries: BTreeMap<String, PlanEntry>,
}

impl ResolutionPlan {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, reference: &str) -> Option<&PlanEntry> {
        self.entries.get(reference)
    }

    pub fn choose(&mut self, reference: &str, index: usize) -> Result<()> {
        let entry = self
            .entries
            .get_mut(reference)
            .ok_or_else(|| Error::UnknownReference(reference.to_string()))?;
        if index >= entry.interpretations.len() {
            return Err(Error::InterpretationIndex {
                reference: reference.to_string(),
                index,
                available: entry.interpretations.len(),
            });
        }
        entry.chosen = index;
        Ok(())
    }

    /// Chosen indices in reference order.
    pub fn choices(&self) -> Vec<(String, usize)> {
        self.entries.iter().map(|(k, e)| (k.clone(), e.chosen)).collect()
    }

    /// Provenance of every chosen interpretation, attribute first.
    pub fn provenance(&self) -> Vec<String> {
        self.entries.values().map(|e| e.current().provenance.clone()).collect()
    }

    /// The comparison measure: the explicit attribute, or the chosen
    /// interpretation of an implicit one.
    pub fn measure(&self, p: &ParsedComparison) -> Result<Measure> {
        if let Some(a) = p.attribute_ref.explicit_attribute() {
            return Ok(Measure::Attribute(a.to_string()));
        }
        let entry = self
            .get(crate::parser::ATTRIBUTE_REF)
            .ok_or_else(|| Error::PlanMismatch("implicit attribute missing from plan".into()))?;
        match &entry.current().realization {
            Realization::Measure { measure } => Ok(measure.clone()),
            Realization::Predicate { .. } => Err(Error::PlanMismatch(
                "attribute interpreted as a predicate".into(),
            )),
        }
    }

    /// The chosen predicate of the value reference `reference`.
    pub fn predicate(&self, reference: &str) -> Result<&Predicate> {
        let entry = self
            .get(reference)
            .ok_or_else(|| Error::PlanMismatch(format!("'{reference}' missing from plan")))?;
        match &entry.current().realization {
            Realization::Predicate { predicate } => Ok(predicate),
            Realization::Measure { .. } => Err(Error::PlanMismatch(format!(
                "'{reference}' interpreted as a measure"
            ))),
        }
    }

    /// Checks that the plan covers exactly the implicit references of `p`.
    pub fn check(&self, p: &ParsedComparison) -> Result<()> {
        let ids: Vec<String> = p.implicit_refs().into_iter().map(|(id, _)| id).collect();
        for id in &ids {
            if !self.entries.contains_key(id) {
                return Err(Error::PlanMismatch(format!("no interpretation for '{id}'")));
            }
        }
        for (id, e) in &self.entries {
            if !ids.contains(id) {
                return Err(Error::PlanMismatch(format!("'{id}' is not an implicit reference")));
            }
            if e.chosen >= e.interpretations.len() {
                return Err(Error::PlanMismatch(format!("'{id}' chooses a missing interpretation")));
            }
        }
        Ok(())
    }
}

/// Numeric attributes matching a hint pattern, in schema order.
fn hinted_attributes(d: &Dataset, pattern: &str, context: Option<&str>) -> Vec<String> {
    let numeric = |name: &str| {
        d.schema()
            .get(name)
            .is_some_and(|a| a.kind == AttributeKind::Numeric)
    };
    if pattern == CONTEXT_ATTRIBUTE {
        return context.filter(|c| numeric(c)).map(|c| vec![c.to_string()]).unwrap_or_default();
    }
    d.schema()
        .attributes
        .iter()
        .filter(|a| a.kind == AttributeKind::Numeric && pattern_matches(pattern, &a.name))
        .map(|a| a.name.clone())
        .collect()
}

/// Binds formula input patterns to attributes. Each pattern must pick a
/// single numeric attribute, an exact name match winning over substrings.
fn bind_formula(d: &Dataset, f: &FormulaHint) -> Option<DerivedAttributeFormula> {
    let mut inputs = Vec::with_capacity(f.inputs.len());
    for pattern in &f.inputs {
        let found = hinted_attributes(d, pattern, None);
        let exact: Vec<&String> = found
            .iter()
            .filter(|a| pattern.split('|').any(|alt| match_key(alt) == match_key(a)))
            .collect();
        let pick = match (exact.len(), found.len()) {
            (1, _) => exact[0].clone(),
            (0, 1) => found[0].clone(),
            _ => return None,
        };
        if inputs.contains(&pick) {
            return None;
        }
        inputs.push(pick);
    }
    let formula = DerivedAttributeFormula {
        kind: f.kind,
        inputs,
        weights: f.weights.clone(),
    };
    formula.validate(d).ok()?;
    Some(formula)
}

fn hint_list(entry: &LexiconEntry) -> String {
    let mut parts: Vec<String> = entry.hints.iter().map(|h| h.pattern.clone()).collect();
    parts.extend(entry.formulas.iter().map(|f| f.inputs.join("+")));
    parts.join(", ")
}

fn finish(mut out: Vec<Interpretation>, fan_out: usize) -> Vec<Interpretation> {
    let mut seen: Vec<Realization> = Vec::new();
    out.retain(|i| {
        if seen.contains(&i.realization) {
            false
        } else {
            seen.push(i.realization.clone());
            true
        }
    });
    out.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));
    out.truncate(fan_out.max(1));
    out
}

/// Candidate measures for an implicit attribute phrase, most confident first.
pub fn resolve_attribute(
    phrase: &str,
    d: &Dataset,
    lexicon: &Lexicon,
    config: &ResolverConfig,
) -> Result<Vec<Interpretation>> {
    let entry = lexicon.lookup(phrase, Role::AttributeConcept)?;
    let mut out = Vec::new();
    let mut used: Vec<String> = Vec::new();
    for hint in &entry.hints {
        for attr in hinted_attributes(d, &hint.pattern, None) {
            if used.contains(&attr) {
                continue;
            }
            used.push(attr.clone());
            out.push(Interpretation {
                target: phrase.to_string(),
                provenance: format!(
                    "'{phrase}' interpreted as {attr} (lexicon: {}→{})",
                    entry.term, hint.pattern
                ),
                realization: Realization::Measure {
                    measure: Measure::Attribute(attr),
                },
                confidence: hint.confidence,
            });
        }
    }
    for f in &entry.formulas {
        if let Some(formula) = bind_formula(d, f) {
            let how = f.label.clone().unwrap_or_else(|| format!("{:?}", f.kind).to_lowercase());
            out.push(Interpretation {
                target: phrase.to_string(),
                provenance: format!(
                    "'{phrase}' interpreted as {} (lexicon: {}→{how})",
                    formula.name(),
                    entry.term
                ),
                realization: Realization::Measure {
                    measure: Measure::Derived(formula),
                },
                confidence: f.confidence,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::Unresolvable {
            phrase: phrase.to_string(),
            reason: format!("no attribute in the dataset matches the hints [{}]", hint_list(&entry)),
        });
    }
    Ok(finish(out, config.fan_out))
}

/// Candidate predicates for an implicit value reference. `context` is the
/// comparison's explicit attribute, if any.
pub fn resolve_value(
    r: &ValueReference,
    d: &Dataset,
    stats: &StatsCache,
    lexicon: &Lexicon,
    context: Option<&str>,
    config: &ResolverConfig,
) -> Result<Vec<Interpretation>> {
    let modifier = r.modifier().ok_or_else(|| Error::Unresolvable {
        phrase: r.surface.clone(),
        reason: "no modifier to interpret".into(),
    })?;
    let entry = lexicon.lookup(modifier, Role::ValueModifier)?;
    let default_policies = entry.effective_policies();
    let mut out = Vec::new();
    let mut push = |measure: Measure, confidence: f64, policies: &[PolicySpec]| -> Result<()> {
        let col = stats.for_measure(d, &measure)?;
        for (i, policy) in policies.iter().enumerate() {
            let predicate = Predicate {
                measure: measure.clone(),
                comparator: policy.comparator.unwrap_or_else(|| entry.polarity.comparator()),
                threshold: policy.threshold,
                unit: policy.unit.clone(),
            };
            predicate.threshold.resolve(Some(&col))?;
            out.push(Interpretation {
                target: modifier.to_string(),
                provenance: format!("{modifier} = {predicate}"),
                realization: Realization::Predicate { predicate },
                confidence: confidence * (1.0 - 0.1 * i as f64),
            });
        }
        Ok(())
    };
    let mut used: Vec<String> = Vec::new();
    for hint in &entry.hints {
        for attr in hinted_attributes(d, &hint.pattern, context) {
            if used.contains(&attr) {
                continue;
            }
            used.push(attr.clone());
            let policies = hint.policies.as_deref().unwrap_or(&default_policies);
            push(Measure::Attribute(attr), hint.confidence, policies)?;
        }
    }
    for f in &entry.formulas {
        if let Some(formula) = bind_formula(d, f) {
            let policies = f.policies.as_deref().unwrap_or(&default_policies);
            push(Measure::Derived(formula), f.confidence, policies)?;
        }
    }
    if out.is_empty() {
        return Err(Error::Unresolvable {
            phrase: modifier.to_string(),
            reason: format!("no numeric attribute matches the hints [{}]", hint_list(&entry)),
        });
    }
    Ok(finish(out, config.fan_out))
}

/// Resolves every implicit reference of `p`. Any failure fails the plan and
/// names each phrase that could not be resolved.
pub fn build_plan(
    p: &ParsedComparison,
    d: &Dataset,
    stats: &StatsCache,
    lexicon: &Lexicon,
    config: &ResolverConfig,
) -> Result<ResolutionPlan> {
    let context = p.attribute_ref.explicit_attribute();
    let mut plan = ResolutionPlan::default();
    let mut failed: Vec<(String, Error)> = Vec::new();
    for (id, r) in p.implicit_refs() {
        let (phrase, result) = match r {
            ImplicitRef::Attribute(phrase) => (phrase.to_string(), resolve_attribute(phrase, d, lexicon, config)),
            ImplicitRef::Value(v) => (
                v.modifier().unwrap_or(&v.surface).to_string(),
                resolve_value(v, d, stats, lexicon, context, config),
            ),
        };
        match result {
            Ok(interpretations) => {
                plan.entries.insert(
                    id,
                    PlanEntry {
                        phrase,
                        interpretations,
                        chosen: 0,
                    },
                );
            }
            Err(e) => failed.push((phrase, e)),
        }
    }
    if !failed.is_empty() {
        let phrases = failed.iter().map(|(p, _)| p.clone()).collect();
        let first = failed.into_iter().next().map(|(_, e)| e).expect("non-empty");
        return Err(Error::Plan {
            phrases,
            first: Box::new(first),
        });
    }
    Ok(plan)
}
