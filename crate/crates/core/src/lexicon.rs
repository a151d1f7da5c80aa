//! Vocabulary of vague modifiers ("high rated", "cheap") and underspecified
//! attribute concepts ("popularity") with the attributes, thresholds and
//! derived measures they map to.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{Comparator, FormulaKind, Threshold};
use crate::error::{Error, Result};
use crate::text::{match_key, normalize_words};

const DEFAULT_LEXICON: &str = include_str!("../resources/default_lexicon.json");

/// Pattern that stands for the comparison's own (explicit) attribute.
pub const CONTEXT_ATTRIBUTE: &str = "@attribute";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    ValueModifier,
    AttributeConcept,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    High,
    Low,
    None,
}

impl Polarity {
    pub fn comparator(self) -> Comparator {
        match self {
            Polarity::Low => Comparator::Lt,
            Polarity::High | Polarity::None => Comparator::Gt,
        }
    }
}

/// A threshold policy with an optional comparator and display unit. The
/// comparator defaults to the entry's polarity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicySpec {
    #[serde(flatten)]
    pub threshold: Threshold,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparator: Option<Comparator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

impl PolicySpec {
    pub fn new(threshold: Threshold) -> Self {
        Self {
            threshold,
            comparator: None,
            unit: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeHint {
    /// `|`-separated alternatives, each matched as a normalized substring of
    /// attribute names.
    pub pattern: String,
    pub confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policies: Option<Vec<PolicySpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaHint {
    pub kind: FormulaKind,
    /// Input patterns; each must match exactly one numeric attribute.
    pub inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policies: Option<Vec<PolicySpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub term: String,
    pub role: Role,
    pub polarity: Polarity,
    #[serde(default)]
    pub hints: Vec<AttributeHint>,
    #[serde(default)]
    pub policies: Vec<PolicySpec>,
    #[serde(default)]
    pub formulas: Vec<FormulaHint>,
    /// Set on entries built on the fly from a gradable adjective.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub synthesized: bool,
}

impl LexiconEntry {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Lexicon(format!("'{}': {msg}", self.term)));
        if match_key(&self.term).is_empty() {
            return bad("empty term".into());
        }
        if self.hints.is_empty() && self.formulas.is_empty() {
            return bad("needs at least one hint or formula".into());
        }
        let confidences = |xs: &mut dyn Iterator<Item = f64>| -> std::result::Result<(), String> {
            let mut prev = f64::INFINITY;
            for c in xs {
                if !(c > 0.0 && c <= 1.0) {
                    return Err(format!("confidence {c} outside (0, 1]"));
                }
                if c >= prev {
                    return Err("confidences must strictly descend".into());
                }
                prev = c;
            }
            Ok(())
        };
        if let Err(e) = confidences(&mut self.hints.iter().map(|h| h.confidence)) {
            return bad(e);
        }
        if let Err(e) = confidences(&mut self.formulas.iter().map(|f| f.confidence)) {
            return bad(e);
        }
        for f in &self.formulas {
            if f.inputs.is_empty() {
                return bad("formula without inputs".into());
            }
            if let Some(w) = &f.weights {
                if w.len() != f.inputs.len() {
                    return bad(format!(
                        "formula has {} inputs but {} weights",
                        f.inputs.len(),
                        w.len()
                    ));
                }
            }
        }
        let all_policies = self
            .policies
            .iter()
            .chain(self.hints.iter().flat_map(|h| h.policies.iter().flatten()))
            .chain(self.formulas.iter().flat_map(|f| f.policies.iter().flatten()));
        for p in all_policies {
            if let Threshold::Percentile { p } = p.threshold {
                if !(0.0..=100.0).contains(&p) {
                    return Err(Error::PercentileRange(p));
                }
            }
        }
        Ok(())
    }

    /// Policies for value modifiers; falls back to mean then median.
    pub fn effective_policies(&self) -> Vec<PolicySpec> {
        if self.policies.is_empty() {
            vec![PolicySpec::new(Threshold::Mean), PolicySpec::new(Threshold::Median)]
        } else {
            self.policies.clone()
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LexiconFile {
    entries: Vec<LexiconEntry>,
}

/// Gradable adjectives: polarity and the attribute patterns they lean towards.
const GRADABLES: &[(&str, Polarity, &str)] = &[
    ("high", Polarity::High, CONTEXT_ATTRIBUTE),
    ("low", Polarity::Low, CONTEXT_ATTRIBUTE),
    ("cheap", Polarity::Low, "price|cost|budget"),
    ("expensive", Polarity::High, "price|cost|budget"),
    ("tall", Polarity::High, "height"),
    ("short", Polarity::Low, "height|duration|runtime|length"),
    ("long", Polarity::High, "duration|runtime|length"),
    ("young", Polarity::Low, "age"),
    ("old", Polarity::High, "age|year"),
    ("senior", Polarity::High, "age"),
    ("strong", Polarity::High, "weight|strength"),
    ("successful", Polarity::High, CONTEXT_ATTRIBUTE),
    ("top", Polarity::High, CONTEXT_ATTRIBUTE),
    ("best", Polarity::High, CONTEXT_ATTRIBUTE),
    ("large", Polarity::High, CONTEXT_ATTRIBUTE),
    ("big", Polarity::High, CONTEXT_ATTRIBUTE),
    ("small", Polarity::Low, CONTEXT_ATTRIBUTE),
];

/// Head nouns that may trail a lexicon term ("tall athlete") and that the
/// parser strips from modifiers.
const TERM_HEADS: &[&str] = &["athlete", "player", "wrestler", "movie", "film", "show", "book", "title"];

fn gradable(word: &str) -> Option<(&'static str, Polarity, &'static str)> {
    let find = |w: &str| GRADABLES.iter().find(|(g, _, _)| *g == w).copied();
    if let Some(g) = find(word) {
        return Some(g);
    }
    for suffix in ["est", "er"] {
        if let Some(stem) = word.strip_suffix(suffix) {
            if let Some(g) = find(stem) {
                return Some(g);
            }
            // biggest -> big
            let mut chars = stem.chars();
            let last = chars.next_back();
            if last.is_some() && last == chars.clone().next_back() {
                if let Some(g) = find(chars.as_str()) {
                    return Some(g);
                }
            }
        }
    }
    None
}

/// True when `word` (already normalized) is a gradable adjective or one of
/// its comparative/superlative forms.
pub fn is_gradable(word: &str) -> bool {
    gradable(word).is_some()
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    index: BTreeMap<String, Vec<usize>>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Self::from_json(DEFAULT_LEXICON).expect("embedded lexicon is valid")
    }
}

impl Lexicon {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: LexiconFile =
            serde_json::from_str(text).map_err(|e| Error::Lexicon(e.to_string()))?;
        Self::new(file.entries)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn new(entries: Vec<LexiconEntry>) -> Result<Self> {
        let mut index: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            e.validate()?;
            for key in Self::keys_for(&e.term) {
                let slot = index.entry(key).or_default();
                if slot.iter().any(|&j| entries[j].role == e.role && match_key(&entries[j].term) == match_key(&e.term)) {
                    return Err(Error::Lexicon(format!("duplicate entry '{}'", e.term)));
                }
                slot.push(i);
            }
        }
        Ok(Self { entries, index })
    }

    fn keys_for(term: &str) -> Vec<String> {
        let words = normalize_words(term);
        let mut keys = vec![words.concat()];
        if words.len() > 1 && TERM_HEADS.contains(&words[words.len() - 1].as_str()) {
            keys.push(words[..words.len() - 1].concat());
        }
        keys
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&LexiconFile {
            entries: self.entries.clone(),
        })?)
    }

    /// Entry for a modifier term, preferring value modifiers.
    pub fn lookup_modifier(&self, term: &str) -> Result<LexiconEntry> {
        self.lookup(term, Role::ValueModifier)
    }

    /// Entry for `term`: an exact (normalized) match, then the longest entry
    /// contained in the term, then a synthesized entry when the term holds a
    /// gradable adjective. Entries of `role` win over the other role.
    pub fn lookup(&self, term: &str, role: Role) -> Result<LexiconEntry> {
        let words: Vec<String> = normalize_words(term)
            .into_iter()
            .filter(|w| !TERM_HEADS.contains(&w.as_str()))
            .collect();
        let key = words.concat();
        if let Some(e) = self.pick(&key, role) {
            return Ok(e.clone());
        }
        let mut best: Option<(usize, &LexiconEntry)> = None;
        for len in (1..words.len()).rev() {
            for start in 0..=words.len() - len {
                let sub = words[start..start + len].concat();
                if let Some(e) = self.pick(&sub, role) {
                    if best.map_or(true, |(l, _)| len > l) {
                        best = Some((len, e));
                    }
                }
            }
            if best.is_some() {
                break;
            }
        }
        if let Some((_, e)) = best {
            return Ok(e.clone());
        }
        self.synthesize(term, &words).ok_or_else(|| Error::Unresolvable {
            phrase: term.to_string(),
            reason: "no lexicon entry and no gradable adjective".into(),
        })
    }

    pub fn knows(&self, term: &str) -> bool {
        self.lookup(term, Role::ValueModifier).is_ok()
    }

    fn pick(&self, key: &str, role: Role) -> Option<&LexiconEntry> {
        let slot = self.index.get(key)?;
        slot.iter()
            .map(|&i| &self.entries[i])
            .find(|e| e.role == role)
            .or_else(|| slot.first().map(|&i| &self.entries[i]))
    }

    fn synthesize(&self, term: &str, words: &[String]) -> Option<LexiconEntry> {
        let (pos, (_, polarity, patterns)) = words
            .iter()
            .enumerate()
            .find_map(|(i, w)| gradable(w).map(|g| (i, g)))?;
        let rest: Vec<&str> = words
            .iter()
            .enumerate()
            .filter(|(i, w)| *i != pos && !is_gradable(w))
            .map(|(_, w)| w.as_str())
            .collect();
        let mut hints = Vec::new();
        let mut push = |pattern: String, confidence: f64| {
            if !hints.iter().any(|h: &AttributeHint| h.pattern == pattern) {
                hints.push(AttributeHint {
                    pattern,
                    confidence,
                    policies: None,
                });
            }
        };
        if !rest.is_empty() {
            push(rest.join(" "), 0.9);
        }
        push(patterns.to_string(), 0.8);
        push(CONTEXT_ATTRIBUTE.to_string(), 0.7);
        Some(LexiconEntry {
            term: term.trim().to_lowercase(),
            role: Role::ValueModifier,
            polarity,
            hints,
            policies: Vec::new(),
            formulas: Vec::new(),
            synthesized: true,
        })
    }
}

/// Whether `pattern` (one hint pattern, `|`-separated) matches an attribute
/// name by normalized substring.
pub fn pattern_matches(pattern: &str, attribute: &str) -> bool {
    let target = match_key(attribute);
    pattern
        .split('|')
        .map(match_key)
        .any(|alt| !alt.is_empty() && target.contains(&alt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_lexicon_loads() {
        let lex = Lexicon::default();
        assert!(lex.entries().len() >= 17);
    }

    #[test]
    fn high_rated() {
        let e = Lexicon::default().lookup_modifier("high rated").unwrap();
        assert_eq!(e.polarity, Polarity::High);
        assert!(e.hints.iter().any(|h| h.pattern.contains("imdb")));
        assert!(!e.synthesized);
    }

    #[test]
    fn head_noun_is_optional() {
        let lex = Lexicon::default();
        assert_eq!(lex.lookup_modifier("tall").unwrap().term, "tall athlete");
        assert_eq!(lex.lookup_modifier("tall athletes").unwrap().term, "tall athlete");
        assert_eq!(lex.lookup_modifier("Top winning").unwrap().term, "top-winning");
    }

    #[test]
    fn cheap_is_low_and_price_like() {
        let e = Lexicon::default().lookup_modifier("cheap").unwrap();
        assert_eq!(e.polarity, Polarity::Low);
        assert!(pattern_matches(&e.hints[0].pattern, "Price"));
    }

    #[test]
    fn gradables_are_synthesized() {
        let lex = Lexicon::default();
        let e = lex.lookup_modifier("highest grossing").unwrap();
        assert!(e.synthesized);
        assert_eq!(e.polarity, Polarity::High);
        assert_eq!(e.hints[0].pattern, "grossing");
        let e = lex.lookup_modifier("biggest").unwrap();
        assert_eq!(e.polarity, Polarity::High);
    }

    #[test]
    fn purple_is_unresolvable() {
        assert!(matches!(
            Lexicon::default().lookup_modifier("purple"),
            Err(Error::Unresolvable { .. })
        ));
    }

    #[test]
    fn contained_term() {
        let e = Lexicon::default().lookup_modifier("very high rated").unwrap();
        assert_eq!(e.term, "high rated");
    }

    #[test]
    fn validation() {
        let bad = r#"{"entries":[{"term":"x","role":"value-modifier","polarity":"high",
            "hints":[{"pattern":"a","confidence":0.5},{"pattern":"b","confidence":0.7}]}]}"#;
        assert!(matches!(Lexicon::from_json(bad), Err(Error::Lexicon(_))));
        let empty = r#"{"entries":[{"term":"x","role":"value-modifier","polarity":"high"}]}"#;
        assert!(matches!(Lexicon::from_json(empty), Err(Error::Lexicon(_))));
    }

    #[test]
    fn round_trip() {
        let lex = Lexicon::default();
        let again = Lexicon::from_json(&lex.to_json().unwrap()).unwrap();
        assert_eq!(lex.entries(), again.entries());
    }

    #[test]
    fn policy_serde() {
        let p: PolicySpec =
            serde_json::from_str(r#"{"policy":"constant","value":180,"comparator":">=","unit":"cm"}"#).unwrap();
        assert_eq!(p.threshold, Threshold::Constant { value: 180.0 });
        assert_eq!(p.comparator, Some(Comparator::Ge));
    }
}
