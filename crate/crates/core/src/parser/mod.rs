//! Rule-based parser for comparison utterances.
//!
//! The utterance is split into a compare cue, an attribute phrase and a
//! reference phrase. The reference phrase is partitioned at joiners ("and",
//! "to", "versus", commas) into at most two value references; each is
//! matched against cell values and otherwise kept as an implicit reference
//! carrying its vague modifier.

mod classify;
mod matcher;
mod tokens;

use std::borrow::Cow;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use classify::{
    classify_cardinality, classify_concreteness, Cardinality, Concreteness, ConcretenessCell, Level,
};
pub use matcher::{match_reference, match_reference_in, ReferenceMatch, SchemaIndex, ValueMatch};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::lexicon::{is_gradable, Lexicon};
use crate::text::match_key;
use tokens::{key, surface, tokenize, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Plurality {
    Singleton,
    Set,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ValueKind {
    /// Cell values named outright. An empty list means every row.
    Explicit { matches: Vec<ValueMatch> },
    /// A phrase whose rows depend on interpreting `modifier`; `scope` holds
    /// explicit values that narrow it ("high rated *fiction* books").
    Implicit {
        phrase: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        modifier: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        scope: Vec<ValueMatch>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueReference {
    pub surface: String,
    pub kind: ValueKind,
    pub plurality: Plurality,
    /// "other PG-13 movies": the set leaves out the singleton.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub excludes_singleton: bool,
}

impl ValueReference {
    pub fn is_explicit(&self) -> bool {
        matches!(self.kind, ValueKind::Explicit { .. })
    }

    /// Explicit matches, or the scope of an implicit reference.
    pub fn scope(&self) -> &[ValueMatch] {
        match &self.kind {
            ValueKind::Explicit { matches } => matches,
            ValueKind::Implicit { scope, .. } => scope,
        }
    }

    pub fn modifier(&self) -> Option<&str> {
        match &self.kind {
            ValueKind::Implicit { modifier, .. } => modifier.as_deref(),
            ValueKind::Explicit { .. } => None,
        }
    }

    /// Short label for legends: the matched value, or the implicit phrase.
    pub fn label(&self) -> String {
        match &self.kind {
            ValueKind::Implicit { phrase, .. } => phrase.clone(),
            ValueKind::Explicit { matches } if matches.is_empty() => self.surface.clone(),
            ValueKind::Explicit { matches } => matches
                .iter()
                .map(|m| m.value.as_str())
                .collect::<Vec<_>>()
                .join(" "),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum AttributeRefKind {
    Explicit { attribute: String },
    Implicit { phrase: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeReference {
    pub surface: String,
    pub kind: AttributeRefKind,
}

impl AttributeReference {
    pub fn explicit_attribute(&self) -> Option<&str> {
        match &self.kind {
            AttributeRefKind::Explicit { attribute } => Some(attribute),
            AttributeRefKind::Implicit { .. } => None,
        }
    }

    fn identity(&self) -> String {
        match &self.kind {
            AttributeRefKind::Explicit { attribute } => attribute.clone(),
            AttributeRefKind::Implicit { phrase } => match_key(phrase),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedComparison {
    pub utterance: String,
    pub value_refs: Vec<ValueReference>,
    pub attribute_ref: AttributeReference,
    pub cardinality: Cardinality,
    pub concreteness: Concreteness,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

/// Identifier of the attribute reference in plans and choose requests.
pub const ATTRIBUTE_REF: &str = "attribute";

/// Identifier of the value reference at `index`.
pub fn value_ref_id(index: usize) -> String {
    format!("value:{index}")
}

impl ParsedComparison {
    /// `(reference id, reference)` for every implicit reference, attribute
    /// first.
    pub fn implicit_refs(&self) -> Vec<(String, ImplicitRef<'_>)> {
        let mut out = Vec::new();
        if let AttributeRefKind::Implicit { phrase } = &self.attribute_ref.kind {
            out.push((ATTRIBUTE_REF.to_string(), ImplicitRef::Attribute(phrase)));
        }
        for (i, r) in self.value_refs.iter().enumerate() {
            if !r.is_explicit() {
                out.push((value_ref_id(i), ImplicitRef::Value(r)));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ImplicitRef<'a> {
    Attribute(&'a str),
    Value(&'a ValueReference),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParserConfig {
    /// Allow edit-distance-1 matches on attribute names and values.
    #[serde(default)]
    pub fuzzy: bool,
}

const COMPARE_CUES: &[&str] = &["compare", "compared", "comparing", "comparison", "contrast", "contrasting"];
const INFIX_CUES: &[&str] = &["versus", "vs", "v", "against"];
const JOINERS: &[&str] = &["and", "to", "with", "versus", "vs", "v", "against", ",", "&"];
const CONNECTORS: &[&str] = &["of", "for", "across", "among", "amongst", "between"];
const QUANTITY_NOUNS: &[&str] = &["number", "amount", "count", "level", "total", "quantity", "share"];
const PARTICIPLES: &[&str] = &[
    "won", "obtained", "earned", "achieved", "received", "scored", "collected", "made", "grossed",
];
const RELATIVES: &[&str] = &["who", "that", "which", "whose"];
const SET_CUES: &[&str] = &["all", "every", "each", "across", "various", "several", "many"];
const OTHER_CUES: &[&str] = &["other", "others", "rest", "remaining"];
const SINGULAR_CUES: &[&str] = &["a", "an", "one", "single", "this"];
const DETERMINERS: &[&str] = &["the", "a", "an", "their", "its", "his", "her", "our", "my", "your", "these", "those"];
const STOPWORDS: &[&str] = &[
    "the", "a", "an", "of", "in", "on", "for", "from", "by", "during", "with", "at", "their", "its",
    "his", "her", "that", "who", "which", "whose", "was", "were", "are", "is", "be", "been", "than",
    "those", "these", "this", "some", "any", "released", "produced", "listed", "between", "among",
    "and", "to", "as", "within", "under", "over", "into", "there", "one", "single", ",", "&",
    "published", "written", "do", "did", "does", "it", "they", "them",
];
/// Nouns that name the kind of entity rather than restrict it.
const GENERIC_HEADS: &[&str] = &[
    "book", "movie", "film", "show", "series", "title", "athlete", "player", "participant",
    "competitor", "wrestler", "person", "item", "entry", "entity", "record", "row", "tv", "one",
    "thing", "state", "product", "team",
];
/// Nouns that name a grouping column ("the Thriller genre").
const CONTAINER_NOUNS: &[&str] = &[
    "event", "category", "genre", "sport", "type", "group", "class", "division", "region",
    "country", "language", "year", "season",
];
const VERBS: &[&str] = &[
    "won", "win", "wins", "have", "has", "had", "got", "get", "earned", "received", "scored",
    "with", "are", "is", "were", "was", "achieved", "obtained",
];
const TRAILING_CLAUSES: &[&[&str]] = &[
    &["in", "terms", "of"],
    &["with", "respect", "to"],
    &["with", "regard", "to"],
    &["with", "regards", "to"],
    &["on", "the", "basis", "of"],
    &["when", "it", "comes", "to"],
    &["based", "on"],
    &["regarding"],
    &["by", "their"],
    &["by", "its"],
    &["for", "their"],
    &["on", "their"],
];

/// Parser bound to one dataset and lexicon.
#[derive(Debug, Clone)]
pub struct Parser<'a> {
    index: Cow<'a, SchemaIndex>,
    lexicon: &'a Lexicon,
}

/// Parses with the default lexicon and strict matching.
pub fn parse(utterance: &str, d: &Dataset) -> Result<ParsedComparison> {
    let lexicon = Lexicon::default();
    Parser::new(d, &lexicon, ParserConfig::default()).parse(utterance)
}

#[derive(Debug, Clone)]
struct Segment {
    reference: ValueReference,
    local_attribute: Option<AttributeReference>,
    score: u8,
}

struct Flags {
    set: bool,
    other: bool,
    singular: bool,
}

impl<'a> Parser<'a> {
    pub fn new(d: &Dataset, lexicon: &'a Lexicon, config: ParserConfig) -> Self {
        Self {
            index: Cow::Owned(SchemaIndex::new(d, config.fuzzy)),
            lexicon,
        }
    }

    /// Reuses an index built earlier for the same dataset.
    pub fn with_index(index: &'a SchemaIndex, lexicon: &'a Lexicon) -> Self {
        Self {
            index: Cow::Borrowed(index),
            lexicon,
        }
    }

    pub fn index(&self) -> &SchemaIndex {
        &self.index
    }

    pub fn parse(&self, utterance: &str) -> Result<ParsedComparison> {
        let toks = tokenize(utterance);
        let mut diagnostics = Vec::new();
        let (body, cued) = split_cue(&toks);
        match &cued {
            Some(cue) => diagnostics.push(format!("comparison cue '{cue}'")),
            None => diagnostics.push("no comparison cue".to_string()),
        }
        if body.is_empty() {
            diagnostics.push("nothing to compare".into());
            return Err(Error::NotAComparison { diagnostics });
        }

        let (attr_toks, ref_toks, across) = split_attribute(body);
        let global = match attr_toks {
            Some(t) => {
                diagnostics.push(format!("attribute phrase '{}'", surface(t)));
                self.attribute_reference(t)?
            }
            None => None,
        };
        if ref_toks.is_empty() {
            diagnostics.push("no value references".into());
            return Err(Error::NotAComparison { diagnostics });
        }

        let segments = self.partition(ref_toks)?;
        let weak = segments.iter().all(|s| s.score == 0);
        let gradable = segments
            .iter()
            .any(|s| s.reference.modifier().is_some_and(|m| self.lexicon.knows(m)));
        if cued.is_none() && (weak || !(segments.len() == 2 || gradable)) {
            diagnostics.push(format!(
                "'{}' has no compare verb, joined references or gradable structure",
                surface(ref_toks)
            ));
            return Err(Error::NotAComparison { diagnostics });
        }

        let mut attribute = global;
        for seg in &segments {
            if let Some(local) = &seg.local_attribute {
                match &attribute {
                    Some(a) if a.identity() != local.identity() => {
                        return Err(Error::CrossAttribute {
                            first: a.surface.clone(),
                            second: local.surface.clone(),
                        })
                    }
                    Some(_) => {}
                    None => attribute = Some(local.clone()),
                }
            }
        }
        let attribute_ref = attribute.ok_or_else(|| Error::MissingAttribute(utterance.trim().to_string()))?;

        let mut value_refs: Vec<ValueReference> = segments.into_iter().map(|s| s.reference).collect();
        if across && value_refs.len() == 1 {
            value_refs[0].plurality = Plurality::Set;
        }
        // Singletons lead so that swapping the two phrases is a no-op.
        value_refs.sort_by_key(|r| r.plurality == Plurality::Set);
        for r in &value_refs {
            diagnostics.push(format!(
                "reference '{}': {} {}",
                r.surface,
                if r.is_explicit() { "explicit" } else { "implicit" },
                match r.plurality {
                    Plurality::Singleton => "singleton",
                    Plurality::Set => "set",
                }
            ));
        }
        let cardinality = classify_cardinality(&value_refs)?;
        let concreteness = classify_concreteness(&value_refs, &attribute_ref);
        Ok(ParsedComparison {
            utterance: utterance.trim().to_string(),
            value_refs,
            attribute_ref,
            cardinality,
            concreteness,
            diagnostics,
        })
    }

    fn attribute_reference(&self, toks: &[Token]) -> Result<Option<AttributeReference>> {
        let mut start = 0;
        while start < toks.len() && toks[start].is_any(DETERMINERS) {
            start += 1;
        }
        let toks = &toks[start..];
        if toks.is_empty() {
            return Ok(None);
        }
        let phrase = surface(toks);
        let words: Vec<String> = toks.iter().map(|t| t.norm.clone()).filter(|w| !w.is_empty()).collect();
        let mut found = self.index.lookup_attribute(&words)?;
        if found.is_none() {
            let mut i = 0;
            while i < toks.len() && (toks[i].is_any(QUANTITY_NOUNS) || toks[i].is("of")) {
                i += 1;
            }
            if i > 0 && i < toks.len() {
                let rest: Vec<String> = toks[i..].iter().map(|t| t.norm.clone()).collect();
                found = self.index.lookup_attribute(&rest)?;
            }
        }
        let kind = match found {
            Some(attribute) => AttributeRefKind::Explicit { attribute },
            None => AttributeRefKind::Implicit {
                phrase: phrase.to_lowercase(),
            },
        };
        Ok(Some(AttributeReference { surface: phrase, kind }))
    }

    /// Chooses the joiner cuts whose weakest segment scores best, preferring
    /// two references, then one, then more.
    fn partition(&self, toks: &[Token]) -> Result<Vec<Segment>> {
        let joiners: Vec<usize> = (1..toks.len().saturating_sub(1))
            .filter(|&i| toks[i].is_any(JOINERS))
            .take(12)
            .collect();
        let mut cache: BTreeMap<(usize, usize), Option<Segment>> = BTreeMap::new();
        let mut first_error: Option<Error> = None;
        let mut best: Option<((u8, u8), Vec<Segment>)> = None;
        for mask in 0u32..(1 << joiners.len()) {
            let cuts: Vec<usize> = joiners
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &i)| i)
                .collect();
            let mut bounds = Vec::new();
            let mut from = 0;
            for &c in &cuts {
                bounds.push((from, c));
                from = c + 1;
            }
            bounds.push((from, toks.len()));
            let mut segs = Vec::new();
            let mut ok = true;
            for &(a, b) in &bounds {
                let seg = cache
                    .entry((a, b))
                    .or_insert_with(|| {
                        if a >= b {
                            return None;
                        }
                        match self.segment(&toks[a..b]) {
                            Ok(s) => s,
                            Err(e) => {
                                first_error.get_or_insert(e);
                                None
                            }
                        }
                    })
                    .clone();
                match seg {
                    Some(s) => segs.push(s),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let min = segs.iter().map(|s| s.score).min().unwrap_or(0);
            let shape = match segs.len() {
                2 => 3,
                1 => 2,
                _ => 1,
            };
            let rank = (min, shape);
            if best.as_ref().map_or(true, |(r, _)| rank > *r) {
                best = Some((rank, segs));
            }
        }
        match best {
            Some((_, segs)) if segs.len() > 2 => Err(Error::UnsupportedArity(format!(
                "{} reference groups ({}); at most two are supported",
                segs.len(),
                segs.iter()
                    .map(|s| format!("'{}'", s.reference.surface))
                    .collect::<Vec<_>>()
                    .join(", ")
            ))),
            Some((_, segs)) => Ok(segs),
            None => Err(first_error.unwrap_or_else(|| Error::NotAComparison {
                diagnostics: vec![format!("no value references in '{}'", surface(toks))],
            })),
        }
    }

    /// Parses one reference phrase. `None` when nothing usable remains.
    fn segment(&self, toks: &[Token]) -> Result<Option<Segment>> {
        let surface_text = surface(toks);
        let mut toks: Vec<Token> = toks.to_vec();
        let mut local_attribute = None;
        let mut clause_modifier: Vec<String> = Vec::new();

        // "... medals won by Rebecca Adlington"
        if let Some(i) = (0..toks.len().saturating_sub(1))
            .find(|&i| toks[i].is_any(PARTICIPLES) && toks[i + 1].is("by"))
        {
            if i > 0 {
                local_attribute = self.attribute_reference(&toks[..i])?;
            }
            toks.drain(..i + 2);
        }
        let phrase_toks: Vec<Token> = toks
            .iter()
            .filter(|t| !t.is_any(SET_CUES) && !t.is_any(OTHER_CUES))
            .cloned()
            .collect();
        let phrase = strip_edges(&phrase_toks).to_lowercase();
        // "athletes who won a high number of gold medals"
        if let Some(i) = toks.iter().position(|t| t.is_any(RELATIVES)) {
            let clause: Vec<Token> = toks.split_off(i)[1..].to_vec();
            let mut attr_toks = Vec::new();
            for t in clause {
                if t.is_any(VERBS) || t.is_any(DETERMINERS) || t.is_any(QUANTITY_NOUNS) || t.is("of") || t.is("more") || t.is("most") {
                    continue;
                }
                if is_gradable(&t.norm) || (attr_toks.is_empty() && self.lexicon_knows_word(&t)) {
                    clause_modifier.push(t.lower.clone());
                } else {
                    attr_toks.push(t);
                }
            }
            if !attr_toks.is_empty() {
                let local = self.attribute_reference(&attr_toks)?;
                if local.is_some() {
                    local_attribute = local;
                }
            }
        }

        let mut flags = Flags {
            set: false,
            other: false,
            singular: false,
        };
        toks.retain(|t| {
            if t.is_any(SET_CUES) {
                flags.set = true;
                false
            } else if t.is_any(OTHER_CUES) {
                flags.other = true;
                false
            } else {
                if t.is_any(SINGULAR_CUES) {
                    flags.singular = true;
                }
                true
            }
        });
        while toks.first().is_some_and(|t| t.is_any(STOPWORDS)) {
            toks.remove(0);
        }
        while toks.last().is_some_and(|t| t.is_any(STOPWORDS)) {
            toks.pop();
        }
        if toks.is_empty() && clause_modifier.is_empty() && !flags.other && !flags.set {
            return Ok(None);
        }

        let mut matches: Vec<ValueMatch> = Vec::new();
        let mut used = vec![false; toks.len()];
        if let Some(m) = self.index.lookup_value(&key(&toks))? {
            matches.push(m);
            used.iter_mut().for_each(|u| *u = true);
        } else {
            for len in (1..=toks.len()).rev() {
                for start in 0..=toks.len() - len {
                    let end = start + len;
                    if used[start..end].iter().any(|&u| u)
                        || toks[start].is_any(STOPWORDS)
                        || toks[end - 1].is_any(STOPWORDS)
                    {
                        continue;
                    }
                    if let Some(m) = self.index.lookup_value(&key(&toks[start..end]))? {
                        if !matches.contains(&m) {
                            matches.push(m);
                        }
                        used[start..end].iter_mut().for_each(|u| *u = true);
                    }
                }
            }
        }

        let entity_key = self.index.entity().map(match_key).unwrap_or_default();
        let mut modifier: Vec<String> = clause_modifier;
        let mut heads = 0;
        for (t, &u) in toks.iter().zip(&used) {
            if u || t.is_any(STOPWORDS) || t.norm.is_empty() {
                continue;
            }
            if t.is_any(GENERIC_HEADS)
                || GENERIC_HEADS.contains(&t.norm.as_str())
                || CONTAINER_NOUNS.contains(&t.norm.as_str())
                || t.norm == entity_key
            {
                heads += 1;
                continue;
            }
            modifier.push(t.lower.clone());
        }

        let entity = self.index.entity();
        let entity_matches = matches
            .iter()
            .filter(|m| Some(m.attribute.as_str()) == entity)
            .count();
        let last_plural = toks.last().is_some_and(Token::is_plural);
        let plurality = if flags.set || flags.other {
            Plurality::Set
        } else if entity_matches == 1 && modifier.is_empty() {
            Plurality::Singleton
        } else if entity_matches > 1 {
            Plurality::Set
        } else if flags.singular {
            Plurality::Singleton
        } else if !modifier.is_empty() {
            if last_plural {
                Plurality::Set
            } else {
                Plurality::Singleton
            }
        } else {
            Plurality::Set
        };

        let has_joiner = toks.iter().any(|t| t.is_any(JOINERS) && !t.is("with"));
        let (kind, score) = if !modifier.is_empty() {
            let modifier = modifier.join(" ");
            let known = self.lexicon.knows(&modifier);
            (
                ValueKind::Implicit {
                    phrase: if phrase.is_empty() { modifier.clone() } else { phrase },
                    modifier: Some(modifier),
                    scope: matches,
                },
                if known { 2 } else { 0 },
            )
        } else if !matches.is_empty() {
            let score = if has_joiner && entity_matches > 1 { 1 } else { 3 };
            (ValueKind::Explicit { matches }, score)
        } else if heads > 0 || flags.other || flags.set {
            (ValueKind::Explicit { matches: vec![] }, 1)
        } else {
            return Ok(None);
        };
        Ok(Some(Segment {
            reference: ValueReference {
                surface: surface_text,
                kind,
                plurality,
                excludes_singleton: flags.other,
            },
            local_attribute,
            score,
        }))
    }

    fn lexicon_knows_word(&self, t: &Token) -> bool {
        !t.is_any(STOPWORDS) && self.lexicon.knows(&t.lower) && !self.index.attribute_key_matches(&t.norm)
    }
}

fn strip_edges(toks: &[Token]) -> String {
    let mut a = 0;
    let mut b = toks.len();
    while a < b && toks[a].is_any(STOPWORDS) {
        a += 1;
    }
    while b > a && toks[b - 1].is_any(STOPWORDS) {
        b -= 1;
    }
    surface(&toks[a..b])
}

/// Body after the compare cue, and the cue itself.
fn split_cue(toks: &[Token]) -> (&[Token], Option<String>) {
    for (i, t) in toks.iter().enumerate() {
        if t.is_any(COMPARE_CUES) {
            // "X compared to Y": the cue joins the references.
            if i > 0 && toks.get(i + 1).is_some_and(|n| n.is("to") || n.is("with")) {
                return (toks, Some(t.lower.clone()));
            }
            let mut rest = &toks[i + 1..];
            while rest.first().is_some_and(|n| n.is("between") || n.is("of") || n.is("the") && rest.len() > 1 && rest[1].is("between")) {
                rest = &rest[1..];
            }
            return (rest, Some(t.lower.clone()));
        }
        if (t.is("difference") || t.is("differences")) && toks.get(i + 1).is_some_and(|n| n.is("between") || n.is("in")) {
            return (&toks[i + 2..], Some(format!("{} {}", t.lower, toks[i + 1].lower)));
        }
    }
    if let Some(t) = toks.iter().find(|t| t.is_any(INFIX_CUES)) {
        return (toks, Some(t.lower.clone()));
    }
    (toks, None)
}

/// Splits the body into an attribute phrase and the reference phrase. The
/// flag reports an "across" connector.
fn split_attribute(body: &[Token]) -> (Option<&[Token]>, &[Token], bool) {
    for clause in TRAILING_CLAUSES {
        let n = clause.len();
        if body.len() <= n {
            continue;
        }
        for i in (1..body.len() - n + 1).rev() {
            if body[i..i + n].iter().zip(clause.iter()).all(|(t, w)| t.is(w)) && i + n < body.len() {
                return (Some(&body[i + n..]), &body[..i], false);
            }
        }
    }
    for i in 0..body.len() {
        let t = &body[i];
        let connector = if t.is_any(CONNECTORS) {
            !(t.is("of") && i > 0 && body[i - 1].is_any(QUANTITY_NOUNS))
        } else {
            t.is_any(PARTICIPLES) && body.get(i + 1).is_some_and(|n| n.is("by"))
        };
        if !connector {
            continue;
        }
        let head = &body[..i];
        let skip = if t.is_any(PARTICIPLES) { 2 } else { 1 };
        let across = t.is("across") || t.is("among") || t.is("amongst");
        if head.iter().any(|h| h.is_any(JOINERS) || h.is_any(RELATIVES)) {
            return (None, body, false);
        }
        if head.iter().all(|h| h.is_any(DETERMINERS)) {
            return (None, &body[i + skip..], across);
        }
        return (Some(head), &body[i + skip..], across);
    }
    (None, body, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_dataset;

    fn netflix() -> Dataset {
        load_dataset(include_bytes!("../../../../data/netflix.csv")).unwrap()
    }

    fn olympics() -> Dataset {
        load_dataset(include_bytes!("../../../../data/olympics.csv")).unwrap()
    }

    fn books() -> Dataset {
        load_dataset(include_bytes!("../../../../data/books.csv")).unwrap()
    }

    fn sales() -> Dataset {
        load_dataset(include_bytes!("../../../../data/sales.csv")).unwrap()
    }

    fn labels(p: &ParsedComparison) -> (Cardinality, ConcretenessCell) {
        (p.cardinality, p.concreteness.cell)
    }

    #[test]
    fn one_to_one() {
        let p = parse("compare the IMDB ratings of Squid Game and Midnight Mass", &netflix()).unwrap();
        assert_eq!(labels(&p), (Cardinality::OneToOne, ConcretenessCell::EvEa));
        assert_eq!(p.attribute_ref.explicit_attribute(), Some("IMDB rating"));
        assert_eq!(p.value_refs[0].scope()[0].value, "Squid Game");
        assert_eq!(p.value_refs[1].scope()[0].value, "Midnight Mass");
    }

    #[test]
    fn one_to_many_with_implicit_attribute() {
        let p = parse("compare the performance of Starling to other PG-13 movies", &netflix()).unwrap();
        assert_eq!(labels(&p), (Cardinality::OneToMany, ConcretenessCell::EvIa));
        assert_eq!(p.value_refs[0].scope()[0].value, "The Starling");
        assert!(p.value_refs[1].excludes_singleton);
        assert!(p.value_refs[1].scope().iter().any(|m| m.value == "PG-13"));
    }

    #[test]
    fn swapped_order_is_identical() {
        let d = netflix();
        let a = parse("compare the performance of Starling to other PG-13 movies", &d).unwrap();
        let b = parse("compare the performance of other PG-13 movies to Starling", &d).unwrap();
        assert_eq!(labels(&a), labels(&b));
        assert_eq!(a.value_refs, b.value_refs);
    }

    #[test]
    fn within_one_set() {
        let p = parse("compare the budgets across all US movies", &netflix()).unwrap();
        assert_eq!(labels(&p), (Cardinality::Many, ConcretenessCell::EvEa));
        assert_eq!(p.attribute_ref.explicit_attribute(), Some("Budget"));
    }

    #[test]
    fn set_to_set() {
        let p = parse("compare crime shows to thriller shows in terms of box office", &netflix()).unwrap();
        assert_eq!(labels(&p), (Cardinality::ManyToMany, ConcretenessCell::EvEa));
        assert_eq!(p.attribute_ref.explicit_attribute(), Some("Box office"));
    }

    #[test]
    fn sales_example() {
        let p = parse("compare the sales for Washington and California", &sales()).unwrap();
        assert_eq!(labels(&p), (Cardinality::OneToOne, ConcretenessCell::EvEa));
        assert_eq!(p.attribute_ref.explicit_attribute(), Some("Sales"));
    }

    #[test]
    fn implicit_attribute_over_a_year() {
        let p = parse("compare the popularity of all movies in 2021", &netflix()).unwrap();
        assert_eq!(p.cardinality, Cardinality::Many);
        assert_eq!(p.concreteness.attribute, Level::Implicit);
        assert!(p.value_refs[0].scope().iter().any(|m| m.value == "2021"));
    }

    #[test]
    fn participle_attribute() {
        let p = parse(
            "compare the number of silver medals won by Rebecca Adlington to all other participants in the Women's Swimming Event",
            &olympics(),
        )
        .unwrap();
        assert_eq!(labels(&p), (Cardinality::OneToMany, ConcretenessCell::EvEa));
        assert_eq!(p.attribute_ref.explicit_attribute(), Some("Silver"));
        assert!(p.value_refs[1].scope().iter().any(|m| m.value == "Women's Swimming"));
    }

    #[test]
    fn cross_attribute_is_rejected() {
        let r = parse(
            "compare the gold medals obtained by Rebecca Adlington to the bronze medals obtained by Nathan Ghar-Jun Adrian",
            &olympics(),
        );
        assert!(matches!(r, Err(Error::CrossAttribute { .. })), "{r:?}");
    }

    #[test]
    fn relative_clause_gradable() {
        let p = parse("compare athletes who won a high number of gold medals", &olympics()).unwrap();
        assert_eq!(labels(&p), (Cardinality::Many, ConcretenessCell::IvEa));
        assert_eq!(p.attribute_ref.explicit_attribute(), Some("Gold"));
        assert_eq!(p.value_refs[0].modifier(), Some("high"));
    }

    #[test]
    fn not_a_comparison() {
        assert!(matches!(parse("what time is it", &netflix()), Err(Error::NotAComparison { .. })));
        assert!(matches!(parse("hello", &books()), Err(Error::NotAComparison { .. })));
    }

    #[test]
    fn mixed_concreteness() {
        let p = parse(
            "compare a low budget TV show to Squid Game with respect to their popularity",
            &netflix(),
        )
        .unwrap();
        assert_eq!(labels(&p), (Cardinality::OneToOne, ConcretenessCell::IvIa));
        assert!(p.concreteness.mixed_flag);
    }

    #[test]
    fn three_entities_are_unsupported() {
        let r = parse("compare the IMDB rating of Squid Game, Dark and Midnight Mass", &netflix());
        assert!(matches!(r, Err(Error::UnsupportedArity(_))), "{r:?}");
    }

    #[test]
    fn title_containing_a_joiner() {
        let p = parse(
            "compare the price of Harry Potter and the Chamber of Secrets and The Alchemist",
            &books(),
        )
        .unwrap();
        assert_eq!(p.cardinality, Cardinality::OneToOne);
        assert_eq!(p.value_refs[0].scope()[0].value, "Harry Potter and the Chamber of Secrets");
    }

    #[test]
    fn books_matrix_cells() {
        let d = books();
        let cases = [
            ("compare the user rating of The Alchemist and Becoming", "1-1", "ev-ea"),
            ("compare the popularity of The Alchemist and Becoming", "1-1", "ev-ia"),
            ("compare the user rating of a bestseller book and a cheap book", "1-1", "iv-ea"),
            ("compare the popularity of a cheap book and a bestseller book", "1-1", "iv-ia"),
            ("compare the price of The Alchemist to other fiction books", "1-n", "ev-ea"),
            ("compare the popularity of The Alchemist to other fiction books", "1-n", "ev-ia"),
            ("compare the price of a bestseller book to other high rated books", "1-n", "iv-ea"),
            ("compare the popularity of a cheap book to other high rated books", "1-n", "iv-ia"),
            ("compare the price across all fiction books", "n", "ev-ea"),
            ("compare the popularity across all fiction books", "n", "ev-ia"),
            ("compare the price of all high rated books", "n", "iv-ea"),
            ("compare the popularity of all expensive books", "n", "iv-ia"),
            ("compare fiction books to non fiction books in terms of price", "n-m", "ev-ea"),
            ("compare fiction books to non fiction books in terms of popularity", "n-m", "ev-ia"),
            ("compare high rated fiction books to high rated non fiction books in terms of price", "n-m", "iv-ea"),
            ("compare high rated non fiction books to cheap non fiction books in terms of popularity", "n-m", "iv-ia"),
        ];
        for (u, card, cell) in cases {
            let p = parse(u, &d).unwrap_or_else(|e| panic!("{u}: {e}"));
            assert_eq!((p.cardinality.as_str(), p.concreteness.cell.as_str()), (card, cell), "{u}");
        }
    }

    #[test]
    fn fiction_is_not_non_fiction() {
        let p = parse("compare fiction books to non fiction books in terms of price", &books()).unwrap();
        let values: Vec<&str> = p.value_refs.iter().map(|r| r.scope()[0].value.as_str()).collect();
        assert_eq!(values, ["Fiction", "Non Fiction"]);
    }

    #[test]
    fn serializes_stable_fields() {
        let p = parse("compare the sales for Washington and California", &sales()).unwrap();
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["cardinality"], "1-1");
        assert_eq!(v["concreteness"]["cell"], "ev-ea");
        assert_eq!(v["concreteness"]["mixed_flag"], false);
        assert_eq!(v["value_refs"][0]["surface"], "Washington");
        assert_eq!(v["value_refs"][0]["kind"]["type"], "explicit");
    }
}
