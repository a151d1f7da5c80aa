//! Token normalization shared by schema matching, value matching and the
//! lexicon.
//!
//! Normalization lowercases, strips everything that is not alphanumeric,
//! folds British spellings onto American ones, reduces plural suffixes and
//! applies a light `-ly` stemmer. The rules are iterated to a fixed point so
//! that `normalize_token` is idempotent.

const SPELLING: &[(&str, &str)] = &[
    ("analyse", "analyze"),
    ("behaviour", "behavior"),
    ("catalogue", "catalog"),
    ("centre", "center"),
    ("colour", "color"),
    ("defence", "defense"),
    ("favourite", "favorite"),
    ("flavour", "flavor"),
    ("grey", "gray"),
    ("honour", "honor"),
    ("labour", "labor"),
    ("licence", "license"),
    ("metre", "meter"),
    ("neighbour", "neighbor"),
    ("organise", "organize"),
    ("programme", "program"),
    ("rumour", "rumor"),
    ("theatre", "theater"),
    ("travelled", "traveled"),
];

/// Plurals the suffix rules would mangle.
const IRREGULAR: &[(&str, &str)] = &[
    ("calories", "calorie"),
    ("children", "child"),
    ("cookies", "cookie"),
    ("lies", "lie"),
    ("men", "man"),
    ("movies", "movie"),
    ("people", "person"),
    ("pies", "pie"),
    ("rookies", "rookie"),
    ("ties", "tie"),
    ("women", "woman"),
    ("zombies", "zombie"),
];

/// Words that end like a plural or an adverb but are not.
const KEEP: &[&str] = &[
    "always", "analysis", "apply", "assembly", "bias", "bonus", "butterfly", "campus", "canvas",
    "chaos", "class", "family", "italy", "lens", "monopoly", "news", "physics", "reply", "series",
    "species", "status", "supply", "tennis", "this", "thus",
];

fn step(token: &str) -> String {
    let lowered: String = token
        .to_lowercase()
        .chars()
        .filter(|c| c.is_alphanumeric())
        .collect();
    let word = lowered.as_str();
    if let Some((_, to)) = SPELLING.iter().find(|(from, _)| *from == word) {
        return (*to).to_string();
    }
    if let Some((_, to)) = IRREGULAR.iter().find(|(from, _)| *from == word) {
        return (*to).to_string();
    }
    if KEEP.contains(&word) || !word.is_ascii() {
        return lowered;
    }
    let len = word.len();
    if len > 4 && word.ends_with("ies") {
        return format!("{}y", &word[..len - 3]);
    }
    if len > 4 && word.ends_with("es") {
        let stem = &word[..len - 2];
        if ["s", "x", "z", "ch", "sh"].iter().any(|s| stem.ends_with(s)) {
            return stem.to_string();
        }
    }
    if len > 3
        && word.ends_with('s')
        && !["ss", "us", "is"].iter().any(|s| word.ends_with(s))
    {
        return word[..len - 1].to_string();
    }
    if len >= 6 && word.ends_with("ly") {
        let before = word.as_bytes()[len - 3];
        if !b"aeiouyl".contains(&before) {
            return word[..len - 2].to_string();
        }
    }
    lowered
}

/// Normalizes a single token. Total and idempotent.
pub fn normalize_token(s: &str) -> String {
    let mut current = step(s);
    for _ in 0..16 {
        let next = step(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

/// Splits on whitespace and normalizes every token, dropping the ones that
/// normalize to nothing.
pub fn normalize_words(s: &str) -> Vec<String> {
    s.split_whitespace()
        .map(normalize_token)
        .filter(|t| !t.is_empty())
        .collect()
}

/// Space-separated normalized phrase.
pub fn normalize_phrase(s: &str) -> String {
    normalize_words(s).join(" ")
}

/// Separator-free matching key: "high-rated", "High rated" and "high rated"
/// all map to `highrated`.
pub fn match_key(s: &str) -> String {
    normalize_words(s).concat()
}

pub(crate) fn edit_distance_at_most_one(a: &str, b: &str) -> bool {
    let (a, b): (Vec<char>, Vec<char>) = (a.chars().collect(), b.chars().collect());
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    if long.len() - short.len() > 1 {
        return false;
    }
    let mut i = 0;
    let mut j = 0;
    let mut edits = 0;
    while i < short.len() && j < long.len() {
        if short[i] == long[j] {
            i += 1;
            j += 1;
            continue;
        }
        edits += 1;
        if edits > 1 {
            return false;
        }
        if short.len() == long.len() {
            i += 1;
        }
        j += 1;
    }
    edits + (long.len() - j) + (short.len() - i) <= 1
}
