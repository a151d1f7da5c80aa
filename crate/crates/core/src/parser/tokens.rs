use crate::text::normalize_token;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    /// Surface text with surrounding punctuation trimmed.
    pub raw: String,
    pub lower: String,
    pub norm: String,
}

impl Token {
    fn new(raw: &str) -> Self {
        Self {
            raw: raw.to_string(),
            lower: raw.to_lowercase(),
            norm: normalize_token(raw),
        }
    }

    pub fn is(&self, word: &str) -> bool {
        self.lower == word
    }

    pub fn is_any(&self, words: &[&str]) -> bool {
        words.contains(&self.lower.as_str())
    }

    /// Plural surface form, e.g. `movies` or `shows`.
    pub fn is_plural(&self) -> bool {
        self.lower.ends_with('s') && self.norm.len() < self.lower.len() && self.norm != self.lower
    }
}

const EDGE_PUNCT: &[char] = &['.', '?', '!', ';', ':', '"', '(', ')', '[', ']', '\u{201c}', '\u{201d}'];

/// Whitespace tokenizer that splits commas into their own token and trims
/// sentence punctuation. Internal hyphens and apostrophes are kept.
pub(crate) fn tokenize(utterance: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for chunk in utterance.split_whitespace() {
        let mut parts = chunk.split(',').peekable();
        while let Some(part) = parts.next() {
            let trimmed = part.trim_matches(|c| EDGE_PUNCT.contains(&c) || c == '\'' || c == '\u{2019}');
            if !trimmed.is_empty() {
                out.push(Token::new(trimmed));
            }
            if parts.peek().is_some() {
                out.push(Token::new(","));
            }
        }
    }
    out
}

pub(crate) fn surface(tokens: &[Token]) -> String {
    tokens.iter().map(|t| t.raw.as_str()).collect::<Vec<_>>().join(" ")
}

pub(crate) fn key(tokens: &[Token]) -> String {
    tokens.iter().map(|t| t.norm.as_str()).collect()
}
