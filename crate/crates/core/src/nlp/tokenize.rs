use serde::{Deserialize, Serialize};

const PUNCT: &[char] = &['.', ',', '!', '?', ';', ':', '"', '\'', '(', ')'];

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub normalized: String,
}

impl Token {
    pub fn new(surface: impl Into<String>) -> Self {
        let surface = surface.into();
        let normalized = surface.to_lowercase();
        Self { surface, normalized }
    }
}

/// Splits on whitespace and peels leading/trailing punctuation off each chunk
/// into single-character tokens. Inner punctuation (`man's`, `t-shirt`) stays.
pub fn tokenize(caption: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for chunk in caption.split_whitespace() {
        let start = chunk.find(|c: char| !PUNCT.contains(&c)).unwrap_or(chunk.len());
        let end = chunk
            .rfind(|c: char| !PUNCT.contains(&c))
            .map(|i| i + chunk[i..].chars().next().map_or(1, char::len_utf8))
            .unwrap_or(start);
        out.extend(chunk[..start].chars().map(Token::new));
        if start < end {
            out.push(Token::new(&chunk[start..end]));
        }
        out.extend(chunk[end.max(start)..].chars().map(Token::new));
    }
    out
}

/// Trivial sentence splitter: breaks after `.`, `!` or `?` followed by whitespace.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut begin = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') && chars.peek().is_none_or(|(_, n)| n.is_whitespace()) {
            let s = text[begin..=i].trim();
            if !s.is_empty() {
                out.push(s);
            }
            begin = i + 1;
        }
    }
    let tail = text[begin..].trim();
    if !tail.is_empty() {
        out.push(tail);
    }
    out
}
