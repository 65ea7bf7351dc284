//! Caption text processing: tokenization, POS tagging, noun filtering and
//! noun normalization.

mod normalize;
mod tagger;
mod tokenize;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use normalize::normalize;
pub use tagger::{corpus_to_text, train_tagger, ModelMetadata, TaggerModel, MODEL_FORMAT_VERSION};
pub use tokenize::{split_sentences, tokenize, Token};

#[derive(Debug, thiserror::Error)]
pub enum NlpError {
    #[error("corpus line {line}: {message}")]
    Corpus { line: usize, message: String },
    #[error("tagger model: {0}")]
    Model(String),
    #[error("{0}")]
    Usage(String),
}

/// Penn Treebank noun tags.
pub const NOUN_TAGS: [&str; 4] = ["NN", "NNS", "NNP", "NNPS"];

/// `(word, tag)` pairs of one sentence.
pub type TaggedSentence = Vec<(String, String)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedToken {
    pub token: Token,
    pub tag: String,
}

impl TaggedToken {
    pub fn is_noun(&self) -> bool {
        NOUN_TAGS.contains(&self.tag.as_str())
    }
}

pub fn tag(tokens: &[Token], model: &TaggerModel) -> Vec<TaggedToken> {
    model.tag(tokens)
}

/// Parses `word_TAG` tokens, one sentence per line. Blank lines are skipped.
pub fn parse_tagged_corpus(text: &str) -> Result<Vec<TaggedSentence>, NlpError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut sentence = Vec::new();
        for item in line.split_whitespace() {
            match item.rsplit_once('_') {
                Some((w, t)) if !w.is_empty() && !t.is_empty() => sentence.push((w.to_string(), t.to_string())),
                _ => {
                    return Err(NlpError::Corpus {
                        line: i + 1,
                        message: format!("expected `word_TAG`, found `{item}`"),
                    })
                }
            }
        }
        out.push(sentence);
    }
    Ok(out)
}

/// Fraction of tokens in `corpus` the model tags correctly (0 for an empty corpus).
pub fn token_accuracy(model: &TaggerModel, corpus: &[TaggedSentence]) -> f64 {
    let mut total = 0usize;
    let mut correct = 0usize;
    for sentence in corpus {
        let tokens: Vec<Token> = sentence.iter().map(|(w, _)| Token::new(w.as_str())).collect();
        for (got, (_, want)) in model.tag(&tokens).iter().zip(sentence) {
            total += 1;
            correct += usize::from(&got.tag == want);
        }
    }
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}

/// Keeps nouns, normalized, as a set.
///
/// Before filtering, an adjacent pair whose head is a noun and whose joined
/// form (`modifier normalize(head)`) is in `compounds` is merged into a single
/// noun, so `traffic lights` yields `traffic light`.
pub fn filter_nouns(tagged: &[TaggedToken], compounds: &BTreeSet<String>) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut i = 0;
    while i < tagged.len() {
        if let Some(next) = tagged.get(i + 1).filter(|t| t.is_noun()) {
            let head = normalize(&next.token.normalized);
            let modifier = &tagged[i].token.normalized;
            let merged = [format!("{modifier} {head}"), format!("{} {head}", normalize(modifier))]
                .into_iter()
                .find(|m| compounds.contains(m));
            if let Some(m) = merged {
                out.insert(m);
                i += 2;
                continue;
            }
        }
        if tagged[i].is_noun() {
            out.insert(normalize(&tagged[i].token.normalized));
        }
        i += 1;
    }
    out
}
