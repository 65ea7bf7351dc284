//! Browser bindings for the caption checker. Every export returns a JSON
//! string; failures come back as `{"error": "..."}`.

use std::sync::OnceLock;

use caption_audit::lexicon::{MatchKind, SemanticNetwork, SimilarBy, DEFAULT_TAU};
use caption_audit::nlp::{self, TaggerModel};
use caption_audit::pipeline::{self, DetectionSet, PipelineConfig};
use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn net() -> &'static SemanticNetwork {
    static NET: OnceLock<SemanticNetwork> = OnceLock::new();
    NET.get_or_init(SemanticNetwork::packaged)
}

fn model() -> &'static TaggerModel {
    static MODEL: OnceLock<TaggerModel> = OnceLock::new();
    MODEL.get_or_init(TaggerModel::packaged)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_else(|e| error(e.to_string()))
}

fn error(message: impl Into<String>) -> String {
    json!({ "error": message.into() }).to_string()
}

fn labels(list: &str) -> Vec<String> {
    list.split([',', '\n']).map(str::trim).filter(|l| !l.is_empty()).map(str::to_string).collect()
}

/// Checks `caption` against comma-separated detector labels. `similar_by` is
/// `supercategory` or `path:<tau>`.
pub fn check_caption(caption: &str, detected: &str, tau: f64, similar_by: &str) -> String {
    let similar_by: SimilarBy = match similar_by.parse() {
        Ok(s) => s,
        Err(e) => return error(e),
    };
    let config = PipelineConfig { tau, min_score: 0.0, similar_by };
    if let Err(e) = config.check() {
        return error(e);
    }
    let dets = DetectionSet::from_labels("browser", &labels(detected));
    to_json(&pipeline::validate(&dets, caption, model(), net(), &config))
}

/// Similarity of two words or synset ids, with the shortest hypernym path.
pub fn explore_similarity(a: &str, b: &str) -> String {
    let (a, b) = (nlp::normalize(a), nlp::normalize(b));
    for w in [&a, &b] {
        if !net().knows(w) {
            return error(format!("`{w}` is not in the taxonomy"));
        }
    }
    match net().word_similarity(&a, &b) {
        Some((score, sa, sb)) => {
            let path = net().shortest_path(&sa.id, &sb.id).ok().flatten().unwrap_or_default();
            json!({
                "similarity": score.value(),
                "distance": score.distance(),
                "from": sa.id,
                "to": sb.id,
                "path": path,
            })
            .to_string()
        }
        None => json!({ "similarity": null, "path": [] }).to_string(),
    }
}

/// Tags a caption and shows how each noun maps onto a category.
pub fn analyze_caption(caption: &str, tau: f64) -> String {
    let tagged = model().tag(&nlp::tokenize(caption));
    let tokens: Vec<Value> = tagged.iter().map(|t| json!({ "word": t.token.surface, "tag": t.tag })).collect();
    let nouns: Vec<Value> = nlp::filter_nouns(&tagged, net().compound_terms())
        .into_iter()
        .map(|noun| match net().resolve_common_term(&noun, tau) {
            Some(m) => {
                let how = match m.kind {
                    MatchKind::Name => json!("name"),
                    MatchKind::Lemma => json!("lemma"),
                    MatchKind::Similar(s) => json!({ "similarity": s.value() }),
                };
                json!({ "noun": noun, "term": m.term.name, "supercategory": m.term.supercategory, "match": how })
            }
            None => json!({ "noun": noun, "term": null }),
        })
        .collect();
    json!({ "tokens": tokens, "nouns": nouns }).to_string()
}

pub fn category_list() -> String {
    to_json(&net().categories())
}

#[wasm_bindgen]
pub fn validate(caption: &str, detected: &str, tau: f64, similar_by: &str) -> String {
    check_caption(caption, detected, tau, similar_by)
}

#[wasm_bindgen]
pub fn similarity(a: &str, b: &str) -> String {
    explore_similarity(a, b)
}

#[wasm_bindgen]
pub fn analyze(caption: &str, tau: f64) -> String {
    analyze_caption(caption, tau)
}

#[wasm_bindgen]
pub fn categories() -> String {
    category_list()
}

#[wasm_bindgen]
pub fn default_tau() -> f64 {
    DEFAULT_TAU
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn validate_round_trip() {
        let v = parse(check_caption("a woman cutting a pizza", "person, cake, knife", 0.25, "supercategory"));
        assert_eq!(v["is_foil"], true);
        assert_eq!(v["corrections"]["pizza"], "cake");
        let v = parse(check_caption("a man riding a bicycle", "person,motorcycle,bicycle", 0.25, "supercategory"));
        assert_eq!(v["is_foil"], false);
        assert!(parse(check_caption("a cat", "cat", 0.25, "nearest"))["error"].is_string());
        assert!(parse(check_caption("a cat", "cat", 0.0, "supercategory"))["error"].is_string());
    }

    #[test]
    fn similarity_paths() {
        let v = parse(explore_similarity("cake", "cake"));
        assert_eq!(v["similarity"], 1.0);
        let v = parse(explore_similarity("dogs", "cat"));
        assert_eq!(v["path"].as_array().unwrap().first().unwrap(), "dog.n.01");
        assert!(parse(explore_similarity("zamboni", "cat"))["error"].is_string());
    }

    #[test]
    fn analysis_lists_nouns() {
        let v = parse(analyze_caption("a woman cutting a pizza", 0.25));
        assert_eq!(v["tokens"].as_array().unwrap().len(), 5);
        let terms: Vec<&str> = v["nouns"].as_array().unwrap().iter().map(|n| n["term"].as_str().unwrap()).collect();
        assert_eq!(terms, ["pizza", "person"]);
        assert_eq!(parse(category_list()).as_array().unwrap().len(), 80);
    }
}
