//! Caption validation: term sets from detections and caption, set comparison,
//! replacement proposals and the foil verdict.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::lexicon::{SemanticNetwork, SimilarBy, DEFAULT_TAU};
use crate::nlp::{filter_nouns, normalize, tokenize, TaggerModel};

/// Detection score floor used by interactive validation.
pub const INTERACTIVE_MIN_SCORE: f64 = 0.5;
/// Detection score floor used by benchmark runs; keeps every detection.
pub const BENCHMARK_MIN_SCORE: f64 = 0.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Minimum path similarity for mapping an unknown noun onto a category.
    pub tau: f64,
    /// Detections scoring below this are ignored; a missing score counts as 1.
    pub min_score: f64,
    pub similar_by: SimilarBy,
}

impl PipelineConfig {
    pub fn interactive() -> Self {
        Self { tau: DEFAULT_TAU, min_score: INTERACTIVE_MIN_SCORE, similar_by: SimilarBy::Supercategory }
    }

    pub fn benchmark() -> Self {
        Self { min_score: BENCHMARK_MIN_SCORE, ..Self::interactive() }
    }

    pub fn check(&self) -> Result<(), String> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(format!("tau must lie in (0, 1], got {}", self.tau));
        }
        if !(0.0..=1.0).contains(&self.min_score) {
            return Err(format!("min_score must lie in [0, 1], got {}", self.min_score));
        }
        if let SimilarBy::Path { tau } = self.similar_by {
            if !(tau > 0.0 && tau <= 1.0) {
                return Err(format!("similar-by tau must lie in (0, 1], got {tau}"));
            }
        }
        Ok(())
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self::interactive()
    }
}

/// Pixel box `(x, y, w, h)`, serialized as a four-element array.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl From<[f64; 4]> for BoundingBox {
    fn from([x, y, w, h]: [f64; 4]) -> Self {
        Self { x, y, w, h }
    }
}

impl From<BoundingBox> for [f64; 4] {
    fn from(b: BoundingBox) -> Self {
        [b.x, b.y, b.w, b.h]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<BoundingBox>,
}

impl Detection {
    pub fn label(label: impl Into<String>) -> Self {
        Self { label: label.into(), score: None, bbox: None }
    }

    pub fn scored(label: impl Into<String>, score: f64) -> Self {
        Self { label: label.into(), score: Some(score), bbox: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionSet {
    pub image_id: String,
    pub detections: Vec<Detection>,
}

impl DetectionSet {
    pub fn from_labels<S: AsRef<str>>(image_id: impl Into<String>, labels: &[S]) -> Self {
        Self { image_id: image_id.into(), detections: labels.iter().map(|l| Detection::label(l.as_ref())).collect() }
    }
}

/// The set algebra between caption terms and detected terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub s_nouns: BTreeSet<String>,
    pub s_names: BTreeSet<String>,
    /// Terms both mentioned and detected.
    pub s_inter: BTreeSet<String>,
    /// Mentioned but not detected: foil candidates.
    pub s_caption: BTreeSet<String>,
    /// Detected but not mentioned: replacement candidates.
    pub s_image: BTreeSet<String>,
    /// Caption nouns with no common-term anchor; excluded from the set algebra.
    pub unmapped_nouns: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub is_foil: bool,
    /// Foil word -> proposed replacement, ordered by foil word.
    pub corrections: BTreeMap<String, String>,
    pub comparison: ComparisonResult,
    pub explanation: String,
}

/// Maps a detector label or gold word onto a category name, trying the word
/// as given and then its singular form.
pub fn map_label<'n>(net: &'n SemanticNetwork, label: &str, tau: f64) -> Option<&'n str> {
    let label = label.trim().to_lowercase();
    net.map_to_common_term(&label, tau)
        .or_else(|| net.map_to_common_term(&normalize(&label), tau))
        .map(|t| t.name.as_str())
}

/// Maps detections at or above the score floor onto common terms (S_names).
pub fn build_name_set(detections: &DetectionSet, net: &SemanticNetwork, config: &PipelineConfig) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    for d in &detections.detections {
        if d.score.unwrap_or(1.0) < config.min_score {
            continue;
        }
        match map_label(net, &d.label, config.tau) {
            Some(name) => {
                names.insert(name.to_string());
            }
            None => log::warn!(
                "image {}: dropping detection label `{}` with no common-term mapping",
                detections.image_id,
                d.label
            ),
        }
    }
    names
}

/// Caption -> tokens -> tags -> nouns -> common terms (S_nouns), plus the
/// nouns that could not be anchored.
pub fn build_noun_set(
    caption: &str,
    model: &TaggerModel,
    net: &SemanticNetwork,
    config: &PipelineConfig,
) -> (BTreeSet<String>, BTreeSet<String>) {
    let tagged = model.tag(&tokenize(caption));
    let mut terms = BTreeSet::new();
    let mut unmapped = BTreeSet::new();
    for noun in filter_nouns(&tagged, net.compound_terms()) {
        match net.map_to_common_term(&noun, config.tau) {
            Some(t) => {
                terms.insert(t.name.clone());
            }
            None => {
                unmapped.insert(noun);
            }
        }
    }
    (terms, unmapped)
}

pub fn compare(s_nouns: &BTreeSet<String>, s_names: &BTreeSet<String>) -> ComparisonResult {
    ComparisonResult {
        s_nouns: s_nouns.clone(),
        s_names: s_names.clone(),
        s_inter: s_nouns.intersection(s_names).cloned().collect(),
        s_caption: s_nouns.difference(s_names).cloned().collect(),
        s_image: s_names.difference(s_nouns).cloned().collect(),
        unmapped_nouns: BTreeSet::new(),
    }
}

/// For each foil candidate, the top-ranked same-supercategory object among
/// the image-only terms. Candidates without a substitute are left out.
pub fn propose_corrections(cmp: &ComparisonResult, net: &SemanticNetwork) -> BTreeMap<String, String> {
    propose_corrections_by(cmp, net, SimilarBy::Supercategory)
}

pub fn propose_corrections_by(
    cmp: &ComparisonResult,
    net: &SemanticNetwork,
    by: SimilarBy,
) -> BTreeMap<String, String> {
    let image_terms: Vec<_> = cmp.s_image.iter().filter_map(|n| net.category(n)).collect();
    let mut corrections = BTreeMap::new();
    for foil in &cmp.s_caption {
        let Some(term) = net.category(foil) else { continue };
        if let Some(best) = net.rank_candidates_by(term, image_terms.iter().copied(), by).first() {
            corrections.insert(foil.clone(), best.term.name.clone());
        }
    }
    corrections
}

/// Runs the whole check for one image/caption pair.
pub fn validate(
    detections: &DetectionSet,
    caption: &str,
    model: &TaggerModel,
    net: &SemanticNetwork,
    config: &PipelineConfig,
) -> Verdict {
    let s_names = build_name_set(detections, net, config);
    let (s_nouns, unmapped) = build_noun_set(caption, model, net, config);
    let mut comparison = compare(&s_nouns, &s_names);
    comparison.unmapped_nouns = unmapped;
    let corrections = propose_corrections_by(&comparison, net, config.similar_by);
    let explanation = explain(&comparison, &corrections, net, config.similar_by);
    Verdict { is_foil: !corrections.is_empty(), corrections, comparison, explanation }
}

fn list(set: &BTreeSet<String>) -> String {
    if set.is_empty() {
        "none".to_string()
    } else {
        set.iter().map(String::as_str).collect::<Vec<_>>().join(", ")
    }
}

fn explain(
    cmp: &ComparisonResult,
    corrections: &BTreeMap<String, String>,
    net: &SemanticNetwork,
    by: SimilarBy,
) -> String {
    let mut parts = Vec::new();
    if corrections.is_empty() {
        if cmp.s_nouns.is_empty() {
            parts.push("CORRECT: no caption noun maps to a known object category.".to_string());
        } else if cmp.s_caption.is_empty() {
            parts.push(format!("CORRECT: every caption object was detected ({}).", list(&cmp.s_nouns)));
        } else {
            parts.push(format!(
                "CORRECT: {} not detected, but no detected object could replace {}.",
                list(&cmp.s_caption),
                if cmp.s_caption.len() == 1 { "it" } else { "them" }
            ));
        }
    } else {
        parts.push("FOIL:".to_string());
        for (foil, replacement) in corrections {
            let reason = match (by, net.category(foil), net.category(replacement)) {
                (SimilarBy::Supercategory, Some(f), _) => format!("shares the supercategory \"{}\"", f.supercategory),
                (SimilarBy::Path { .. }, Some(f), Some(r)) => match net.path_similarity(&f.synset_id, &r.synset_id) {
                    Ok(Some(s)) => format!("is similar (path similarity {s})"),
                    _ => "is similar".to_string(),
                },
                _ => "is similar".to_string(),
            };
            parts.push(format!(
                "\"{foil}\" is not in the image, while the detected \"{replacement}\" {reason}; the caption probably means \"{replacement}\" instead of \"{foil}\"."
            ));
        }
    }
    parts.push(format!(
        "Evidence: confirmed [{}], caption-only [{}], image-only [{}].",
        list(&cmp.s_inter),
        list(&cmp.s_caption),
        list(&cmp.s_image)
    ));
    if !cmp.unmapped_nouns.is_empty() {
        parts.push(format!("Unmapped nouns: {}.", list(&cmp.unmapped_nouns)));
    }
    parts.join(" ")
}
