//! Caption validation against detected-object evidence.
//!
//! A caption is checked by mapping its nouns and the detector's labels onto a
//! shared vocabulary of object categories, comparing the two sets, and looking
//! for a detected object that could replace a caption noun missing from the
//! image. A replacement marks the caption as foil and names both words.
//!
//! ```
//! use caption_audit::{lexicon::SemanticNetwork, nlp::TaggerModel, pipeline};
//!
//! let net = SemanticNetwork::packaged();
//! let model = TaggerModel::packaged();
//! let dets = pipeline::DetectionSet::from_labels("img", &["person", "cake", "knife"]);
//! let v = pipeline::validate(&dets, "a woman cutting a pizza", &model, &net, &Default::default());
//! assert!(v.is_foil);
//! assert_eq!(v.corrections["pizza"], "cake");
//! ```

pub mod data;
pub mod dataset;
pub mod eval;
pub mod lexicon;
pub mod nlp;
pub mod pipeline;

pub use lexicon::{CommonTerm, SemanticNetwork, SimilarBy, SimilarityScore};
pub use nlp::TaggerModel;
pub use pipeline::{validate, ComparisonResult, DetectionSet, PipelineConfig, Verdict};
