//! Fixtures bundled into the library so the pipeline runs without external files.

pub const TAXONOMY: &str = include_str!("../data/taxonomy.txt");
pub const COCO_CATEGORIES: &str = include_str!("../data/coco_categories.csv");
pub const TAGGER_MODEL: &str = include_str!("../data/tagger.model");
