//! Benchmark runner for the three tasks: caption classification (task 1),
//! foil-word detection (task 2) and foil-word correction (task 3).
//!
//! Every example is validated once and the same verdict feeds all three
//! tasks. Task 2 is scored over gold-foil examples; an example counts when the
//! verdict is foil and the gold foil word is among the correction keys. Task 3
//! is scored over the task-2 hits; an example counts when the proposed
//! replacement equals the gold target word. Gold words go through the same
//! singularization and category mapping as caption nouns.

mod render;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{DetectionIndex, EvalExample};
use crate::lexicon::SemanticNetwork;
use crate::nlp::{ModelMetadata, TaggerModel};
use crate::pipeline::{self, PipelineConfig};

pub use render::{render_report, ReportFormat};

pub const REPORT_VERSION: u32 = 1;

pub const MISSING_DETECTIONS: &str = "missing detections";

/// Task-1 confusion counts with foil as the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    fn add(self, o: Self) -> Self {
        Self { tp: self.tp + o.tp, fp: self.fp + o.fp, tn: self.tn + o.tn, fn_: self.fn_ + o.fn_ }
    }
}

/// A ratio kept together with its counts. An empty denominator gives 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub hits: usize,
    pub total: usize,
    pub value: f64,
}

impl Rate {
    pub fn new(hits: usize, total: usize) -> Self {
        Self { hits, total, value: ratio(hits, total) }
    }
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Set when a denominator was zero and the affected values were reported as 0.
    pub undefined: bool,
}

impl ClassMetrics {
    /// `hit`: predicted and gold agree on this class; `false_pos`: predicted
    /// this class wrongly; `false_neg`: missed this class.
    pub fn from_counts(hit: usize, false_pos: usize, false_neg: usize) -> Self {
        let precision = ratio(hit, hit + false_pos);
        let recall = ratio(hit, hit + false_neg);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        Self { precision, recall, f1, undefined: hit + false_pos == 0 || hit + false_neg == 0 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Task1Report {
    pub confusion: Confusion,
    pub correct: ClassMetrics,
    pub foil: ClassMetrics,
    pub overall_accuracy: Rate,
    /// Share of gold-correct captions classified correct.
    pub correct_accuracy: Rate,
    /// Share of gold-foil captions classified foil.
    pub foil_accuracy: Rate,
}

impl Task1Report {
    pub fn from_confusion(c: Confusion) -> Self {
        Self {
            confusion: c,
            correct: ClassMetrics::from_counts(c.tn, c.fn_, c.fp),
            foil: ClassMetrics::from_counts(c.tp, c.fp, c.fn_),
            overall_accuracy: Rate::new(c.tp + c.tn, c.total()),
            correct_accuracy: Rate::new(c.tn, c.tn + c.fp),
            foil_accuracy: Rate::new(c.tp, c.tp + c.fn_),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedExample {
    pub example_id: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub count: usize,
    pub reasons: BTreeMap<String, usize>,
    /// Ordered by example id.
    pub examples: Vec<SkippedExample>,
}

/// The effective configuration behind a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub pipeline: PipelineConfig,
    pub tagger: ModelMetadata,
    pub synsets: usize,
    pub categories: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub version: u32,
    pub examples: usize,
    pub task1: Task1Report,
    /// Foil-word detection over gold-foil examples.
    pub task2: Rate,
    /// Correction over task-2 hits.
    pub task3: Rate,
    pub skipped: Skipped,
    pub config_echo: ConfigEcho,
}

impl EvalReport {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Outcome {
    Scored { confusion: Confusion, task2_hit: bool, task3_hit: bool },
    Skipped(SkippedExample),
}

fn gold_term(net: &SemanticNetwork, word: Option<&str>, tau: f64) -> Option<String> {
    let word = word?;
    Some(pipeline::map_label(net, word, tau).map_or_else(|| word.trim().to_lowercase(), str::to_string))
}

/// Validates one example and scores it for all three tasks.
fn evaluate(
    example: &EvalExample,
    detections: &DetectionIndex,
    model: &TaggerModel,
    net: &SemanticNetwork,
    config: &PipelineConfig,
) -> Outcome {
    let Some(dets) = detections.get(&example.image_id) else {
        return Outcome::Skipped(SkippedExample {
            example_id: example.example_id.clone(),
            reason: MISSING_DETECTIONS.into(),
        });
    };
    let verdict = pipeline::validate(dets, &example.caption, model, net, config);
    let mut confusion = Confusion::default();
    match (example.gold_is_foil, verdict.is_foil) {
        (true, true) => confusion.tp = 1,
        (false, true) => confusion.fp = 1,
        (false, false) => confusion.tn = 1,
        (true, false) => confusion.fn_ = 1,
    }
    let (mut task2_hit, mut task3_hit) = (false, false);
    if example.gold_is_foil && verdict.is_foil {
        let foil = gold_term(net, example.gold_foil_word.as_deref(), config.tau);
        let target = gold_term(net, example.gold_target_word.as_deref(), config.tau);
        if let Some(proposed) = foil.as_ref().and_then(|f| verdict.corrections.get(f)) {
            task2_hit = true;
            task3_hit = target.as_ref() == Some(proposed);
        }
    }
    Outcome::Scored { confusion, task2_hit, task3_hit }
}

#[cfg(feature = "parallel")]
fn evaluate_all(
    examples: &[EvalExample],
    jobs: usize,
    f: impl Fn(&EvalExample) -> Outcome + Sync + Send,
) -> Vec<Outcome> {
    use rayon::prelude::*;
    if jobs <= 1 {
        return examples.iter().map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| examples.par_iter().map(&f).collect()),
        Err(e) => {
            log::warn!("could not start {jobs} worker threads ({e}); running sequentially");
            examples.iter().map(f).collect()
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn evaluate_all(examples: &[EvalExample], _jobs: usize, f: impl Fn(&EvalExample) -> Outcome) -> Vec<Outcome> {
    examples.iter().map(f).collect()
}

/// Runs the benchmark on `jobs` worker threads. The report does not depend on
/// `jobs` or on the order of `examples`.
pub fn run_benchmark(
    examples: &[EvalExample],
    detections: &DetectionIndex,
    model: &TaggerModel,
    net: &SemanticNetwork,
    config: &PipelineConfig,
    jobs: usize,
) -> EvalReport {
    let outcomes = evaluate_all(examples, jobs, |e| evaluate(e, detections, model, net, config));

    let mut confusion = Confusion::default();
    let (mut task2_hits, mut task3_hits) = (0, 0);
    let mut skipped = Skipped::default();
    for outcome in outcomes {
        match outcome {
            Outcome::Scored { confusion: c, task2_hit, task3_hit } => {
                confusion = confusion.add(c);
                task2_hits += usize::from(task2_hit);
                task3_hits += usize::from(task3_hit);
            }
            Outcome::Skipped(s) => {
                *skipped.reasons.entry(s.reason.clone()).or_default() += 1;
                skipped.examples.push(s);
            }
        }
    }
    skipped.count = skipped.examples.len();
    skipped.examples.sort_by(|a, b| a.example_id.cmp(&b.example_id).then_with(|| a.reason.cmp(&b.reason)));

    EvalReport {
        version: REPORT_VERSION,
        examples: examples.len(),
        task1: Task1Report::from_confusion(confusion),
        task2: Rate::new(task2_hits, confusion.tp + confusion.fn_),
        task3: Rate::new(task3_hits, task2_hits),
        skipped,
        config_echo: ConfigEcho {
            pipeline: config.clone(),
            tagger: model.metadata().clone(),
            synsets: net.synsets().len(),
            categories: net.categories().len(),
        },
    }
}
