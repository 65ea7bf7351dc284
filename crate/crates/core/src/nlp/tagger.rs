//! Greedy averaged-perceptron part-of-speech tagger.
//!
//! Tags are predicted left to right from lexical features of the current and
//! neighbouring words plus the two previously predicted tags. Training runs
//! the standard perceptron update per token and keeps running totals so the
//! final weights are the average over every update step.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{NlpError, TaggedSentence, TaggedToken, Token};

const FORMAT_HEADER: &str = "caption-audit-tagger";
pub const MODEL_FORMAT_VERSION: u32 = 1;

const START: [&str; 2] = ["-START-", "-START2-"];
const END: [&str; 2] = ["-END-", "-END2-"];

const TAGDICT_MIN_FREQ: usize = 20;
const TAGDICT_MIN_RATIO: f64 = 0.97;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ModelMetadata {
    pub iterations: u32,
    pub seed: u64,
    pub sentences: usize,
    /// SHA-256 of the canonical training corpus text.
    pub corpus_checksum: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaggerModel {
    classes: Vec<String>,
    weights: HashMap<String, Vec<f64>>,
    tagdict: BTreeMap<String, String>,
    metadata: ModelMetadata,
}

impl TaggerModel {
    /// The model trained on the packaged caption corpus.
    pub fn packaged() -> Self {
        Self::from_text(crate::data::TAGGER_MODEL).expect("packaged tagger model is valid")
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn tagdict(&self) -> &BTreeMap<String, String> {
        &self.tagdict
    }

    pub fn metadata(&self) -> &ModelMetadata {
        &self.metadata
    }

    pub fn feature_count(&self) -> usize {
        self.weights.len()
    }

    /// Weight of a `(feature, tag)` pair; zero when absent.
    pub fn weight(&self, feature: &str, tag: &str) -> f64 {
        let Some(c) = self.classes.iter().position(|t| t == tag) else { return 0.0 };
        self.weights.get(feature).map_or(0.0, |w| w[c])
    }

    fn predict(&self, features: &[String]) -> usize {
        predict(&self.weights, self.classes.len(), features)
    }

    pub fn tag(&self, tokens: &[Token]) -> Vec<TaggedToken> {
        let context = context_words(tokens.iter().map(|t| t.normalized.as_str()));
        let mut prev = START[0].to_string();
        let mut prev2 = START[1].to_string();
        let mut out = Vec::with_capacity(tokens.len());
        for (i, token) in tokens.iter().enumerate() {
            let tag = match self.tagdict.get(&token.normalized) {
                Some(t) => t.clone(),
                None => {
                    let feats = features(i, &token.surface, &context, &prev, &prev2);
                    self.classes[self.predict(&feats)].clone()
                }
            };
            prev2 = std::mem::replace(&mut prev, tag.clone());
            out.push(TaggedToken { token: token.clone(), tag });
        }
        out
    }

    /// Canonical text serialization with an embedded format version and
    /// checksum over everything after the checksum line.
    pub fn to_text(&self) -> String {
        let mut body = String::new();
        let m = &self.metadata;
        writeln!(body, "iterations {}", m.iterations).unwrap();
        writeln!(body, "seed {}", m.seed).unwrap();
        writeln!(body, "sentences {}", m.sentences).unwrap();
        writeln!(body, "corpus {}", m.corpus_checksum).unwrap();
        writeln!(body, "classes {}", self.classes.join(" ")).unwrap();
        writeln!(body, "tagdict {}", self.tagdict.len()).unwrap();
        for (word, tag) in &self.tagdict {
            writeln!(body, "{word}\t{tag}").unwrap();
        }
        let mut feats: Vec<(&String, &Vec<f64>)> = self.weights.iter().collect();
        feats.sort_by(|a, b| a.0.cmp(b.0));
        writeln!(body, "weights {}", feats.len()).unwrap();
        for (feat, ws) in feats {
            body.push_str(feat);
            body.push('\t');
            let mut first = true;
            for (c, w) in ws.iter().enumerate() {
                if *w != 0.0 {
                    if !first {
                        body.push(' ');
                    }
                    first = false;
                    write!(body, "{}={}", self.classes[c], w).unwrap();
                }
            }
            body.push('\n');
        }
        format!("{FORMAT_HEADER} {MODEL_FORMAT_VERSION}\nchecksum {}\n{body}", sha256_hex(&body))
    }

    pub fn from_text(text: &str) -> Result<Self, NlpError> {
        let bad = |m: String| NlpError::Model(m);
        let (header, rest) = text.split_once('\n').ok_or_else(|| bad("empty model file".into()))?;
        let version =
            header.strip_prefix(FORMAT_HEADER).map(str::trim).ok_or_else(|| bad("not a tagger model file".into()))?;
        if version != MODEL_FORMAT_VERSION.to_string() {
            return Err(bad(format!(
                "model format version {version} is not supported (expected {MODEL_FORMAT_VERSION})"
            )));
        }
        let (checksum_line, body) = rest.split_once('\n').ok_or_else(|| bad("missing checksum".into()))?;
        let checksum = checksum_line.strip_prefix("checksum ").ok_or_else(|| bad("missing checksum".into()))?;
        if sha256_hex(body) != checksum {
            return Err(bad("checksum mismatch".into()));
        }

        let mut lines = body.lines();
        let mut field = |key: &str| -> Result<String, NlpError> {
            let line = lines.next().ok_or_else(|| NlpError::Model(format!("missing `{key}`")))?;
            line.strip_prefix(key)
                .and_then(|v| v.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| NlpError::Model(format!("expected `{key}`, found `{line}`")))
        };
        let num = |v: String, key: &str| -> Result<u64, NlpError> {
            v.parse().map_err(|_| NlpError::Model(format!("invalid `{key}` value `{v}`")))
        };
        let iterations = num(field("iterations")?, "iterations")? as u32;
        let seed = num(field("seed")?, "seed")?;
        let sentences = num(field("sentences")?, "sentences")? as usize;
        let corpus_checksum = field("corpus")?;
        let classes: Vec<String> = field("classes")?.split(' ').map(str::to_string).collect();
        let class_index: HashMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let ntagdict = num(field("tagdict")?, "tagdict")?;

        let mut lines = body.lines().skip(6);
        let mut tagdict = BTreeMap::new();
        for _ in 0..ntagdict {
            let line = lines.next().ok_or_else(|| bad("truncated tagdict".into()))?;
            let (word, tag) = line.split_once('\t').ok_or_else(|| bad(format!("bad tagdict line `{line}`")))?;
            if !class_index.contains_key(tag) {
                return Err(bad(format!("tagdict tag `{tag}` is not a model class")));
            }
            tagdict.insert(word.to_string(), tag.to_string());
        }
        let header = lines.next().ok_or_else(|| bad("missing weights".into()))?;
        let nweights: usize = header
            .strip_prefix("weights ")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(format!("expected `weights <n>`, found `{header}`")))?;
        let mut weights = HashMap::with_capacity(nweights);
        for _ in 0..nweights {
            let line = lines.next().ok_or_else(|| bad("truncated weights".into()))?;
            let (feat, rest) = line.split_once('\t').ok_or_else(|| bad(format!("bad weight line `{line}`")))?;
            let mut ws = vec![0.0; classes.len()];
            for pair in rest.split(' ').filter(|p| !p.is_empty()) {
                let (tag, w) = pair.rsplit_once('=').ok_or_else(|| bad(format!("bad weight `{pair}`")))?;
                let c = *class_index.get(tag).ok_or_else(|| bad(format!("weight tag `{tag}` is not a model class")))?;
                ws[c] = w.parse().map_err(|_| bad(format!("bad weight value `{w}`")))?;
            }
            weights.insert(feat.to_string(), ws);
        }
        if lines.next().is_some() {
            return Err(bad("trailing data after weights".into()));
        }
        Ok(Self { classes, weights, tagdict, metadata: ModelMetadata { iterations, seed, sentences, corpus_checksum } })
    }
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Canonical `word_TAG` text for a corpus; the training checksum covers this.
pub fn corpus_to_text(corpus: &[TaggedSentence]) -> String {
    let mut out = String::new();
    for sentence in corpus {
        let line: Vec<String> = sentence.iter().map(|(w, t)| format!("{w}_{t}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn predict(weights: &HashMap<String, Vec<f64>>, nclasses: usize, features: &[String]) -> usize {
    let mut scores = vec![0.0; nclasses];
    for f in features {
        if let Some(ws) = weights.get(f) {
            for (s, w) in scores.iter_mut().zip(ws) {
                *s += w;
            }
        }
    }
    // first maximum wins, so ties resolve to the alphabetically smaller tag
    let mut best = 0;
    for (c, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = c;
        }
    }
    best
}

fn feature_word(word: &str) -> String {
    if word.contains('-') && !word.starts_with('-') {
        "!HYPHEN".into()
    } else if word.len() == 4 && word.chars().all(|c| c.is_ascii_digit()) {
        "!YEAR".into()
    } else if word.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        "!DIGITS".into()
    } else {
        word.to_lowercase()
    }
}

fn context_words<'a>(words: impl Iterator<Item = &'a str>) -> Vec<String> {
    START
        .iter()
        .map(|s| s.to_string())
        .chain(words.map(feature_word))
        .chain(END.iter().map(|s| s.to_string()))
        .collect()
}

fn suffix(word: &str, n: usize) -> &str {
    let start = word.char_indices().rev().nth(n - 1).map_or(0, |(i, _)| i);
    &word[start..]
}

/// `Xx`-style shape of the surface form with runs collapsed.
fn shape(surface: &str) -> String {
    let mut out = String::new();
    for c in surface.chars() {
        let s = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_ascii_digit() {
            'd'
        } else {
            c
        };
        if !out.ends_with(s) {
            out.push(s);
        }
    }
    out
}

fn features(i: usize, surface: &str, context: &[String], prev: &str, prev2: &str) -> Vec<String> {
    let j = i + START.len();
    let word = &context[j];
    let first = word.chars().next().map(String::from).unwrap_or_default();
    vec![
        "bias".to_string(),
        format!("i suffix1 {}", suffix(word, 1)),
        format!("i suffix2 {}", suffix(word, 2)),
        format!("i suffix3 {}", suffix(word, 3)),
        format!("i pref1 {first}"),
        format!("i shape {}", shape(surface)),
        format!("i-1 tag {prev}"),
        format!("i-2 tag {prev2}"),
        format!("i tag+i-2 tag {prev} {prev2}"),
        format!("i word {word}"),
        format!("i-1 tag+i word {prev} {word}"),
        format!("i-1 word {}", context[j - 1]),
        format!("i-1 suffix {}", suffix(&context[j - 1], 3)),
        format!("i-2 word {}", context[j - 2]),
        format!("i+1 word {}", context[j + 1]),
        format!("i+1 suffix {}", suffix(&context[j + 1], 3)),
        format!("i+2 word {}", context[j + 2]),
    ]
}

struct Trainer {
    nclasses: usize,
    weights: HashMap<String, Vec<f64>>,
    totals: HashMap<String, Vec<f64>>,
    stamps: HashMap<String, Vec<u64>>,
    instances: u64,
}

impl Trainer {
    fn new(nclasses: usize) -> Self {
        Self { nclasses, weights: HashMap::new(), totals: HashMap::new(), stamps: HashMap::new(), instances: 0 }
    }

    fn update(&mut self, truth: usize, guess: usize, features: &[String]) {
        self.instances += 1;
        if truth == guess {
            return;
        }
        for f in features {
            self.bump(f, truth, 1.0);
            self.bump(f, guess, -1.0);
        }
    }

    fn bump(&mut self, feature: &str, class: usize, delta: f64) {
        let n = self.nclasses;
        let w = self.weights.entry(feature.to_string()).or_insert_with(|| vec![0.0; n]);
        let t = self.totals.entry(feature.to_string()).or_insert_with(|| vec![0.0; n]);
        let s = self.stamps.entry(feature.to_string()).or_insert_with(|| vec![0; n]);
        t[class] += (self.instances - s[class]) as f64 * w[class];
        s[class] = self.instances;
        w[class] += delta;
    }

    fn averaged(self) -> HashMap<String, Vec<f64>> {
        let instances = self.instances.max(1) as f64;
        let mut out = HashMap::with_capacity(self.weights.len());
        for (feat, ws) in self.weights {
            let totals = &self.totals[&feat];
            let stamps = &self.stamps[&feat];
            let avg: Vec<f64> = ws
                .iter()
                .enumerate()
                .map(|(c, w)| {
                    let total = totals[c] + (self.instances - stamps[c]) as f64 * w;
                    total / instances
                })
                .collect();
            if avg.iter().any(|&w| w != 0.0) {
                out.insert(feat, avg);
            }
        }
        out
    }
}

fn build_tagdict(corpus: &[TaggedSentence]) -> BTreeMap<String, String> {
    let mut counts: HashMap<String, BTreeMap<&str, usize>> = HashMap::new();
    for sentence in corpus {
        for (word, tag) in sentence {
            *counts.entry(word.to_lowercase()).or_default().entry(tag).or_default() += 1;
        }
    }
    let mut dict = BTreeMap::new();
    for (word, tags) in counts {
        let total: usize = tags.values().sum();
        // BTreeMap order makes max_by_key deterministic on equal counts
        let (tag, &n) = tags.iter().max_by_key(|(_, &n)| n).expect("non-empty");
        if total >= TAGDICT_MIN_FREQ && n as f64 / total as f64 >= TAGDICT_MIN_RATIO {
            dict.insert(word, tag.to_string());
        }
    }
    dict
}

/// Trains a tagger. Identical `(corpus, iterations, seed)` give identical models.
pub fn train_tagger(corpus: &[TaggedSentence], iterations: u32, seed: u64) -> Result<TaggerModel, NlpError> {
    if corpus.is_empty() {
        return Err(NlpError::Usage("training corpus is empty".into()));
    }
    if iterations == 0 {
        return Err(NlpError::Usage("iterations must be positive".into()));
    }
    if let Some(i) = corpus.iter().position(|s| s.is_empty()) {
        return Err(NlpError::Usage(format!("training sentence {} is empty", i + 1)));
    }

    let mut classes: Vec<String> = corpus.iter().flatten().map(|(_, t)| t.clone()).collect();
    classes.sort();
    classes.dedup();
    let class_index: HashMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let tagdict = build_tagdict(corpus);

    let mut trainer = Trainer::new(classes.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    for _ in 0..iterations {
        order.shuffle(&mut rng);
        for &si in &order {
            let sentence = &corpus[si];
            let context = context_words(sentence.iter().map(|(w, _)| w.as_str()));
            let mut prev = START[0].to_string();
            let mut prev2 = START[1].to_string();
            for (i, (word, truth)) in sentence.iter().enumerate() {
                let guess = match tagdict.get(&word.to_lowercase()) {
                    Some(t) => t.clone(),
                    None => {
                        let feats = features(i, word, &context, &prev, &prev2);
                        let g = predict(&trainer.weights, classes.len(), &feats);
                        trainer.update(class_index[truth.as_str()], g, &feats);
                        classes[g].clone()
                    }
                };
                prev2 = std::mem::replace(&mut prev, guess);
            }
        }
    }

    Ok(TaggerModel {
        weights: trainer.averaged(),
        tagdict,
        metadata: ModelMetadata {
            iterations,
            seed,
            sentences: corpus.len(),
            corpus_checksum: sha256_hex(&corpus_to_text(corpus)),
        },
        classes,
    })
}
