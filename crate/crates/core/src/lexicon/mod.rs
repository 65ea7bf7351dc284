//! Semantic network of noun synsets, the common-term (category) table and the
//! similarity logic that bridges caption words and detector labels.

mod taxonomy;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Default similarity threshold for mapping an unknown noun onto a category:
/// accepts shortest paths of length three or less.
pub const DEFAULT_TAU: f64 = 0.25;

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("taxonomy line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("hypernym cycle among synsets: {}", .0.join(", "))]
    Cycle(Vec<String>),
    #[error("invalid taxonomy: {0}")]
    Invalid(String),
    #[error("unknown synset `{0}`")]
    UnknownSynset(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PartOfSpeech {
    Noun,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Synset {
    pub id: String,
    /// Lowercase word forms; multi-word lemmas use a single space.
    pub lemmas: Vec<String>,
    pub pos: PartOfSpeech,
}

/// One entry of the shared vocabulary between captions and detector labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CommonTerm {
    pub name: String,
    pub supercategory: String,
    pub synset_id: String,
}

/// Path similarity `1 / (1 + d)` for a shortest undirected hypernym path of
/// length `d`. The distance is kept so comparisons stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimilarityScore {
    distance: u32,
}

impl SimilarityScore {
    pub fn from_distance(distance: u32) -> Self {
        Self { distance }
    }

    pub fn distance(self) -> u32 {
        self.distance
    }

    pub fn value(self) -> f64 {
        1.0 / (1.0 + f64::from(self.distance))
    }
}

impl PartialOrd for SimilarityScore {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SimilarityScore {
    /// Higher similarity (shorter path) compares greater.
    fn cmp(&self, other: &Self) -> Ordering {
        other.distance.cmp(&self.distance)
    }
}

impl fmt::Display for SimilarityScore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.value())
    }
}

/// How a noun was anchored to a common term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchKind {
    /// The noun is a category name.
    Name,
    /// The noun is a lemma of the category's synset.
    Lemma,
    /// Nearest category synset by path similarity.
    Similar(SimilarityScore),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TermMatch<'a> {
    pub term: &'a CommonTerm,
    pub kind: MatchKind,
}

/// Predicate deciding whether a detected object may replace a caption noun.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum SimilarBy {
    /// Both terms share an MS-COCO supercategory.
    #[default]
    Supercategory,
    /// Path similarity between the category synsets is at least `tau`.
    Path { tau: f64 },
}

impl fmt::Display for SimilarBy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimilarBy::Supercategory => f.write_str("supercategory"),
            SimilarBy::Path { tau } => write!(f, "path:{tau}"),
        }
    }
}

impl FromStr for SimilarBy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "supercategory" => Ok(SimilarBy::Supercategory),
            other => {
                let tau = other
                    .strip_prefix("path:")
                    .ok_or_else(|| format!("expected `supercategory` or `path:<tau>`, got `{other}`"))?;
                let tau: f64 = tau.parse().map_err(|_| format!("invalid tau `{tau}`"))?;
                if !(tau > 0.0 && tau <= 1.0) {
                    return Err(format!("tau must lie in (0, 1], got {tau}"));
                }
                Ok(SimilarBy::Path { tau })
            }
        }
    }
}

impl From<SimilarBy> for String {
    fn from(value: SimilarBy) -> Self {
        value.to_string()
    }
}

impl TryFrom<String> for SimilarBy {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

/// A replacement candidate with its similarity to the term being replaced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankedCandidate<'a> {
    pub term: &'a CommonTerm,
    pub similarity: Option<SimilarityScore>,
}

/// Immutable synset graph plus category table.
#[derive(Clone, Debug)]
pub struct SemanticNetwork {
    synsets: Vec<Synset>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    neighbours: Vec<Vec<usize>>,
    lemma_index: HashMap<String, Vec<usize>>,
    categories: Vec<CommonTerm>,
    category_index: HashMap<String, usize>,
    compounds: BTreeSet<String>,
}

impl SemanticNetwork {
    /// Parses a taxonomy document.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        taxonomy::parse(text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// The taxonomy fixture bundled with the crate.
    pub fn packaged() -> Self {
        Self::parse(crate::data::TAXONOMY).expect("packaged taxonomy is valid")
    }

    /// Renders the network back into the taxonomy document format.
    pub fn to_document(&self) -> String {
        taxonomy::render(self)
    }

    /// Builds and validates a network from already-parsed records.
    pub fn from_parts(
        synsets: Vec<Synset>,
        edges: Vec<(String, String)>,
        categories: Vec<CommonTerm>,
    ) -> Result<Self, LexiconError> {
        let mut index = HashMap::with_capacity(synsets.len());
        for (i, s) in synsets.iter().enumerate() {
            if s.lemmas.is_empty() {
                return Err(LexiconError::Invalid(format!("synset `{}` has no lemmas", s.id)));
            }
            if index.insert(s.id.clone(), i).is_some() {
                return Err(LexiconError::Invalid(format!("duplicate synset id `{}`", s.id)));
            }
        }

        let mut parents = vec![Vec::new(); synsets.len()];
        let mut neighbours = vec![Vec::new(); synsets.len()];
        for (child, parent) in &edges {
            let c = *index
                .get(child)
                .ok_or_else(|| LexiconError::Invalid(format!("hypernym edge references unknown synset `{child}`")))?;
            let p = *index
                .get(parent)
                .ok_or_else(|| LexiconError::Invalid(format!("hypernym edge references unknown synset `{parent}`")))?;
            if c == p {
                return Err(LexiconError::Cycle(vec![child.clone()]));
            }
            if !parents[c].contains(&p) {
                parents[c].push(p);
                neighbours[c].push(p);
                neighbours[p].push(c);
            }
        }
        for list in parents.iter_mut().chain(neighbours.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }
        check_acyclic(&synsets, &parents)?;

        let mut lemma_index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, s) in synsets.iter().enumerate() {
            for lemma in &s.lemmas {
                lemma_index.entry(lemma.clone()).or_default().push(i);
            }
        }

        let mut categories = categories;
        categories.sort_by(|a, b| a.name.cmp(&b.name));
        let mut category_index = HashMap::with_capacity(categories.len());
        for (i, c) in categories.iter().enumerate() {
            if c.supercategory.is_empty() {
                return Err(LexiconError::Invalid(format!("category `{}` has empty supercategory", c.name)));
            }
            if !index.contains_key(&c.synset_id) {
                return Err(LexiconError::Invalid(format!(
                    "category `{}` references unknown synset `{}`",
                    c.name, c.synset_id
                )));
            }
            if category_index.insert(c.name.clone(), i).is_some() {
                return Err(LexiconError::Invalid(format!("duplicate category `{}`", c.name)));
            }
        }

        let compounds = categories
            .iter()
            .map(|c| c.name.as_str())
            .chain(synsets.iter().flat_map(|s| s.lemmas.iter().map(String::as_str)))
            .filter(|w| w.split(' ').count() == 2)
            .map(str::to_string)
            .collect();

        Ok(Self { synsets, index, parents, neighbours, lemma_index, categories, category_index, compounds })
    }

    /// Restricts the category table to `rows` (name, supercategory) pairs,
    /// taking supercategories from the rows. Every row must name a category
    /// already present in the network.
    pub fn with_category_table<'r>(
        &self,
        rows: impl IntoIterator<Item = (&'r str, &'r str)>,
    ) -> Result<Self, LexiconError> {
        let mut categories = Vec::new();
        for (name, supercategory) in rows {
            let existing = self.category(name).ok_or_else(|| {
                LexiconError::Invalid(format!("category table names `{name}`, which the taxonomy does not define"))
            })?;
            categories.push(CommonTerm {
                name: existing.name.clone(),
                supercategory: supercategory.to_lowercase(),
                synset_id: existing.synset_id.clone(),
            });
        }
        Self::from_parts(
            self.synsets.clone(),
            self.hypernym_edges().into_iter().map(|(c, p)| (c.to_string(), p.to_string())).collect(),
            categories,
        )
    }

    pub fn synsets(&self) -> &[Synset] {
        &self.synsets
    }

    pub fn synset(&self, id: &str) -> Option<&Synset> {
        self.index.get(id).map(|&i| &self.synsets[i])
    }

    /// Hypernym edges as `(child, parent)` pairs in document order of the child.
    pub fn hypernym_edges(&self) -> Vec<(&str, &str)> {
        self.parents
            .iter()
            .enumerate()
            .flat_map(|(c, ps)| ps.iter().map(move |&p| (c, p)))
            .map(|(c, p)| (self.synsets[c].id.as_str(), self.synsets[p].id.as_str()))
            .collect()
    }

    pub fn hypernyms(&self, id: &str) -> Result<Vec<&Synset>, LexiconError> {
        let i = self.lookup(id)?;
        Ok(self.parents[i].iter().map(|&p| &self.synsets[p]).collect())
    }

    /// Categories sorted by name.
    pub fn categories(&self) -> &[CommonTerm] {
        &self.categories
    }

    pub fn category(&self, name: &str) -> Option<&CommonTerm> {
        self.category_index.get(name).map(|&i| &self.categories[i])
    }

    pub fn synsets_with_lemma(&self, lemma: &str) -> impl Iterator<Item = &Synset> {
        self.lemma_index.get(lemma).into_iter().flatten().map(|&i| &self.synsets[i])
    }

    /// Two-word category names and lemmas, used to merge adjacent caption tokens.
    pub fn compound_terms(&self) -> &BTreeSet<String> {
        &self.compounds
    }

    /// True if `word` is a category name or a lemma of some synset.
    pub fn knows(&self, word: &str) -> bool {
        self.category_index.contains_key(word) || self.lemma_index.contains_key(word)
    }

    fn lookup(&self, id: &str) -> Result<usize, LexiconError> {
        self.index.get(id).copied().ok_or_else(|| LexiconError::UnknownSynset(id.to_string()))
    }

    /// Breadth-first distances over undirected hypernym edges.
    fn distances_from(&self, source: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.synsets.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or_default();
            for &v in &self.neighbours[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    fn bfs_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.synsets.len()];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &v in &self.neighbours[u] {
                if prev[v] == usize::MAX {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// Similarity of two synsets; `Ok(None)` when they are disconnected.
    pub fn path_similarity(&self, a: &str, b: &str) -> Result<Option<SimilarityScore>, LexiconError> {
        let (ia, ib) = (self.lookup(a)?, self.lookup(b)?);
        Ok(self.bfs_path(ia, ib).map(|p| SimilarityScore::from_distance((p.len() - 1) as u32)))
    }

    /// Synset ids along one shortest path from `a` to `b`, both inclusive.
    pub fn shortest_path(&self, a: &str, b: &str) -> Result<Option<Vec<&str>>, LexiconError> {
        let (ia, ib) = (self.lookup(a)?, self.lookup(b)?);
        Ok(self.bfs_path(ia, ib).map(|p| p.into_iter().map(|i| self.synsets[i].id.as_str()).collect()))
    }

    /// Best similarity between any synset of word `a` and any synset of word `b`.
    ///
    /// A word's synsets are its category synset (if it names a category) plus
    /// every synset listing it as a lemma; a raw synset id also resolves to itself.
    pub fn word_similarity(&self, a: &str, b: &str) -> Option<(SimilarityScore, &Synset, &Synset)> {
        let sa = self.word_synsets(a);
        let sb = self.word_synsets(b);
        let mut best: Option<(SimilarityScore, usize, usize)> = None;
        for &x in &sa {
            let dist = self.distances_from(x);
            for &y in &sb {
                if let Some(d) = dist[y] {
                    let cand = (SimilarityScore::from_distance(d), x, y);
                    if best.is_none_or(|b| cand.0 > b.0) {
                        best = Some(cand);
                    }
                }
            }
        }
        best.map(|(s, x, y)| (s, &self.synsets[x], &self.synsets[y]))
    }

    fn word_synsets(&self, word: &str) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        if let Some(c) = self.category(word) {
            out.push(self.index[&c.synset_id]);
        }
        if let Some(list) = self.lemma_index.get(word) {
            out.extend(list);
        }
        if let Some(&i) = self.index.get(word) {
            out.push(i);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Anchors a normalized noun to a common term, reporting how it matched.
    ///
    /// Resolution order: category name, then a lemma of a category's synset,
    /// then the category nearest to any synset of the noun, accepted only when
    /// its similarity reaches `tau`. Ties go to the lexicographically smaller
    /// category name.
    pub fn resolve_common_term(&self, noun: &str, tau: f64) -> Option<TermMatch<'_>> {
        if let Some(term) = self.category(noun) {
            return Some(TermMatch { term, kind: MatchKind::Name });
        }
        let noun_synsets = self.lemma_index.get(noun)?;
        // categories are sorted by name, so the first hit wins ties
        if let Some(term) = self.categories.iter().find(|c| noun_synsets.contains(&self.index[&c.synset_id])) {
            return Some(TermMatch { term, kind: MatchKind::Lemma });
        }

        let mut best: Option<(SimilarityScore, &CommonTerm)> = None;
        for &s in noun_synsets {
            let dist = self.distances_from(s);
            for c in &self.categories {
                let Some(d) = dist[self.index[&c.synset_id]] else { continue };
                let score = SimilarityScore::from_distance(d);
                let better = match best {
                    None => true,
                    Some((bs, bt)) => score > bs || (score == bs && c.name < bt.name),
                };
                if better {
                    best = Some((score, c));
                }
            }
        }
        best.filter(|(score, _)| score.value() >= tau)
            .map(|(score, term)| TermMatch { term, kind: MatchKind::Similar(score) })
    }

    pub fn map_to_common_term(&self, noun: &str, tau: f64) -> Option<&CommonTerm> {
        self.resolve_common_term(noun, tau).map(|m| m.term)
    }

    /// Orders `candidates` sharing `term`'s supercategory by descending path
    /// similarity, then ascending name.
    pub fn rank_candidates<'a>(
        &'a self,
        term: &CommonTerm,
        candidates: impl IntoIterator<Item = &'a CommonTerm>,
    ) -> Vec<RankedCandidate<'a>> {
        self.rank_candidates_by(term, candidates, SimilarBy::Supercategory)
    }

    /// Like [`rank_candidates`](Self::rank_candidates) with an explicit
    /// similarity predicate.
    pub fn rank_candidates_by<'a>(
        &'a self,
        term: &CommonTerm,
        candidates: impl IntoIterator<Item = &'a CommonTerm>,
        by: SimilarBy,
    ) -> Vec<RankedCandidate<'a>> {
        let source = self.index.get(&term.synset_id).map(|&i| self.distances_from(i));
        let mut ranked: Vec<RankedCandidate<'a>> = candidates
            .into_iter()
            .map(|c| {
                let similarity = source
                    .as_ref()
                    .and_then(|dist| self.index.get(&c.synset_id).and_then(|&i| dist[i]))
                    .map(SimilarityScore::from_distance);
                RankedCandidate { term: c, similarity }
            })
            .filter(|rc| match by {
                SimilarBy::Supercategory => same_supercategory(term, rc.term),
                SimilarBy::Path { tau } => rc.similarity.is_some_and(|s| s.value() >= tau),
            })
            .collect();
        ranked.sort_by(|a, b| b.similarity.cmp(&a.similarity).then_with(|| a.term.name.cmp(&b.term.name)));
        ranked.dedup_by(|a, b| a.term.name == b.term.name);
        ranked
    }
}

/// Reflexive, symmetric supercategory equality.
pub fn same_supercategory(a: &CommonTerm, b: &CommonTerm) -> bool {
    a.supercategory == b.supercategory
}

/// Kahn's algorithm over child -> parent edges.
fn check_acyclic(synsets: &[Synset], parents: &[Vec<usize>]) -> Result<(), LexiconError> {
    let n = synsets.len();
    let mut out_degree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| out_degree[i] == 0).collect();
    let mut removed = 0;
    while let Some(u) = queue.pop_front() {
        removed += 1;
        for &c in &children[u] {
            out_degree[c] -= 1;
            if out_degree[c] == 0 {
                queue.push_back(c);
            }
        }
    }
    if removed == n {
        return Ok(());
    }
    let mut stuck: Vec<String> = (0..n).filter(|&i| out_degree[i] > 0).map(|i| synsets[i].id.clone()).collect();
    stuck.sort();
    Err(LexiconError::Cycle(stuck))
}
