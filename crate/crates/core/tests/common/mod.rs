//! Reference implementations the tests compare the library against. They read
//! the fixture files directly and share no code with the crate under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

pub const TAXONOMY: &str = include_str!("../../data/taxonomy.txt");
pub const CATEGORIES_CSV: &str = include_str!("../../data/coco_categories.csv");
pub const HELDOUT: &str = include_str!("../../data/corpus/heldout.tagged");
pub const TRAIN: &str = include_str!("../../data/corpus/train.tagged");
pub const PATTERNS: &str = include_str!("../../data/corpus/caption_patterns.tagged");
pub const BENCH_ANNOTATIONS: &str = include_str!("../../data/bench/annotations.json");
pub const BENCH_DETECTIONS: &str = include_str!("../../data/bench/detections.json");
pub const BENCH_EXPECTED: &str = include_str!("../../data/bench/expected_report.json");
pub const BENCH_EXPECTED_TEXT: &str = include_str!("../../data/bench/expected_report.txt");

/// Undirected hypernym graph read straight from the taxonomy file.
pub struct OracleGraph {
    pub ids: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<usize>>,
    /// category name -> (supercategory, synset id)
    pub categories: BTreeMap<String, (String, String)>,
}

impl OracleGraph {
    pub fn from_fixture() -> Self {
        let mut ids = Vec::new();
        let mut edges = Vec::new();
        let mut categories = BTreeMap::new();
        for line in TAXONOMY.lines().map(str::trim) {
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("S") => ids.push(parts.next().unwrap().to_string()),
                Some("H") => edges.push((parts.next().unwrap().to_string(), parts.next().unwrap().to_string())),
                Some("C") => {
                    let rest = line[1..].trim();
                    let f: Vec<&str> = rest.split('|').collect();
                    categories.insert(f[0].to_string(), (f[1].to_string(), f[2].to_string()));
                }
                _ => {}
            }
        }
        let index: HashMap<String, usize> = ids.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut adj = vec![Vec::new(); ids.len()];
        for (c, p) in edges {
            let (a, b) = (index[&c], index[&p]);
            adj[a].push(b);
            adj[b].push(a);
        }
        Self { ids, index, adj, categories }
    }

    /// BFS hop counts from `from` to every synset.
    pub fn distances(&self, from: &str) -> Vec<Option<u32>> {
        let start = self.index[from];
        let mut dist = vec![None; self.ids.len()];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(dist[u].unwrap() + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: &str, b: &str) -> Option<u32> {
        self.distances(a)[self.index[b]]
    }

    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        self.distance(a, b).map(|d| 1.0 / (1.0 + d as f64))
    }

    /// Best replacement for `foil` among `image` terms: same supercategory,
    /// then smallest distance, then smallest name.
    pub fn best_replacement(&self, foil: &str, image: &BTreeSet<String>) -> Option<String> {
        let (sup, syn) = &self.categories[foil];
        let dist = self.distances(syn);
        image
            .iter()
            .filter(|c| &self.categories[c.as_str()].0 == sup)
            .min_by_key(|c| (dist[self.index[&self.categories[c.as_str()].1]].unwrap_or(u32::MAX), (*c).clone()))
            .cloned()
    }
}

/// Membership-by-membership set algebra over plain vectors.
pub fn brute_force_sets(nouns: &[String], names: &[String]) -> [BTreeSet<String>; 3] {
    let mut inter = BTreeSet::new();
    let mut caption = BTreeSet::new();
    let mut image = BTreeSet::new();
    for n in nouns {
        if names.iter().any(|m| m == n) {
            inter.insert(n.clone());
        } else {
            caption.insert(n.clone());
        }
    }
    for m in names {
        if !nouns.iter().any(|n| n == m) {
            image.insert(m.clone());
        }
    }
    [inter, caption, image]
}

pub fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}
