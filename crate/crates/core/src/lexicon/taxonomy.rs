//! Line-oriented taxonomy document reader.
//!
//! Three record kinds are recognised, one per line:
//!
//! ```text
//! S <id> <pos> <lemma,lemma,...>       synset; `_` inside a lemma stands for a space
//! H <child_id> <parent_id>             hypernym edge
//! C <name>|<supercategory>|<synset_id> common term (category)
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Records may appear in
//! any order; cross-record validation happens in [`SemanticNetwork::from_parts`].

use std::collections::HashSet;

use super::{CommonTerm, LexiconError, PartOfSpeech, SemanticNetwork, Synset};

pub(super) fn parse(text: &str) -> Result<SemanticNetwork, LexiconError> {
    let mut synsets = Vec::new();
    let mut edges = Vec::new();
    let mut categories = Vec::new();
    let mut seen_ids = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| LexiconError::Parse { line: line_no, message };
        let (kind, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match kind {
            "S" => {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                if fields.len() != 3 {
                    return Err(err(format!(
                        "synset record needs `<id> <pos> <lemmas>`, found {} field(s)",
                        fields.len()
                    )));
                }
                let id = fields[0];
                let pos = match fields[1] {
                    "n" => PartOfSpeech::Noun,
                    other => return Err(err(format!("unsupported part of speech `{other}`"))),
                };
                let mut lemmas = Vec::new();
                for lemma in fields[2].split(',') {
                    if lemma.is_empty() {
                        return Err(err(format!("empty lemma in synset `{id}`")));
                    }
                    if lemma.chars().any(char::is_uppercase) {
                        return Err(err(format!("lemma `{lemma}` is not lowercase")));
                    }
                    let lemma = lemma.replace('_', " ");
                    if !lemmas.contains(&lemma) {
                        lemmas.push(lemma);
                    }
                }
                if !seen_ids.insert(id.to_string()) {
                    return Err(err(format!("duplicate synset id `{id}`")));
                }
                synsets.push(Synset { id: id.to_string(), lemmas, pos });
            }
            "H" => {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                if fields.len() != 2 {
                    return Err(err(format!(
                        "hypernym record needs `<child> <parent>`, found {} field(s)",
                        fields.len()
                    )));
                }
                edges.push((fields[0].to_string(), fields[1].to_string()));
            }
            "C" => {
                let fields: Vec<&str> = rest.split('|').map(str::trim).collect();
                if fields.len() != 3 {
                    return Err(err(format!(
                        "category record needs `<name>|<supercategory>|<synset>`, found {} field(s)",
                        fields.len()
                    )));
                }
                if fields[0].is_empty() {
                    return Err(err("empty category name".into()));
                }
                if fields[1].is_empty() {
                    return Err(err(format!("category `{}` has empty supercategory", fields[0])));
                }
                categories.push(CommonTerm {
                    name: fields[0].to_lowercase(),
                    supercategory: fields[1].to_lowercase(),
                    synset_id: fields[2].to_string(),
                });
            }
            other => return Err(err(format!("unknown record kind `{other}`"))),
        }
    }

    SemanticNetwork::from_parts(synsets, edges, categories)
}

pub(super) fn render(net: &SemanticNetwork) -> String {
    let mut out = String::new();
    for s in net.synsets() {
        let lemmas: Vec<String> = s.lemmas.iter().map(|l| l.replace(' ', "_")).collect();
        out.push_str(&format!("S {} n {}\n", s.id, lemmas.join(",")));
    }
    for (child, parent) in net.hypernym_edges() {
        out.push_str(&format!("H {child} {parent}\n"));
    }
    for c in net.categories() {
        out.push_str(&format!("C {}|{}|{}\n", c.name, c.supercategory, c.synset_id));
    }
    out
}
