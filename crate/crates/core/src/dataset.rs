//! Loaders for evaluation inputs: annotation files (native or FOIL-COCO
//! layout), category tables and detections files.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

use crate::pipeline::{Detection, DetectionSet};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("record {index}, field `{field}`: {message}")]
    Record { index: usize, field: String, message: String },
    #[error("{0}")]
    Format(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn read(path: &Path) -> Result<String, DatasetError> {
    std::fs::read_to_string(path).map_err(|source| DatasetError::Io { path: path.display().to_string(), source })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalExample {
    pub example_id: String,
    pub image_id: String,
    pub caption: String,
    pub gold_is_foil: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_foil_word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_target_word: Option<String>,
}

impl EvalExample {
    pub fn correct(example_id: &str, image_id: &str, caption: &str) -> Self {
        Self {
            example_id: example_id.into(),
            image_id: image_id.into(),
            caption: caption.into(),
            gold_is_foil: false,
            gold_foil_word: None,
            gold_target_word: None,
        }
    }

    pub fn foil(example_id: &str, image_id: &str, caption: &str, foil_word: &str, target_word: &str) -> Self {
        Self {
            gold_is_foil: true,
            gold_foil_word: Some(foil_word.into()),
            gold_target_word: Some(target_word.into()),
            ..Self::correct(example_id, image_id, caption)
        }
    }

    /// Checks the gold-word invariant; the error names the offending field.
    pub fn check(&self) -> Result<(), (&'static str, String)> {
        if self.example_id.is_empty() {
            return Err(("example_id", "must not be empty".into()));
        }
        match (self.gold_is_foil, &self.gold_foil_word, &self.gold_target_word) {
            (true, None, _) => Err(("gold_foil_word", "required when gold_is_foil is true".into())),
            (true, _, None) => Err(("gold_target_word", "required when gold_is_foil is true".into())),
            (true, Some(f), Some(t)) if f.trim().eq_ignore_ascii_case(t.trim()) => {
                Err(("gold_target_word", format!("must differ from the foil word `{f}`")))
            }
            (false, Some(_), _) => Err(("gold_foil_word", "must be absent when gold_is_foil is false".into())),
            (false, _, Some(_)) => Err(("gold_target_word", "must be absent when gold_is_foil is false".into())),
            _ => Ok(()),
        }
    }
}

fn field<'v>(record: &'v Value, index: usize, name: &str) -> Result<&'v Value, DatasetError> {
    record.get(name).filter(|v| !v.is_null()).ok_or_else(|| DatasetError::Record {
        index,
        field: name.into(),
        message: "missing".into(),
    })
}

fn string_field(record: &Value, index: usize, name: &str) -> Result<String, DatasetError> {
    match field(record, index, name)? {
        Value::String(s) => Ok(s.clone()),
        other => Err(DatasetError::Record {
            index,
            field: name.into(),
            message: format!("expected a string, found {other}"),
        }),
    }
}

/// Ids may be written as strings or integers.
fn id_field(record: &Value, index: usize, name: &str) -> Result<String, DatasetError> {
    match field(record, index, name)? {
        Value::String(s) if !s.is_empty() => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => {
            Err(DatasetError::Record { index, field: name.into(), message: format!("expected an id, found {other}") })
        }
    }
}

fn bool_field(record: &Value, index: usize, name: &str) -> Result<bool, DatasetError> {
    field(record, index, name)?.as_bool().ok_or_else(|| DatasetError::Record {
        index,
        field: name.into(),
        message: "expected a boolean".into(),
    })
}

fn optional_string(record: &Value, index: usize, name: &str) -> Result<Option<String>, DatasetError> {
    match record.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => string_field(record, index, name).map(Some),
    }
}

fn native_example(record: &Value, index: usize) -> Result<EvalExample, DatasetError> {
    Ok(EvalExample {
        example_id: id_field(record, index, "example_id")?,
        image_id: id_field(record, index, "image_id")?,
        caption: string_field(record, index, "caption")?,
        gold_is_foil: bool_field(record, index, "gold_is_foil")?,
        gold_foil_word: optional_string(record, index, "gold_foil_word")?,
        gold_target_word: optional_string(record, index, "gold_target_word")?,
    })
}

/// FOIL-COCO marks the words of unaltered captions with `ORIG`.
fn foil_coco_example(record: &Value, index: usize) -> Result<EvalExample, DatasetError> {
    let is_foil = bool_field(record, index, "foil")?;
    let word = |name| -> Result<Option<String>, DatasetError> {
        if !is_foil {
            return Ok(None);
        }
        string_field(record, index, name).map(Some)
    };
    Ok(EvalExample {
        example_id: id_field(record, index, "id")?,
        image_id: id_field(record, index, "image_id")?,
        caption: string_field(record, index, "caption")?,
        gold_is_foil: is_foil,
        gold_foil_word: word("foil_word")?,
        gold_target_word: word("target_word")?,
    })
}

type Convert = fn(&Value, usize) -> Result<EvalExample, DatasetError>;

/// Parses annotations in the native layout (`{"version":1,"examples":[..]}`
/// or a bare array) or the FOIL-COCO layout (`{"annotations":[..]}`).
/// Records come back sorted by `example_id`.
pub fn parse_annotations(text: &str) -> Result<Vec<EvalExample>, DatasetError> {
    let doc: Value = serde_json::from_str(text)?;
    let (records, convert): (&Vec<Value>, Convert) = match &doc {
        Value::Array(items) => (items, native_example),
        Value::Object(map) if map.contains_key("examples") => {
            check_version(map.get("version"))?;
            match &map["examples"] {
                Value::Array(items) => (items, native_example),
                _ => return Err(DatasetError::Format("`examples` must be an array".into())),
            }
        }
        Value::Object(map) if map.contains_key("annotations") => match &map["annotations"] {
            Value::Array(items) => (items, foil_coco_example),
            _ => return Err(DatasetError::Format("`annotations` must be an array".into())),
        },
        _ => {
            return Err(DatasetError::Format(
                "unrecognized annotation layout: expected `examples` or `annotations`".into(),
            ))
        }
    };
    let mut examples = Vec::with_capacity(records.len());
    for (index, record) in records.iter().enumerate() {
        if !record.is_object() {
            return Err(DatasetError::Record { index, field: "*".into(), message: "expected an object".into() });
        }
        let example = convert(record, index)?;
        example.check().map_err(|(field, message)| DatasetError::Record { index, field: field.into(), message })?;
        examples.push(example);
    }
    examples.sort_by(|a, b| a.example_id.cmp(&b.example_id));
    if let Some(pair) = examples.windows(2).find(|w| w[0].example_id == w[1].example_id) {
        return Err(DatasetError::Format(format!("duplicate example_id `{}`", pair[0].example_id)));
    }
    Ok(examples)
}

pub fn load_annotations(path: impl AsRef<Path>) -> Result<Vec<EvalExample>, DatasetError> {
    parse_annotations(&read(path.as_ref())?)
}

#[derive(Serialize)]
struct AnnotationDoc<'a> {
    version: u64,
    examples: &'a [EvalExample],
}

/// Native annotation document; `parse_annotations` reads it back unchanged.
pub fn annotations_to_json(examples: &[EvalExample]) -> String {
    serde_json::to_string_pretty(&AnnotationDoc { version: FORMAT_VERSION, examples }).expect("serializable")
}

fn check_version(version: Option<&Value>) -> Result<(), DatasetError> {
    match version {
        Some(v) if v.as_u64() == Some(FORMAT_VERSION) => Ok(()),
        Some(v) => Err(DatasetError::Format(format!("unsupported version {v}, expected {FORMAT_VERSION}"))),
        None => Err(DatasetError::Format("missing `version`".into())),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryRow {
    pub name: String,
    pub supercategory: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CategoryTable {
    pub rows: Vec<CategoryRow>,
}

impl CategoryTable {
    pub fn packaged() -> Self {
        parse_categories(crate::data::COCO_CATEGORIES).expect("packaged category table is valid")
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn supercategories(&self) -> std::collections::BTreeSet<&str> {
        self.rows.iter().map(|r| r.supercategory.as_str()).collect()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.rows.iter().map(|r| (r.name.as_str(), r.supercategory.as_str()))
    }
}

/// CSV with a `name,supercategory` header. Names are lowercased and must be unique.
pub fn parse_categories(text: &str) -> Result<CategoryTable, DatasetError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["name", "supercategory"] {
        return Err(DatasetError::Format(format!(
            "category table header must be `name,supercategory`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows: Vec<CategoryRow> = Vec::new();
    let mut seen = HashMap::new();
    for (index, record) in reader.deserialize::<CategoryRow>().enumerate() {
        let mut row = record?;
        row.name = row.name.to_lowercase();
        row.supercategory = row.supercategory.to_lowercase();
        for (field, value) in [("name", &row.name), ("supercategory", &row.supercategory)] {
            if value.is_empty() {
                return Err(DatasetError::Record { index, field: field.into(), message: "must not be empty".into() });
            }
        }
        if let Some(first) = seen.insert(row.name.clone(), index) {
            return Err(DatasetError::Record {
                index,
                field: "name".into(),
                message: format!("duplicate category `{}` (first at record {first})", row.name),
            });
        }
        rows.push(row);
    }
    Ok(CategoryTable { rows })
}

pub fn load_categories(path: impl AsRef<Path>) -> Result<CategoryTable, DatasetError> {
    parse_categories(&read(path.as_ref())?)
}

/// Detections keyed by image id, with a fallback that matches a numeric id
/// (`42`) to a key whose trailing digits carry the same number
/// (`COCO_val2014_000000000042`). Detector exports key by file stem while
/// annotation files usually carry the bare number.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DetectionIndex {
    sets: BTreeMap<String, DetectionSet>,
    numeric: HashMap<u64, String>,
}

fn trailing_number(key: &str) -> Option<u64> {
    let digits = key.len() - key.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    if digits == 0 {
        return None;
    }
    key[key.len() - digits..].parse().ok()
}

impl DetectionIndex {
    pub fn new(sets: impl IntoIterator<Item = DetectionSet>) -> Self {
        let sets: BTreeMap<_, _> = sets.into_iter().map(|s| (s.image_id.clone(), s)).collect();
        let mut numeric: HashMap<u64, String> = HashMap::new();
        let mut ambiguous = Vec::new();
        for key in sets.keys() {
            if let Some(n) = trailing_number(key) {
                if numeric.insert(n, key.clone()).is_some() {
                    ambiguous.push(n);
                }
            }
        }
        for n in ambiguous {
            numeric.remove(&n);
        }
        Self { sets, numeric }
    }

    pub fn get(&self, image_id: &str) -> Option<&DetectionSet> {
        if let Some(set) = self.sets.get(image_id) {
            return Some(set);
        }
        let n: u64 = image_id.parse().ok()?;
        self.numeric.get(&n).and_then(|k| self.sets.get(k))
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &DetectionSet> {
        self.sets.values()
    }
}

/// JSON object that rejects repeated keys instead of keeping the last one.
struct UniqueMap(BTreeMap<String, Vec<Value>>);

impl<'de> Deserialize<'de> for UniqueMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = UniqueMap;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping image ids to detection lists")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<UniqueMap, A::Error> {
                let mut map = BTreeMap::new();
                while let Some((key, value)) = access.next_entry::<String, Vec<Value>>()? {
                    if map.contains_key(&key) {
                        return Err(serde::de::Error::custom(format!("duplicate image id `{key}`")));
                    }
                    map.insert(key, value);
                }
                Ok(UniqueMap(map))
            }
        }
        d.deserialize_map(V)
    }
}

#[derive(Deserialize)]
struct DetectionsDoc {
    version: Option<u64>,
    detections: UniqueMap,
}

fn detection(record: &Value, image_id: &str, index: usize) -> Result<Detection, DatasetError> {
    let err = |field: &str, message: String| DatasetError::Record {
        index,
        field: format!("detections[{image_id}].{field}"),
        message,
    };
    let det: Detection = serde_json::from_value(record.clone()).map_err(|e| err("*", e.to_string()))?;
    if det.label.trim().is_empty() {
        return Err(err("label", "must not be empty".into()));
    }
    if let Some(s) = det.score {
        if !(0.0..=1.0).contains(&s) {
            return Err(err("score", format!("must lie in [0, 1], got {s}")));
        }
    }
    if let Some(b) = det.bbox {
        if b.w < 0.0 || b.h < 0.0 {
            return Err(err(
                "bbox",
                format!("width and height must be non-negative, got [{}, {}, {}, {}]", b.x, b.y, b.w, b.h),
            ));
        }
    }
    Ok(det)
}

pub fn parse_detections(text: &str) -> Result<DetectionIndex, DatasetError> {
    let doc: DetectionsDoc = serde_json::from_str(text)?;
    check_version(doc.version.map(Value::from).as_ref())?;
    let mut sets = Vec::new();
    for (image_id, records) in doc.detections.0 {
        let detections =
            records.iter().enumerate().map(|(i, r)| detection(r, &image_id, i)).collect::<Result<Vec<_>, _>>()?;
        sets.push(DetectionSet { image_id, detections });
    }
    Ok(DetectionIndex::new(sets))
}

pub fn load_detections(path: impl AsRef<Path>) -> Result<DetectionIndex, DatasetError> {
    parse_detections(&read(path.as_ref())?)
}

#[derive(Serialize)]
struct DetectionsOut<'a> {
    version: u64,
    detections: BTreeMap<&'a str, &'a [Detection]>,
}

pub fn detections_to_json(index: &DetectionIndex) -> String {
    let detections = index.iter().map(|s| (s.image_id.as_str(), s.detections.as_slice())).collect();
    serde_json::to_string_pretty(&DetectionsOut { version: FORMAT_VERSION, detections }).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;

    const NATIVE: &str = r#"{"version":1,"examples":[
        {"example_id":"b","image_id":"1","caption":"a cat","gold_is_foil":false},
        {"example_id":"a","image_id":2,"caption":"a dog on a couch","gold_is_foil":true,
         "gold_foil_word":"dog","gold_target_word":"cat"},
        {"example_id":"c","image_id":"3","caption":"a bus","gold_is_foil":false,"extra":1}]}"#;

    #[test]
    fn native_annotations_load_sorted() {
        let ex = parse_annotations(NATIVE).unwrap();
        assert_eq!(ex.len(), 3);
        assert_eq!(ex.iter().map(|e| e.example_id.as_str()).collect::<Vec<_>>(), ["a", "b", "c"]);
        assert_eq!(ex[0].image_id, "2");
        assert_eq!(parse_annotations(&annotations_to_json(&ex)).unwrap(), ex);
    }

    #[test]
    fn annotation_errors_name_record_and_field() {
        let doc = r#"{"version":1,"examples":[
            {"example_id":"a","image_id":"1","caption":"x","gold_is_foil":false},
            {"example_id":"b","image_id":"1","caption":"x","gold_is_foil":true,"gold_foil_word":"dog"}]}"#;
        match parse_annotations(doc) {
            Err(DatasetError::Record { index: 1, field, .. }) => assert_eq!(field, "gold_target_word"),
            other => panic!("{other:?}"),
        }
        let doc = r#"[{"example_id":"a","image_id":"1","gold_is_foil":false}]"#;
        assert!(
            matches!(parse_annotations(doc), Err(DatasetError::Record { index: 0, field, .. }) if field == "caption")
        );
        let doc = r#"[{"example_id":"a","image_id":"1","caption":"x","gold_is_foil":true,
            "gold_foil_word":"dog","gold_target_word":"Dog"}]"#;
        assert!(parse_annotations(doc).is_err());
        let doc = r#"[{"example_id":"a","image_id":"1","caption":"x","gold_is_foil":false},
            {"example_id":"a","image_id":"2","caption":"y","gold_is_foil":false}]"#;
        assert!(matches!(parse_annotations(doc), Err(DatasetError::Format(_))));
        assert!(parse_annotations(r#"{"version":2,"examples":[]}"#).is_err());
        assert!(parse_annotations(r#"{"things":[]}"#).is_err());
    }

    #[test]
    fn foil_coco_layout() {
        let doc = r#"{"images":[],"annotations":[
            {"id":7,"image_id":42,"caption":"a dog on a couch","foil":true,"foil_word":"dog","target_word":"cat"},
            {"id":5,"image_id":42,"caption":"a cat on a couch","foil":false,"foil_word":"ORIG","target_word":"ORIG"}]}"#;
        let ex = parse_annotations(doc).unwrap();
        assert_eq!(
            ex,
            [
                EvalExample::correct("5", "42", "a cat on a couch"),
                EvalExample::foil("7", "42", "a dog on a couch", "dog", "cat"),
            ]
        );
    }

    #[test]
    fn packaged_categories() {
        let t = CategoryTable::packaged();
        assert_eq!(t.len(), 80);
        assert_eq!(t.supercategories().len(), 12);
        let names: std::collections::BTreeSet<_> = t.rows.iter().map(|r| &r.name).collect();
        assert_eq!(names.len(), 80);
    }

    #[test]
    fn category_errors() {
        assert!(parse_categories("name,super\ncat,animal\n").is_err());
        assert!(parse_categories("name,supercategory\ncat,animal\nCat,animal\n").is_err());
        assert!(parse_categories("name,supercategory\ncat,\n").is_err());
        assert!(parse_categories("name,supercategory\n").unwrap().is_empty());
    }

    #[test]
    fn detections_round_trip_and_errors() {
        let doc = r#"{"version":1,"detections":{
            "img1":[{"label":"person","score":0.9,"bbox":[1,2,3,4]},{"label":"cake","extra":true}],
            "img2":[]}}"#;
        let idx = parse_detections(doc).unwrap();
        assert_eq!(idx.len(), 2);
        assert_eq!(idx.get("img1").unwrap().detections[1], Detection::label("cake"));
        assert_eq!(parse_detections(&detections_to_json(&idx)).unwrap(), idx);

        assert!(parse_detections(r#"{"version":1,"detections":{}}"#).unwrap().is_empty());
        let neg = r#"{"version":1,"detections":{"a":[{"label":"cat","bbox":[0,0,-1,2]}]}}"#;
        assert!(matches!(parse_detections(neg), Err(DatasetError::Record { field, .. }) if field.ends_with("bbox")));
        let dup = r#"{"version":1,"detections":{"a":[],"a":[]}}"#;
        assert!(parse_detections(dup).is_err());
        let score = r#"{"version":1,"detections":{"a":[{"label":"cat","score":1.5}]}}"#;
        assert!(parse_detections(score).is_err());
        assert!(parse_detections(r#"{"detections":{}}"#).is_err());
    }

    #[test]
    fn numeric_image_id_fallback() {
        let idx = DetectionIndex::new([
            DetectionSet::from_labels("COCO_val2014_000000000042", &["cat"]),
            DetectionSet::from_labels("other", &["dog"]),
        ]);
        assert_eq!(idx.get("42").unwrap().image_id, "COCO_val2014_000000000042");
        assert!(idx.get("43").is_none());
        assert!(idx.get("other").is_some());
        let ambiguous = DetectionIndex::new([
            DetectionSet::from_labels("a_7", &["cat"]),
            DetectionSet::from_labels("b_007", &["dog"]),
        ]);
        assert!(ambiguous.get("7").is_none());
    }
}
