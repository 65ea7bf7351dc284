mod common;

use std::collections::BTreeSet;

use caption_audit::data;
use caption_audit::dataset::{self, CategoryTable, EvalExample};
use caption_audit::eval::{self, EvalReport, ReportFormat, MISSING_DETECTIONS};
use caption_audit::lexicon::{same_supercategory, SemanticNetwork};
use caption_audit::nlp::{self, TaggerModel};
use caption_audit::pipeline::{self, build_name_set, build_noun_set, PipelineConfig};

use common::{set, OracleGraph};

#[test]
fn packaged_taxonomy_resolves_every_category() {
    let net = SemanticNetwork::packaged();
    assert!(net.synsets().len() >= 200);
    assert_eq!(net.categories().len(), 80);
    for c in net.categories() {
        assert!(net.synset(&c.synset_id).is_some(), "{}", c.name);
        assert_eq!(net.map_to_common_term(&c.name, 0.25), Some(c));
    }
    let round = SemanticNetwork::parse(&net.to_document()).unwrap();
    assert_eq!(round.to_document(), net.to_document());
}

#[test]
fn category_csv_agrees_with_taxonomy() {
    let table = CategoryTable::packaged();
    let net = SemanticNetwork::packaged();
    let from_csv: BTreeSet<(&str, &str)> = table.pairs().collect();
    let from_net: BTreeSet<(&str, &str)> =
        net.categories().iter().map(|c| (c.name.as_str(), c.supercategory.as_str())).collect();
    assert_eq!(from_csv, from_net);
    let restricted = net.with_category_table(table.pairs()).unwrap();
    assert_eq!(restricted.categories(), net.categories());
}

#[test]
fn supercategory_examples() {
    let net = SemanticNetwork::packaged();
    let c = |n: &str| net.category(n).unwrap();
    assert!(same_supercategory(c("pizza"), c("cake")));
    assert!(same_supercategory(c("pizza"), c("pizza")));
    assert!(!same_supercategory(c("bicycle"), c("cake")));
}

#[test]
fn puppy_maps_to_the_nearest_category() {
    let net = SemanticNetwork::packaged();
    let oracle = OracleGraph::from_fixture();
    // brute force over every (puppy synset, category synset) pair
    let puppy_synsets: Vec<&str> = net.synsets_with_lemma("puppy").map(|s| s.id.as_str()).collect();
    assert!(!puppy_synsets.is_empty());
    let mut best: Option<(u32, &str)> = None;
    for s in &puppy_synsets {
        for (name, (_, syn)) in &oracle.categories {
            if let Some(d) = oracle.distance(s, syn) {
                if best.is_none_or(|(bd, bn)| (d, name.as_str()) < (bd, bn)) {
                    best = Some((d, name));
                }
            }
        }
    }
    let (_, want) = best.unwrap();
    assert_eq!(want, "dog");
    assert_eq!(net.map_to_common_term("puppy", 0.25).unwrap().name, want);
    assert_eq!(net.map_to_common_term("woman", 0.25).unwrap().name, "person");
    assert_eq!(net.map_to_common_term("motorcycle", 0.25).unwrap().name, "motorcycle");
}

#[test]
fn pizza_candidates_follow_oracle_ranking() {
    let net = SemanticNetwork::packaged();
    let oracle = OracleGraph::from_fixture();
    let c = |n: &str| net.category(n).unwrap();
    let ranked = net.rank_candidates(c("pizza"), [c("cake"), c("sandwich"), c("bicycle")]);
    let names: Vec<&str> = ranked.iter().map(|r| r.term.name.as_str()).collect();
    let mut expected = vec!["cake", "sandwich"];
    expected.sort_by_key(|n| (oracle.distance("pizza.n.01", &oracle.categories[*n].1).unwrap(), *n));
    assert_eq!(names, expected);
    assert_eq!(net.rank_candidates(c("pizza"), [c("cake")]).len(), 1);
    assert!(net.rank_candidates(c("pizza"), [c("bicycle")]).is_empty());
}

#[test]
fn noun_set_examples() {
    let net = SemanticNetwork::packaged();
    let model = TaggerModel::packaged();
    let config = PipelineConfig::default();
    assert_eq!(build_noun_set("a woman cutting a pizza", &model, &net, &config), (set(&["person", "pizza"]), set(&[])));
    assert_eq!(build_noun_set("", &model, &net, &config), (set(&[]), set(&[])));
    assert_eq!(build_noun_set("a man riding a zamboni", &model, &net, &config), (set(&["person"]), set(&["zamboni"])));
    assert_eq!(
        build_noun_set("two traffic lights near the dogs", &model, &net, &config).0,
        set(&["dog", "traffic light"])
    );
    let dets = pipeline::DetectionSet::from_labels("k", &["person", "cake", "knife"]);
    assert_eq!(build_name_set(&dets, &net, &config), set(&["cake", "knife", "person"]));
}

#[test]
fn tags_a_simple_caption() {
    let model = TaggerModel::packaged();
    let tagged = model.tag(&nlp::tokenize("a man riding a motorcycle"));
    let tags: Vec<&str> = tagged.iter().map(|t| t.tag.as_str()).collect();
    assert_eq!(tags, ["DT", "NN", "VBG", "DT", "NN"]);
    assert!(model.tag(&[]).is_empty());
}

#[test]
fn retraining_reproduces_the_packaged_model() {
    let corpus = nlp::parse_tagged_corpus(common::TRAIN).unwrap();
    assert_eq!(corpus.len(), 500);
    let model = nlp::train_tagger(&corpus, 5, 42).unwrap();
    assert_eq!(model.to_text(), data::TAGGER_MODEL);
    let again = nlp::train_tagger(&corpus, 5, 42).unwrap();
    assert_eq!(again.to_text(), model.to_text());
}

#[test]
fn fixture_gold_words_map_to_categories() {
    let net = SemanticNetwork::packaged();
    let native = dataset::parse_annotations(common::BENCH_ANNOTATIONS).unwrap();
    let coco = dataset::parse_annotations(include_str!("../data/bench/foil_coco_sample.json")).unwrap();
    for e in native.iter().chain(&coco) {
        for w in [&e.gold_foil_word, &e.gold_target_word].into_iter().flatten() {
            assert!(pipeline::map_label(&net, w, 0.25).is_some(), "{}: `{w}`", e.example_id);
        }
    }
}

#[test]
fn foil_coco_sample_matches_hand_conversion() {
    let imported = dataset::parse_annotations(include_str!("../data/bench/foil_coco_sample.json")).unwrap();
    let native = dataset::parse_annotations(include_str!("../data/bench/foil_coco_sample.native.json")).unwrap();
    assert_eq!(imported, native);
    assert_eq!(native.len(), 3);
}

#[test]
fn text_report_matches_golden_file() {
    let report = EvalReport::from_json(common::BENCH_EXPECTED).unwrap();
    assert_eq!(eval::render_report(&report, ReportFormat::Text), common::BENCH_EXPECTED_TEXT);
}

#[test]
fn markdown_report_has_class_rows() {
    let report = EvalReport::from_json(common::BENCH_EXPECTED).unwrap();
    let md = eval::render_report(&report, ReportFormat::Markdown);
    assert!(md.contains("| Correct | 0.5000 | 0.5000 | 0.5000 |"));
    assert!(md.contains("| Foil | 0.7500 | 0.7500 | 0.7500 |"));
}

#[test]
fn empty_detections_skip_everything() {
    let examples = dataset::parse_annotations(common::BENCH_ANNOTATIONS).unwrap();
    let none = dataset::parse_detections(r#"{"version":1,"detections":{}}"#).unwrap();
    let r = eval::run_benchmark(
        &examples,
        &none,
        &TaggerModel::packaged(),
        &SemanticNetwork::packaged(),
        &PipelineConfig::benchmark(),
        1,
    );
    assert_eq!(r.skipped.count, examples.len());
    assert_eq!(r.skipped.reasons[MISSING_DETECTIONS], examples.len());
    assert_eq!(r.task1.confusion.total(), 0);
}

#[test]
fn always_correct_pipeline_flags_the_foil_row() {
    // every caption mentions only detected objects, so nothing is ever foil
    let examples = vec![
        EvalExample::correct("a", "kitchen_01", "a woman cutting a cake"),
        EvalExample::correct("b", "street_04", "a man riding a motorcycle"),
    ];
    let dets = dataset::parse_detections(common::BENCH_DETECTIONS).unwrap();
    let r = eval::run_benchmark(
        &examples,
        &dets,
        &TaggerModel::packaged(),
        &SemanticNetwork::packaged(),
        &PipelineConfig::benchmark(),
        1,
    );
    assert_eq!((r.task1.correct.precision, r.task1.correct.recall), (1.0, 1.0));
    assert!(r.task1.foil.undefined && !r.task1.correct.undefined);
    assert_eq!((r.task1.foil.precision, r.task1.foil.recall, r.task1.foil.f1), (0.0, 0.0, 0.0));
    let text = eval::render_report(&r, ReportFormat::Text);
    let foil_row = text.lines().find(|l| l.starts_with("Foil")).unwrap();
    assert!(foil_row.ends_with("0.0000 *"), "{foil_row}");
    assert!(text.contains("* undefined"));
}

#[test]
fn detector_export_sample_loads() {
    let idx = dataset::parse_detections(include_str!("../data/bench/export_sample.json")).unwrap();
    assert_eq!(idx.len(), 2);
    let labels: BTreeSet<&str> = idx.get("73").unwrap().detections.iter().map(|d| d.label.as_str()).collect();
    assert!(labels.contains("person") && labels.contains("motorcycle"));
    let net = SemanticNetwork::packaged();
    for set in idx.iter() {
        for d in &set.detections {
            assert!(net.category(&d.label).is_some(), "{}", d.label);
        }
    }
}
