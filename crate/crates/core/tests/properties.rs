mod common;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use caption_audit::dataset::{self, DetectionIndex, EvalExample};
use caption_audit::eval::{self, ClassMetrics, EvalReport, ReportFormat};
use caption_audit::lexicon::{SemanticNetwork, SimilarBy};
use caption_audit::nlp::{self, filter_nouns, normalize, tokenize, TaggedToken, TaggerModel, Token};
use caption_audit::pipeline::{self, compare, DetectionSet, PipelineConfig};
use proptest::prelude::*;
use proptest::sample::{select, subsequence};

use common::{brute_force_sets, OracleGraph};

fn net() -> &'static SemanticNetwork {
    static NET: OnceLock<SemanticNetwork> = OnceLock::new();
    NET.get_or_init(SemanticNetwork::packaged)
}

fn model() -> &'static TaggerModel {
    static MODEL: OnceLock<TaggerModel> = OnceLock::new();
    MODEL.get_or_init(TaggerModel::packaged)
}

fn synset_ids() -> Vec<String> {
    net().synsets().iter().map(|s| s.id.clone()).collect()
}

fn category_names() -> Vec<String> {
    net().categories().iter().map(|c| c.name.clone()).collect()
}

fn lemmas() -> Vec<String> {
    let set: BTreeSet<String> = net().synsets().iter().flat_map(|s| s.lemmas.iter().cloned()).collect();
    set.into_iter().collect()
}

fn bench_detections() -> &'static DetectionIndex {
    static IDX: OnceLock<DetectionIndex> = OnceLock::new();
    IDX.get_or_init(|| dataset::parse_detections(common::BENCH_DETECTIONS).unwrap())
}

/// Captions assembled from category names in a few caption-like frames.
fn caption() -> impl Strategy<Value = String> {
    let frames =
        vec!["a {} next to a {}", "two {} near the {}", "a {} with a {} and a {}", "the {}", "a man holding a {}"];
    (select(frames), prop::collection::vec(select(category_names()), 3)).prop_map(|(frame, words)| {
        let mut out = frame.to_string();
        for w in words {
            out = out.replacen("{}", &w, 1);
        }
        out
    })
}

fn example() -> impl Strategy<Value = EvalExample> {
    let images = vec!["kitchen_01", "street_02", "street_04", "livingroom_05", "139", "absent_9"];
    (select(images), caption(), any::<bool>(), select(category_names()), select(category_names())).prop_map(
        |(image, caption, foil, a, b)| {
            if foil && a != b {
                EvalExample::foil("", image, &caption, &a, &b)
            } else {
                EvalExample::correct("", image, &caption)
            }
        },
    )
}

fn examples() -> impl Strategy<Value = Vec<EvalExample>> {
    prop::collection::vec(example(), 0..25).prop_map(|mut v| {
        for (i, e) in v.iter_mut().enumerate() {
            e.example_id = format!("e{i:03}");
        }
        v
    })
}

fn bench(examples: &[EvalExample], jobs: usize) -> EvalReport {
    eval::run_benchmark(examples, bench_detections(), model(), net(), &PipelineConfig::benchmark(), jobs)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

fn metrics_match(m: &ClassMetrics, hit: usize, fp: usize, fn_: usize) -> bool {
    let p = if hit + fp == 0 { 0.0 } else { hit as f64 / (hit + fp) as f64 };
    let r = if hit + fn_ == 0 { 0.0 } else { hit as f64 / (hit + fn_) as f64 };
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    close(m.precision, p) && close(m.recall, r) && close(m.f1, f)
}

proptest! {
    #[test]
    fn similarity_is_symmetric_and_bounded(a in select(synset_ids()), b in select(synset_ids())) {
        let ab = net().path_similarity(&a, &b).unwrap();
        let ba = net().path_similarity(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        if let Some(s) = ab {
            prop_assert!(s.value() > 0.0 && s.value() <= 1.0);
            prop_assert_eq!(s.value() == 1.0, a == b);
        }
    }

    #[test]
    fn raising_tau_only_drops_mappings(word in select(lemmas()), t1 in 0.01f64..=1.0, t2 in 0.01f64..=1.0) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        if let Some(strict) = net().map_to_common_term(&word, hi) {
            prop_assert_eq!(net().map_to_common_term(&word, lo), Some(strict));
        }
    }

    #[test]
    fn ranking_ignores_candidate_order(
        term in select(category_names()),
        candidates in subsequence(category_names(), 0..12).prop_shuffle(),
    ) {
        let t = net().category(&term).unwrap();
        let forward: Vec<_> = candidates.iter().map(|c| net().category(c).unwrap()).collect();
        let mut backward = forward.clone();
        backward.reverse();
        let a = net().rank_candidates(t, forward.iter().copied());
        let b = net().rank_candidates(t, backward.iter().copied());
        prop_assert_eq!(&a, &b);
        for w in a.windows(2) {
            let key = |r: &caption_audit::lexicon::RankedCandidate| (std::cmp::Reverse(r.similarity), r.term.name.clone());
            prop_assert!(key(&w[0]) < key(&w[1]));
        }
        for r in &a {
            prop_assert_eq!(&r.term.supercategory, &t.supercategory);
        }
        let eligible = forward.iter().filter(|c| c.supercategory == t.supercategory).count();
        prop_assert_eq!(a.len(), eligible);
    }

    #[test]
    fn path_predicate_respects_threshold(term in select(category_names()), tau in 0.05f64..=1.0) {
        let t = net().category(&term).unwrap();
        let ranked = net().rank_candidates_by(t, net().categories(), SimilarBy::Path { tau });
        for r in ranked {
            prop_assert!(r.similarity.unwrap().value() >= tau);
        }
    }

    #[test]
    fn compare_matches_membership_oracle(
        nouns in subsequence((0..20).map(|i| format!("w{i}")).collect::<Vec<_>>(), 0..20),
        names in subsequence((0..20).map(|i| format!("w{i}")).collect::<Vec<_>>(), 0..20),
    ) {
        let cmp = compare(&nouns.iter().cloned().collect(), &names.iter().cloned().collect());
        let [inter, caption, image] = brute_force_sets(&nouns, &names);
        prop_assert_eq!(cmp.s_inter, inter);
        prop_assert_eq!(cmp.s_caption, caption);
        prop_assert_eq!(cmp.s_image, image);
    }

    #[test]
    fn normalize_is_idempotent(word in "[a-z]{1,12}") {
        let once = normalize(&word);
        prop_assert_eq!(normalize(&once), once);
    }

    #[test]
    fn tokens_reassemble_the_input(text in "[a-zA-Z.,!?'\"() -]{0,40}") {
        let joined: String = tokenize(&text).into_iter().map(|t| t.surface).collect();
        let expected: String = text.split_whitespace().collect();
        prop_assert_eq!(joined, expected);
    }

    #[test]
    fn tagging_keeps_length(text in "[a-z ]{0,60}") {
        let tokens = tokenize(&text);
        prop_assert_eq!(model().tag(&tokens).len(), tokens.len());
    }

    #[test]
    fn repeating_a_sentence_keeps_the_nouns(caption in caption()) {
        let tagged = model().tag(&tokenize(&caption));
        let mut doubled = tagged.clone();
        doubled.push(TaggedToken { token: Token::new("."), tag: ".".into() });
        doubled.extend(tagged.iter().cloned());
        let compounds = net().compound_terms();
        prop_assert_eq!(filter_nouns(&doubled, compounds), filter_nouns(&tagged, compounds));
    }

    #[test]
    fn detecting_every_mentioned_object_clears_the_foil(
        caption in caption(),
        labels in subsequence(category_names(), 0..6),
    ) {
        let config = PipelineConfig::default();
        let dets = DetectionSet::from_labels("p", &labels);
        let first = pipeline::validate(&dets, &caption, model(), net(), &config);
        let mut all = labels.clone();
        all.extend(first.comparison.s_caption.iter().cloned());
        let second = pipeline::validate(&DetectionSet::from_labels("p", &all), &caption, model(), net(), &config);
        prop_assert!(!second.is_foil, "{}", second.explanation);
        prop_assert!(second.comparison.s_caption.is_empty());
    }

    #[test]
    fn corrections_stay_within_the_sets(caption in caption(), labels in subsequence(category_names(), 0..6)) {
        let v = pipeline::validate(&DetectionSet::from_labels("p", &labels), &caption, model(), net(), &Default::default());
        prop_assert_eq!(v.is_foil, !v.corrections.is_empty());
        for (foil, replacement) in &v.corrections {
            prop_assert!(v.comparison.s_caption.contains(foil));
            prop_assert!(v.comparison.s_image.contains(replacement));
            let (f, r) = (net().category(foil).unwrap(), net().category(replacement).unwrap());
            prop_assert_eq!(&f.supercategory, &r.supercategory);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn report_ignores_order_and_jobs(examples in examples(), seed in any::<u64>()) {
        let base = bench(&examples, 1);
        let mut shuffled = examples.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            shuffled.swap(i, (seed as usize).wrapping_add(i * 7919) % (i + 1));
        }
        prop_assert_eq!(&bench(&shuffled, 4), &base);
    }

    #[test]
    fn report_metrics_recompute_from_counts(examples in examples()) {
        let r = bench(&examples, 2);
        let c = r.task1.confusion;
        prop_assert!(metrics_match(&r.task1.foil, c.tp, c.fp, c.fn_));
        prop_assert!(metrics_match(&r.task1.correct, c.tn, c.fn_, c.fp));
        let n = c.total();
        let overall = if n == 0 { 0.0 } else { (c.tp + c.tn) as f64 / n as f64 };
        prop_assert!(close(r.task1.overall_accuracy.value, overall));
        prop_assert_eq!(n + r.skipped.count, examples.len());

        let gold_foils = examples
            .iter()
            .filter(|e| e.gold_is_foil && bench_detections().get(&e.image_id).is_some())
            .count();
        prop_assert_eq!(r.task2.total, gold_foils);
        prop_assert!(r.task3.hits <= r.task2.hits && r.task2.hits <= gold_foils);
        prop_assert!(c.tp >= r.task2.hits);
        prop_assert_eq!(r.task3.total, r.task2.hits);
        for rate in [&r.task1.overall_accuracy, &r.task1.correct_accuracy, &r.task1.foil_accuracy, &r.task2, &r.task3] {
            prop_assert!((0.0..=1.0).contains(&rate.value));
        }
    }

    #[test]
    fn report_json_round_trips(examples in examples()) {
        let r = bench(&examples, 1);
        let back = EvalReport::from_json(&eval::render_report(&r, ReportFormat::Json)).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn annotations_round_trip(examples in examples()) {
        let text = dataset::annotations_to_json(&examples);
        prop_assert_eq!(dataset::parse_annotations(&text).unwrap(), examples);
    }
}

#[test]
fn normalize_is_idempotent_on_the_whole_vocabulary() {
    let mut words: BTreeSet<String> = lemmas().into_iter().collect();
    for corpus in [common::TRAIN, common::HELDOUT] {
        for sentence in nlp::parse_tagged_corpus(corpus).unwrap() {
            words.extend(sentence.into_iter().map(|(w, _)| w.to_lowercase()));
        }
    }
    for w in &words {
        let once = normalize(w);
        assert_eq!(normalize(&once), once, "{w}");
    }
}

#[test]
fn oracle_graph_matches_network_shape() {
    let oracle = OracleGraph::from_fixture();
    assert_eq!(oracle.categories.len(), net().categories().len());
    for c in net().categories() {
        let (sup, syn) = &oracle.categories[&c.name];
        assert_eq!((sup, syn), (&c.supercategory, &c.synset_id));
    }
}
