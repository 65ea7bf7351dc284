use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use caption_audit::dataset::{self, DetectionIndex};
use caption_audit::eval::{self, ReportFormat};
use caption_audit::lexicon::{MatchKind, SemanticNetwork, SimilarBy, DEFAULT_TAU};
use caption_audit::nlp::{self, TaggerModel};
use caption_audit::pipeline::{self, DetectionSet, PipelineConfig};

const EXIT_USAGE: u8 = 2;
const EXIT_FOIL: u8 = 3;
const EXIT_NOT_FOUND: u8 = 1;

#[derive(Parser)]
#[command(name = "caption-audit", version, about = "Check image captions against detected objects")]
struct Cli {
    #[command(flatten)]
    data: DataArgs,
    /// Log verbosity on stderr (-v info, -vv debug)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DataArgs {
    /// Directory holding taxonomy.txt, coco_categories.csv and tagger.model
    #[arg(long, env = "CAPTION_AUDIT_DATA", global = true)]
    data_dir: Option<PathBuf>,
    /// Taxonomy file (default: packaged)
    #[arg(long, global = true)]
    taxonomy: Option<PathBuf>,
    /// Category table CSV restricting the taxonomy's categories
    #[arg(long, global = true)]
    categories: Option<PathBuf>,
    /// Tagger model file (default: packaged)
    #[arg(long, global = true)]
    model: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct MatchArgs {
    /// Minimum path similarity for mapping unknown nouns onto categories
    #[arg(long, default_value_t = DEFAULT_TAU, value_parser = unit_interval_open)]
    tau: f64,
    /// Replacement predicate: `supercategory` or `path:<tau>`
    #[arg(long, default_value = "supercategory")]
    similar_by: SimilarBy,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one caption; exits 3 when it is a foil
    Validate {
        #[arg(long)]
        caption: String,
        /// Detections file (requires --image-id)
        #[arg(long, requires = "image_id", conflicts_with = "labels")]
        detections: Option<PathBuf>,
        #[arg(long)]
        image_id: Option<String>,
        /// Comma-separated detected labels, instead of a detections file
        #[arg(long, value_delimiter = ',')]
        labels: Option<Vec<String>>,
        #[arg(long, default_value_t = pipeline::INTERACTIVE_MIN_SCORE, value_parser = unit_interval)]
        min_score: f64,
        #[command(flatten)]
        matching: MatchArgs,
        #[arg(long, value_enum, default_value_t = Output::Text)]
        format: Output,
    },
    /// Score an annotated benchmark
    Bench {
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        detections: PathBuf,
        /// Worker threads; the report is identical for every value
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
        #[arg(long, default_value_t = pipeline::BENCHMARK_MIN_SCORE, value_parser = unit_interval)]
        min_score: f64,
        #[command(flatten)]
        matching: MatchArgs,
        /// text, json or markdown
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Train a POS tagger from a `word_TAG` corpus
    TrainTagger {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 5)]
        iterations: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Tagged corpus to report token accuracy on after training
        #[arg(long)]
        heldout: Option<PathBuf>,
    },
    /// Query the taxonomy
    Lexicon {
        #[command(subcommand)]
        query: LexiconQuery,
    },
}

#[derive(Subcommand)]
enum LexiconQuery {
    /// Path similarity between two words or synset ids, and the path taken
    Sim { a: String, b: String },
    /// Common term a noun maps to
    Map {
        noun: String,
        #[arg(long, default_value_t = DEFAULT_TAU, value_parser = unit_interval_open)]
        tau: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Text,
    Json,
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn unit_interval_open(s: &str) -> Result<f64, String> {
    let v = unit_interval(s)?;
    if v == 0.0 {
        return Err("must be greater than 0".into());
    }
    Ok(v)
}

impl DataArgs {
    /// Explicit flag, then the data directory, then the packaged copy.
    fn resolve(&self, flag: &Option<PathBuf>, file: &str) -> Option<PathBuf> {
        flag.clone().or_else(|| {
            let p = self.data_dir.as_ref()?.join(file);
            p.exists().then_some(p)
        })
    }

    fn network(&self) -> Result<SemanticNetwork> {
        let net = match self.resolve(&self.taxonomy, "taxonomy.txt") {
            Some(p) => SemanticNetwork::load(&p).with_context(|| format!("loading taxonomy {}", p.display()))?,
            None => SemanticNetwork::packaged(),
        };
        match self.resolve(&self.categories, "coco_categories.csv") {
            Some(p) => {
                let table = dataset::load_categories(&p)?;
                net.with_category_table(table.pairs())
                    .with_context(|| format!("applying category table {}", p.display()))
            }
            None => Ok(net),
        }
    }

    fn model(&self) -> Result<TaggerModel> {
        match self.resolve(&self.model, "tagger.model") {
            Some(p) => {
                let text = read(&p)?;
                TaggerModel::from_text(&text).with_context(|| format!("loading tagger model {}", p.display()))
            }
            None => Ok(TaggerModel::packaged()),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn config(min_score: f64, matching: &MatchArgs) -> PipelineConfig {
    PipelineConfig { tau: matching.tau, min_score, similar_by: matching.similar_by }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { caption, detections, image_id, labels, min_score, matching, format } => {
            let net = cli.data.network()?;
            let model = cli.data.model()?;
            let dets = match (detections, labels) {
                (Some(path), _) => {
                    let id = image_id.expect("clap enforces --image-id");
                    let index = dataset::load_detections(&path)?;
                    match index.get(&id) {
                        Some(set) => set.clone(),
                        None => bail!("{} has no detections for image `{id}`", path.display()),
                    }
                }
                (None, Some(labels)) => DetectionSet::from_labels(image_id.unwrap_or_else(|| "-".into()), &labels),
                (None, None) => bail!("give either --detections with --image-id, or --labels"),
            };
            let verdict = pipeline::validate(&dets, &caption, &model, &net, &config(min_score, &matching));
            match format {
                Output::Json => println!("{}", serde_json::to_string_pretty(&verdict)?),
                Output::Text => {
                    println!("{}", if verdict.is_foil { "foil" } else { "correct" });
                    for (foil, replacement) in &verdict.corrections {
                        println!("{foil} -> {replacement}");
                    }
                    println!("{}", verdict.explanation);
                }
            }
            Ok(if verdict.is_foil { EXIT_FOIL } else { 0 })
        }
        Command::Bench { annotations, detections, jobs, min_score, matching, format } => {
            let format: ReportFormat = format.parse()?;
            let examples = dataset::load_annotations(&annotations)?;
            let index: DetectionIndex = dataset::load_detections(&detections)?;
            let net = cli.data.network()?;
            let model = cli.data.model()?;
            let cfg = config(min_score, &matching);
            let report = eval::run_benchmark(&examples, &index, &model, &net, &cfg, jobs.into());
            if report.skipped.count > 0 {
                log::warn!("{} example(s) skipped", report.skipped.count);
            }
            print!("{}", eval::render_report(&report, format));
            Ok(0)
        }
        Command::TrainTagger { corpus, iterations, seed, out, heldout } => {
            let sentences =
                nlp::parse_tagged_corpus(&read(&corpus)?).with_context(|| format!("parsing {}", corpus.display()))?;
            let model = nlp::train_tagger(&sentences, iterations, seed)?;
            std::fs::write(&out, model.to_text()).with_context(|| format!("writing {}", out.display()))?;
            eprintln!(
                "trained on {} sentences ({} iterations, seed {seed}): {} features, {} tagdict entries",
                sentences.len(),
                iterations,
                model.feature_count(),
                model.tagdict().len()
            );
            if let Some(path) = heldout {
                let held = nlp::parse_tagged_corpus(&read(&path)?)?;
                println!("{:.4}", nlp::token_accuracy(&model, &held));
            }
            Ok(0)
        }
        Command::Lexicon { query } => {
            let net = cli.data.network()?;
            match query {
                LexiconQuery::Sim { a, b } => {
                    for w in [&a, &b] {
                        if !net.knows(w) {
                            bail!("`{w}` is neither a lemma nor a synset id in the taxonomy");
                        }
                    }
                    match net.word_similarity(&a, &b) {
                        Some((score, sa, sb)) => {
                            println!("{:?}", score.value());
                            let path = net.shortest_path(&sa.id, &sb.id)?.unwrap_or_default();
                            println!("{}", path.join(" - "));
                            Ok(0)
                        }
                        None => {
                            println!("none");
                            Ok(0)
                        }
                    }
                }
                LexiconQuery::Map { noun, tau } => {
                    let noun = nlp::normalize(&noun);
                    match net.resolve_common_term(&noun, tau) {
                        Some(m) => {
                            let how = match m.kind {
                                MatchKind::Name => "name".to_string(),
                                MatchKind::Lemma => "lemma".to_string(),
                                MatchKind::Similar(s) => format!("similarity {:?}", s.value()),
                            };
                            println!("{}\t{}\t{how}", m.term.name, m.term.supercategory);
                            Ok(0)
                        }
                        None => {
                            eprintln!("`{noun}` does not map to a common term at tau {tau}");
                            Ok(EXIT_NOT_FOUND)
                        }
                    }
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
