//! The `addrtag` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use addrtag_core::eval::{
    accuracy_delta, evaluate, mine_error_patterns, token_accuracy, ConfusionMatrix, EvalReport, DEFAULT_TOP_K,
};
use addrtag_core::generate::{
    generate_mix, generate_pattern, lowercase_duplicate, pattern_spec, split_corpus, GenerationConfig, PatternSpec,
    Slot, DEFAULT_CORPUS_SIZE, DEFAULT_SPLIT,
};
use addrtag_core::tagger::{rule_baseline, tag, train, TaggerModel, TrainConfig};
use addrtag_core::{tokenize, Corpus, Gazetteer, NameKind, TaggedSentence, Token};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::corpus_io::{read_corpus, to_jsonl, write_corpus, Format};
use crate::error::Error;
use crate::gazetteer_io::{resolve_gazetteer, GazetteerStats, MUNICIPALITIES_ENV, STREETS_ENV};
use crate::llm::{
    AugmentRequest, FixtureTransport, HttpTransport, LlmClient, API_KEY_ENV, DEFAULT_CONCURRENCY, ENDPOINT_ENV,
    MODEL_ENV,
};
use crate::manifest::RunManifest;
use crate::model_io::{load_model, save_model};
use crate::review::{apply_review, load_corrections, ReviewQueue};

pub const DEFAULT_SEED: u64 = 42;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "addrtag", version, about = "Slovak address NER: synthetic corpora, tagger training, evaluation")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Street list, one name per line (bundled sample list when omitted).
    #[arg(long, global = true, env = STREETS_ENV)]
    pub gazetteer_streets: Option<PathBuf>,
    /// Municipality list, one name per line.
    #[arg(long, global = true, env = MUNICIPALITIES_ENV)]
    pub gazetteer_municipalities: Option<PathBuf>,
    /// Print a machine-readable run manifest instead of the summary.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus for one pattern, or the full mix.
    Generate(GenerateArgs),
    /// Append a lowercased copy of every sentence.
    LowercaseDup(InOut),
    /// Split a corpus into train/validation/test files.
    Split(SplitArgs),
    /// Train the perceptron tagger.
    Train(TrainArgs),
    /// Tag raw text lines or the tokens of a corpus file.
    Tag(TagArgs),
    /// Token accuracy, confusion matrix, per-class and entity scores.
    Eval(EvalArgs),
    /// Mine conditional error patterns from gold and predicted corpora.
    Analyze(AnalyzeArgs),
    /// Validate the gazetteer lists and print counts.
    GazetteerCheck,
    /// Ask a chat-completion model for new templates and queue them for review.
    Augment(AugmentArgs),
    /// Apply reviewer corrections to a queue and update the template bank.
    Review(ReviewArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Pattern 1..=6; omit to generate the full mix of all patterns with and without noise.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
    pub pattern: Option<u8>,
    /// Sentences to generate (default 1000 for one pattern, 11306 for the mix).
    #[arg(long)]
    pub count: Option<usize>,
    /// Inject filler words.
    #[arg(long, requires = "pattern")]
    pub noise: bool,
    #[arg(long, requires = "pattern")]
    pub no_shuffle: bool,
    #[arg(long, requires = "pattern")]
    pub no_omit: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// File format (default: by extension).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct InOut {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = DEFAULT_SPLIT)]
    pub ratios: Vec<f64>,
    /// Output prefix; writes PREFIX.train.EXT, PREFIX.val.EXT, PREFIX.test.EXT.
    #[arg(long)]
    pub out_prefix: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub val: PathBuf,
    #[arg(long, default_value_t = 15)]
    pub epochs: usize,
    #[arg(long, default_value_t = 3)]
    pub patience: usize,
    #[arg(long = "out-model", alias = "out")]
    pub out_model: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Raw,
    Jsonl,
    Conll,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("tagger").required(true).args(["model", "baseline"]))]
#[command(group = clap::ArgGroup::new("source").required(true).args(["input", "text"]))]
pub struct TagArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Use the gazetteer rule baseline instead of a model.
    #[arg(long)]
    pub baseline: bool,
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// A single sentence given inline.
    #[arg(long)]
    pub text: Option<String>,
    #[arg(long, value_enum, default_value_t = InputFormat::Raw)]
    pub input_format: InputFormat,
    /// Output corpus (JSONL or CoNLL by extension); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Confusion-matrix fixture (9 rows of 9 counts).
    #[arg(long, conflicts_with_all = ["gold", "pred", "model", "baseline"])]
    pub cm: Option<PathBuf>,
    /// Second fixture; prints the accuracy change from --cm to this one.
    #[arg(long, requires = "cm")]
    pub compare: Option<PathBuf>,
    #[arg(long)]
    pub gold: Option<PathBuf>,
    #[arg(long, requires = "gold", conflicts_with_all = ["model", "baseline"])]
    pub pred: Option<PathBuf>,
    #[arg(long, requires = "gold", conflicts_with = "baseline")]
    pub model: Option<PathBuf>,
    #[arg(long, requires = "gold")]
    pub baseline: bool,
    /// Write the full JSON report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    pub top_k: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("what").required(true).args(["pattern", "description"]))]
pub struct AugmentArgs {
    /// Describe the request by pattern number.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
    pub pattern: Option<u8>,
    /// Free-form order of address parts.
    #[arg(long)]
    pub description: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub num: usize,
    /// Number of requests to send.
    #[arg(long, default_value_t = 1)]
    pub requests: usize,
    #[arg(long, default_value_t = DEFAULT_CONCURRENCY)]
    pub concurrency: usize,
    /// Serve a recorded response body from this file instead of the network.
    #[arg(long, conflicts_with = "live")]
    pub fixture: Option<PathBuf>,
    /// Allow real HTTP calls.
    #[arg(long)]
    pub live: bool,
    #[arg(long, env = ENDPOINT_ENV)]
    pub endpoint: Option<String>,
    #[arg(long = "llm-model", env = MODEL_ENV)]
    pub llm_model: Option<String>,
    #[arg(long, env = API_KEY_ENV, hide_env_values = true)]
    pub api_key: Option<String>,
    /// Where to write the review queue.
    #[arg(long)]
    pub queue: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReviewArgs {
    #[arg(long)]
    pub queue: PathBuf,
    /// JSONL of {"original", "corrected"} pairs; omit to only list the queue.
    #[arg(long)]
    pub corrections: Option<PathBuf>,
    #[arg(long)]
    pub bank: PathBuf,
    #[arg(long)]
    pub audit: PathBuf,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl From<addrtag_core::Error> for Failure {
    fn from(e: addrtag_core::Error) -> Self {
        Failure::Data(e.into())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

struct Outcome {
    manifest: RunManifest,
    summary: String,
    /// Printed to stdout regardless of --quiet (tagging output without --out).
    stdout: Option<String>,
}

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn gazetteer(&self) -> CliResult<(Gazetteer, GazetteerStats)> {
        Ok(resolve_gazetteer(
            self.cli.gazetteer_streets.as_deref(),
            self.cli.gazetteer_municipalities.as_deref(),
        )?)
    }

    fn manifest(&self, command: &str, stats: Option<&GazetteerStats>) -> CliResult<RunManifest> {
        let mut m = RunManifest::new(command, self.cli.seed);
        if let Some(st) = stats {
            m.gazetteer = Some(serde_json::to_value(st).expect("plain stats"));
            for p in [&self.cli.gazetteer_streets, &self.cli.gazetteer_municipalities].into_iter().flatten() {
                m.input(p)?;
            }
        }
        Ok(m)
    }
}

fn format_for(path: &Path, explicit: Option<Format>) -> Format {
    explicit.unwrap_or_else(|| Format::from_path(path))
}

fn load(path: &Path) -> CliResult<Corpus> {
    Ok(read_corpus(path, Format::from_path(path))?)
}

fn pct(x: f64) -> String {
    format!("{:.2}%", 100.0 * x)
}

/// Human-readable order of a pattern's parts with its flags.
pub fn describe_pattern(spec: &PatternSpec) -> String {
    let name = |s: &Slot| match s {
        Slot::StreetName => "Street",
        Slot::MunicipalityName => "Municipality",
        Slot::HouseNumber if spec.verbal_housenumber => "House Number (spoken as words)",
        Slot::HouseNumber => "House Number",
        Slot::Postcode => "Postal Code",
        Slot::Noise => "filler",
    };
    let mut out = spec.parts.iter().map(name).collect::<Vec<_>>().join(" + ");
    let mut notes = Vec::new();
    if spec.duplicate_municipality {
        notes.push("the municipality is mentioned twice");
    }
    if spec.allows_shuffle {
        notes.push("the parts may come in any order");
    }
    if spec.allows_omit {
        notes.push("some parts may be left out");
    }
    if !notes.is_empty() {
        let _ = write!(out, " ({})", notes.join("; "));
    }
    out
}

fn cmd_generate(ctx: &Ctx, a: &GenerateArgs) -> CliResult<Outcome> {
    let (g, stats) = ctx.gazetteer()?;
    let corpus = match a.pattern {
        Some(p) => {
            let mut cfg = GenerationConfig::for_pattern(p, a.count.unwrap_or(1000), a.noise, ctx.cli.seed)?;
            cfg.shuffle &= !a.no_shuffle;
            cfg.omit &= !a.no_omit;
            generate_pattern(&cfg, &g)?
        }
        None => generate_mix(a.count.unwrap_or(DEFAULT_CORPUS_SIZE), ctx.cli.seed, &g)?,
    };
    write_corpus(&corpus, &a.out, format_for(&a.out, a.format))?;
    let mut m = ctx.manifest("generate", Some(&stats))?;
    m.output(&a.out)?;
    m.result = json!({
        "pattern": a.pattern,
        "sentences": corpus.len(),
        "tokens": corpus.num_tokens(),
        "noise": a.noise,
        "corpus_fingerprint": format!("{:016x}", corpus.fingerprint()),
    });
    let summary = format!("wrote {} sentences ({} tokens) to {}", corpus.len(), corpus.num_tokens(), a.out.display());
    Ok(Outcome { manifest: m, summary, stdout: None })
}

fn cmd_lowercase(ctx: &Ctx, a: &InOut) -> CliResult<Outcome> {
    let c = load(&a.input)?;
    let d = lowercase_duplicate(&c);
    write_corpus(&d, &a.out, Format::from_path(&a.out))?;
    let mut m = ctx.manifest("lowercase-dup", None)?;
    m.input(&a.input)?;
    m.output(&a.out)?;
    m.result = json!({"input_sentences": c.len(), "output_sentences": d.len()});
    let summary = format!("{} -> {} sentences in {}", c.len(), d.len(), a.out.display());
    Ok(Outcome { manifest: m, summary, stdout: None })
}

fn split_paths(input: &Path, prefix: Option<&Path>) -> [PathBuf; 3] {
    let ext = input.extension().and_then(|e| e.to_str()).unwrap_or("jsonl").to_string();
    let base = match prefix {
        Some(p) => p.to_path_buf(),
        None => input.with_extension(""),
    };
    ["train", "val", "test"].map(|part| {
        let mut s = base.clone().into_os_string();
        s.push(format!(".{part}.{ext}"));
        PathBuf::from(s)
    })
}

fn cmd_split(ctx: &Ctx, a: &SplitArgs) -> CliResult<Outcome> {
    let ratios: [f64; 3] = a.ratios.clone().try_into().map_err(|_| Failure::Usage("--ratios needs three values".into()))?;
    let c = load(&a.input)?;
    let (tr, va, te) = split_corpus(&c, ratios, ctx.cli.seed)?;
    let paths = split_paths(&a.input, a.out_prefix.as_deref());
    let mut m = ctx.manifest("split", None)?;
    m.input(&a.input)?;
    for (part, p) in [&tr, &va, &te].into_iter().zip(&paths) {
        write_corpus(part, p, Format::from_path(p))?;
        m.output(p)?;
    }
    m.result = json!({"train": tr.len(), "val": va.len(), "test": te.len(), "ratios": ratios});
    let summary = format!(
        "train {} -> {}\nval {} -> {}\ntest {} -> {}",
        tr.len(),
        paths[0].display(),
        va.len(),
        paths[1].display(),
        te.len(),
        paths[2].display()
    );
    Ok(Outcome { manifest: m, summary, stdout: None })
}

fn cmd_train(ctx: &Ctx, a: &TrainArgs) -> CliResult<Outcome> {
    if a.epochs == 0 {
        return Err(Failure::Usage("--epochs must be at least 1".into()));
    }
    let (g, stats) = ctx.gazetteer()?;
    let tr = load(&a.train)?;
    let va = load(&a.val)?;
    let cfg = TrainConfig { epochs: a.epochs, seed: ctx.cli.seed, early_stop_patience: a.patience, ..Default::default() };
    let model = train(&tr, &va, &g, &cfg)?;
    save_model(&model, &a.out_model)?;
    let mut m = ctx.manifest("train", Some(&stats))?;
    m.input(&a.train)?;
    m.input(&a.val)?;
    m.output(&a.out_model)?;
    m.result = json!({
        "train_sentences": tr.len(),
        "val_sentences": va.len(),
        "features": model.num_features(),
        "metadata": model.metadata,
    });
    let md = &model.metadata;
    let summary = format!(
        "trained {} epochs, best epoch {} with validation token accuracy {}; {} features -> {}",
        md.epochs_run,
        md.best_epoch,
        pct(md.validation_accuracy),
        model.num_features(),
        a.out_model.display()
    );
    Ok(Outcome { manifest: m, summary, stdout: None })
}

enum Tagger {
    Model(Box<TaggerModel>),
    Baseline,
}

impl Tagger {
    fn run(&self, tokens: &[Token], g: &Gazetteer) -> CliResult<TaggedSentence> {
        match self {
            Tagger::Model(m) => Ok(tag(m, tokens, g)?),
            Tagger::Baseline => rule_baseline(tokens, g).ok_or(Failure::Data(addrtag_core::Error::EmptyInput.into())),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Tagger::Model(_) => "model",
            Tagger::Baseline => "baseline",
        }
    }
}

fn tag_corpus(t: &Tagger, c: &Corpus, g: &Gazetteer) -> CliResult<Corpus> {
    let sentences = c.iter().map(|s| t.run(s.tokens(), g)).collect::<CliResult<Vec<_>>>()?;
    Ok(Corpus::new(format!("{}.pred", c.name), sentences))
}

fn cmd_tag(ctx: &Ctx, a: &TagArgs) -> CliResult<Outcome> {
    let (g, stats) = ctx.gazetteer()?;
    let mut m = ctx.manifest("tag", Some(&stats))?;
    let tagger = match &a.model {
        Some(p) => {
            m.input(p)?;
            Tagger::Model(Box::new(load_model(p)?))
        }
        None => Tagger::Baseline,
    };
    let inputs: Vec<Vec<Token>> = match (&a.text, &a.input) {
        (Some(text), _) => vec![tokenize(text)],
        (None, Some(p)) => {
            m.input(p)?;
            match a.input_format {
                InputFormat::Raw => crate::corpus_io::read_utf8(p)?.lines().map(tokenize).collect(),
                InputFormat::Jsonl => read_corpus(p, Format::Jsonl)?.iter().map(|s| s.tokens().to_vec()).collect(),
                InputFormat::Conll => read_corpus(p, Format::Conll)?.iter().map(|s| s.tokens().to_vec()).collect(),
            }
        }
        (None, None) => unreachable!("clap requires --in or --text"),
    };
    let sentences = inputs
        .iter()
        .filter(|t| !t.is_empty())
        .map(|t| tagger.run(t, &g))
        .collect::<CliResult<Vec<_>>>()?;
    let out = Corpus::new("tagged", sentences);
    let mut stdout = None;
    match &a.out {
        Some(p) => {
            write_corpus(&out, p, Format::from_path(p))?;
            m.output(p)?;
        }
        None if ctx.cli.json => {}
        None => stdout = Some(to_jsonl(&out)),
    }
    m.result = json!({
        "tagger": tagger.name(),
        "sentences": out.len(),
        "tagged": if a.out.is_none() && ctx.cli.json {
            serde_json::from_str::<serde_json::Value>(&format!("[{}]", to_jsonl(&out).trim_end().replace('\n', ","))).ok()
        } else {
            None
        },
    });
    let summary = match &a.out {
        Some(p) => format!("tagged {} sentences with the {} -> {}", out.len(), tagger.name(), p.display()),
        None => String::new(),
    };
    Ok(Outcome { manifest: m, summary, stdout })
}

fn report_text(r: &EvalReport) -> String {
    let mut s = format!("token accuracy: {} ({} tokens, {} sentences)\n\n", pct(r.token_accuracy), r.tokens, r.sentences);
    s.push_str(&r.confusion.render_table());
    let opt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
    s.push_str("\ntag              precision  recall     f1      support\n");
    for c in &r.per_class {
        let _ = writeln!(
            s,
            "{:<16} {:>9}  {:>6}  {:>6}  {:>7}",
            c.tag.as_str(),
            opt(c.prf.precision),
            opt(c.prf.recall),
            opt(c.prf.f1),
            c.support
        );
    }
    s.push_str("\nentity           precision  recall     f1      tp   fp   fn\n");
    for e in &r.entities {
        let _ = writeln!(
            s,
            "{:<16} {:>9}  {:>6}  {:>6}  {:>4} {:>4} {:>4}",
            e.entity_type.as_str(),
            opt(e.prf.precision),
            opt(e.prf.recall),
            opt(e.prf.f1),
            e.true_positives,
            e.false_positives,
            e.false_negatives
        );
    }
    s
}

fn write_report(path: Option<&Path>, value: &serde_json::Value, m: &mut RunManifest) -> CliResult<()> {
    if let Some(p) = path {
        let mut text = serde_json::to_string_pretty(value).expect("plain report");
        text.push('\n');
        fs::write(p, text).map_err(|e| Error::io(p, e))?;
        m.output(p)?;
    }
    Ok(())
}

fn cmd_eval(ctx: &Ctx, a: &EvalArgs) -> CliResult<Outcome> {
    if let Some(cm_path) = &a.cm {
        let read_cm = |p: &Path| -> CliResult<ConfusionMatrix> {
            Ok(ConfusionMatrix::parse_fixture(&crate::corpus_io::read_utf8(p)?)?)
        };
        let cm = read_cm(cm_path)?;
        let acc = token_accuracy(&cm)?;
        let mut m = ctx.manifest("eval", None)?;
        m.input(cm_path)?;
        let mut summary = format!("token accuracy: {} ({} / {})\n\n{}", pct(acc), cm.trace(), cm.total(), cm.render_table());
        let mut result = json!({"token_accuracy": acc, "trace": cm.trace(), "total": cm.total()});
        if let Some(b_path) = &a.compare {
            let b = read_cm(b_path)?;
            m.input(b_path)?;
            let acc_b = token_accuracy(&b)?;
            let delta = accuracy_delta(&cm, &b)?;
            let _ = write!(summary, "\ncompared: {} ({} / {})\ndelta: {:+.2} pp", pct(acc_b), b.trace(), b.total(), delta);
            result["compare_token_accuracy"] = json!(acc_b);
            result["delta_pp"] = json!(delta);
        }
        write_report(a.report.as_deref(), &result, &mut m)?;
        m.result = result;
        return Ok(Outcome { manifest: m, summary, stdout: None });
    }

    let gold_path = a.gold.as_ref().ok_or_else(|| Failure::Usage("eval needs --cm, or --gold with --pred, --model or --baseline".into()))?;
    let gold = load(gold_path)?;
    let mut m;
    let pred = if let Some(p) = &a.pred {
        m = ctx.manifest("eval", None)?;
        m.input(p)?;
        load(p)?
    } else {
        let (g, stats) = ctx.gazetteer()?;
        m = ctx.manifest("eval", Some(&stats))?;
        let tagger = match &a.model {
            Some(p) => {
                m.input(p)?;
                Tagger::Model(Box::new(load_model(p)?))
            }
            None if a.baseline => Tagger::Baseline,
            None => return Err(Failure::Usage("eval needs --pred, --model or --baseline with --gold".into())),
        };
        tag_corpus(&tagger, &gold, &g)?
    };
    m.input(gold_path)?;
    let report = evaluate(&gold, &pred)?;
    let value = serde_json::to_value(&report).expect("plain report");
    write_report(a.report.as_deref(), &value, &mut m)?;
    m.result = value;
    Ok(Outcome { manifest: m, summary: report_text(&report), stdout: None })
}

fn cmd_analyze(ctx: &Ctx, a: &AnalyzeArgs) -> CliResult<Outcome> {
    let gold = load(&a.gold)?;
    let pred = load(&a.pred)?;
    let report = mine_error_patterns(&gold, &pred, a.top_k)?;
    let mut m = ctx.manifest("analyze", None)?;
    m.input(&a.gold)?;
    m.input(&a.pred)?;
    let value = serde_json::to_value(&report).expect("plain report");
    write_report(a.report.as_deref(), &value, &mut m)?;
    m.result = value;
    let mut summary = String::from("rate     errors/support  pattern\n");
    for p in &report.patterns {
        let _ = writeln!(summary, "{:>6.2}%  {:>6}/{:<7}  {}", 100.0 * p.rate, p.errors, p.support, p.descriptor);
    }
    if report.is_empty() {
        summary = "no errors".into();
    }
    Ok(Outcome { manifest: m, summary, stdout: None })
}

fn cmd_gazetteer_check(ctx: &Ctx) -> CliResult<Outcome> {
    let (g, stats) = ctx.gazetteer()?;
    let m = ctx.manifest("gazetteer-check", Some(&stats))?;
    let source = |p: &Option<PathBuf>| p.as_ref().map_or("bundled".to_string(), |p| p.display().to_string());
    let summary = format!(
        "streets: {} names ({} multi-word, {} lines) from {}\nmunicipalities: {} names ({} multi-word, {} lines) from {}",
        g.len(NameKind::Street),
        stats.streets.multi_word,
        stats.streets.lines,
        source(&ctx.cli.gazetteer_streets),
        g.len(NameKind::Municipality),
        stats.municipalities.multi_word,
        stats.municipalities.lines,
        source(&ctx.cli.gazetteer_municipalities),
    );
    Ok(Outcome { manifest: m, summary, stdout: None })
}

fn cmd_augment(ctx: &Ctx, a: &AugmentArgs) -> CliResult<Outcome> {
    let description = match (&a.description, a.pattern) {
        (Some(d), _) => d.clone(),
        (None, Some(p)) => describe_pattern(pattern_spec(p)?),
        (None, None) => unreachable!("clap requires --pattern or --description"),
    };
    if a.fixture.is_none() && !a.live {
        return Err(Failure::Usage("pass --fixture FILE for offline runs or --live to call the endpoint".into()));
    }
    let endpoint = a.endpoint.clone().unwrap_or_default();
    let model = a.llm_model.clone().unwrap_or_default();
    if a.live && (endpoint.is_empty() || model.is_empty()) {
        return Err(Failure::Usage(format!("--live needs --endpoint/{ENDPOINT_ENV} and --llm-model/{MODEL_ENV}")));
    }
    let req = AugmentRequest::new(description, a.num, model, endpoint, a.api_key.clone().unwrap_or_default())
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let reqs = vec![req; a.requests.max(1)];
    let mut m = ctx.manifest("augment", None)?;
    let results = match &a.fixture {
        Some(p) => {
            m.input(p)?;
            LlmClient::new(FixtureTransport::from_file(p)?).request_many(&reqs, a.concurrency)
        }
        None => LlmClient::new(HttpTransport::default()).request_many(&reqs, a.concurrency),
    };
    let mut queue = ReviewQueue::default();
    for r in results {
        queue.extend(&r?);
    }
    queue.save(&a.queue)?;
    m.output(&a.queue)?;
    m.result = json!({
        "parsed": queue.parsed.len(),
        "rejected": queue.rejected.len(),
        "warnings": queue.warnings,
    });
    let mut summary = format!(
        "{} valid, {} rejected; queue written to {}",
        queue.parsed.len(),
        queue.rejected.len(),
        a.queue.display()
    );
    for w in &queue.warnings {
        let _ = write!(summary, "\nwarning: {w}");
    }
    for r in &queue.rejected {
        let _ = write!(summary, "\nrejected: {} ({})", r.line, r.reason);
    }
    Ok(Outcome { manifest: m, summary, stdout: None })
}

fn cmd_review(ctx: &Ctx, a: &ReviewArgs) -> CliResult<Outcome> {
    let queue = ReviewQueue::load(&a.queue)?;
    let corrections = match &a.corrections {
        Some(p) => load_corrections(p)?,
        None => Vec::new(),
    };
    let mut m = ctx.manifest("review", None)?;
    m.input(&a.queue)?;
    let (outcome, rest) = apply_review(&queue, &corrections, &a.bank, &a.audit)?;
    rest.save(&a.queue)?;
    m.output(&a.queue)?;
    if a.bank.exists() {
        m.output(&a.bank)?;
    }
    m.result = json!({
        "accepted": outcome.accepted.len(),
        "decisions": outcome.decisions,
        "still_queued": rest.parsed.len() + rest.rejected.len(),
    });
    let mut summary = format!(
        "{} accepted into {}; {} still queued",
        outcome.accepted.len(),
        a.bank.display(),
        rest.parsed.len() + rest.rejected.len()
    );
    for p in &rest.parsed {
        let _ = write!(summary, "\nawaiting approval: {p}");
    }
    for r in &rest.rejected {
        let _ = write!(summary, "\nneeds correction: {} ({})", r.line, r.reason);
    }
    Ok(Outcome { manifest: m, summary, stdout: None })
}

fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    let ctx = Ctx { cli };
    match &cli.command {
        Command::Generate(a) => cmd_generate(&ctx, a),
        Command::LowercaseDup(a) => cmd_lowercase(&ctx, a),
        Command::Split(a) => cmd_split(&ctx, a),
        Command::Train(a) => cmd_train(&ctx, a),
        Command::Tag(a) => cmd_tag(&ctx, a),
        Command::Eval(a) => cmd_eval(&ctx, a),
        Command::Analyze(a) => cmd_analyze(&ctx, a),
        Command::GazetteerCheck => cmd_gazetteer_check(&ctx),
        Command::Augment(a) => cmd_augment(&ctx, a),
        Command::Review(a) => cmd_review(&ctx, a),
    }
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            if let Some(s) = &o.stdout {
                let _ = out.write_all(s.as_bytes());
            }
            if cli.json {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&o.manifest).expect("plain manifest"));
            } else if !cli.quiet && !o.summary.is_empty() {
                let _ = writeln!(out, "{}", o.summary.trim_end());
            }
            EXIT_OK
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nFor more information, try '--help'.");
            EXIT_USAGE
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
    }
}

pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
