//! Command-line front end. Exit codes: 0 success, 2 usage or
//! configuration error, 3 data or model error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    constituent_predictions, misannotation_ranking, per_context_report, per_context_tsv, ranking_tsv, MisannotationRow,
    PatternGrouping,
};
use crate::corpus::{
    extract_identifiers, parse_corpus, read_corpus, round_robin_sample, train_test_split, write_corpus, ExtractOptions,
    IdentifierRecord, HEADER,
};
use crate::error::Error;
use crate::features::FeatureSubset;
use crate::learners::{grid_search, kfold_evaluate, Algorithm, Criterion, Grid, Hyperparameters, TaggerModel};
use crate::metrics::{
    drop_column_importance, evaluate, permutation_table, ContextAccuracy, EvaluationReport, Metric, MetricSummary,
};
use crate::taggers::{fill_missing, Lexicon, Tagger};
use crate::tagset::{Conjugation, DatasetConfiguration, IdentifierContext, Tag, Variant, DEFAULT_AUGMENT_THRESHOLD};

/// A four-letter configuration code such as RFCP: algorithm (DT or RF),
/// conjugation (C or N), dataset variant (P plain or A augmented).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfigCode {
    pub algorithm: Algorithm,
    pub conjugation: Conjugation,
    pub variant: Variant,
}

impl FromStr for ConfigCode {
    type Err = Error;
    fn from_str(s: &str) -> crate::error::Result<Self> {
        let code = s.trim().to_ascii_uppercase();
        let bad = || Error::invalid(format!("unknown configuration code {s:?}; expected e.g. RFCP or DTNA"));
        if code.len() != 4 || !code.is_ascii() {
            return Err(bad());
        }
        let algorithm = match &code[..2] {
            "DT" => Algorithm::DecisionTree,
            "RF" => Algorithm::RandomForest,
            _ => return Err(bad()),
        };
        let conjugation = match &code[2..3] {
            "C" => Conjugation::Conjugated,
            "N" => Conjugation::Normalized,
            _ => return Err(bad()),
        };
        let variant = match &code[3..] {
            "P" => Variant::Plain,
            "A" => Variant::Augmented,
            _ => return Err(bad()),
        };
        Ok(ConfigCode {
            algorithm,
            conjugation,
            variant,
        })
    }
}

impl fmt::Display for ConfigCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.algorithm {
            Algorithm::DecisionTree => "DT",
            Algorithm::RandomForest => "RF",
        };
        let c = match self.conjugation {
            Conjugation::Conjugated => "C",
            Conjugation::Normalized => "N",
        };
        let v = match self.variant {
            Variant::Plain => "P",
            Variant::Augmented => "A",
        };
        write!(f, "{a}{c}{v}")
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "idpos",
    version,
    about = "Part-of-speech tagging for source code identifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract identifiers from a C/C++/Java source tree into a corpus file.
    Extract(ExtractArgs),
    /// Train a model on an annotated corpus.
    Train(TrainArgs),
    /// Tag identifiers with a trained model.
    Tag(TagArgs),
    /// k-fold cross-validation.
    Crossval(CrossvalArgs),
    /// Exhaustive hyperparameter search on a training split.
    Gridsearch(GridArgs),
    /// Permutation or drop-column feature importance.
    Importance(ImportanceArgs),
    /// Mis-annotation ranking and per-context accuracy.
    Analyze(AnalyzeArgs),
    /// Round-robin sample of identifiers across systems, per context.
    Sample(SampleArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Tsv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TagFormat {
    Tsv,
    Json,
    Corpus,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ImportanceMode {
    Permutation,
    DropColumn,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum GroupBy {
    Gold,
    Predicted,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    /// Root directory of the source tree.
    source_root: PathBuf,
    /// System name recorded on every identifier (default: directory name).
    #[arg(long)]
    system: Option<String>,
    /// Fill the tagger columns with the built-in stand-in taggers.
    #[arg(long)]
    with_taggers: bool,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct ModelOptions {
    /// Configuration code: DT|RF, C|N, P|A (e.g. RFCP).
    #[arg(long, default_value = "RFCP")]
    config: String,
    /// Comma-separated feature names.
    #[arg(long)]
    features: Option<String>,
    /// Augmentation threshold for the A variants.
    #[arg(long, default_value_t = DEFAULT_AUGMENT_THRESHOLD)]
    threshold: usize,
    #[arg(long, env = "IDPOS_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long)]
    n_estimators: Option<usize>,
    #[arg(long)]
    criterion: Option<String>,
    #[arg(long)]
    no_bootstrap: bool,
    /// Fail instead of running the stand-in taggers for absent columns.
    #[arg(long)]
    no_stand_ins: bool,
    /// Word-to-Penn-tag lexicon for the stand-in taggers.
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Where to write the model.
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    options: ModelOptions,
    /// Training summary destination (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
}

#[derive(Args, Debug)]
struct TagArgs {
    #[arg(long)]
    model: PathBuf,
    /// Corpus file, or lines of `name,CONTEXT[,type]` (default: stdin).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Expected feature subset; must match the model.
    #[arg(long)]
    features: Option<String>,
    #[arg(long)]
    no_stand_ins: bool,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: TagFormat,
}

#[derive(Args, Debug)]
struct CrossvalArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    options: ModelOptions,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    options: ModelOptions,
    /// Candidate max_depth values.
    #[arg(long, default_value = "5,9,20,83")]
    depths: String,
    /// Candidate n_estimators values (default 100,250 for forests, 1 for trees).
    #[arg(long)]
    estimators: Option<String>,
    #[arg(long, default_value = "gini,entropy")]
    criteria: String,
    #[arg(long, default_value = "true")]
    bootstrap: String,
    #[arg(long, default_value = "accuracy")]
    metric: String,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0.70)]
    train_fraction: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
}

#[derive(Args, Debug)]
struct ImportanceArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[command(flatten)]
    options: ModelOptions,
    #[arg(long, value_enum, default_value = "permutation")]
    mode: ImportanceMode,
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Shuffles per feature (permutation mode).
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Gold-annotated corpus.
    #[arg(long)]
    corpus: PathBuf,
    /// Model whose predictions are analyzed.
    #[arg(long, conflicts_with_all = ["predicted", "tagger"])]
    model: Option<PathBuf>,
    /// Corpus whose gold column holds predictions, matched by id.
    #[arg(long, conflicts_with = "tagger")]
    predicted: Option<PathBuf>,
    /// Analyze one constituent tagger's own output instead.
    #[arg(long)]
    tagger: Option<String>,
    #[arg(long, default_value_t = 5)]
    top: usize,
    #[arg(long, value_enum, default_value = "gold")]
    group_by: GroupBy,
    #[arg(long)]
    no_stand_ins: bool,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: Format,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    per_context: usize,
    #[arg(long, env = "IDPOS_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            eprintln!("run `idpos --help` for usage");
            2
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            3
        }
    }
}

fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Extract(a) => cmd_extract(a),
        Command::Train(a) => cmd_train(a),
        Command::Tag(a) => cmd_tag(a),
        Command::Crossval(a) => cmd_crossval(a),
        Command::Gridsearch(a) => cmd_gridsearch(a),
        Command::Importance(a) => cmd_importance(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Sample(a) => cmd_sample(a),
    }
}

/// Everything that determines a run's output, echoed into every report.
#[derive(Debug, Clone, Serialize, Default)]
struct RunConfiguration {
    command: String,
    corpus: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dataset: Option<DatasetConfiguration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    features: Option<FeatureSubset>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hyperparameters: Option<Hyperparameters>,
    seed: u64,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    settings: BTreeMap<String, String>,
    outputs: Vec<String>,
}

impl RunConfiguration {
    fn tsv_header(&self) -> String {
        format!("# run\t{}\n", serde_json::to_string(self).expect("serializable"))
    }
}

struct Resolved {
    code: ConfigCode,
    dataset: DatasetConfiguration,
    features: FeatureSubset,
    hp: Hyperparameters,
    lexicon: Option<Lexicon>,
}

fn parse_features(s: &str) -> CliResult<FeatureSubset> {
    s.parse().map_err(usage)
}

fn load_lexicon(path: &Option<PathBuf>, enabled: bool) -> CliResult<Option<Lexicon>> {
    if !enabled {
        return Ok(None);
    }
    Ok(Some(match path {
        Some(p) => Lexicon::load(p)?,
        None => Lexicon::embedded().clone(),
    }))
}

fn resolve(o: &ModelOptions, default_features: FeatureSubset) -> CliResult<Resolved> {
    let code: ConfigCode = o.config.parse().map_err(usage)?;
    let dataset = DatasetConfiguration::new(code.variant, code.conjugation)
        .with_threshold(o.threshold)
        .map_err(usage)?;
    let features = match &o.features {
        Some(f) => parse_features(f)?,
        None => default_features,
    };
    let mut hp = Hyperparameters::defaults_for(code.algorithm).with_seed(o.seed);
    if let Some(d) = o.max_depth {
        hp.max_depth = d;
    }
    if let Some(n) = o.n_estimators {
        hp.n_estimators = n;
    }
    if let Some(c) = &o.criterion {
        hp.criterion = c.parse().map_err(usage)?;
    }
    if o.no_bootstrap {
        hp.bootstrap = false;
    }
    hp.validate().map_err(usage)?;
    Ok(Resolved {
        code,
        dataset,
        features,
        hp,
        lexicon: load_lexicon(&o.lexicon, !o.no_stand_ins)?,
    })
}

impl Resolved {
    fn run_configuration(&self, command: &str, corpus: &[&Path], outputs: &[Option<&Path>]) -> RunConfiguration {
        RunConfiguration {
            command: command.to_string(),
            corpus: corpus.iter().map(|p| p.display().to_string()).collect(),
            config: Some(self.code.to_string()),
            dataset: Some(self.dataset),
            features: Some(self.features.clone()),
            hyperparameters: Some(self.hp),
            seed: self.hp.seed,
            settings: BTreeMap::new(),
            outputs: outputs.iter().flatten().map(|p| p.display().to_string()).collect(),
        }
    }
}

fn load_records(path: &Path, lexicon: Option<&Lexicon>) -> CliResult<Vec<IdentifierRecord>> {
    let mut records = read_corpus(path)?;
    if let Some(lx) = lexicon {
        for r in &mut records {
            fill_missing(r, lx)?;
        }
    }
    Ok(records)
}

fn emit(out: &Option<PathBuf>, content: &str) -> CliResult<()> {
    match out {
        Some(p) => std::fs::write(p, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(content.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                r => r?,
            }
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(Error::from)?;
    s.push('\n');
    Ok(s)
}

fn f4(x: f64) -> String {
    format!("{x:.4}")
}

fn summary_cells(m: &MetricSummary) -> String {
    Metric::ALL.iter().map(|&k| f4(m.get(k))).collect::<Vec<_>>().join("\t")
}

fn metric_names() -> String {
    Metric::ALL.iter().map(|m| m.as_str()).collect::<Vec<_>>().join("\t")
}

fn cmd_extract(a: ExtractArgs) -> CliResult<()> {
    if !a.source_root.is_dir() {
        return Err(usage(format!("{} is not a directory", a.source_root.display())));
    }
    let mut records = extract_identifiers(
        &a.source_root,
        &ExtractOptions {
            system: a.system.clone(),
        },
    )?;
    if a.with_taggers {
        let lexicon = load_lexicon(&a.lexicon, true)?.expect("enabled");
        for r in &mut records {
            fill_missing(r, &lexicon)?;
        }
    }
    let mut buf = Vec::new();
    write_corpus(&mut buf, &records)?;
    log::info!("extracted {} identifiers", records.len());
    emit(&a.out, &String::from_utf8(buf).expect("utf-8 corpus"))
}

#[derive(Serialize)]
struct TrainSummary {
    run: RunConfiguration,
    identifiers: usize,
    words: usize,
    classes: Vec<Tag>,
    trees: usize,
    max_tree_depth: usize,
    training: EvaluationReport,
}

fn evaluation_tsv(report: &EvaluationReport) -> String {
    let mut s = format!("{}\tidentifier_accuracy\n", metric_names());
    s.push_str(&format!(
        "{}\t{}\n",
        summary_cells(&report.word.summary),
        f4(report.identifier_accuracy)
    ));
    s.push('\n');
    s.push_str("Tag\tPrecision\tRecall\tF1\tSupport\tPredicted\n");
    for t in &report.word.per_tag {
        s.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            t.tag,
            f4(t.precision),
            f4(t.recall),
            f4(t.f1),
            t.support,
            t.predicted
        ));
    }
    s.push('\n');
    s.push_str(&per_context_tsv(&report.per_context));
    s
}

fn evaluate_records(model: &TaggerModel, records: &[IdentifierRecord]) -> CliResult<EvaluationReport> {
    let contexts: Vec<IdentifierContext> = records.iter().map(|r| r.context).collect();
    let gold = records
        .iter()
        .map(|r| model.target_tags(r))
        .collect::<Result<Vec<_>, _>>()?;
    let pred = model.tag_all(records, None)?;
    Ok(evaluate(&contexts, &gold, &pred)?)
}

fn cmd_train(a: TrainArgs) -> CliResult<()> {
    let r = resolve(&a.options, FeatureSubset::best())?;
    let records = load_records(&a.corpus, r.lexicon.as_ref())?;
    let model = TaggerModel::train(&records, &r.hp, &r.dataset, &r.features)?;
    model.save(&a.model)?;
    let summary = TrainSummary {
        run: r.run_configuration("train", &[&a.corpus], &[Some(&a.model), a.out.as_deref()]),
        identifiers: records.len(),
        words: records.iter().map(|x| x.len()).sum(),
        classes: model.classes.clone(),
        trees: model.trees.len(),
        max_tree_depth: model.trees.iter().map(|t| t.depth()).max().unwrap_or(0),
        training: evaluate_records(&model, &records)?,
    };
    let text = match a.format {
        Format::Json => to_json(&summary)?,
        Format::Tsv => {
            let classes: Vec<&str> = summary.classes.iter().map(|t| t.as_str()).collect();
            let mut s = summary.run.tsv_header();
            s.push_str(&format!(
                "identifiers\t{}\nwords\t{}\nclasses\t{}\ntrees\t{}\nmax_tree_depth\t{}\n\n",
                summary.identifiers,
                summary.words,
                classes.join(" "),
                summary.trees,
                summary.max_tree_depth
            ));
            s.push_str("# training-set fit\n");
            s.push_str(&evaluation_tsv(&summary.training));
            s
        }
    };
    emit(&a.out, &text)
}

fn parse_tag_input(text: &str) -> CliResult<Vec<IdentifierRecord>> {
    let first = text.lines().find(|l| !l.trim().is_empty());
    let Some(first) = first else {
        return Ok(Vec::new());
    };
    if first.trim_end_matches('\r') == HEADER {
        return Ok(parse_corpus(text.as_bytes())?);
    }
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, ',');
        let name = parts.next().unwrap_or("").trim();
        let context = parts
            .next()
            .ok_or_else(|| Error::parse(i + 1, "expected name,CONTEXT[,type]"))?
            .parse::<IdentifierContext>()
            .map_err(|e| Error::parse(i + 1, e.to_string()))?;
        let type_hint = parts.next().unwrap_or("").trim();
        let record = IdentifierRecord::new(
            format!("input:{}", records.len() + 1),
            "input",
            context,
            type_hint,
            name,
        )
        .map_err(|e| Error::parse(i + 1, e.to_string()))?;
        records.push(record);
    }
    Ok(records)
}

#[derive(Serialize)]
struct TaggedIdentifier<'a> {
    name: &'a str,
    context: IdentifierContext,
    words: &'a [String],
    tags: &'a [Tag],
    pattern: String,
}

fn join_tags(tags: &[Tag]) -> String {
    tags.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(" ")
}

fn cmd_tag(a: TagArgs) -> CliResult<()> {
    let model = TaggerModel::load(&a.model)?;
    if let Some(f) = &a.features {
        model.ensure_features(&parse_features(f)?)?;
    }
    let lexicon = load_lexicon(&a.lexicon, !a.no_stand_ins)?;
    let mut text = String::new();
    match &a.input {
        Some(p) => text = std::fs::read_to_string(p)?,
        None => {
            std::io::stdin().read_to_string(&mut text)?;
        }
    }
    let records = parse_tag_input(&text)?;
    let predictions = model.tag_all(&records, lexicon.as_ref())?;
    let out = match a.format {
        TagFormat::Tsv => {
            let mut s = String::new();
            for (r, p) in records.iter().zip(&predictions) {
                s.push_str(&format!(
                    "{}\t{}\t{}\t{}\n",
                    r.raw_name,
                    r.context,
                    r.words.join(" "),
                    join_tags(p)
                ));
            }
            s
        }
        TagFormat::Json => {
            let items: Vec<TaggedIdentifier> = records
                .iter()
                .zip(&predictions)
                .map(|(r, p)| TaggedIdentifier {
                    name: &r.raw_name,
                    context: r.context,
                    words: &r.words,
                    tags: p,
                    pattern: join_tags(p),
                })
                .collect();
            to_json(&items)?
        }
        TagFormat::Corpus => {
            if records.is_empty() {
                String::new()
            } else {
                let tagged: Vec<IdentifierRecord> = records
                    .into_iter()
                    .zip(predictions)
                    .map(|(mut r, p)| {
                        if let Some(lx) = &lexicon {
                            fill_missing(&mut r, lx)?;
                        }
                        r.gold = Some(p);
                        Ok(r)
                    })
                    .collect::<CliResult<_>>()?;
                let mut buf = Vec::new();
                write_corpus(&mut buf, &tagged)?;
                String::from_utf8(buf).expect("utf-8 corpus")
            }
        }
    };
    emit(&a.out, &out)
}

fn check_k(k: usize) -> CliResult<()> {
    if k < 2 {
        return Err(usage(format!("--k must be at least 2, got {k}")));
    }
    Ok(())
}

#[derive(Serialize)]
struct CrossvalOutput {
    run: RunConfiguration,
    report: crate::learners::CrossValidationReport,
}

fn cmd_crossval(a: CrossvalArgs) -> CliResult<()> {
    check_k(a.k)?;
    let r = resolve(&a.options, FeatureSubset::best())?;
    let records = load_records(&a.corpus, r.lexicon.as_ref())?;
    let report = kfold_evaluate(&records, a.k, &r.hp, &r.dataset, &r.features, r.hp.seed)?;
    let mut run = r.run_configuration("crossval", &[&a.corpus], &[a.out.as_deref()]);
    run.settings.insert("k".into(), a.k.to_string());
    let text = match a.format {
        Format::Json => to_json(&CrossvalOutput { run, report })?,
        Format::Tsv => {
            let mut s = run.tsv_header();
            s.push_str(&format!(
                "fold\ttrain_identifiers\ttest_identifiers\ttest_words\t{}\tidentifier_accuracy\n",
                metric_names()
            ));
            for f in &report.folds {
                s.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\n",
                    f.fold + 1,
                    f.train_identifiers,
                    f.test_identifiers,
                    f.test_words,
                    summary_cells(&f.metrics),
                    f4(f.identifier_accuracy)
                ));
            }
            s.push_str(&format!(
                "mean\t\t\t\t{}\t{}\n",
                summary_cells(&report.mean),
                f4(report.mean_identifier_accuracy)
            ));
            s
        }
    };
    emit(&a.out, &text)
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> CliResult<Vec<T>>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<T>().map_err(|e| usage(format!("invalid {what} {p:?}: {e}"))))
        .collect()
}

#[derive(Serialize)]
struct GridOutput {
    run: RunConfiguration,
    search: crate::learners::GridSearchReport,
    held_out: EvaluationReport,
}

fn cmd_gridsearch(a: GridArgs) -> CliResult<()> {
    check_k(a.k)?;
    let r = resolve(&a.options, FeatureSubset::best())?;
    let default_estimators = match r.code.algorithm {
        Algorithm::RandomForest => "100,250",
        Algorithm::DecisionTree => "1",
    };
    let grid = Grid {
        criteria: parse_list::<Criterion>(&a.criteria, "criterion")?,
        max_depths: parse_list(&a.depths, "depth")?,
        n_estimators: parse_list(a.estimators.as_deref().unwrap_or(default_estimators), "estimator count")?,
        bootstrap: parse_list(&a.bootstrap, "bootstrap flag")?,
    };
    grid.configurations(&r.hp).map_err(usage)?;
    let metric: Metric = a.metric.parse().map_err(usage)?;
    if !(a.train_fraction > 0.0 && a.train_fraction < 1.0) {
        return Err(usage("--train-fraction must lie in (0, 1)"));
    }
    let records = load_records(&a.corpus, r.lexicon.as_ref())?;
    let (train, test) = train_test_split(&records, a.train_fraction, r.hp.seed)?;
    let search = grid_search(
        &grid,
        &r.hp,
        &train,
        a.k,
        metric.as_str(),
        &r.dataset,
        &r.features,
        r.hp.seed,
    )?;
    let best = *search.best_hyperparameters();
    let model = TaggerModel::train(&train, &best, &r.dataset, &r.features)?;
    let held_out = evaluate_records(&model, &test)?;

    let mut run = r.run_configuration("gridsearch", &[&a.corpus], &[a.out.as_deref()]);
    run.settings.insert("k".into(), a.k.to_string());
    run.settings.insert("metric".into(), metric.to_string());
    run.settings
        .insert("train_fraction".into(), a.train_fraction.to_string());
    run.settings
        .insert("grid".into(), serde_json::to_string(&grid).map_err(Error::from)?);
    let text = match a.format {
        Format::Json => to_json(&GridOutput { run, search, held_out })?,
        Format::Tsv => {
            let mut s = run.tsv_header();
            s.push_str(&format!(
                "criterion\tmax_depth\tn_estimators\tbootstrap\tmean_{metric}\tfold_scores\tbest\n"
            ));
            for (i, row) in search.rows.iter().enumerate() {
                let hp = &row.hyperparameters;
                let folds: Vec<String> = row.fold_scores.iter().map(|&x| f4(x)).collect();
                s.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    format!("{:?}", hp.criterion).to_lowercase(),
                    hp.max_depth,
                    hp.n_estimators,
                    hp.bootstrap,
                    f4(row.mean),
                    folds.join(","),
                    if i == search.best { "*" } else { "" }
                ));
            }
            s.push_str(&format!(
                "\n# held-out evaluation of the best configuration ({} train / {} test identifiers)\n",
                train.len(),
                test.len()
            ));
            s.push_str(&evaluation_tsv(&held_out));
            s
        }
    };
    emit(&a.out, &text)
}

#[derive(Serialize)]
struct ImportanceOutput<T: Serialize> {
    run: RunConfiguration,
    importance: T,
}

fn cmd_importance(a: ImportanceArgs) -> CliResult<()> {
    check_k(a.k)?;
    let default_features = match a.mode {
        ImportanceMode::Permutation => FeatureSubset::best(),
        ImportanceMode::DropColumn => FeatureSubset::all(),
    };
    let r = resolve(&a.options, default_features)?;
    if a.repeats == 0 {
        return Err(usage("--repeats must be positive"));
    }
    let records = load_records(&a.corpus, r.lexicon.as_ref())?;
    let mut run = r.run_configuration("importance", &[&a.corpus], &[a.out.as_deref()]);
    run.settings.insert("k".into(), a.k.to_string());
    let text = match a.mode {
        ImportanceMode::Permutation => {
            run.settings.insert("mode".into(), "permutation".into());
            run.settings.insert("repeats".into(), a.repeats.to_string());
            let rows = permutation_table(&records, &r.hp, &r.dataset, &r.features, a.k, a.repeats, r.hp.seed)?;
            match a.format {
                Format::Json => to_json(&ImportanceOutput { run, importance: rows })?,
                Format::Tsv => {
                    let mut s = run.tsv_header();
                    s.push_str("fold\tfeature\tmetric\timportance\n");
                    for row in &rows {
                        let fold = row.fold.map_or_else(|| "mean".to_string(), |f| (f + 1).to_string());
                        s.push_str(&format!(
                            "{fold}\t{}\t{}\t{}\n",
                            row.feature,
                            row.metric,
                            f4(row.importance)
                        ));
                    }
                    s
                }
            }
        }
        ImportanceMode::DropColumn => {
            run.settings.insert("mode".into(), "drop-column".into());
            log::info!("evaluating {} feature subsets", (1usize << r.features.len()) - 1);
            let report = drop_column_importance(&records, &r.features, &r.hp, &r.dataset, a.k, r.hp.seed)?;
            match a.format {
                Format::Json => to_json(&ImportanceOutput {
                    run,
                    importance: report,
                })?,
                Format::Tsv => {
                    let mut s = run.tsv_header();
                    s.push_str("subset\tweighted_f1\taccuracy\tbalanced_accuracy\n");
                    for row in &report.rows {
                        s.push_str(&format!(
                            "{}\t{}\t{}\t{}\n",
                            row.subset,
                            f4(row.weighted_f1),
                            f4(row.accuracy),
                            f4(row.balanced_accuracy)
                        ));
                    }
                    s.push_str(&format!(
                        "\nbest_weighted_f1\t{}\nbest_accuracy\t{}\nbest_balanced_accuracy\t{}\n",
                        report.best_weighted_f1, report.best_accuracy, report.best_balanced_accuracy
                    ));
                    s
                }
            }
        }
    };
    emit(&a.out, &text)
}

#[derive(Serialize)]
struct AnalyzeOutput {
    run: RunConfiguration,
    ranking: Vec<MisannotationRow>,
    per_context: Vec<ContextAccuracy>,
    evaluation: EvaluationReport,
}

fn cmd_analyze(a: AnalyzeArgs) -> CliResult<()> {
    if a.top < 1 {
        return Err(usage("--top must be at least 1"));
    }
    let sources = [a.model.is_some(), a.predicted.is_some(), a.tagger.is_some()];
    if sources.iter().filter(|&&x| x).count() != 1 {
        return Err(usage("give exactly one of --model, --predicted or --tagger"));
    }
    let tagger: Option<Tagger> = a.tagger.as_deref().map(str::parse).transpose().map_err(usage)?;
    let lexicon = load_lexicon(&a.lexicon, !a.no_stand_ins)?;
    let mut records = read_corpus(&a.corpus)?;
    let mut run = RunConfiguration {
        command: "analyze".into(),
        corpus: vec![a.corpus.display().to_string()],
        outputs: a.out.iter().map(|p| p.display().to_string()).collect(),
        ..Default::default()
    };
    run.settings.insert("top".into(), a.top.to_string());
    run.settings
        .insert("group_by".into(), format!("{:?}", a.group_by).to_lowercase());

    let predictions: Vec<Vec<Tag>> = if let Some(path) = &a.model {
        let model = TaggerModel::load(path)?;
        run.settings.insert("model".into(), path.display().to_string());
        run.config = Some(
            ConfigCode {
                algorithm: model.hyperparameters.algorithm,
                conjugation: model.dataset.conjugation,
                variant: model.dataset.variant,
            }
            .to_string(),
        );
        run.features = Some(model.features.clone());
        run.seed = model.hyperparameters.seed;
        let preds = model.tag_all(&records, lexicon.as_ref())?;
        for r in &mut records {
            r.gold = Some(model.target_tags(r)?);
        }
        preds
    } else if let Some(path) = &a.predicted {
        run.settings.insert("predicted".into(), path.display().to_string());
        let predicted = read_corpus(path)?;
        let by_id: BTreeMap<&str, &IdentifierRecord> = predicted.iter().map(|r| (r.id.as_str(), r)).collect();
        records
            .iter()
            .map(|r| {
                let p = by_id
                    .get(r.id.as_str())
                    .ok_or_else(|| Error::invalid(format!("no prediction for identifier {}", r.id)))?;
                Ok(p.gold()?.to_vec())
            })
            .collect::<CliResult<_>>()?
    } else {
        let t = tagger.expect("checked above");
        run.settings.insert("tagger".into(), t.to_string());
        if let Some(lx) = &lexicon {
            for r in &mut records {
                fill_missing(r, lx)?;
            }
        }
        constituent_predictions(&records, t)?
    };

    let grouping = match a.group_by {
        GroupBy::Gold => PatternGrouping::Gold,
        GroupBy::Predicted => PatternGrouping::Predicted,
    };
    let ranking = misannotation_ranking(&records, &predictions, a.top, grouping)?;
    let per_context = per_context_report(&records, &predictions)?;
    let contexts: Vec<IdentifierContext> = records.iter().map(|r| r.context).collect();
    let gold: Vec<Vec<Tag>> = records
        .iter()
        .map(|r| r.gold().map(<[Tag]>::to_vec))
        .collect::<Result<_, _>>()?;
    let evaluation = evaluate(&contexts, &gold, &predictions)?;
    let text = match a.format {
        Format::Json => to_json(&AnalyzeOutput {
            run,
            ranking,
            per_context,
            evaluation,
        })?,
        Format::Tsv => {
            let mut s = run.tsv_header();
            s.push_str(&ranking_tsv(&ranking));
            s.push('\n');
            s.push_str(&evaluation_tsv(&evaluation));
            s
        }
    };
    emit(&a.out, &text)
}

fn cmd_sample(a: SampleArgs) -> CliResult<()> {
    if a.per_context == 0 {
        return Err(usage("--per-context must be positive"));
    }
    let records = read_corpus(&a.corpus)?;
    let sample = round_robin_sample(&records, a.per_context, a.seed);
    let mut buf = Vec::new();
    write_corpus(&mut buf, &sample)?;
    emit(&a.out, &String::from_utf8(buf).expect("utf-8 corpus"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_codes() {
        let c: ConfigCode = "RFCP".parse().unwrap();
        assert_eq!(
            (c.algorithm, c.conjugation, c.variant),
            (Algorithm::RandomForest, Conjugation::Conjugated, Variant::Plain)
        );
        let d: ConfigCode = "dtna".parse().unwrap();
        assert_eq!(d.to_string(), "DTNA");
        for bad in ["XXXX", "RFC", "RFCPX", "RFXP", "RFCQ", ""] {
            assert!(bad.parse::<ConfigCode>().is_err(), "{bad}");
        }
        for code in ["DTNA", "RFNA", "DTCA", "RFCA", "DTNP", "RFNP", "DTCP", "RFCP"] {
            assert_eq!(code.parse::<ConfigCode>().unwrap().to_string(), code);
        }
    }

    #[test]
    fn tag_input_lines() {
        let recs = parse_tag_input("GetUserToken,FUNCTION,Token\n\nm_count,attribute\n").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].type_hint, "Token");
        assert_eq!(recs[1].context, IdentifierContext::Attribute);
        assert!(parse_tag_input("").unwrap().is_empty());
        assert!(parse_tag_input("Foo").is_err());
        assert!(parse_tag_input("Foo,METHOD").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run(["idpos", "train", "--corpus", "x", "--model", "y", "--config", "XXXX"]),
            2
        );
        assert_eq!(run(["idpos", "bogus"]), 2);
        assert_eq!(run(["idpos", "extract", "/definitely/not/here"]), 2);
    }
}
