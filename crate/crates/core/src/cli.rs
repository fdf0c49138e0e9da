//! Command-line front end: `label`, `stats`, `eval` and `lint` over corpus
//! files.
//!
//! Exit status: 0 on success, 1 on a fatal error, 2 when the command
//! completed but some records produced diagnostics.

use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{distribution, read_corpus, write_corpus, CorpusRead, DefinitionRecord};
use crate::data;
use crate::labeler::{label, preprocess_gloss, LabelerConfig, TraceEntry, TraceNote};
use crate::lexicon::{load_wndb_index, load_wordlist, Gazetteer, GazetteerKind, Lexicon, PartOfSpeech};
use crate::metrics::{evaluate, EvalReport};
use crate::rolemodel::{tokenize, validate, Annotation, Severity};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FATAL: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

const DEFAULT_THRESHOLD: f64 = 0.9;

#[derive(Debug, Parser)]
#[command(name = "glossrole", version, about = "Semantic role labeling of dictionary definitions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Label every record that carries a parse tree.
    Label(LabelArgs),
    /// Print the distribution of role patterns.
    Stats(StatsArgs),
    /// Score predicted annotations against gold ones.
    Eval(EvalArgs),
    /// Report ill-formed, invalid, circular or partly unlabeled definitions.
    Lint(LintArgs),
}

/// Knowledge sources. Each defaults to the built-in resource.
#[derive(Debug, Clone, Default, Args)]
pub struct Resources {
    /// Word list (one entry per line) or a WordNet `index.noun` file.
    #[arg(long)]
    pub noun_lexicon: Option<PathBuf>,
    /// Word list (one entry per line) or a WordNet `index.verb` file.
    #[arg(long)]
    pub verb_lexicon: Option<PathBuf>,
    #[arg(long)]
    pub loc_gazetteer: Option<PathBuf>,
    #[arg(long)]
    pub time_gazetteer: Option<PathBuf>,
    /// TOML file with accessory lists and thresholds.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub resources: Resources,
    /// Write the rule trace to `<output>.trace.jsonl`.
    #[arg(long)]
    pub trace: bool,
    /// Treat validation warnings as diagnostics.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnnotationSource {
    Gold,
    Predicted,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "gold")]
    pub annotations: AnnotationSource,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Corpus holding gold annotations, and predicted ones unless
    /// `--predicted` is given.
    #[arg(long)]
    pub input: PathBuf,
    /// Corpus holding the predicted annotations (its `gold` field is used
    /// when a record has no `predicted` field).
    #[arg(long)]
    pub predicted: Option<PathBuf>,
    /// Fail when supertype accuracy is below the threshold.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct LintArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub resources: Resources,
    /// Treat validation warnings as findings.
    #[arg(long)]
    pub strict: bool,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub accessory_determiner_phrases: Option<Vec<String>>,
    pub accessory_quality_words: Option<Vec<String>>,
    pub supertype_threshold: Option<f64>,
}

struct Fatal(String);

impl<E: std::fmt::Display> From<E> for Fatal {
    fn from(e: E) -> Self {
        Fatal(e.to_string())
    }
}

fn read_file(path: &Path) -> Result<String, Fatal> {
    fs::read_to_string(path).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig, Fatal> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => toml::from_str(&read_file(p)?).map_err(|e| Fatal(format!("{}: {e}", p.display()))),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Fatal> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

fn load_lexicon(path: &Path, pos: PartOfSpeech) -> Result<Lexicon, Fatal> {
    let reader = open(path)?;
    let wndb = path
        .file_name()
        .and_then(|n| n.to_str())
        .is_some_and(|n| n.starts_with("index."));
    let lexicon = if wndb {
        load_wndb_index(reader, pos)
    } else {
        load_wordlist(reader, pos)
    };
    lexicon.map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

fn load_gazetteer(path: &Path, kind: GazetteerKind) -> Result<Gazetteer, Fatal> {
    Gazetteer::load(open(path)?, kind).map_err(|e| Fatal(format!("{}: {e}", path.display())))
}

/// Builds the labeler configuration, falling back to built-in resources.
pub fn build_config(resources: &Resources) -> Result<LabelerConfig, String> {
    build_config_inner(resources).map_err(|Fatal(m)| m)
}

fn build_config_inner(r: &Resources) -> Result<LabelerConfig, Fatal> {
    let mut cfg = data::default_config();
    if let Some(p) = &r.noun_lexicon {
        cfg.noun_lexicon = load_lexicon(p, PartOfSpeech::Noun)?;
    }
    if let Some(p) = &r.verb_lexicon {
        cfg.verb_lexicon = load_lexicon(p, PartOfSpeech::Verb)?;
    }
    if let Some(p) = &r.loc_gazetteer {
        cfg.location_gazetteer = load_gazetteer(p, GazetteerKind::Location)?;
    }
    if let Some(p) = &r.time_gazetteer {
        cfg.time_gazetteer = load_gazetteer(p, GazetteerKind::Time)?;
    }
    let file = load_file_config(r.config.as_deref())?;
    if let Some(phrases) = file.accessory_determiner_phrases {
        cfg = cfg.with_accessory_determiners(phrases);
    }
    if let Some(words) = file.accessory_quality_words {
        cfg = cfg.with_accessory_qualities(words);
    }
    Ok(cfg)
}

fn read_input(path: &Path, err: &mut dyn Write) -> Result<CorpusRead, Fatal> {
    let read = read_corpus(&read_file(path)?).map_err(|e| {
        if let crate::corpus::CorpusError::NoRecords(diags) = &e {
            for d in diags {
                let _ = writeln!(err, "{}: {d}", path.display());
            }
        }
        Fatal(format!("{}: {e}", path.display()))
    })?;
    for d in &read.diagnostics {
        let _ = writeln!(err, "{}: {d}", path.display());
    }
    Ok(read)
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Label(a) => run_label(&a, out, err),
        Command::Stats(a) => run_stats(&a, out, err),
        Command::Eval(a) => run_eval(&a, out, err),
        Command::Lint(a) => run_lint(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(Fatal(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_FATAL
        }
    }
}

#[derive(Serialize)]
struct TraceLine<'a> {
    id: &'a str,
    rule_trace: &'a [TraceEntry],
}

fn trace_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".trace.jsonl");
    PathBuf::from(name)
}

fn run_label(args: &LabelArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Fatal> {
    if args.trace && args.output.is_none() {
        return Err(Fatal("--trace requires --output".into()));
    }
    let config = build_config_inner(&args.resources)?;
    let instance_config = config.clone().with_instance_mode(true);
    let read = read_input(&args.input, err)?;
    let mut partial = !read.diagnostics.is_empty();

    let results: Vec<Result<(Annotation, Vec<TraceEntry>), String>> = read
        .records
        .par_iter()
        .map(|rec| {
            let tree = rec.tree.as_ref().ok_or("record has no parse tree")?;
            let cfg = if rec.instance { &instance_config } else { &config };
            let outcome = label(tree, rec.pos, cfg).map_err(|e| e.to_string())?;
            let mut annotation = outcome.annotation;
            annotation.definition_id = rec.id.clone();
            Ok((annotation, outcome.rule_trace))
        })
        .collect();

    let mut records = read.records;
    let mut traces = Vec::with_capacity(records.len());
    for (rec, result) in records.iter_mut().zip(results) {
        match result {
            Ok((annotation, trace)) => {
                if args.strict {
                    for v in validate(&annotation) {
                        let _ = writeln!(err, "{}: {v}", rec.id);
                        partial = true;
                    }
                }
                rec.predicted = Some(annotation);
                traces.push(trace);
            }
            Err(message) => {
                let _ = writeln!(err, "{}: {message}", rec.id);
                partial = true;
                rec.predicted = None;
                traces.push(Vec::new());
            }
        }
    }

    let text = write_corpus(&records)?;
    match &args.output {
        Some(path) => {
            fs::write(path, &text).map_err(|e| Fatal(format!("{}: {e}", path.display())))?;
            if args.trace {
                let mut sidecar = String::new();
                for (rec, trace) in records.iter().zip(&traces) {
                    let line = TraceLine {
                        id: &rec.id,
                        rule_trace: trace,
                    };
                    sidecar.push_str(&serde_json::to_string(&line)?);
                    sidecar.push('\n');
                }
                let tp = trace_path(path);
                fs::write(&tp, sidecar).map_err(|e| Fatal(format!("{}: {e}", tp.display())))?;
            }
        }
        None => out.write_all(text.as_bytes())?,
    }
    Ok(if partial { EXIT_PARTIAL } else { EXIT_OK })
}

fn pick(rec: &DefinitionRecord, source: AnnotationSource) -> Option<&Annotation> {
    match source {
        AnnotationSource::Gold => rec.gold.as_ref(),
        AnnotationSource::Predicted => rec.predicted.as_ref(),
    }
}

fn run_stats(args: &StatsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Fatal> {
    let read = read_input(&args.input, err)?;
    let annotations: Vec<Annotation> = read
        .records
        .iter()
        .filter_map(|r| pick(r, args.annotations))
        .cloned()
        .collect();
    if annotations.is_empty() {
        return Err(Fatal(format!("{}: no annotations present", args.input.display())));
    }
    let dist = distribution(&annotations);
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&dist.table_rows())?)?;
    } else {
        out.write_all(dist.render_table().as_bytes())?;
    }
    Ok(if read.diagnostics.is_empty() { EXIT_OK } else { EXIT_PARTIAL })
}

fn run_eval(args: &EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Fatal> {
    let file = load_file_config(args.config.as_deref())?;
    let threshold = args
        .threshold
        .or(file.supertype_threshold)
        .unwrap_or(DEFAULT_THRESHOLD);
    let gold_read = read_input(&args.input, err)?;
    let mut partial = !gold_read.diagnostics.is_empty();

    let pred_records: Vec<(String, Option<Annotation>)> = match &args.predicted {
        Some(path) => {
            let read = read_input(path, err)?;
            partial |= !read.diagnostics.is_empty();
            read.records
                .into_iter()
                .map(|r| (r.id, r.predicted.or(r.gold)))
                .collect()
        }
        None => gold_read
            .records
            .iter()
            .map(|r| (r.id.clone(), r.predicted.clone()))
            .collect(),
    };

    let mut missing = Vec::new();
    let mut gold = Vec::new();
    for r in &gold_read.records {
        match &r.gold {
            Some(g) => gold.push(g.clone()),
            None => missing.push(format!("{} (no gold)", r.id)),
        }
    }
    let mut predicted = Vec::new();
    for (id, p) in &pred_records {
        match p {
            Some(p) => predicted.push(p.clone()),
            None => missing.push(format!("{id} (no prediction)")),
        }
    }
    if !missing.is_empty() {
        return Err(Fatal(format!("unaligned records: {}", missing.join(", "))));
    }

    let report: EvalReport<f64> = evaluate(&gold, &predicted)?;
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    } else {
        out.write_all(report.render().as_bytes())?;
    }
    if args.strict && report.supertype_accuracy < threshold {
        let _ = writeln!(
            err,
            "error: supertype accuracy {:.6} is below threshold {threshold}",
            report.supertype_accuracy
        );
        return Ok(EXIT_FATAL);
    }
    Ok(if partial { EXIT_PARTIAL } else { EXIT_OK })
}

/// One lint finding for a definition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub id: String,
    pub kind: &'static str,
    pub message: String,
}

/// The definiendum lemma encoded in a record id: text before any sense
/// suffix (`.` or `%`), with underscores as spaces.
pub fn headword_of(id: &str) -> String {
    let end = id.find(['.', '%']).unwrap_or(id.len());
    id[..end].replace('_', " ").to_lowercase()
}

/// True when the headword occurs as a contiguous token run in the gloss.
pub fn is_circular(id: &str, gloss: &str) -> bool {
    let head = tokenize(&headword_of(id));
    if head.is_empty() {
        return false;
    }
    let cleaned = preprocess_gloss(gloss).unwrap_or_default();
    let words: Vec<String> = tokenize(&cleaned).iter().map(|t| t.to_lowercase()).collect();
    words.windows(head.len()).any(|w| w == head.as_slice())
}

const CONTENT_PREFIXES: &[&str] = &["NN", "VB", "JJ", "RB", "CD"];

/// Lint findings for one record. `annotation` is the gold annotation, the
/// prediction, or a fresh labeling; `trace` is available only for the last.
pub fn lint_record(
    rec: &DefinitionRecord,
    annotation: &Annotation,
    trace: &[TraceEntry],
    strict: bool,
) -> Vec<Finding> {
    let mut findings = Vec::new();
    let mut push = |kind: &'static str, message: String| {
        findings.push(Finding {
            id: rec.id.clone(),
            kind,
            message,
        })
    };
    if annotation.ill_formed || !annotation.has_supertype() {
        push("ill_formed", "no supertype; definition is ill-formed".into());
    }
    for v in validate(annotation) {
        if v.severity() == Severity::Error || strict {
            push("violation", v.to_string());
        }
    }
    if is_circular(&rec.id, &rec.gloss) {
        push("circular", format!("gloss contains its headword {:?}", headword_of(&rec.id)));
    }
    for t in trace.iter().filter(|t| t.note == Some(TraceNote::Unlabeled)) {
        if !annotation.ill_formed {
            push("residue", format!("{} unlabeled: {}", t.span, t.reason));
        }
    }
    if trace.is_empty() && !annotation.ill_formed {
        if let Some(tree) = &rec.tree {
            let n = annotation.tokens.len();
            let mut covered = vec![false; n];
            for s in &annotation.spans {
                for c in &mut covered[s.span.start.min(n)..s.span.end.min(n)] {
                    *c = true;
                }
            }
            for (i, leaf) in tree.leaves().iter().enumerate() {
                let content = CONTENT_PREFIXES.iter().any(|p| leaf.label().starts_with(p));
                if content && !covered.get(i).copied().unwrap_or(true) {
                    push("residue", format!("content word {:?} outside every role", annotation.tokens[i]));
                }
            }
        }
    }
    findings
}

fn run_lint(args: &LintArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Fatal> {
    let config = build_config_inner(&args.resources)?;
    let instance_config = config.clone().with_instance_mode(true);
    let read = read_input(&args.input, err)?;

    let findings: Vec<Vec<Finding>> = read
        .records
        .par_iter()
        .map(|rec| {
            if let Some(a) = rec.gold.as_ref().or(rec.predicted.as_ref()) {
                return Ok(lint_record(rec, a, &[], args.strict));
            }
            let tree = rec.tree.as_ref().ok_or("record has no annotation and no parse tree")?;
            let cfg = if rec.instance { &instance_config } else { &config };
            let outcome = label(tree, rec.pos, cfg).map_err(|e| e.to_string())?;
            Ok(lint_record(rec, &outcome.annotation, &outcome.rule_trace, args.strict))
        })
        .collect::<Vec<Result<Vec<Finding>, String>>>()
        .into_iter()
        .zip(&read.records)
        .map(|(r, rec)| {
            r.unwrap_or_else(|message| {
                vec![Finding {
                    id: rec.id.clone(),
                    kind: "unreadable",
                    message,
                }]
            })
        })
        .collect();

    let mut dirty = !read.diagnostics.is_empty();
    for f in findings.iter().flatten() {
        writeln!(out, "{}\t{}\t{}", f.id, f.kind, f.message)?;
        dirty = true;
    }
    let flagged = findings.iter().filter(|f| !f.is_empty()).count();
    let _ = writeln!(err, "{} of {} definitions flagged", flagged, read.records.len());
    Ok(if dirty { EXIT_PARTIAL } else { EXIT_OK })
}
