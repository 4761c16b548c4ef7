//! Command-line front end. The binary is a thin wrapper around [`main_with_args`].
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
//! Failures are reported as one JSON object on stderr; stdout carries only
//! command results (`query`, `eval-*`, `stats`).

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bleu::{corpus_bleu_multiref, BleuOptions};
use crate::choice_math::{choice_probabilities, nll_loss, predict, ChoiceScores};
use crate::evidence::{EvidenceSearcher, QuotaPolicy, DEFAULT_BUDGET_CHARS};
use crate::index::LexiconIndex;
use crate::keyword::Stopwords;
use crate::lexicon::{parse_lexicon, partition_entries, DropReason};
use crate::taskdata::{
    self, FormattedInput, LoadOptions, Loaded, Mode, ReasonableStatements, RowError, TaskError,
    TemplateFlags,
};

#[derive(Debug, Parser)]
#[command(name = "gloss-evidence", version, about = "Dictionary-gloss evidence retrieval and dataset preparation")]
pub struct Cli {
    /// JSON config file; command-line flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for per-example processing (output does not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Filter a JSON-lines lexicon and write an index file.
    BuildIndex {
        #[arg(long)]
        lexicon: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write dropped entries with their reasons as JSON lines.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print the evidence gathered for one statement as JSON.
    Query {
        #[arg(long)]
        index: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        statement: String,
    },
    /// Format subtask-A statements.
    PrepareA {
        #[command(flatten)]
        io: PrepareIo,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Format subtask-B statement/choice inputs.
    PrepareB {
        #[command(flatten)]
        io: PrepareIo,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        template: TemplateArgs,
    },
    /// Format subtask-C generation inputs.
    PrepareC {
        #[command(flatten)]
        io: PrepareIo,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        template: TemplateArgs,
        /// One (input, reference) pair per reference: 3N output lines.
        #[arg(long)]
        multi_target: bool,
        /// Also write `<prefix>.source` and `<prefix>.target`.
        #[arg(long)]
        seq2seq: Option<PathBuf>,
    },
    /// Expand a formatted subtask-C file into (input, reference) pairs.
    Expand {
        #[arg(long = "in")]
        input: PathBuf,
        /// Subtask-C CSV with reference columns.
        #[arg(long)]
        refs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Accuracy and mean NLL of per-choice scores against gold labels.
    EvalAccuracy {
        /// JSON lines of `{"id": ..., "scores": [...]}`.
        #[arg(long)]
        pred: PathBuf,
        /// CSV with `id` first and the label last.
        #[arg(long)]
        gold: PathBuf,
    },
    /// Corpus BLEU-4 of generated reasons against subtask-C references.
    EvalBleu {
        /// One hypothesis per line, aligned with the reference rows.
        #[arg(long)]
        hyp: PathBuf,
        /// Subtask-C CSV with reference columns.
        #[arg(long)]
        refs: PathBuf,
        /// Add-one smoothing for orders above unigrams.
        #[arg(long)]
        smooth: bool,
    },
    /// Summaries of an index, lexicon or formatted dataset.
    Stats {
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<PathBuf>,
    },
}

#[derive(Debug, Args, Clone)]
pub struct PrepareIo {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Index file used for evidence retrieval.
    #[arg(long)]
    pub evidence_index: Option<PathBuf>,
    /// Skip and report bad rows instead of aborting.
    #[arg(long)]
    pub lenient: bool,
    /// Keep all-caps statements as they are.
    #[arg(long)]
    pub no_lowercase: bool,
}

#[derive(Debug, Args, Clone, Default)]
pub struct SearchArgs {
    /// Senses per keyword.
    #[arg(long)]
    pub k: Option<usize>,
    /// Spread a total evidence budget across keywords.
    #[arg(long)]
    pub dynamic: bool,
    /// Total tuples aimed for with --dynamic [default: 12].
    #[arg(long)]
    pub target_total: Option<usize>,
    /// Per-keyword ceiling with --dynamic [default: 8].
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Character cap on rendered evidence [default: 1500].
    #[arg(long)]
    pub evidence_budget_chars: Option<usize>,
    /// Newline-separated stopword file replacing the built-in list.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct TemplateArgs {
    /// Wrap as "The statement '...' is absurd. Because ...".
    #[arg(long)]
    pub extra_words: bool,
    /// Subtask-A CSV supplying the sensible statement for each id.
    #[arg(long)]
    pub reasonable_statement: Option<PathBuf>,
    /// Prefix "Context: <evidence>"; needs --evidence-index.
    #[arg(long)]
    pub wiktionary: bool,
}

/// Values a config file may set. Flags win over these; these win over defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k: Option<usize>,
    pub dynamic: Option<bool>,
    pub target_total: Option<usize>,
    pub k_max: Option<usize>,
    pub evidence_budget_chars: Option<usize>,
    pub stopwords: Option<PathBuf>,
    pub lenient: Option<bool>,
    pub lowercase: Option<bool>,
    pub threads: Option<usize>,
}

/// Effective settings for a prepare run, written next to the output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub input: PathBuf,
    pub output: PathBuf,
    pub evidence_index: Option<PathBuf>,
    pub policy: QuotaPolicy,
    pub evidence_budget_chars: usize,
    pub stopwords: Option<PathBuf>,
    pub flags: TemplateFlags,
    pub reasonable_statement_source: Option<PathBuf>,
    pub multi_target: bool,
    pub lowercase: bool,
    pub mode: Mode,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data {
        file: Option<PathBuf>,
        row: Option<u64>,
        message: String,
    },
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data { .. } => 2,
            CliError::Internal(_) => 3,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Usage(m) => json!({"error": "usage", "message": m}),
            CliError::Data { file, row, message } => {
                json!({"error": "data", "file": file, "row": row, "message": message})
            }
            CliError::Internal(m) => json!({"error": "internal", "message": m}),
        }
    }

    fn data(file: &Path, message: impl ToString) -> Self {
        CliError::Data {
            file: Some(file.to_path_buf()),
            row: None,
            message: message.to_string(),
        }
    }

    fn io(file: &Path, e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::NotFound {
            CliError::data(file, format!("file not found: {e}"))
        } else {
            CliError::Internal(format!("{}: {e}", file.display()))
        }
    }

    fn task(file: &Path, e: TaskError) -> Self {
        match e {
            TaskError::Row(RowError { row, message }) => CliError::Data {
                file: Some(file.to_path_buf()),
                row: Some(row),
                message,
            },
            TaskError::Io(e) => CliError::io(file, e),
            other => CliError::data(file, other),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl std::error::Error for CliError {}

fn warn(value: serde_json::Value) {
    eprintln!("{value}");
}

fn report_skipped(file: &Path, skipped: &[RowError]) {
    for s in skipped {
        warn(json!({"warning": "skipped row", "file": file, "row": s.row, "message": s.message}));
    }
}

/// Parses `args` (including the program name) and runs. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let file_cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            serde_json::from_str::<FileConfig>(&text)
                .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?
        }
        None => FileConfig::default(),
    };
    let threads = cli.threads.or(file_cfg.threads);
    match threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Internal(e.to_string()))?;
            pool.install(|| dispatch(cli.command, &file_cfg))
        }
        None => dispatch(cli.command, &file_cfg),
    }
}

fn dispatch(command: Command, cfg: &FileConfig) -> Result<(), CliError> {
    match command {
        Command::BuildIndex { lexicon, out, report } => build_index(&lexicon, &out, report.as_deref()),
        Command::Query {
            index,
            search,
            statement,
        } => query(&index, &search, cfg, &statement),
        Command::PrepareA { io, search } => prepare(
            "prepare-a",
            &io,
            &search,
            &TemplateArgs::default(),
            false,
            None,
            cfg,
        ),
        Command::PrepareB { io, search, template } => {
            prepare("prepare-b", &io, &search, &template, false, None, cfg)
        }
        Command::PrepareC {
            io,
            search,
            template,
            multi_target,
            seq2seq,
        } => prepare(
            "prepare-c",
            &io,
            &search,
            &template,
            multi_target,
            seq2seq.as_deref(),
            cfg,
        ),
        Command::Expand { input, refs, out } => expand(&input, &refs, &out),
        Command::EvalAccuracy { pred, gold } => eval_accuracy(&pred, &gold),
        Command::EvalBleu { hyp, refs, smooth } => eval_bleu(&hyp, &refs, smooth),
        Command::Stats {
            index,
            lexicon,
            dataset,
        } => stats(index.as_deref(), lexicon.as_deref(), dataset.as_deref()),
    }
}

fn open_read(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

fn load_index(path: &Path) -> Result<LexiconIndex, CliError> {
    LexiconIndex::load(path).map_err(|e| match e {
        crate::index::IndexError::Io(io) => CliError::io(path, io),
        other => CliError::data(path, other),
    })
}

fn resolve_policy(search: &SearchArgs, cfg: &FileConfig) -> Result<QuotaPolicy, CliError> {
    let usage = |e: crate::evidence::PolicyError| CliError::Usage(e.to_string());
    let dynamic = search.dynamic || cfg.dynamic.unwrap_or(false);
    if dynamic {
        let QuotaPolicy::Dynamic { target_total, k_max } = QuotaPolicy::default_dynamic() else {
            unreachable!()
        };
        QuotaPolicy::dynamic(
            search.target_total.or(cfg.target_total).unwrap_or(target_total),
            search.k_max.or(cfg.k_max).unwrap_or(k_max),
        )
        .map_err(usage)
    } else {
        if search.target_total.is_some() || search.k_max.is_some() {
            return Err(CliError::Usage("--target-total/--k-max require --dynamic".into()));
        }
        match search.k.or(cfg.k) {
            Some(k) => QuotaPolicy::fixed(k).map_err(usage),
            None => Ok(QuotaPolicy::default()),
        }
    }
}

fn searcher<'a>(
    index: &'a LexiconIndex,
    search: &SearchArgs,
    cfg: &FileConfig,
) -> Result<EvidenceSearcher<'a>, CliError> {
    let mut s = EvidenceSearcher::new(index);
    s.policy = resolve_policy(search, cfg)?;
    s.budget_chars = Some(
        search
            .evidence_budget_chars
            .or(cfg.evidence_budget_chars)
            .unwrap_or(DEFAULT_BUDGET_CHARS),
    );
    if let Some(p) = search.stopwords.as_ref().or(cfg.stopwords.as_ref()) {
        s.stopwords = Stopwords::from_path(p).map_err(|e| CliError::io(p, e))?;
    }
    Ok(s)
}

fn reason_label(r: &DropReason) -> String {
    r.to_string()
}

fn build_index(lexicon: &Path, out: &Path, report: Option<&Path>) -> Result<(), CliError> {
    let parsed = parse_lexicon(open_read(lexicon)?);
    for s in &parsed.skipped {
        warn(json!({"warning": "skipped line", "file": lexicon, "line": s.line, "message": s.message}));
    }
    let total = parsed.entries.len();
    let (kept, dropped) = partition_entries(parsed.entries);
    if let Some(rp) = report {
        let mut w = create(rp)?;
        for (e, r) in &dropped {
            let line = json!({"word": e.word, "gloss": e.gloss, "reason": reason_label(r)});
            writeln!(w, "{line}").map_err(|e| CliError::io(rp, e))?;
        }
        w.flush().map_err(|e| CliError::io(rp, e))?;
    }
    let index = LexiconIndex::build(kept);
    index.save(out).map_err(|e| CliError::Internal(e.to_string()))?;
    warn(json!({
        "built": out,
        "parsed_entries": total,
        "skipped_lines": parsed.skipped.len(),
        "dropped": dropped.len(),
        "indexed": index.entry_count(),
        "digest": format!("{:016x}", index.digest()),
    }));
    Ok(())
}

fn query(index: &Path, search: &SearchArgs, cfg: &FileConfig, statement: &str) -> Result<(), CliError> {
    let idx = load_index(index)?;
    let s = searcher(&idx, search, cfg)?;
    let result = s.search(statement);
    let out = serde_json::to_string(&result).map_err(|e| CliError::Internal(e.to_string()))?;
    println!("{out}");
    Ok(())
}

fn write_output(path: &Path, items: &[FormattedInput]) -> Result<(), CliError> {
    taskdata::write_jsonl(create(path)?, items).map_err(|e| CliError::io(path, e))
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn sidecar_path(out: &Path) -> PathBuf {
    suffixed(out, ".config.json")
}

/// Keeps successful results; strict mode fails on the first error.
fn collect_results<T>(
    file: &Path,
    results: Vec<Result<T, taskdata::FormatError>>,
    mode: Mode,
) -> Result<Vec<T>, CliError> {
    let mut out = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(v) => out.push(v),
            Err(e) if mode == Mode::Strict => return Err(CliError::data(file, e)),
            Err(e) => warn(json!({"warning": "skipped example", "file": file, "message": e.to_string()})),
        }
    }
    Ok(out)
}

fn prepare(
    command: &'static str,
    io: &PrepareIo,
    search: &SearchArgs,
    template: &TemplateArgs,
    multi_target: bool,
    seq2seq: Option<&Path>,
    cfg: &FileConfig,
) -> Result<(), CliError> {
    let mode = if io.lenient || cfg.lenient.unwrap_or(false) {
        Mode::Lenient
    } else {
        Mode::Strict
    };
    let lowercase = !io.no_lowercase && cfg.lowercase.unwrap_or(true);
    let load = LoadOptions { mode, lowercase };
    let flags = TemplateFlags {
        extra_words: template.extra_words,
        reasonable_statement: template.reasonable_statement.is_some(),
        wiktionary: template.wiktionary,
    };
    if flags.wiktionary && io.evidence_index.is_none() {
        return Err(CliError::Usage("--wiktionary requires --evidence-index".into()));
    }
    if command == "prepare-a" && seq2seq.is_some() {
        return Err(CliError::Usage("--seq2seq is only available for prepare-c".into()));
    }

    let index = io.evidence_index.as_deref().map(load_index).transpose()?;
    let searcher = index.as_ref().map(|i| searcher(i, search, cfg)).transpose()?;
    let policy = searcher.as_ref().map_or_else(|| resolve_policy(search, cfg), |s| Ok(s.policy))?;
    let reasonable = match &template.reasonable_statement {
        Some(p) => {
            let a = taskdata::load_task_a(p, load).map_err(|e| CliError::task(p, e))?;
            report_skipped(p, &a.skipped);
            Some(ReasonableStatements::new(a.examples))
        }
        None => None,
    };

    let items: Vec<FormattedInput> = match command {
        "prepare-a" => {
            let Loaded { examples, skipped } =
                taskdata::load_task_a(&io.input, load).map_err(|e| CliError::task(&io.input, e))?;
            report_skipped(&io.input, &skipped);
            taskdata::prepare_a(&examples, searcher.as_ref())
        }
        "prepare-b" => {
            let Loaded { mut examples, skipped } =
                taskdata::load_task_b(&io.input, load).map_err(|e| CliError::task(&io.input, e))?;
            report_skipped(&io.input, &skipped);
            if let Some(rs) = &reasonable {
                join_reasonable(rs, &mut examples, mode, &io.input)?;
            }
            let results = taskdata::prepare_b(&examples, flags, searcher.as_ref());
            collect_results(&io.input, results, mode)?
        }
        "prepare-c" => {
            let Loaded { mut examples, skipped } =
                taskdata::load_task_c(&io.input, load).map_err(|e| CliError::task(&io.input, e))?;
            report_skipped(&io.input, &skipped);
            if let Some(rs) = &reasonable {
                join_reasonable(rs, &mut examples, mode, &io.input)?;
            }
            let results = taskdata::prepare_c(&examples, flags, searcher.as_ref(), multi_target);
            collect_results(&io.input, results, mode)?.into_iter().flatten().collect()
        }
        _ => unreachable!("unknown prepare command"),
    };

    write_output(&io.out, &items)?;
    if let Some(prefix) = seq2seq {
        let src = suffixed(prefix, ".source");
        let tgt = suffixed(prefix, ".target");
        taskdata::write_seq2seq(create(&src)?, create(&tgt)?, &items)
            .map_err(|e| CliError::data(&io.input, e))?;
    }
    let run_cfg = RunConfig {
        command,
        input: io.input.clone(),
        output: io.out.clone(),
        evidence_index: io.evidence_index.clone(),
        policy,
        evidence_budget_chars: searcher
            .as_ref()
            .and_then(|s| s.budget_chars)
            .unwrap_or(DEFAULT_BUDGET_CHARS),
        stopwords: search.stopwords.clone().or(cfg.stopwords.clone()),
        flags,
        reasonable_statement_source: template.reasonable_statement.clone(),
        multi_target,
        lowercase,
        mode,
    };
    let side = sidecar_path(&io.out);
    let mut w = create(&side)?;
    serde_json::to_writer_pretty(&mut w, &run_cfg).map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(&side, e))?;
    warn(json!({"command": command, "written": io.out, "records": items.len()}));
    Ok(())
}

fn join_reasonable<T: taskdata::HasReasonable>(
    rs: &ReasonableStatements,
    examples: &mut [T],
    mode: Mode,
    file: &Path,
) -> Result<(), CliError> {
    let problems = rs.attach(examples, mode).map_err(|m| CliError::data(file, m))?;
    for p in problems {
        warn(json!({"warning": "no reasonable statement", "file": file, "message": p}));
    }
    Ok(())
}

fn expand(input: &Path, refs: &Path, out: &Path) -> Result<(), CliError> {
    let formatted = taskdata::read_jsonl(open_read(input)?).map_err(|e| CliError::data(input, e))?;
    let c = taskdata::load_task_c(refs, Mode::Strict).map_err(|e| CliError::task(refs, e))?;
    let by_id: HashMap<&str, Vec<String>> = c
        .examples
        .iter()
        .filter_map(|ex| ex.references.as_ref().map(|r| (ex.id.as_str(), r.to_vec())))
        .collect();
    let mut pairs = Vec::with_capacity(formatted.len());
    for f in &formatted {
        let r = by_id
            .get(f.id.as_str())
            .ok_or_else(|| CliError::data(refs, format!("no references for id `{}`", f.id)))?;
        pairs.push((f, r.as_slice()));
    }
    let expanded = taskdata::expand_dataset(pairs).map_err(|e| CliError::data(input, e))?;
    write_output(out, &expanded)?;
    warn(json!({"command": "expand", "written": out, "records": expanded.len()}));
    Ok(())
}

#[derive(Deserialize)]
struct ScoreRecord {
    id: String,
    scores: Vec<f64>,
}

fn read_gold(path: &Path) -> Result<HashMap<String, usize>, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(open_read(path)?);
    let header = rdr.headers().map_err(|e| CliError::data(path, e))?.clone();
    if header.len() < 2 || !header[0].trim().eq_ignore_ascii_case("id") {
        return Err(CliError::data(path, "gold CSV needs a header with `id` first and the label last"));
    }
    let mut gold = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CliError::data(path, e))?;
        let row = rec.position().map(|p| p.line());
        let raw = rec.get(rec.len() - 1).unwrap_or("").trim();
        let label = match raw {
            "A" | "a" => 0,
            "B" | "b" => 1,
            "C" | "c" => 2,
            _ => raw.parse::<usize>().map_err(|_| CliError::Data {
                file: Some(path.to_path_buf()),
                row,
                message: format!("invalid label `{raw}`"),
            })?,
        };
        gold.insert(rec[0].trim().to_string(), label);
    }
    Ok(gold)
}

fn eval_accuracy(pred: &Path, gold_path: &Path) -> Result<(), CliError> {
    let gold = read_gold(gold_path)?;
    let (mut correct, mut total, mut nll_sum) = (0usize, 0usize, 0.0f64);
    for (i, line) in open_read(pred)?.lines().enumerate() {
        let line = line.map_err(|e| CliError::io(pred, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = Some(i as u64 + 1);
        let data_err = |message: String| CliError::Data {
            file: Some(pred.to_path_buf()),
            row,
            message,
        };
        let rec: ScoreRecord = serde_json::from_str(&line).map_err(|e| data_err(e.to_string()))?;
        let label = *gold
            .get(&rec.id)
            .ok_or_else(|| data_err(format!("no gold label for id `{}`", rec.id)))?;
        let scores = ChoiceScores::new(rec.scores).map_err(|e| data_err(e.to_string()))?;
        let out = nll_loss(&scores, label).map_err(|e| data_err(e.to_string()))?;
        if predict(&choice_probabilities(&scores)) == label {
            correct += 1;
        }
        nll_sum += out.loss;
        total += 1;
    }
    let accuracy = if total == 0 { 0.0 } else { correct as f64 / total as f64 };
    let mean_nll = if total == 0 { 0.0 } else { nll_sum / total as f64 };
    println!(
        "{}",
        json!({"total": total, "correct": correct, "accuracy": accuracy, "mean_nll": mean_nll})
    );
    Ok(())
}

fn eval_bleu(hyp: &Path, refs: &Path, smooth: bool) -> Result<(), CliError> {
    let hyps: Vec<String> = open_read(hyp)?
        .lines()
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::io(hyp, e))?;
    let c = taskdata::load_task_c(refs, Mode::Strict).map_err(|e| CliError::task(refs, e))?;
    let references = c
        .examples
        .iter()
        .map(|ex| {
            ex.references
                .as_ref()
                .map(|r| r.to_vec())
                .ok_or_else(|| CliError::data(refs, format!("example `{}` has no references", ex.id)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let opts = BleuOptions {
        add_one_smoothing: smooth,
        ..Default::default()
    };
    let bleu = corpus_bleu_multiref(&hyps, &references, opts).map_err(|e| CliError::data(hyp, e))?;
    println!("{}", json!({"bleu": bleu, "segments": hyps.len(), "smoothing": smooth}));
    Ok(())
}

fn stats(index: Option<&Path>, lexicon: Option<&Path>, dataset: Option<&Path>) -> Result<(), CliError> {
    if index.is_none() && lexicon.is_none() && dataset.is_none() {
        return Err(CliError::Usage("stats needs --index, --lexicon or --dataset".into()));
    }
    let mut out = serde_json::Map::new();
    if let Some(p) = index {
        let idx = load_index(p)?;
        let keys = idx.sorted_keys();
        let max_postings = keys.iter().map(|k| idx.postings(k).len()).max().unwrap_or(0);
        let multiword = keys.iter().filter(|k| k.contains(' ')).count();
        out.insert(
            "index".into(),
            json!({
                "entries": idx.entry_count(),
                "headwords": idx.headword_count(),
                "multiword_headwords": multiword,
                "max_postings": max_postings,
                "digest": format!("{:016x}", idx.digest()),
            }),
        );
    }
    if let Some(p) = lexicon {
        let parsed = parse_lexicon(open_read(p)?);
        let skipped = parsed.skipped_count();
        let total = parsed.entries.len();
        let (kept, dropped) = partition_entries(parsed.entries);
        let mut reasons: BTreeMap<String, usize> = BTreeMap::new();
        for (_, r) in &dropped {
            *reasons.entry(reason_label(r)).or_default() += 1;
        }
        out.insert(
            "lexicon".into(),
            json!({"entries": total, "skipped_lines": skipped, "kept": kept.len(), "dropped": reasons}),
        );
    }
    if let Some(p) = dataset {
        let items = taskdata::read_jsonl(open_read(p)?).map_err(|e| CliError::data(p, e))?;
        let inputs: usize = items.iter().map(|i| i.inputs.len()).sum();
        let chars: usize = items
            .iter()
            .flat_map(|i| &i.inputs)
            .map(|s| s.chars().count())
            .sum();
        let with_target = items.iter().filter(|i| i.target.is_some()).count();
        out.insert(
            "dataset".into(),
            json!({
                "records": items.len(),
                "inputs": inputs,
                "with_target": with_target,
                "mean_input_chars": if inputs == 0 { 0.0 } else { chars as f64 / inputs as f64 },
            }),
        );
    }
    println!("{}", serde_json::Value::Object(out));
    Ok(())
}
