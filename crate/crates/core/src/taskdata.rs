//! Task files, input templates and multi-target expansion.
//!
//! CSV layouts follow the official release, always with a header row:
//!
//! | task | columns |
//! |------|---------|
//! | A | `id, sent0, sent1 [, label]` |
//! | B | `id, FalseSent, OptionA, OptionB, OptionC [, label]` |
//! | C | `id, FalseSent [, ReferenceSent0, ReferenceSent1, ReferenceSent2]` |
//!
//! Text fields have whitespace collapsed on load; the all-caps fix of
//! [`normalize_statement`] applies unless [`LoadOptions::lowercase`] is off.

use std::collections::HashMap;
use std::io::{self, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evidence::EvidenceSearcher;
use crate::keyword::normalize_statement;
use crate::lexicon::collapse_whitespace;

pub const CONTEXT_PREFIX: &str = "Context: ";
pub const REASONABLE_PREFIX: &str = "Reasonable statement: ";
pub const SEGMENT_SEPARATOR: &str = " \\ ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    A,
    B,
    C,
}

impl Task {
    /// Number of model inputs per example.
    pub fn arity(self) -> usize {
        match self {
            Task::A => 2,
            Task::B => 3,
            Task::C => 1,
        }
    }

    fn accepted_columns(self) -> &'static [usize] {
        match self {
            Task::A => &[3, 4],
            Task::B => &[5, 6],
            Task::C => &[2, 5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowError {
    /// 1-based line in the source file (the header is line 1).
    pub row: u64,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum TaskError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing header row (first column must be `id`)")]
    MissingHeader,
    #[error("header has {found} columns, task {task:?} accepts {expected:?}")]
    BadHeader {
        task: Task,
        expected: &'static [usize],
        found: usize,
    },
    #[error("row {}: {}", .0.row, .0.message)]
    Row(RowError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("example {id}: {component} requested but not available")]
    MissingComponent { id: String, component: &'static str },
    #[error("example {id}: expected 3 references, found {found}")]
    ReferenceCount { id: String, found: usize },
    #[error("example {id}: seq2seq output needs exactly one input, found {found}")]
    NotSingleInput { id: String, found: usize },
}

/// Row handling for malformed data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Mode {
    /// First bad row aborts.
    #[default]
    Strict,
    /// Bad rows are skipped and reported.
    Lenient,
}

/// How rows are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadOptions {
    pub mode: Mode,
    /// Apply the all-caps fix of [`normalize_statement`]; whitespace is
    /// collapsed either way.
    pub lowercase: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            mode: Mode::Strict,
            lowercase: true,
        }
    }
}

impl From<Mode> for LoadOptions {
    fn from(mode: Mode) -> Self {
        LoadOptions {
            mode,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaskAExample {
    pub id: String,
    pub statement1: String,
    pub statement2: String,
    /// Index of the statement that is against common sense.
    pub label: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaskBExample {
    pub id: String,
    pub false_statement: String,
    pub choices: [String; 3],
    pub reasonable_statement: Option<String>,
    pub label: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TaskCExample {
    pub id: String,
    pub false_statement: String,
    pub references: Option<[String; 3]>,
    pub reasonable_statement: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub examples: Vec<T>,
    pub skipped: Vec<RowError>,
}

/// One model-ready record. `inputs` has 2 entries for task A, 3 for B, 1 for C.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormattedInput {
    pub id: String,
    pub inputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

/// Which template components to include.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateFlags {
    pub extra_words: bool,
    pub reasonable_statement: bool,
    pub wiktionary: bool,
}

fn read_rows<R: Read, T>(
    reader: R,
    task: Task,
    mode: Mode,
    mut parse: impl FnMut(&csv::StringRecord) -> Result<T, String>,
) -> Result<Loaded<T>, TaskError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() || !header[0].trim().trim_start_matches('\u{feff}').eq_ignore_ascii_case("id") {
        return Err(TaskError::MissingHeader);
    }
    let expected = task.accepted_columns();
    if !expected.contains(&header.len()) {
        return Err(TaskError::BadHeader {
            task,
            expected,
            found: header.len(),
        });
    }
    let mut out = Loaded {
        examples: Vec::new(),
        skipped: Vec::new(),
    };
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec.position().map_or(0, |p| p.line());
        let parsed = if rec.len() != header.len() {
            Err(format!("expected {} columns, found {}", header.len(), rec.len()))
        } else {
            parse(&rec)
        };
        match parsed {
            Ok(ex) => out.examples.push(ex),
            Err(message) => {
                let err = RowError { row, message };
                match mode {
                    Mode::Strict => return Err(TaskError::Row(err)),
                    Mode::Lenient => out.skipped.push(err),
                }
            }
        }
    }
    Ok(out)
}

fn text_field(rec: &csv::StringRecord, i: usize, name: &str, lowercase: bool) -> Result<String, String> {
    let s = if lowercase {
        normalize_statement(&rec[i])
    } else {
        collapse_whitespace(&rec[i])
    };
    if s.is_empty() {
        Err(format!("empty {name}"))
    } else {
        Ok(s)
    }
}

fn label_field(raw: &str, n: u8) -> Result<Option<u8>, String> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    let v = match raw {
        "A" | "a" => 0,
        "B" | "b" => 1,
        "C" | "c" => 2,
        _ => raw.parse::<u8>().map_err(|_| format!("invalid label `{raw}`"))?,
    };
    if v >= n {
        return Err(format!("label {v} out of range 0..{n}"));
    }
    Ok(Some(v))
}

pub fn read_task_a<R: Read>(
    reader: R,
    opts: impl Into<LoadOptions>,
) -> Result<Loaded<TaskAExample>, TaskError> {
    let LoadOptions { mode, lowercase } = opts.into();
    read_rows(reader, Task::A, mode, |rec| {
        Ok(TaskAExample {
            id: rec[0].trim().to_string(),
            statement1: text_field(rec, 1, "sent0", lowercase)?,
            statement2: text_field(rec, 2, "sent1", lowercase)?,
            label: if rec.len() == 4 { label_field(&rec[3], 2)? } else { None },
        })
    })
}

pub fn read_task_b<R: Read>(
    reader: R,
    opts: impl Into<LoadOptions>,
) -> Result<Loaded<TaskBExample>, TaskError> {
    let LoadOptions { mode, lowercase } = opts.into();
    read_rows(reader, Task::B, mode, |rec| {
        Ok(TaskBExample {
            id: rec[0].trim().to_string(),
            false_statement: text_field(rec, 1, "FalseSent", lowercase)?,
            choices: [
                text_field(rec, 2, "OptionA", lowercase)?,
                text_field(rec, 3, "OptionB", lowercase)?,
                text_field(rec, 4, "OptionC", lowercase)?,
            ],
            reasonable_statement: None,
            label: if rec.len() == 6 { label_field(&rec[5], 3)? } else { None },
        })
    })
}

pub fn read_task_c<R: Read>(
    reader: R,
    opts: impl Into<LoadOptions>,
) -> Result<Loaded<TaskCExample>, TaskError> {
    let LoadOptions { mode, lowercase } = opts.into();
    read_rows(reader, Task::C, mode, |rec| {
        let references = if rec.len() == 5 {
            Some([
                text_field(rec, 2, "ReferenceSent0", lowercase)?,
                text_field(rec, 3, "ReferenceSent1", lowercase)?,
                text_field(rec, 4, "ReferenceSent2", lowercase)?,
            ])
        } else {
            None
        };
        Ok(TaskCExample {
            id: rec[0].trim().to_string(),
            false_statement: text_field(rec, 1, "FalseSent", lowercase)?,
            references,
            reasonable_statement: None,
        })
    })
}

fn open(path: &Path) -> Result<std::fs::File, TaskError> {
    Ok(std::fs::File::open(path)?)
}

pub fn load_task_a(
    path: impl AsRef<Path>,
    opts: impl Into<LoadOptions>,
) -> Result<Loaded<TaskAExample>, TaskError> {
    read_task_a(open(path.as_ref())?, opts)
}

pub fn load_task_b(
    path: impl AsRef<Path>,
    opts: impl Into<LoadOptions>,
) -> Result<Loaded<TaskBExample>, TaskError> {
    read_task_b(open(path.as_ref())?, opts)
}

pub fn load_task_c(
    path: impl AsRef<Path>,
    opts: impl Into<LoadOptions>,
) -> Result<Loaded<TaskCExample>, TaskError> {
    read_task_c(open(path.as_ref())?, opts)
}

/// Sensible statements from a subtask-A file, keyed by example id.
#[derive(Debug, Clone, Default)]
pub struct ReasonableStatements {
    by_id: HashMap<String, TaskAExample>,
}

impl ReasonableStatements {
    pub fn new(examples: impl IntoIterator<Item = TaskAExample>) -> Self {
        ReasonableStatements {
            by_id: examples.into_iter().map(|e| (e.id.clone(), e)).collect(),
        }
    }

    /// The statement of the pair that differs from `false_statement`; when
    /// text alone does not decide, the one the label does not mark.
    pub fn resolve(&self, id: &str, false_statement: &str) -> Result<String, String> {
        let ex = self
            .by_id
            .get(id)
            .ok_or_else(|| format!("no subtask-A example with id `{id}`"))?;
        let (s1, s2) = (&ex.statement1, &ex.statement2);
        match (s1 == false_statement, s2 == false_statement, ex.label) {
            (true, false, _) => Ok(s2.clone()),
            (false, true, _) => Ok(s1.clone()),
            (_, _, Some(0)) => Ok(s2.clone()),
            (_, _, Some(_)) => Ok(s1.clone()),
            (_, _, None) => Err(format!(
                "cannot tell which subtask-A statement of `{id}` is sensible (no label, no match)"
            )),
        }
    }

    /// Fills `reasonable_statement` on each example. Strict mode fails on the
    /// first unmatched id; lenient mode reports and leaves it empty.
    pub fn attach<T: HasReasonable>(&self, examples: &mut [T], mode: Mode) -> Result<Vec<String>, String> {
        let mut problems = Vec::new();
        for ex in examples {
            match self.resolve(ex.id(), ex.false_statement()) {
                Ok(rs) => ex.set_reasonable(rs),
                Err(e) if mode == Mode::Strict => return Err(e),
                Err(e) => problems.push(e),
            }
        }
        Ok(problems)
    }
}

/// Examples that can carry a joined reasonable statement.
pub trait HasReasonable {
    fn id(&self) -> &str;
    fn false_statement(&self) -> &str;
    fn set_reasonable(&mut self, statement: String);
}

impl HasReasonable for TaskBExample {
    fn id(&self) -> &str {
        &self.id
    }
    fn false_statement(&self) -> &str {
        &self.false_statement
    }
    fn set_reasonable(&mut self, statement: String) {
        self.reasonable_statement = Some(statement);
    }
}

impl HasReasonable for TaskCExample {
    fn id(&self) -> &str {
        &self.id
    }
    fn false_statement(&self) -> &str {
        &self.false_statement
    }
    fn set_reasonable(&mut self, statement: String) {
        self.reasonable_statement = Some(statement);
    }
}

/// `<stmt>` or `<stmt> Context: <evidence>`, per statement.
pub fn format_task_a(ex: &TaskAExample, evidence: Option<(&str, &str)>) -> FormattedInput {
    let inputs = match evidence {
        None => vec![ex.statement1.clone(), ex.statement2.clone()],
        Some((e1, e2)) => vec![
            format!("{} {CONTEXT_PREFIX}{e1}", ex.statement1),
            format!("{} {CONTEXT_PREFIX}{e2}", ex.statement2),
        ],
    };
    FormattedInput {
        id: ex.id.clone(),
        inputs,
        target: None,
    }
}

fn compose(
    id: &str,
    statement: &str,
    choice: Option<&str>,
    flags: TemplateFlags,
    reasonable: Option<&str>,
    evidence: Option<&str>,
) -> Result<String, FormatError> {
    let missing = |component| FormatError::MissingComponent {
        id: id.to_string(),
        component,
    };
    let mut s = String::new();
    if flags.wiktionary {
        let ev = evidence.ok_or_else(|| missing("wiktionary evidence"))?;
        s.push_str(CONTEXT_PREFIX);
        s.push_str(ev);
        s.push(' ');
    }
    if flags.reasonable_statement {
        let rs = reasonable.ok_or_else(|| missing("reasonable statement"))?;
        s.push_str(REASONABLE_PREFIX);
        s.push_str(rs);
        s.push_str(SEGMENT_SEPARATOR);
    }
    if flags.extra_words {
        s.push_str("The statement '");
        s.push_str(statement);
        s.push_str("' is absurd. Because");
    } else {
        s.push_str(statement);
    }
    if let Some(c) = choice {
        s.push(' ');
        s.push_str(c);
    }
    Ok(s)
}

/// One input per choice:
/// `[Context: <ev> ][Reasonable statement: <rs> \ ]The statement '<stmt>' is absurd. Because <choice>`.
/// Without extra words the core is `<stmt> <choice>`.
pub fn format_task_b(
    ex: &TaskBExample,
    flags: TemplateFlags,
    evidence: Option<&str>,
) -> Result<FormattedInput, FormatError> {
    let inputs = ex
        .choices
        .iter()
        .map(|c| {
            compose(
                &ex.id,
                &ex.false_statement,
                Some(c),
                flags,
                ex.reasonable_statement.as_deref(),
                evidence,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FormattedInput {
        id: ex.id.clone(),
        inputs,
        target: None,
    })
}

/// The task-B template with the choice removed.
pub fn format_task_c(
    ex: &TaskCExample,
    flags: TemplateFlags,
    evidence: Option<&str>,
) -> Result<FormattedInput, FormatError> {
    let input = compose(
        &ex.id,
        &ex.false_statement,
        None,
        flags,
        ex.reasonable_statement.as_deref(),
        evidence,
    )?;
    Ok(FormattedInput {
        id: ex.id.clone(),
        inputs: vec![input],
        target: None,
    })
}

/// Three copies of `formatted`, one per reference, in reference order.
pub fn expand_multitarget(
    formatted: &FormattedInput,
    references: &[String],
) -> Result<Vec<FormattedInput>, FormatError> {
    if references.len() != 3 {
        return Err(FormatError::ReferenceCount {
            id: formatted.id.clone(),
            found: references.len(),
        });
    }
    Ok(references
        .iter()
        .map(|r| FormattedInput {
            id: formatted.id.clone(),
            inputs: formatted.inputs.clone(),
            target: Some(r.clone()),
        })
        .collect())
}

/// Expands a whole dataset; output size is exactly three times the input.
pub fn expand_dataset<'a, I>(items: I) -> Result<Vec<FormattedInput>, FormatError>
where
    I: IntoIterator<Item = (&'a FormattedInput, &'a [String])>,
{
    let mut out = Vec::new();
    for (f, refs) in items {
        out.extend(expand_multitarget(f, refs)?);
    }
    Ok(out)
}

/// Formats task-A examples, gathering evidence per statement when a searcher
/// is given. Output order matches input order.
pub fn prepare_a(examples: &[TaskAExample], searcher: Option<&EvidenceSearcher<'_>>) -> Vec<FormattedInput> {
    examples
        .par_iter()
        .map(|ex| match searcher {
            Some(s) => {
                let e1 = s.rendered(&ex.statement1);
                let e2 = s.rendered(&ex.statement2);
                format_task_a(ex, Some((&e1, &e2)))
            }
            None => format_task_a(ex, None),
        })
        .collect()
}

/// Formats task-B examples. Evidence is gathered for the false statement
/// when `flags.wiktionary` is set.
pub fn prepare_b(
    examples: &[TaskBExample],
    flags: TemplateFlags,
    searcher: Option<&EvidenceSearcher<'_>>,
) -> Vec<Result<FormattedInput, FormatError>> {
    examples
        .par_iter()
        .map(|ex| {
            let ev = evidence_for(&ex.false_statement, flags, searcher);
            format_task_b(ex, flags, ev.as_deref())
        })
        .collect()
}

/// Formats task-C examples. With `multi_target` each example becomes three
/// (input, reference) pairs; otherwise the first reference, when present, is
/// the single target.
pub fn prepare_c(
    examples: &[TaskCExample],
    flags: TemplateFlags,
    searcher: Option<&EvidenceSearcher<'_>>,
    multi_target: bool,
) -> Vec<Result<Vec<FormattedInput>, FormatError>> {
    examples
        .par_iter()
        .map(|ex| {
            let ev = evidence_for(&ex.false_statement, flags, searcher);
            let f = format_task_c(ex, flags, ev.as_deref())?;
            if multi_target {
                let refs = ex.references.as_ref().ok_or_else(|| FormatError::ReferenceCount {
                    id: ex.id.clone(),
                    found: 0,
                })?;
                expand_multitarget(&f, refs)
            } else {
                let target = ex.references.as_ref().map(|r| r[0].clone());
                Ok(vec![FormattedInput { target, ..f }])
            }
        })
        .collect()
}

fn evidence_for(statement: &str, flags: TemplateFlags, searcher: Option<&EvidenceSearcher<'_>>) -> Option<String> {
    if flags.wiktionary {
        searcher.map(|s| s.rendered(statement))
    } else {
        None
    }
}

pub fn write_jsonl<W: Write>(mut w: W, items: &[FormattedInput]) -> io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn read_jsonl<R: io::BufRead>(r: R) -> io::Result<Vec<FormattedInput>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line).map_err(|e| {
            io::Error::new(io::ErrorKind::InvalidData, format!("line {}: {e}", i + 1))
        })?;
        out.push(item);
    }
    Ok(out)
}

/// Aligned source/target text files, one example per line. Every item must
/// have a single input; a missing target is written as an empty line.
pub fn write_seq2seq<S: Write, T: Write>(
    mut source: S,
    mut target: T,
    items: &[FormattedInput],
) -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    for item in items {
        if item.inputs.len() != 1 {
            return Err(Box::new(FormatError::NotSingleInput {
                id: item.id.clone(),
                found: item.inputs.len(),
            }));
        }
        writeln!(source, "{}", item.inputs[0].replace('\n', " "))?;
        writeln!(target, "{}", item.target.as_deref().unwrap_or("").replace('\n', " "))?;
    }
    source.flush()?;
    target.flush()?;
    Ok(())
}
