//! Lexicon ingestion and gloss quality filtering.
//!
//! Input is the JSON-lines output of an upstream dictionary extractor. Each line
//! is either a headword with its sense list:
//!
//! ```text
//! {"word": "carrier", "senses": ["A person or object that carries.", "A warship ..."]}
//! ```
//!
//! or one pre-flattened sense:
//!
//! ```text
//! {"word": "carrier", "gloss": "A warship ...", "importance": 1}
//! ```
//!
//! The flattened form wins when a line carries both `gloss` and `senses`.

use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

/// One (word, gloss, importance) tuple. `importance` is the 0-based sense rank
/// within the headword; lower is more primary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GlossEntry {
    pub word: String,
    pub gloss: String,
    pub importance: u32,
}

impl GlossEntry {
    pub fn new(word: impl Into<String>, gloss: impl Into<String>, importance: u32) -> Self {
        GlossEntry {
            word: word.into(),
            gloss: gloss.into(),
            importance,
        }
    }
}

/// Gloss markers that make a sense useless as evidence. Parenthesized markers
/// match verbatim (case-insensitively); bare markers match whole words only.
pub const GLOSS_BLACKLIST: [&str; 12] = [
    "initialism",
    "historical",
    "obsolete",
    "abbreviation",
    "(dated)",
    "slang",
    "acronym",
    "(us)",
    "synonym",
    "archaic",
    "surname",
    "(rare)",
];

/// Markers whose presence means the gloss only points at a base form.
pub const PROTOTYPE_MARKERS: [&str; 6] = [
    "plural of",
    "past of",
    "third person singular of",
    "clipping of",
    "alternative form of",
    "alternative spelling of",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "marker")]
pub enum DropReason {
    MarkerMatch(String),
    WordShape,
    EmptyField,
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DropReason::MarkerMatch(m) => write!(f, "marker:{m}"),
            DropReason::WordShape => f.write_str("word-shape"),
            DropReason::EmptyField => f.write_str("empty-field"),
        }
    }
}

/// Keep, or Drop with the reason. A drop always carries its reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FilterVerdict {
    Keep,
    Drop(DropReason),
}

impl FilterVerdict {
    pub fn is_keep(&self) -> bool {
        matches!(self, FilterVerdict::Keep)
    }

    pub fn drop_reason(&self) -> Option<&DropReason> {
        match self {
            FilterVerdict::Keep => None,
            FilterVerdict::Drop(r) => Some(r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrototypePointer {
    pub lemma: String,
    pub marker: &'static str,
}

/// A malformed input line. `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Default)]
pub struct ParsedLexicon {
    pub entries: Vec<GlossEntry>,
    pub skipped: Vec<LineError>,
}

impl ParsedLexicon {
    pub fn skipped_count(&self) -> usize {
        self.skipped.len()
    }
}

#[derive(Deserialize)]
struct RawRecord {
    word: String,
    #[serde(default)]
    gloss: Option<String>,
    #[serde(default)]
    importance: Option<u32>,
    #[serde(default)]
    senses: Option<Vec<String>>,
}

/// Trims and collapses internal whitespace runs to single spaces.
pub fn collapse_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for part in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(part);
    }
    out
}

/// Parses a JSON-lines lexicon stream. Malformed lines are skipped and
/// reported; blank lines are ignored. An I/O error ends the stream and is
/// recorded as a skipped line.
pub fn parse_lexicon<R: BufRead>(input: R) -> ParsedLexicon {
    let mut parsed = ParsedLexicon::default();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                parsed.skipped.push(LineError {
                    line: line_no,
                    message: format!("read error: {e}"),
                });
                break;
            }
        };
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<RawRecord>(&line) {
            Ok(rec) => push_record(rec, line_no, &mut parsed),
            Err(e) => parsed.skipped.push(LineError {
                line: line_no,
                message: e.to_string(),
            }),
        }
    }
    parsed
}

fn push_record(rec: RawRecord, line_no: usize, parsed: &mut ParsedLexicon) {
    let word = collapse_whitespace(&rec.word);
    if let Some(gloss) = rec.gloss {
        parsed.entries.push(GlossEntry {
            word,
            gloss: collapse_whitespace(&gloss),
            importance: rec.importance.unwrap_or(0),
        });
    } else if let Some(senses) = rec.senses {
        for (rank, sense) in senses.into_iter().enumerate() {
            parsed.entries.push(GlossEntry {
                word: word.clone(),
                gloss: collapse_whitespace(&sense),
                importance: rank as u32,
            });
        }
    } else {
        parsed.skipped.push(LineError {
            line: line_no,
            message: "record has neither `gloss` nor `senses`".into(),
        });
    }
}

/// Applies the gloss-marker and word-shape rules. Empty fields are checked
/// first, then markers, then word shape.
pub fn filter_entry(entry: &GlossEntry) -> FilterVerdict {
    if entry.word.trim().is_empty() || entry.gloss.trim().is_empty() {
        return FilterVerdict::Drop(DropReason::EmptyField);
    }
    if let Some(marker) = find_blacklist_marker(&entry.gloss) {
        return FilterVerdict::Drop(DropReason::MarkerMatch(marker.to_string()));
    }
    if entry.word.contains('-') || entry.word.chars().any(char::is_uppercase) {
        return FilterVerdict::Drop(DropReason::WordShape);
    }
    FilterVerdict::Keep
}

/// Returns the first blacklist marker (in list order) present in `gloss`.
pub fn find_blacklist_marker(gloss: &str) -> Option<&'static str> {
    let lower = gloss.to_lowercase();
    GLOSS_BLACKLIST.iter().copied().find(|marker| {
        if marker.starts_with('(') {
            lower.contains(marker)
        } else {
            lower
                .split(|c: char| !c.is_alphanumeric())
                .any(|tok| tok == *marker)
        }
    })
}

/// Splits entries into (kept, dropped-with-reason), preserving order.
pub fn partition_entries(
    entries: Vec<GlossEntry>,
) -> (Vec<GlossEntry>, Vec<(GlossEntry, DropReason)>) {
    let mut kept = Vec::with_capacity(entries.len());
    let mut dropped = Vec::new();
    for e in entries {
        match filter_entry(&e) {
            FilterVerdict::Keep => kept.push(e),
            FilterVerdict::Drop(r) => dropped.push((e, r)),
        }
    }
    (kept, dropped)
}

/// Detects an inflection/variant pointer such as `plural of 'watermelon'`.
///
/// The earliest marker occurrence in the gloss wins. A quoted lemma is taken
/// up to its closing quote; otherwise the token run up to the next clause
/// punctuation is taken with quote characters stripped.
pub fn detect_prototype(gloss: &str) -> Option<PrototypePointer> {
    let lower = gloss.to_lowercase();
    // to_lowercase may change byte offsets for some scripts; only trust
    // positions when lengths agree.
    if lower.len() != gloss.len() {
        return None;
    }
    let (pos, marker) = PROTOTYPE_MARKERS
        .iter()
        .filter_map(|m| find_word_start(&lower, m).map(|p| (p, *m)))
        .min_by_key(|(p, _)| *p)?;
    let rest = gloss[pos + marker.len()..].trim_start();
    let lemma = extract_lemma(rest)?;
    Some(PrototypePointer { lemma, marker })
}

/// Like [`detect_prototype`] but refuses pointers back to the entry's own word.
pub fn detect_prototype_for(entry: &GlossEntry) -> Option<PrototypePointer> {
    detect_prototype(&entry.gloss).filter(|p| p.lemma != entry.word)
}

fn find_word_start(haystack: &str, needle: &str) -> Option<usize> {
    let mut from = 0;
    while let Some(off) = haystack[from..].find(needle) {
        let at = from + off;
        let before_ok = haystack[..at]
            .chars()
            .next_back()
            .is_none_or(|c| !c.is_alphanumeric());
        if before_ok {
            return Some(at);
        }
        from = at + needle.len();
    }
    None
}

fn is_quote(c: char) -> bool {
    matches!(c, '\'' | '"' | '‘' | '’' | '“' | '”' | '`')
}

fn extract_lemma(rest: &str) -> Option<String> {
    let mut chars = rest.char_indices();
    let lemma = match chars.next() {
        Some((_, q)) if is_quote(q) => {
            let body = &rest[q.len_utf8()..];
            let end = body.find(is_quote).unwrap_or(body.len());
            &body[..end]
        }
        Some(_) => {
            let end = rest
                .find(['.', ',', ';', ':', '(', ')', '[', ']'])
                .unwrap_or(rest.len());
            &rest[..end]
        }
        None => return None,
    };
    let cleaned: String = lemma.chars().filter(|c| !is_quote(*c)).collect();
    let cleaned = collapse_whitespace(&cleaned);
    (!cleaned.is_empty()).then_some(cleaned)
}
