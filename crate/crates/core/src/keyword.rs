//! Statement normalization and keyword extraction.

use std::collections::HashSet;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::index::LexiconIndex;

/// Longest multi-word headword window tried during matching.
pub const MAX_PHRASE_TOKENS: usize = 3;

const DEFAULT_STOPWORDS: &str = include_str!("../stopwords.txt");

/// Function-word list used to discard non-content tokens.
#[derive(Debug, Clone)]
pub struct Stopwords {
    words: HashSet<String>,
}

impl Default for Stopwords {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }
}

impl Stopwords {
    /// One word per line; blank lines and `#` comments ignored.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.to_lowercase().replace('’', "'"))
            .collect();
        Stopwords { words }
    }

    pub fn from_path(path: impl AsRef<Path>) -> io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Keyword {
    pub surface: String,
    /// Character offsets `[start, end)` into the normalized statement.
    pub span: (usize, usize),
}

/// Collapses whitespace and, for fully upper-cased statements only, keeps the
/// first letter capitalized and lowercases the rest.
pub fn normalize_statement(text: &str) -> String {
    let collapsed = crate::lexicon::collapse_whitespace(text);
    let has_upper = collapsed.chars().any(char::is_uppercase);
    let has_lower = collapsed.chars().any(char::is_lowercase);
    if !has_upper || has_lower {
        return collapsed;
    }
    let mut out = String::with_capacity(collapsed.len());
    let mut first = true;
    for c in collapsed.chars() {
        if c.is_alphabetic() && first {
            out.extend(c.to_uppercase());
            first = false;
        } else {
            out.extend(c.to_lowercase());
        }
    }
    out
}

#[derive(Debug, Clone)]
struct Token {
    text: String,
    start: usize,
    end: usize,
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '’'
}

/// Alphanumeric runs, with apostrophes kept only between word characters.
fn tokenize(statement: &str) -> Vec<Token> {
    let chars: Vec<char> = statement.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].is_alphanumeric() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() {
            let inner_apostrophe =
                is_apostrophe(chars[i]) && i + 1 < chars.len() && chars[i + 1].is_alphanumeric();
            if chars[i].is_alphanumeric() || inner_apostrophe {
                i += 1;
            } else {
                break;
            }
        }
        let text: String = chars[start..i]
            .iter()
            .map(|&c| if c == '’' { '\'' } else { c })
            .collect::<String>()
            .to_lowercase();
        tokens.push(Token { text, start, end: i });
    }
    tokens
}

/// Extracts keywords in statement order: leftmost-longest multi-word headword
/// matches against `index` first, then single content tokens. Stopwords and
/// tokens without letters are dropped, and repeats keep the first occurrence.
pub fn extract_keywords(statement: &str, index: &LexiconIndex, stopwords: &Stopwords) -> Vec<Keyword> {
    let tokens = tokenize(statement);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let mut matched = None;
        for n in (2..=MAX_PHRASE_TOKENS).rev() {
            if i + n > tokens.len() {
                continue;
            }
            let phrase = tokens[i..i + n]
                .iter()
                .map(|t| t.text.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            if index.contains(&phrase) {
                matched = Some((phrase, n));
                break;
            }
        }
        let (surface, n) = match matched {
            Some(m) => m,
            None => {
                let t = &tokens[i].text;
                if stopwords.contains(t) || !t.chars().any(char::is_alphabetic) {
                    i += 1;
                    continue;
                }
                (t.clone(), 1)
            }
        };
        let span = (tokens[i].start, tokens[i + n - 1].end);
        if seen.insert(surface.clone()) {
            out.push(Keyword { surface, span });
        }
        i += n;
    }
    out
}
