//! Exact-match inverted index over filtered gloss entries.
//!
//! Posting lists are ordered by `(importance, gloss byte length, gloss)`, so a
//! lookup is a slice prefix and the index is independent of input order.
//!
//! On-disk layout (all integers little-endian):
//!
//! ```text
//! magic "GLIX" | version u32 | entry_count u64 | digest u64 | key_count u64
//! key_count x { key_len u32 | key | n u32 | n x { importance u32 | gloss_len u32 | gloss } }
//! ```
//!
//! The digest is the xxh3-64 of the canonical postings body, so it doubles as
//! an integrity check on load.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;
use xxhash_rust::xxh3::Xxh3;

use crate::lexicon::{collapse_whitespace, GlossEntry};

pub const INDEX_MAGIC: [u8; 4] = *b"GLIX";
pub const INDEX_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 + 8 + 8;

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("lookup called with k = 0")]
    ZeroK,
    #[error("not an index file (bad magic bytes)")]
    BadMagic,
    #[error("unsupported index version {found} (expected {INDEX_VERSION})")]
    VersionMismatch { found: u32 },
    #[error("corrupt index file: {0}")]
    Corrupt(String),
    #[error("index I/O error: {0}")]
    Io(#[from] io::Error),
}

/// Normalizes a headword or keyword into an index key.
pub fn normalize_key(word: &str) -> String {
    collapse_whitespace(word).to_lowercase()
}

fn posting_order(a: &GlossEntry, b: &GlossEntry) -> std::cmp::Ordering {
    a.importance
        .cmp(&b.importance)
        .then(a.gloss.len().cmp(&b.gloss.len()))
        .then_with(|| a.gloss.cmp(&b.gloss))
}

/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, Default)]
pub struct LexiconIndex {
    postings: HashMap<String, Vec<GlossEntry>>,
    entry_count: usize,
    digest: u64,
}

impl LexiconIndex {
    /// Builds the index. Duplicate `(word, gloss)` pairs keep the lowest
    /// importance. Entries are expected to have passed the lexicon filter.
    pub fn build<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = GlossEntry>,
    {
        let mut postings: HashMap<String, Vec<GlossEntry>> = HashMap::new();
        for mut e in entries {
            let key = normalize_key(&e.word);
            e.word = key.clone();
            postings.entry(key).or_default().push(e);
        }
        for list in postings.values_mut() {
            list.sort_by(posting_order);
            // Sorted by importance first, so the first of each gloss is the lowest.
            let mut seen = std::collections::HashSet::with_capacity(list.len());
            list.retain(|e| seen.insert(e.gloss.clone()));
        }
        Self::from_postings(postings)
    }

    fn from_postings(postings: HashMap<String, Vec<GlossEntry>>) -> Self {
        let entry_count = postings.values().map(Vec::len).sum();
        let mut idx = LexiconIndex {
            postings,
            entry_count,
            digest: 0,
        };
        let mut hasher = Xxh3::new();
        idx.write_body(&mut HashWriter(&mut hasher))
            .expect("hashing never fails");
        idx.digest = hasher.digest();
        idx
    }

    pub fn entry_count(&self) -> usize {
        self.entry_count
    }

    pub fn headword_count(&self) -> usize {
        self.postings.len()
    }

    pub fn digest(&self) -> u64 {
        self.digest
    }

    pub fn contains(&self, word: &str) -> bool {
        self.postings.contains_key(word)
    }

    /// Full posting list for a normalized word.
    pub fn postings(&self, word: &str) -> &[GlossEntry] {
        self.postings.get(word).map_or(&[], Vec::as_slice)
    }

    /// Top-`k` senses of `word` in posting order. `word` must already be
    /// normalized (lowercase, single-spaced).
    pub fn lookup(&self, word: &str, k: usize) -> Result<&[GlossEntry], IndexError> {
        if k == 0 {
            return Err(IndexError::ZeroK);
        }
        let list = self.postings(word);
        Ok(&list[..k.min(list.len())])
    }

    /// Headwords in sorted order.
    pub fn sorted_keys(&self) -> Vec<&str> {
        let mut keys: Vec<&str> = self.postings.keys().map(String::as_str).collect();
        keys.sort_unstable();
        keys
    }

    fn write_body<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for key in self.sorted_keys() {
            let list = &self.postings[key];
            write_bytes(w, key.as_bytes())?;
            w.write_all(&(list.len() as u32).to_le_bytes())?;
            for e in list {
                w.write_all(&e.importance.to_le_bytes())?;
                write_bytes(w, e.gloss.as_bytes())?;
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), IndexError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(&INDEX_MAGIC)?;
        w.write_all(&INDEX_VERSION.to_le_bytes())?;
        w.write_all(&(self.entry_count as u64).to_le_bytes())?;
        w.write_all(&self.digest.to_le_bytes())?;
        w.write_all(&(self.postings.len() as u64).to_le_bytes())?;
        self.write_body(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IndexError> {
        let mut buf = Vec::new();
        File::open(path)?.read_to_end(&mut buf)?;
        Self::from_bytes(&buf)
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self, IndexError> {
        if buf.len() < 4 || buf[..4] != INDEX_MAGIC {
            return Err(IndexError::BadMagic);
        }
        if buf.len() < HEADER_LEN {
            return Err(IndexError::Corrupt("truncated header".into()));
        }
        let mut r = Cursor { buf, pos: 4 };
        let version = r.u32()?;
        if version != INDEX_VERSION {
            return Err(IndexError::VersionMismatch { found: version });
        }
        let entry_count = r.u64()? as usize;
        let digest = r.u64()?;
        let key_count = r.u64()? as usize;

        let mut postings = HashMap::with_capacity(key_count.min(buf.len()));
        for _ in 0..key_count {
            let key = r.string()?;
            let n = r.u32()? as usize;
            let mut list = Vec::with_capacity(n.min(buf.len()));
            for _ in 0..n {
                let importance = r.u32()?;
                let gloss = r.string()?;
                list.push(GlossEntry {
                    word: key.clone(),
                    gloss,
                    importance,
                });
            }
            if postings.insert(key, list).is_some() {
                return Err(IndexError::Corrupt("duplicate headword".into()));
            }
        }
        if r.pos != buf.len() {
            return Err(IndexError::Corrupt("trailing bytes".into()));
        }
        let idx = Self::from_postings(postings);
        if idx.entry_count != entry_count {
            return Err(IndexError::Corrupt(format!(
                "header says {entry_count} entries, body has {}",
                idx.entry_count
            )));
        }
        if idx.digest != digest {
            return Err(IndexError::Corrupt("digest mismatch".into()));
        }
        Ok(idx)
    }
}

fn write_bytes<W: Write>(w: &mut W, bytes: &[u8]) -> io::Result<()> {
    w.write_all(&(bytes.len() as u32).to_le_bytes())?;
    w.write_all(bytes)
}

struct HashWriter<'a>(&'a mut Xxh3);

impl Write for HashWriter<'_> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.update(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], IndexError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|e| *e <= self.buf.len())
            .ok_or_else(|| IndexError::Corrupt("unexpected end of file".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, IndexError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, IndexError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, IndexError> {
        let n = self.u32()? as usize;
        let bytes = self.take(n)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| IndexError::Corrupt("invalid UTF-8".into()))
    }
}
