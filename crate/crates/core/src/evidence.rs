//! Per-statement evidence search: quota, top-k retrieval, one-hop prototype
//! resolution, and rendering into the `word: gloss \ word: gloss` form.

use std::collections::HashSet;

use serde::Serialize;
use thiserror::Error;

use crate::index::{normalize_key, LexiconIndex};
use crate::keyword::{extract_keywords, normalize_statement, Keyword, Stopwords};
use crate::lexicon::detect_prototype_for;

pub const EVIDENCE_SEPARATOR: &str = " \\ ";
pub const DEFAULT_BUDGET_CHARS: usize = 1500;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolicyError {
    #[error("quota parameter `{0}` must be at least 1")]
    NonPositive(&'static str),
}

/// How many senses each keyword may contribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum QuotaPolicy {
    Static { k: usize },
    /// Spread roughly `target_total` tuples over the keywords, at most `k_max` each.
    Dynamic { target_total: usize, k_max: usize },
}

impl Default for QuotaPolicy {
    fn default() -> Self {
        QuotaPolicy::Static { k: 3 }
    }
}

impl QuotaPolicy {
    pub fn fixed(k: usize) -> Result<Self, PolicyError> {
        if k == 0 {
            return Err(PolicyError::NonPositive("k"));
        }
        Ok(QuotaPolicy::Static { k })
    }

    pub fn dynamic(target_total: usize, k_max: usize) -> Result<Self, PolicyError> {
        if target_total == 0 {
            return Err(PolicyError::NonPositive("target_total"));
        }
        if k_max == 0 {
            return Err(PolicyError::NonPositive("k_max"));
        }
        Ok(QuotaPolicy::Dynamic { target_total, k_max })
    }

    /// Dynamic defaults used by the `--dynamic` flag.
    pub fn default_dynamic() -> Self {
        QuotaPolicy::Dynamic {
            target_total: 12,
            k_max: 8,
        }
    }
}

/// Per-keyword quota for a statement with `m` keywords. Zero keywords → 0.
pub fn compute_quota(m: usize, policy: QuotaPolicy) -> usize {
    if m == 0 {
        return 0;
    }
    match policy {
        QuotaPolicy::Static { k } => k,
        QuotaPolicy::Dynamic { target_total, k_max } => target_total.div_ceil(m).clamp(1, k_max.max(1)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvidenceTuple {
    pub word: String,
    pub gloss: String,
    pub source_keyword: String,
    pub via_prototype: bool,
    pub importance: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EvidenceBundle {
    pub tuples: Vec<EvidenceTuple>,
    pub m: usize,
    pub per_keyword_quota: usize,
}

/// Retrieves evidence for each keyword in order.
///
/// Direct senses come first, capped at the quota. Senses that merely point at
/// a base form are replaced by the base form's senses; those sub-search
/// results are never inspected for further pointers. Each keyword contributes
/// at most `quota` tuples and repeated `(word, gloss)` pairs keep their first
/// occurrence.
pub fn gather_evidence(index: &LexiconIndex, keywords: &[Keyword], policy: QuotaPolicy) -> EvidenceBundle {
    let m = keywords.len();
    let quota = compute_quota(m, policy);
    let mut bundle = EvidenceBundle {
        tuples: Vec::new(),
        m,
        per_keyword_quota: quota,
    };
    if quota == 0 {
        return bundle;
    }
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for kw in keywords {
        let key = normalize_key(&kw.surface);
        let direct = index.lookup(&key, quota).expect("quota is positive");
        let mut candidates = Vec::new();
        let mut lemmas: Vec<String> = Vec::new();
        for entry in direct {
            match detect_prototype_for(entry) {
                Some(p) => {
                    let lemma = normalize_key(&p.lemma);
                    if lemma != key && lemma != entry.word && !lemmas.contains(&lemma) {
                        lemmas.push(lemma);
                    }
                }
                None => candidates.push(EvidenceTuple {
                    word: entry.word.clone(),
                    gloss: entry.gloss.clone(),
                    source_keyword: kw.surface.clone(),
                    via_prototype: false,
                    importance: entry.importance,
                }),
            }
        }
        for lemma in &lemmas {
            for entry in index.lookup(lemma, quota).expect("quota is positive") {
                candidates.push(EvidenceTuple {
                    word: entry.word.clone(),
                    gloss: entry.gloss.clone(),
                    source_keyword: kw.surface.clone(),
                    via_prototype: true,
                    importance: entry.importance,
                });
            }
        }
        let mut taken = 0;
        for t in candidates {
            if taken == quota {
                break;
            }
            if seen.insert((t.word.clone(), t.gloss.clone())) {
                bundle.tuples.push(t);
                taken += 1;
            }
        }
    }
    bundle
}

fn tuple_chars(t: &EvidenceTuple) -> usize {
    t.word.chars().count() + 2 + t.gloss.chars().count()
}

/// Joins tuples as `word: gloss` separated by ` \ `.
pub fn render_evidence(bundle: &EvidenceBundle) -> String {
    join_tuples(bundle.tuples.iter())
}

fn join_tuples<'a>(tuples: impl Iterator<Item = &'a EvidenceTuple>) -> String {
    let mut out = String::new();
    for (i, t) in tuples.enumerate() {
        if i > 0 {
            out.push_str(EVIDENCE_SEPARATOR);
        }
        out.push_str(&t.word);
        out.push_str(": ");
        out.push_str(&t.gloss);
    }
    out
}

/// Renders within a character budget, dropping whole tuples. Prototype tuples
/// go first (last added first), then direct tuples from the highest
/// importance down, later positions before earlier ones on ties.
pub fn render_evidence_within(bundle: &EvidenceBundle, max_chars: Option<usize>) -> String {
    let Some(budget) = max_chars else {
        return render_evidence(bundle);
    };
    let tuples = &bundle.tuples;
    let mut keep = vec![true; tuples.len()];
    let mut total: usize = tuples.iter().map(tuple_chars).sum::<usize>()
        + EVIDENCE_SEPARATOR.len() * tuples.len().saturating_sub(1);
    let mut drop_order: Vec<usize> = (0..tuples.len()).collect();
    drop_order.sort_by(|&a, &b| {
        let (ta, tb) = (&tuples[a], &tuples[b]);
        tb.via_prototype
            .cmp(&ta.via_prototype)
            .then_with(|| {
                if ta.via_prototype {
                    std::cmp::Ordering::Equal
                } else {
                    tb.importance.cmp(&ta.importance)
                }
            })
            .then(b.cmp(&a))
    });
    let mut remaining = tuples.len();
    for i in drop_order {
        if total <= budget {
            break;
        }
        keep[i] = false;
        total -= tuple_chars(&tuples[i]);
        remaining -= 1;
        if remaining > 0 {
            total -= EVIDENCE_SEPARATOR.len();
        }
    }
    join_tuples(tuples.iter().zip(&keep).filter(|(_, k)| **k).map(|(t, _)| t))
}

/// Everything produced for one statement.
#[derive(Debug, Clone, Serialize)]
pub struct StatementEvidence {
    pub statement: String,
    pub keywords: Vec<Keyword>,
    pub bundle: EvidenceBundle,
    pub rendered: String,
}

/// Bundles an index with keyword and quota settings.
#[derive(Debug, Clone)]
pub struct EvidenceSearcher<'a> {
    pub index: &'a LexiconIndex,
    pub stopwords: Stopwords,
    pub policy: QuotaPolicy,
    pub budget_chars: Option<usize>,
}

impl<'a> EvidenceSearcher<'a> {
    pub fn new(index: &'a LexiconIndex) -> Self {
        EvidenceSearcher {
            index,
            stopwords: Stopwords::default(),
            policy: QuotaPolicy::default(),
            budget_chars: Some(DEFAULT_BUDGET_CHARS),
        }
    }

    pub fn search(&self, statement: &str) -> StatementEvidence {
        let statement = normalize_statement(statement);
        let keywords = extract_keywords(&statement, self.index, &self.stopwords);
        let bundle = gather_evidence(self.index, &keywords, self.policy);
        let rendered = render_evidence_within(&bundle, self.budget_chars);
        StatementEvidence {
            statement,
            keywords,
            bundle,
            rendered,
        }
    }

    pub fn rendered(&self, statement: &str) -> String {
        self.search(statement).rendered
    }
}
