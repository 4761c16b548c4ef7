//! Corpus-level BLEU with multiple references per segment.
//!
//! Hypothesis n-gram counts are clipped by the maximum count of that n-gram in
//! any single reference. The brevity penalty uses, per segment, the reference
//! length closest to the hypothesis length (the shorter one on ties), summed
//! over the corpus. Tokens are whitespace-separated.

use std::collections::HashMap;

use crate::choice_math::MathError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BleuOptions {
    pub max_ngram: usize,
    /// Add one to numerator and denominator of every order above unigrams.
    pub add_one_smoothing: bool,
}

impl Default for BleuOptions {
    fn default() -> Self {
        BleuOptions {
            max_ngram: 4,
            add_one_smoothing: false,
        }
    }
}

/// Sufficient statistics; corpus BLEU is a function of their sum.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: Vec<u64>,
    pub totals: Vec<u64>,
    pub hyp_len: u64,
    pub ref_len: u64,
}

fn ngram_counts<'t, 'a>(tokens: &'t [&'a str], n: usize) -> HashMap<&'t [&'a str], u64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

pub fn segment_stats<S: AsRef<str>>(hypothesis: &str, references: &[S], max_ngram: usize) -> BleuStats {
    let hyp: Vec<&str> = hypothesis.split_whitespace().collect();
    let refs: Vec<Vec<&str>> = references
        .iter()
        .map(|r| r.as_ref().split_whitespace().collect())
        .collect();
    let mut stats = BleuStats {
        matches: vec![0; max_ngram],
        totals: vec![0; max_ngram],
        hyp_len: hyp.len() as u64,
        ref_len: 0,
    };
    stats.ref_len = refs
        .iter()
        .map(|r| r.len())
        .min_by_key(|&len| (len.abs_diff(hyp.len()), len))
        .unwrap_or(0) as u64;
    for n in 1..=max_ngram {
        let hyp_counts = ngram_counts(&hyp, n);
        let mut max_ref: HashMap<&[&str], u64> = HashMap::new();
        for r in &refs {
            for (g, c) in ngram_counts(r, n) {
                let e = max_ref.entry(g).or_insert(0);
                *e = (*e).max(c);
            }
        }
        stats.totals[n - 1] = hyp.len().saturating_sub(n - 1) as u64;
        stats.matches[n - 1] = hyp_counts
            .iter()
            .map(|(g, &c)| c.min(max_ref.get(g).copied().unwrap_or(0)))
            .sum();
    }
    stats
}

impl BleuStats {
    fn add(&mut self, other: &BleuStats) {
        for (a, b) in self.matches.iter_mut().zip(&other.matches) {
            *a += b;
        }
        for (a, b) in self.totals.iter_mut().zip(&other.totals) {
            *a += b;
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    /// BLEU in [0, 100].
    pub fn score(&self, smoothing: bool) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        for (i, (&m, &t)) in self.matches.iter().zip(&self.totals).enumerate() {
            let (m, t) = if smoothing && i > 0 {
                (m + 1, t + 1)
            } else {
                (m, t)
            };
            if m == 0 || t == 0 {
                return 0.0;
            }
            log_sum += (m as f64 / t as f64).ln();
        }
        let log_precision = log_sum / self.matches.len() as f64;
        let bp = if self.hyp_len >= self.ref_len {
            0.0
        } else {
            1.0 - self.ref_len as f64 / self.hyp_len as f64
        };
        100.0 * (log_precision + bp).exp()
    }
}

/// Corpus BLEU over aligned hypotheses and reference sets.
pub fn corpus_bleu_multiref<H, R>(
    hypotheses: &[H],
    references: &[Vec<R>],
    opts: BleuOptions,
) -> Result<f64, MathError>
where
    H: AsRef<str>,
    R: AsRef<str>,
{
    if hypotheses.len() != references.len() {
        return Err(MathError::LengthMismatch {
            hypotheses: hypotheses.len(),
            references: references.len(),
        });
    }
    if opts.max_ngram == 0 {
        return Err(MathError::ZeroOrder);
    }
    let mut total = BleuStats {
        matches: vec![0; opts.max_ngram],
        totals: vec![0; opts.max_ngram],
        ..Default::default()
    };
    for (i, (h, refs)) in hypotheses.iter().zip(references).enumerate() {
        if refs.is_empty() {
            return Err(MathError::NoReferences(i));
        }
        total.add(&segment_stats(h.as_ref(), refs, opts.max_ngram));
    }
    Ok(total.score(opts.add_one_smoothing))
}
