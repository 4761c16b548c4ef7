#![allow(dead_code)]

use std::path::PathBuf;

use gloss_evidence::choice_math::{nll_loss, ChoiceScores};
use gloss_evidence::lexicon::{parse_lexicon, partition_entries};
use gloss_evidence::{GlossEntry, LexiconIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture_index() -> LexiconIndex {
    let text = std::fs::read_to_string(fixture("lexicon.jsonl")).unwrap();
    let parsed = parse_lexicon(text.as_bytes());
    let (kept, _) = partition_entries(parsed.entries);
    LexiconIndex::build(kept)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Letters-only headword for `i`, prefixed so it never collides with a stopword.
pub fn synthetic_word(i: usize) -> String {
    let mut s = String::from("zq");
    let mut n = i;
    loop {
        s.push((b'a' + (n % 26) as u8) as char);
        n /= 26;
        if n == 0 {
            break;
        }
    }
    s
}

/// `headwords * senses` entries, shuffled with `seed`.
pub fn synthetic_lexicon(headwords: usize, senses: u32, seed: u64) -> Vec<GlossEntry> {
    let mut out = Vec::with_capacity(headwords * senses as usize);
    for h in 0..headwords {
        let w = synthetic_word(h);
        for s in 0..senses {
            out.push(GlossEntry::new(w.clone(), format!("sense {s} of headword number {h}"), s));
        }
    }
    out.shuffle(&mut rng(seed));
    out
}

pub fn random_scores(r: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(-scale..scale)).collect()
}

/// Direct -ln(e^{s_g} / sum e^{s_j}), no shifting.
pub fn naive_nll(scores: &[f64], gold: usize) -> f64 {
    let z: f64 = scores.iter().map(|s| s.exp()).sum();
    -(scores[gold].exp() / z).ln()
}

/// Central finite differences of the naive loss.
fn fd_gradient(scores: &[f64], gold: usize, h: f64) -> Vec<f64> {
    (0..scores.len())
        .map(|i| {
            let mut up = scores.to_vec();
            let mut down = scores.to_vec();
            up[i] += h;
            down[i] -= h;
            (naive_nll(&up, gold) - naive_nll(&down, gold)) / (2.0 * h)
        })
        .collect()
}

pub fn gradient_max_rel_error(n: usize, trials: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let scores = random_scores(&mut r, n, 3.0);
        let gold = r.gen_range(0..n);
        let analytic = nll_loss(&ChoiceScores::new(scores.clone()).unwrap(), gold).unwrap().gradient;
        let numeric = fd_gradient(&scores, gold, 1e-5);
        for (a, b) in analytic.iter().zip(&numeric) {
            let rel = (a - b).abs() / a.abs().max(b.abs()).max(1e-3);
            worst = worst.max(rel);
        }
    }
    worst
}
