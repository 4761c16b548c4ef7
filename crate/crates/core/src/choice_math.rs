//! Multiple-choice scoring: softmax over per-choice scores, argmax
//! prediction and negative log-likelihood with its gradient.
//!
//! Scores are produced elsewhere (one dot product per choice between a task
//! vector and the encoder's pooled representation); this module only sees the
//! resulting numbers.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MathError {
    #[error("need at least 2 choices, got {0}")]
    TooFewChoices(usize),
    #[error("score {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("gold index {gold} out of range for {n} choices")]
    GoldOutOfRange { gold: usize, n: usize },
    #[error("{hypotheses} hypotheses but {references} reference sets")]
    LengthMismatch { hypotheses: usize, references: usize },
    #[error("segment {0} has no references")]
    NoReferences(usize),
    #[error("max n-gram order must be at least 1")]
    ZeroOrder,
}

/// Finite scores for n ≥ 2 choices.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceScores(Vec<f64>);

impl ChoiceScores {
    pub fn new(scores: Vec<f64>) -> Result<Self, MathError> {
        if scores.len() < 2 {
            return Err(MathError::TooFewChoices(scores.len()));
        }
        if let Some((index, &value)) = scores.iter().enumerate().find(|(_, s)| !s.is_finite()) {
            return Err(MathError::NonFinite { index, value });
        }
        Ok(ChoiceScores(scores))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn log_sum_exp(&self) -> f64 {
        let m = self.max();
        m + self.0.iter().map(|s| (s - m).exp()).sum::<f64>().ln()
    }
}

impl TryFrom<Vec<f64>> for ChoiceScores {
    type Error = MathError;
    fn try_from(v: Vec<f64>) -> Result<Self, MathError> {
        ChoiceScores::new(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChoiceDistribution {
    pub probs: Vec<f64>,
}

/// Softmax, shifted by the max score so large magnitudes do not overflow.
pub fn choice_probabilities(scores: &ChoiceScores) -> ChoiceDistribution {
    let m = scores.max();
    let exps: Vec<f64> = scores.0.iter().map(|s| (s - m).exp()).collect();
    let z: f64 = exps.iter().sum();
    ChoiceDistribution {
        probs: exps.into_iter().map(|e| e / z).collect(),
    }
}

/// Index of the most probable choice; ties go to the lowest index.
pub fn predict(dist: &ChoiceDistribution) -> usize {
    let mut best = 0;
    for (i, &p) in dist.probs.iter().enumerate().skip(1) {
        if p > dist.probs[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct NllOutput {
    pub loss: f64,
    /// d loss / d scores = probs - one_hot(gold).
    pub gradient: Vec<f64>,
}

/// `-ln P[gold]` and its gradient with respect to the scores.
pub fn nll_loss(scores: &ChoiceScores, gold: usize) -> Result<NllOutput, MathError> {
    let n = scores.len();
    if gold >= n {
        return Err(MathError::GoldOutOfRange { gold, n });
    }
    let loss = (scores.log_sum_exp() - scores.0[gold]).max(0.0);
    let mut gradient = choice_probabilities(scores).probs;
    gradient[gold] -= 1.0;
    Ok(NllOutput { loss, gradient })
}
