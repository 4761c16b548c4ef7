// Turn per-choice scores into a distribution, a prediction, and a loss
// with its gradient.

use gloss_evidence::choice_math::{choice_probabilities, nll_loss, predict, ChoiceScores};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let scores = ChoiceScores::new(vec![2.1, -0.3, 0.4])?;
    let dist = choice_probabilities(&scores);
    println!("probabilities {:?}", dist.probs);
    println!("prediction {}", predict(&dist));

    let out = nll_loss(&scores, 0)?;
    println!("loss {:.6}, gradient {:?}", out.loss, out.gradient);
    assert!(out.gradient.iter().sum::<f64>().abs() < 1e-12);

    let two = choice_probabilities(&ChoiceScores::new(vec![2f64.ln(), 0.0])?);
    assert!((two.probs[0] - 2.0 / 3.0).abs() < 1e-12);
    assert!(ChoiceScores::new(vec![1.0]).is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
