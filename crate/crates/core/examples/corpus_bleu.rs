// Score generated reasons against three references each.

use gloss_evidence::bleu::{corpus_bleu_multiref, BleuOptions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let hypotheses = ["an elephant is bigger than a fridge", "the cat sat on a mat today"];
    let references = vec![
        vec![
            "an elephant is much bigger than a fridge",
            "a fridge is much smaller than an elephant",
            "most fridges are not large enough to contain an elephant",
        ],
        vec![
            "the cat sat on the mat",
            "there is a cat on the mat",
            "a cat was sitting on a mat today",
        ],
    ];
    let plain = corpus_bleu_multiref(&hypotheses, &references, BleuOptions::default())?;
    let smoothed = corpus_bleu_multiref(
        &hypotheses,
        &references,
        BleuOptions {
            add_one_smoothing: true,
            ..Default::default()
        },
    )?;
    println!("BLEU {plain:.2} (smoothed {smoothed:.2})");
    assert!((0.0..=100.0).contains(&plain));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
