// Retrieve dictionary evidence for a statement under fixed and dynamic
// per-keyword quotas.

use gloss_evidence::lexicon::{parse_lexicon, partition_entries};
use gloss_evidence::{EvidenceSearcher, LexiconIndex, QuotaPolicy};

const LEXICON: &str = r#"{"word": "put", "senses": ["To place something somewhere.", "To bring or set into a specified state."]}
{"word": "elephants", "senses": ["plural of 'elephant'"]}
{"word": "elephant", "senses": ["A mammal with a long trunk and large ears.", "Something very large or unwieldy."]}
{"word": "fridge", "senses": ["A refrigerator.", "(slang) A very cold room."]}
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (kept, _) = partition_entries(parse_lexicon(LEXICON.as_bytes()).entries);
    let index = LexiconIndex::build(kept);
    let mut searcher = EvidenceSearcher::new(&index);

    let found = searcher.search("He put two elephants into the fridge.");
    for t in &found.bundle.tuples {
        let via = if t.via_prototype { " (via prototype)" } else { "" };
        println!("[{}] {}: {}{via}", t.source_keyword, t.word, t.gloss);
    }
    println!("{}", found.rendered);
    assert!(found.bundle.tuples.iter().any(|t| t.via_prototype && t.word == "elephant"));

    searcher.policy = QuotaPolicy::fixed(1)?;
    println!("k=1: {}", searcher.rendered("He put two elephants into the fridge."));
    searcher.policy = QuotaPolicy::dynamic(4, 2)?;
    let dynamic = searcher.search("He put two elephants into the fridge.");
    println!("dynamic quota {} for {} keywords", dynamic.bundle.per_keyword_quota, dynamic.bundle.m);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
