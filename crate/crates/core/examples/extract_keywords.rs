// Pick content words from a statement, preferring indexed multi-word
// headwords.

use gloss_evidence::keyword::{extract_keywords, normalize_statement};
use gloss_evidence::{GlossEntry, LexiconIndex, Stopwords};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let index = LexiconIndex::build(vec![
        GlossEntry::new("aircraft carrier", "A warship designed to carry aircraft.", 0),
        GlossEntry::new("carry", "To lift and take somewhere.", 0),
    ]);
    let stopwords = Stopwords::default();
    let statement = normalize_statement("AIRCRAFT CARRIER IS USED TO CARRY HUMANS");
    println!("{statement}");
    let keywords = extract_keywords(&statement, &index, &stopwords);
    for k in &keywords {
        println!("{:?} at {:?}", k.surface, k.span);
    }
    let surfaces: Vec<&str> = keywords.iter().map(|k| k.surface.as_str()).collect();
    assert_eq!(surfaces, ["aircraft carrier", "used", "carry", "humans"]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
