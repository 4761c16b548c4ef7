// Build an exact-match index and read the top senses of a headword.

use gloss_evidence::{GlossEntry, LexiconIndex};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let index = LexiconIndex::build(vec![
        GlossEntry::new("carrier", "A warship designed to carry aircraft.", 1),
        GlossEntry::new("carrier", "A person or object that carries someone or something.", 0),
        GlossEntry::new("aircraft carrier", "A warship designed to carry aircraft.", 0),
        GlossEntry::new("elephant", "Something very large or unwieldy.", 1),
        GlossEntry::new("elephant", "A large mammal with a trunk.", 0),
    ]);
    println!(
        "{} entries under {} headwords, digest {:016x}",
        index.entry_count(),
        index.headword_count(),
        index.digest()
    );
    for entry in index.lookup("Carrier", 1)? {
        println!("carrier #{}: {}", entry.importance, entry.gloss);
    }
    let all = index.lookup("elephant", 10)?;
    assert_eq!(all[0].gloss, "A large mammal with a trunk.");
    assert!(index.lookup("turkey", 3)?.is_empty());
    assert!(index.lookup("elephant", 0).is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
