// Parse a JSON-lines lexicon, drop low-quality glosses, and spot
// inflection pointers.

use gloss_evidence::lexicon::{detect_prototype_for, parse_lexicon, partition_entries};

const LEXICON: &str = r#"{"word": "fridge", "senses": ["A refrigerator.", "(slang) A very cold room."]}
{"word": "CAR", "gloss": "initialism of 'Central African Republic'", "importance": 0}
{"word": "like like", "senses": ["(slang) To fancy; to be attracted to"]}
{"word": "watermelons", "senses": ["plural of 'watermelon'"]}
{"word": "x-ray", "senses": ["Electromagnetic radiation of short wavelength."]}
not a record
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let parsed = parse_lexicon(LEXICON.as_bytes());
    for err in &parsed.skipped {
        println!("skipped line {}: {}", err.line, err.message);
    }
    let (kept, dropped) = partition_entries(parsed.entries);
    for (entry, reason) in &dropped {
        println!("drop {:<12} {reason}", entry.word);
    }
    for entry in &kept {
        match detect_prototype_for(entry) {
            Some(ptr) => println!("keep {:<12} -> {} ({})", entry.word, ptr.lemma, ptr.marker),
            None => println!("keep {:<12} {}", entry.word, entry.gloss),
        }
    }
    assert_eq!(kept.len(), 2);
    assert_eq!(dropped.len(), 4);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
