// Save an index to disk, load it back, and reject a damaged file.

use gloss_evidence::index::IndexError;
use gloss_evidence::{GlossEntry, LexiconIndex};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let index = LexiconIndex::build((0..50).map(|i| GlossEntry::new(format!("word{i}"), format!("gloss {i}"), 0)));
    let dir = std::env::temp_dir().join(format!("gloss-evidence-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("demo.glix");

    index.save(&path)?;
    let loaded = LexiconIndex::load(&path)?;
    assert_eq!(loaded.digest(), index.digest());
    assert_eq!(loaded.lookup("word7", 3)?, index.lookup("word7", 3)?);
    println!("round trip ok, {} bytes", std::fs::metadata(&path)?.len());

    let mut bytes = std::fs::read(&path)?;
    let last = bytes.len() - 1;
    bytes[last] ^= 0xff;
    match LexiconIndex::from_bytes(&bytes) {
        Err(IndexError::Corrupt(why)) => println!("damaged copy rejected: {why}"),
        other => return Err(format!("expected corruption error, got {other:?}").into()),
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
