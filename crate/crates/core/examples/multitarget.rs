// Turn task-C records into (input, reference) training pairs, one per
// reference, and write them as aligned seq2seq text.

use gloss_evidence::taskdata::{prepare_c, write_seq2seq, TaskCExample};
use gloss_evidence::TemplateFlags;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let examples = vec![TaskCExample {
        id: "1".into(),
        false_statement: "He put an elephant into the fridge.".into(),
        references: Some([
            "An elephant is much bigger than a fridge.".into(),
            "A fridge is much smaller than an elephant.".into(),
            "Most of the fridges aren't large enough to contain an elephant.".into(),
        ]),
        reasonable_statement: None,
    }];
    let flags = TemplateFlags {
        extra_words: true,
        ..Default::default()
    };
    let mut pairs = Vec::new();
    for result in prepare_c(&examples, flags, None, true) {
        pairs.extend(result?);
    }
    assert_eq!(pairs.len(), 3);

    let (mut source, mut target) = (Vec::new(), Vec::new());
    write_seq2seq(&mut source, &mut target, &pairs).map_err(|e| -> Box<dyn std::error::Error> { e })?;
    print!("{}", String::from_utf8(source)?);
    print!("{}", String::from_utf8(target)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
