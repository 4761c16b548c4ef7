// Render one task-B record under each template flag combination.

use gloss_evidence::taskdata::{format_task_b, TaskBExample};
use gloss_evidence::TemplateFlags;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let example = TaskBExample {
        id: "1".into(),
        false_statement: "He put an elephant into the fridge.".into(),
        choices: [
            "An elephant is much bigger than a fridge.".into(),
            "Elephants are usually white while fridges are usually white.".into(),
            "An elephant cannot eat a fridge.".into(),
        ],
        reasonable_statement: Some("He put a turkey into the fridge.".into()),
        label: Some(0),
    };
    let evidence = "elephant: A large mammal. \\ fridge: A refrigerator.";
    for bits in 0..8u8 {
        let flags = TemplateFlags {
            extra_words: bits & 1 != 0,
            reasonable_statement: bits & 2 != 0,
            wiktionary: bits & 4 != 0,
        };
        let formatted = format_task_b(&example, flags, Some(evidence))?;
        println!("{flags:?}\n  {}", formatted.inputs[0]);
    }
    let plain = format_task_b(&example, TemplateFlags::default(), None)?;
    assert_eq!(
        plain.inputs[2],
        "He put an elephant into the fridge. An elephant cannot eat a fridge."
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
