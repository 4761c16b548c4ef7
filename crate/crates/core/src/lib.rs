//! Dictionary-gloss evidence retrieval and dataset preparation for
//! commonsense validation and explanation tasks.
//!
//! The pipeline: a JSON-lines lexicon is parsed and filtered ([`lexicon`]),
//! indexed by headword ([`index`]), statements are reduced to keywords
//! ([`keyword`]), each keyword's top senses are gathered and rendered
//! ([`evidence`]), and task records are turned into model inputs
//! ([`taskdata`]). [`choice_math`] and [`bleu`] cover scoring and evaluation.

pub mod bleu;
pub mod choice_math;
pub mod cli;
pub mod evidence;
pub mod index;
pub mod keyword;
pub mod lexicon;
pub mod taskdata;

pub use evidence::{EvidenceBundle, EvidenceSearcher, EvidenceTuple, QuotaPolicy};
pub use index::LexiconIndex;
pub use keyword::{Keyword, Stopwords};
pub use lexicon::GlossEntry;
pub use taskdata::{FormattedInput, TemplateFlags};
