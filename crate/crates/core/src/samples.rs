//! Sample essays for demos and tests: an essay on hobbies in a first draft
//! full of common spelling errors, a revision with most of them repaired,
//! and the fully correct text.

pub const HOBBIES_DRAFT: &str = include_str!("../data/samples/hobbies_draft.txt");
pub const HOBBIES_REVISED: &str = include_str!("../data/samples/hobbies_revised.txt");
pub const HOBBIES_CLEAN: &str = include_str!("../data/samples/hobbies_clean.txt");
