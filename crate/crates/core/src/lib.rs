//! Core engines for an Arabic writing assistant: text handling, two-stage
//! error detection, character-level edit scripts, CEFR scoring and the
//! prompt catalogue.

pub mod aes;
pub mod ged;
pub mod gec;
pub mod level;
pub mod lexicon;
pub mod prompts;
pub mod samples;
pub mod text;

pub use aes::{FeatureVector, ScoringConfig, ScorerBackend};
pub use ged::{DetectorBackend, ErrorTag, TokenLabel};
pub use gec::{CharEdit, CorrectionResult, EditScript, TokenAlignment};
pub use level::CefrLevel;
pub use lexicon::Lexicon;
pub use text::{SpanRange, Token, TokenKind};
