//! Essay checking service: users, prompts, essays and their revisions,
//! served over HTTP+JSON.

pub mod diff;
pub mod http;
mod pipeline;
mod session;

pub use diff::{diff_tokens, DiffKind, DiffOp};
pub use pipeline::{Engines, PipelineError};
pub use session::{NewEssay, ProfilePatch, ServiceError, SessionService};
