//! Corpus candidates from the submission log.
//!
//! Each stored revision becomes a record pairing the learner's text with
//! its automatic correction, labels and edit script. Essays are selected
//! per [`SelectionConfig`] and written as M2 or JSON lines.

pub mod m2;

use std::io::Write;
use std::path::Path;

use qalam_core::gec::apply_script;
use qalam_core::{CefrLevel, EditScript, TokenLabel};
use qalam_store::{Essay, Store, Submission, UserProfile};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("invalid selection: {0}")]
    Config(String),
    #[error("record {index}: edit script does not reproduce the corrected text")]
    ScriptMismatch { index: usize },
    #[error("writing {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordMeta {
    pub anon_user_key: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub native_language: Option<String>,
    pub prompt_id: String,
    /// CEFR estimate of this revision.
    pub level: CefrLevel,
    pub revision_no: u32,
    pub config_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub source_text: String,
    pub corrected_text: String,
    /// Flagged tokens of `source_text`.
    pub labels: Vec<TokenLabel>,
    pub script: EditScript,
    pub meta: RecordMeta,
}

impl CorpusRecord {
    pub fn from_submission(sub: &Submission, essay: &Essay, user: Option<&UserProfile>) -> Self {
        CorpusRecord {
            source_text: sub.text.clone(),
            corrected_text: sub.feedback.corrected_text.clone(),
            labels: sub.feedback.labels.clone(),
            script: sub.feedback.script.clone(),
            meta: RecordMeta {
                anon_user_key: anon_key(&essay.user_id),
                native_language: user.and_then(|u| u.native_language.clone()),
                prompt_id: essay.prompt_id.clone(),
                level: sub.feedback.cefr,
                revision_no: sub.revision_no,
                config_id: sub.feedback.config_id.clone(),
            },
        }
    }

    /// The script regenerates the corrected text from the source.
    pub fn is_consistent(&self) -> bool {
        apply_script(&self.source_text, &self.script).is_ok_and(|t| t == self.corrected_text)
    }
}

/// One-way key for a user id; no raw ids leave the store.
pub fn anon_key(user_id: &str) -> String {
    hex::encode(Sha256::digest(user_id.as_bytes()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Keep only essays with at least two revisions.
    pub require_multiple_revisions: bool,
    /// Keep only essays whose last revision has fewer errors or a higher
    /// CEFR estimate than the first.
    pub require_improvement: bool,
    /// Per-revision word bounds, inclusive.
    pub min_words: usize,
    pub max_words: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig { require_multiple_revisions: false, require_improvement: false, min_words: 50, max_words: 600 }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<(), ExportError> {
        if self.min_words > self.max_words {
            return Err(ExportError::Config(format!(
                "min_words {} exceeds max_words {}",
                self.min_words, self.max_words
            )));
        }
        Ok(())
    }
}

/// One essay with its owner and revisions in order.
#[derive(Debug, Clone)]
pub struct EssayLog {
    pub essay: Essay,
    pub user: Option<UserProfile>,
    pub submissions: Vec<Submission>,
}

/// Every essay in `store`, in creation order.
pub fn essay_logs(store: &Store) -> Vec<EssayLog> {
    store
        .essays()
        .into_iter()
        .map(|essay| EssayLog {
            user: store.user(&essay.user_id),
            submissions: store.submissions(&essay.essay_id),
            essay,
        })
        .collect()
}

fn improved(first: &Submission, last: &Submission) -> bool {
    last.feedback.error_count < first.feedback.error_count || last.feedback.cefr > first.feedback.cefr
}

/// Revision and improvement predicates look at an essay's whole history;
/// word bounds then drop individual revisions of the essays kept.
pub fn select_candidates(logs: &[EssayLog], cfg: &SelectionConfig) -> Vec<CorpusRecord> {
    let mut out = Vec::new();
    for log in logs {
        let (Some(first), Some(last)) = (log.submissions.first(), log.submissions.last()) else {
            continue;
        };
        if cfg.require_multiple_revisions && log.submissions.len() < 2 {
            continue;
        }
        if cfg.require_improvement && !improved(first, last) {
            continue;
        }
        out.extend(
            log.submissions
                .iter()
                .filter(|s| (cfg.min_words..=cfg.max_words).contains(&s.word_count))
                .map(|s| CorpusRecord::from_submission(s, &log.essay, log.user.as_ref())),
        );
    }
    out
}

fn verify(records: &[CorpusRecord]) -> Result<(), ExportError> {
    match records.iter().position(|r| !r.is_consistent()) {
        Some(index) => Err(ExportError::ScriptMismatch { index }),
        None => Ok(()),
    }
}

/// One JSON object per line.
pub fn render_jsonl(records: &[CorpusRecord]) -> Result<String, ExportError> {
    verify(records)?;
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records always serialize"));
        out.push('\n');
    }
    Ok(out)
}

pub fn export_jsonl(records: &[CorpusRecord], path: impl AsRef<Path>) -> Result<(), ExportError> {
    write_file(path.as_ref(), &render_jsonl(records)?)
}

pub fn export_m2(records: &[CorpusRecord], path: impl AsRef<Path>) -> Result<(), ExportError> {
    verify(records)?;
    let sentences: Vec<m2::M2Sentence> = records.iter().map(m2::M2Sentence::from_record).collect();
    write_file(path.as_ref(), &m2::render(&sentences))
}

fn write_file(path: &Path, contents: &str) -> Result<(), ExportError> {
    let io = |source| ExportError::Io { path: path.display().to_string(), source };
    let mut f = std::fs::File::create(path).map_err(io)?;
    f.write_all(contents.as_bytes()).map_err(io)?;
    f.flush().map_err(io)
}
