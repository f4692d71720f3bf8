use chrono::{SecondsFormat, Utc};
use qalam_core::aes::meets_length_requirement;
use qalam_core::prompts::{default_prompts, Prompt, PromptFilter};
use qalam_core::CefrLevel;
use qalam_store::{Essay, Locale, ProgressPoint, Store, StoreError, Submission, UserProfile};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diff::{diff_tokens, DiffOp};
use crate::pipeline::{Engines, PipelineError};

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown {kind} {id:?}")]
    NotFound { kind: &'static str, id: String },
    #[error("{0}")]
    Validation(String),
    #[error("text is empty")]
    EmptyText,
    #[error("text has no words to score")]
    Unscorable,
    #[error("{0}")]
    Conflict(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl ServiceError {
    /// Stable machine-readable code for API clients.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::NotFound { .. } => "not_found",
            ServiceError::Validation(_) => "validation",
            ServiceError::EmptyText => "empty_text",
            ServiceError::Unscorable => "unscorable",
            ServiceError::Conflict(_) => "conflict",
            ServiceError::Internal(_) => "internal",
        }
    }
}

impl From<StoreError> for ServiceError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound { kind, id } => ServiceError::NotFound { kind, id },
            StoreError::Duplicate { .. } => ServiceError::Conflict(e.to_string()),
            StoreError::RevisionConflict { .. } => ServiceError::Conflict(e.to_string()),
            StoreError::Prompt(p) => ServiceError::Validation(p.to_string()),
            other => ServiceError::Internal(other.to_string()),
        }
    }
}

impl From<PipelineError> for ServiceError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::EmptyText => ServiceError::EmptyText,
            PipelineError::Unscorable => ServiceError::Unscorable,
            PipelineError::Internal(m) => ServiceError::Internal(m),
        }
    }
}

/// Profile fields to change; absent fields keep their stored value.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ProfilePatch {
    #[serde(default)]
    pub native_language: Option<String>,
    #[serde(default)]
    pub dialect: Option<String>,
    /// CEFR level name, validated on apply.
    #[serde(default)]
    pub self_level: Option<String>,
    #[serde(default)]
    pub locale: Option<Locale>,
}

impl ProfilePatch {
    fn apply(self, profile: &mut UserProfile) -> Result<(), ServiceError> {
        if let Some(level) = self.self_level {
            let parsed: CefrLevel = level.parse().map_err(|e| ServiceError::Validation(format!("self_level: {e}")))?;
            profile.self_level = Some(parsed);
        }
        if let Some(v) = self.native_language {
            profile.native_language = Some(v);
        }
        if let Some(v) = self.dialect {
            profile.dialect = Some(v);
        }
        if let Some(v) = self.locale {
            profile.locale = v;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NewEssay {
    /// Omitted for anonymous use; a user is then created.
    #[serde(default)]
    pub user_id: Option<String>,
    pub prompt_id: String,
}

/// Upper bound on optimistic retries for one revision append.
const MAX_APPEND_ATTEMPTS: usize = 10_000;

pub struct SessionService {
    store: Store,
    engines: Engines,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Micros, true)
}

impl SessionService {
    pub fn new(store: Store, engines: Engines) -> Self {
        SessionService { store, engines }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn engines(&self) -> &Engines {
        &self.engines
    }

    pub fn create_user(&self, patch: ProfilePatch) -> Result<UserProfile, ServiceError> {
        let mut profile = UserProfile {
            user_id: uuid::Uuid::new_v4().to_string(),
            native_language: None,
            dialect: None,
            self_level: None,
            locale: Locale::default(),
        };
        patch.apply(&mut profile)?;
        self.store.save_user(profile.clone())?;
        Ok(profile)
    }

    /// Partially updates the profile of `user_id`, creating it if needed.
    pub fn upsert_profile(&self, user_id: &str, patch: ProfilePatch) -> Result<UserProfile, ServiceError> {
        if user_id.trim().is_empty() {
            return Err(ServiceError::Validation("user id must not be empty".into()));
        }
        let mut profile = self.store.user(user_id).unwrap_or(UserProfile {
            user_id: user_id.to_string(),
            native_language: None,
            dialect: None,
            self_level: None,
            locale: Locale::default(),
        });
        patch.apply(&mut profile)?;
        self.store.save_user(profile.clone())?;
        Ok(profile)
    }

    pub fn user(&self, user_id: &str) -> Result<UserProfile, ServiceError> {
        self.store.user(user_id).ok_or_else(|| not_found("user", user_id))
    }

    pub fn essays_of(&self, user_id: &str) -> Result<Vec<Essay>, ServiceError> {
        self.user(user_id)?;
        Ok(self.store.essays().into_iter().filter(|e| e.user_id == user_id).collect())
    }

    pub fn list_prompts(&self, filter: &PromptFilter) -> Vec<Prompt> {
        self.store.prompts(filter)
    }

    pub fn prompt(&self, id: &str) -> Result<Prompt, ServiceError> {
        self.store.prompt(id).ok_or_else(|| not_found("prompt", id))
    }

    pub fn add_prompt(&self, prompt: Prompt) -> Result<Prompt, ServiceError> {
        let id = self.store.add_prompt(prompt)?;
        self.prompt(&id)
    }

    /// Adds the built-in prompts when the catalogue is empty. Returns how
    /// many were added.
    pub fn seed_prompts(&self) -> Result<usize, ServiceError> {
        if !self.store.prompts(&PromptFilter::default()).is_empty() {
            return Ok(0);
        }
        let prompts = default_prompts();
        let n = prompts.len();
        for p in prompts {
            self.store.add_prompt(p)?;
        }
        Ok(n)
    }

    pub fn create_essay(&self, req: NewEssay) -> Result<Essay, ServiceError> {
        self.prompt(&req.prompt_id)?;
        let user_id = match req.user_id {
            Some(id) => self.user(&id)?.user_id,
            None => self.create_user(ProfilePatch::default())?.user_id,
        };
        let essay = Essay {
            essay_id: uuid::Uuid::new_v4().to_string(),
            user_id,
            prompt_id: req.prompt_id,
            created_at: now(),
        };
        self.store.create_essay(essay.clone())?;
        Ok(essay)
    }

    pub fn essay(&self, essay_id: &str) -> Result<Essay, ServiceError> {
        self.store.essay(essay_id).ok_or_else(|| not_found("essay", essay_id))
    }

    /// Runs the full check pipeline on `text` and stores the result as the
    /// essay's next revision.
    pub fn check_submission(&self, essay_id: &str, text: &str) -> Result<Submission, ServiceError> {
        let essay = self.essay(essay_id)?;
        let level = self.prompt(&essay.prompt_id)?.level;
        let feedback = self.engines.evaluate(text)?;
        let word_count = feedback.features.word_count;
        for _ in 0..MAX_APPEND_ATTEMPTS {
            let submission = Submission {
                essay_id: essay_id.to_string(),
                revision_no: self.store.next_revision(essay_id),
                text: text.to_string(),
                timestamp: now(),
                word_count,
                below_minimum: !meets_length_requirement(word_count, level),
                feedback: feedback.clone(),
            };
            match self.store.append_submission(submission.clone()) {
                Ok(()) => return Ok(submission),
                Err(StoreError::RevisionConflict { .. }) => continue,
                Err(e) => return Err(e.into()),
            }
        }
        Err(ServiceError::Conflict(format!("could not append a revision to essay {essay_id:?}")))
    }

    pub fn submissions(&self, essay_id: &str) -> Result<Vec<Submission>, ServiceError> {
        self.essay(essay_id)?;
        Ok(self.store.submissions(essay_id))
    }

    pub fn submission(&self, essay_id: &str, revision_no: u32) -> Result<Submission, ServiceError> {
        self.essay(essay_id)?;
        self.store
            .submission(essay_id, revision_no)
            .ok_or_else(|| not_found("revision", &format!("{essay_id}#{revision_no}")))
    }

    pub fn progress(&self, essay_id: &str) -> Result<Vec<ProgressPoint>, ServiceError> {
        Ok(self.submissions(essay_id)?.iter().map(ProgressPoint::from).collect())
    }

    /// Word-level diff between two stored revisions, in argument order.
    pub fn diff_revisions(&self, essay_id: &str, from: u32, to: u32) -> Result<Vec<DiffOp>, ServiceError> {
        let a = self.submission(essay_id, from)?;
        let b = self.submission(essay_id, to)?;
        let surfaces = |s: &Submission| s.feedback.tokens.iter().map(|t| t.surface.clone()).collect::<Vec<_>>();
        Ok(diff_tokens(&surfaces(&a), &surfaces(&b)))
    }
}

fn not_found(kind: &'static str, id: &str) -> ServiceError {
    ServiceError::NotFound { kind, id: id.to_string() }
}
