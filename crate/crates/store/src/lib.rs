//! Persistent state for the writing service.
//!
//! Everything is stored as one JSON event per line in `events.jsonl` inside
//! the data directory. Opening a store replays the log into memory; writes
//! append a line and then update memory, under one lock, so the log order
//! is the state order.

mod model;

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use parking_lot::{Mutex, RwLock};
use qalam_core::prompts::{Prompt, PromptDb, PromptError, PromptFilter};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use model::{Essay, Feedback, Locale, ProgressPoint, Submission, UserProfile};

pub const LOG_FILE: &str = "events.jsonl";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path} line {line}: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
    #[error("store was opened read-only")]
    ReadOnly,
    #[error("unknown {kind} {id:?}")]
    NotFound { kind: &'static str, id: String },
    #[error("{kind} {id:?} already exists")]
    Duplicate { kind: &'static str, id: String },
    #[error("essay {essay_id:?} expected revision {expected}, got {got}")]
    RevisionConflict { essay_id: String, expected: u32, got: u32 },
    #[error(transparent)]
    Prompt(#[from] PromptError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
enum Event {
    UserSaved(UserProfile),
    PromptAdded(Prompt),
    EssayCreated(Essay),
    SubmissionStored(Submission),
}

#[derive(Debug, Default)]
struct State {
    users: BTreeMap<String, UserProfile>,
    prompts: PromptDb,
    essays: HashMap<String, Essay>,
    /// Essay ids in creation order.
    essay_order: Vec<String>,
    submissions: HashMap<String, Vec<Submission>>,
}

impl State {
    fn check(&self, event: &Event) -> Result<(), StoreError> {
        match event {
            Event::UserSaved(_) => Ok(()),
            Event::PromptAdded(p) => {
                p.validate()?;
                if self.prompts.get(&p.id).is_some() {
                    return Err(StoreError::Duplicate { kind: "prompt", id: p.id.clone() });
                }
                Ok(())
            }
            Event::EssayCreated(e) => {
                if self.essays.contains_key(&e.essay_id) {
                    return Err(StoreError::Duplicate { kind: "essay", id: e.essay_id.clone() });
                }
                if !self.users.contains_key(&e.user_id) {
                    return Err(StoreError::NotFound { kind: "user", id: e.user_id.clone() });
                }
                if self.prompts.get(&e.prompt_id).is_none() {
                    return Err(StoreError::NotFound { kind: "prompt", id: e.prompt_id.clone() });
                }
                Ok(())
            }
            Event::SubmissionStored(s) => {
                if !self.essays.contains_key(&s.essay_id) {
                    return Err(StoreError::NotFound { kind: "essay", id: s.essay_id.clone() });
                }
                let expected = self.next_revision(&s.essay_id);
                if s.revision_no != expected {
                    return Err(StoreError::RevisionConflict {
                        essay_id: s.essay_id.clone(),
                        expected,
                        got: s.revision_no,
                    });
                }
                Ok(())
            }
        }
    }

    fn apply(&mut self, event: Event) {
        match event {
            Event::UserSaved(u) => {
                self.users.insert(u.user_id.clone(), u);
            }
            Event::PromptAdded(p) => {
                self.prompts.add(p).expect("checked before apply");
            }
            Event::EssayCreated(e) => {
                self.essay_order.push(e.essay_id.clone());
                self.essays.insert(e.essay_id.clone(), e);
            }
            Event::SubmissionStored(s) => self.submissions.entry(s.essay_id.clone()).or_default().push(s),
        }
    }

    fn next_revision(&self, essay_id: &str) -> u32 {
        self.submissions.get(essay_id).map_or(0, |v| v.len() as u32) + 1
    }
}

pub struct Store {
    path: PathBuf,
    state: RwLock<State>,
    /// `None` for read-only stores.
    writer: Option<Mutex<File>>,
}

impl Store {
    /// Opens (creating if needed) the store in `dir` for reading and writing.
    pub fn open(dir: impl AsRef<Path>) -> Result<Store, StoreError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|source| StoreError::Io { path: dir.to_path_buf(), source })?;
        let path = dir.join(LOG_FILE);
        let state = replay(&path)?;
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|source| StoreError::Io { path: path.clone(), source })?;
        Ok(Store { path, state: RwLock::new(state), writer: Some(Mutex::new(file)) })
    }

    /// Loads a snapshot of the store in `dir` without taking a write handle.
    /// A missing log reads as an empty store.
    pub fn open_read_only(dir: impl AsRef<Path>) -> Result<Store, StoreError> {
        let path = dir.as_ref().join(LOG_FILE);
        let state = replay(&path)?;
        Ok(Store { path, state: RwLock::new(state), writer: None })
    }

    pub fn log_path(&self) -> &Path {
        &self.path
    }

    fn commit(&self, event: Event) -> Result<(), StoreError> {
        let writer = self.writer.as_ref().ok_or(StoreError::ReadOnly)?;
        let mut file = writer.lock();
        let mut state = self.state.write();
        state.check(&event)?;
        let mut line = serde_json::to_string(&event).expect("events always serialize");
        line.push('\n');
        file.write_all(line.as_bytes())
            .and_then(|_| file.flush())
            .map_err(|source| StoreError::Io { path: self.path.clone(), source })?;
        state.apply(event);
        Ok(())
    }

    /// Inserts or replaces a user profile.
    pub fn save_user(&self, user: UserProfile) -> Result<(), StoreError> {
        self.commit(Event::UserSaved(user))
    }

    /// Stores a prompt, assigning an id when it has none.
    pub fn add_prompt(&self, mut prompt: Prompt) -> Result<String, StoreError> {
        if prompt.id.is_empty() {
            // Assign through a scratch copy so the logged event carries the id.
            let mut scratch = self.state.read().prompts.clone();
            prompt.id = scratch.add(prompt.clone())?;
        }
        let id = prompt.id.clone();
        self.commit(Event::PromptAdded(prompt))?;
        Ok(id)
    }

    pub fn create_essay(&self, essay: Essay) -> Result<(), StoreError> {
        self.commit(Event::EssayCreated(essay))
    }

    /// Appends a submission whose `revision_no` must be exactly one past the
    /// latest stored revision; otherwise a [`StoreError::RevisionConflict`]
    /// is returned and nothing is written.
    pub fn append_submission(&self, submission: Submission) -> Result<(), StoreError> {
        self.commit(Event::SubmissionStored(submission))
    }

    pub fn user(&self, user_id: &str) -> Option<UserProfile> {
        self.state.read().users.get(user_id).cloned()
    }

    pub fn users(&self) -> Vec<UserProfile> {
        self.state.read().users.values().cloned().collect()
    }

    pub fn prompt(&self, id: &str) -> Option<Prompt> {
        self.state.read().prompts.get(id).cloned()
    }

    pub fn prompts(&self, filter: &PromptFilter) -> Vec<Prompt> {
        self.state.read().prompts.list(filter)
    }

    pub fn essay(&self, essay_id: &str) -> Option<Essay> {
        self.state.read().essays.get(essay_id).cloned()
    }

    /// All essays in creation order.
    pub fn essays(&self) -> Vec<Essay> {
        let state = self.state.read();
        state.essay_order.iter().map(|id| state.essays[id].clone()).collect()
    }

    /// Revisions of `essay_id` in revision order.
    pub fn submissions(&self, essay_id: &str) -> Vec<Submission> {
        self.state.read().submissions.get(essay_id).cloned().unwrap_or_default()
    }

    pub fn submission(&self, essay_id: &str, revision_no: u32) -> Option<Submission> {
        let state = self.state.read();
        let revs = state.submissions.get(essay_id)?;
        revs.get((revision_no as usize).checked_sub(1)?).cloned()
    }

    pub fn next_revision(&self, essay_id: &str) -> u32 {
        self.state.read().next_revision(essay_id)
    }

    pub fn submission_count(&self) -> usize {
        self.state.read().submissions.values().map(Vec::len).sum()
    }
}

fn replay(path: &Path) -> Result<State, StoreError> {
    let mut state = State::default();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(state),
        Err(source) => return Err(StoreError::Io { path: path.to_path_buf(), source }),
    };
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| StoreError::Io { path: path.to_path_buf(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let corrupt = |message: String| StoreError::Corrupt { path: path.to_path_buf(), line: i + 1, message };
        let event: Event = serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
        state.check(&event).map_err(|e| corrupt(e.to_string()))?;
        state.apply(event);
    }
    Ok(state)
}
