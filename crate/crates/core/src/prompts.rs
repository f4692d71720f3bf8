//! CEFR-leveled essay prompts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aes::min_words_for;
use crate::level::CefrLevel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Genre {
    Formal,
    Informal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    /// Assigned by [`PromptDb::add`] when left empty.
    #[serde(default)]
    pub id: String,
    pub level: CefrLevel,
    pub topic: String,
    pub genre: Genre,
    pub body_ar: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_en: Option<String>,
    pub min_words: usize,
    /// Locator of an accompanying image or other media; never hosted here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub media_ref: Option<String>,
}

impl Prompt {
    pub fn validate(&self) -> Result<(), PromptError> {
        if self.body_ar.trim().is_empty() {
            return Err(PromptError::Validation("body_ar must not be empty".into()));
        }
        let expected = min_words_for(self.level);
        if self.min_words != expected {
            return Err(PromptError::Validation(format!(
                "min_words {} does not match {} for level {}",
                self.min_words, expected, self.level
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptFilter {
    #[serde(default)]
    pub level: Option<CefrLevel>,
    /// Case-insensitive substring of the topic.
    #[serde(default)]
    pub topic: Option<String>,
    #[serde(default)]
    pub genre: Option<Genre>,
}

impl PromptFilter {
    pub fn matches(&self, p: &Prompt) -> bool {
        self.level.is_none_or(|l| l == p.level)
            && self.genre.is_none_or(|g| g == p.genre)
            && self
                .topic
                .as_ref()
                .is_none_or(|t| p.topic.to_lowercase().contains(&t.to_lowercase()))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("invalid prompt: {0}")]
    Validation(String),
    #[error("prompt id {0:?} already exists")]
    DuplicateId(String),
    #[error("prompt store already holds prompts")]
    AlreadySeeded,
    #[error("seed file line {line}: {message}")]
    SeedFormat { line: usize, message: String },
}

/// In-memory prompt catalogue. Persistence is the caller's concern.
#[derive(Debug, Clone, Default)]
pub struct PromptDb {
    prompts: BTreeMap<String, Prompt>,
    next_id: usize,
}

impl PromptDb {
    pub fn new() -> Self {
        Self::default()
    }

    /// Validates and stores `prompt`, returning its id.
    pub fn add(&mut self, mut prompt: Prompt) -> Result<String, PromptError> {
        prompt.validate()?;
        if prompt.id.is_empty() {
            loop {
                self.next_id += 1;
                let candidate = format!("p{:04}", self.next_id);
                if !self.prompts.contains_key(&candidate) {
                    prompt.id = candidate;
                    break;
                }
            }
        } else if self.prompts.contains_key(&prompt.id) {
            return Err(PromptError::DuplicateId(prompt.id));
        }
        let id = prompt.id.clone();
        self.prompts.insert(id.clone(), prompt);
        Ok(id)
    }

    pub fn get(&self, id: &str) -> Option<&Prompt> {
        self.prompts.get(id)
    }

    /// Matching prompts ordered by level, then id.
    pub fn list(&self, filter: &PromptFilter) -> Vec<Prompt> {
        let mut out: Vec<Prompt> = self.prompts.values().filter(|p| filter.matches(p)).cloned().collect();
        out.sort_by(|a, b| a.level.cmp(&b.level).then_with(|| a.id.cmp(&b.id)));
        out
    }

    pub fn len(&self) -> usize {
        self.prompts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prompts.is_empty()
    }

    /// Inserts the five built-in prompts into an empty catalogue.
    pub fn seed_defaults(&mut self) -> Result<usize, PromptError> {
        if !self.is_empty() {
            return Err(PromptError::AlreadySeeded);
        }
        let seeds = default_prompts();
        let n = seeds.len();
        for p in seeds {
            self.add(p)?;
        }
        Ok(n)
    }
}

/// Parses a seed file: one JSON prompt object per line; blank lines and
/// lines starting with `#` are skipped.
pub fn parse_seed_file(contents: &str) -> Result<Vec<Prompt>, PromptError> {
    contents
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            let p: Prompt = serde_json::from_str(l)
                .map_err(|e| PromptError::SeedFormat { line: i + 1, message: e.to_string() })?;
            p.validate().map_err(|e| PromptError::SeedFormat { line: i + 1, message: e.to_string() })?;
            Ok(p)
        })
        .collect()
}

fn prompt(id: &str, level: CefrLevel, topic: &str, genre: Genre, body_ar: &str, body_en: &str) -> Prompt {
    Prompt {
        id: id.to_string(),
        level,
        topic: topic.to_string(),
        genre,
        body_ar: body_ar.to_string(),
        body_en: Some(body_en.to_string()),
        min_words: min_words_for(level),
        media_ref: None,
    }
}

/// The five starter prompts (levels A1 to B1).
pub fn default_prompts() -> Vec<Prompt> {
    use CefrLevel::*;
    vec![
        prompt(
            "family-and-friends",
            A1,
            "Family and Friends",
            Genre::Informal,
            "صف عائلتك وأصدقاءك. من هم؟ ماذا تحبون أن تفعلوا معا؟ اكتب بين 120 و500 كلمة.",
            "Describe your family and friends. Who are they? What do you like to do together? Write between 120 and 500 words.",
        ),
        prompt(
            "weekly-schedule",
            A1,
            "Weekly Schedule",
            Genre::Informal,
            "ماذا تفعل في أيام الأسبوع؟ صف جدولك الأسبوعي من يوم الأحد إلى يوم السبت. اكتب بين 120 و500 كلمة.",
            "What do you do during the week? Describe your weekly schedule from Sunday to Saturday. Write between 120 and 500 words.",
        ),
        prompt(
            "sports-and-hobbies",
            A2,
            "Sports and Hobbies",
            Genre::Informal,
            "ما هي هواياتك المفضلة؟ متى تمارس هواياتك؟ ومع من؟ ما هي رياضتك المفضلة؟ تحدث عن نشاط تستمتع به في عطلة نهاية الأسبوع. اكتب بين 120 و500 كلمة.",
            "What are your favorite hobbies? When do you practice your hobbies? And with whom? What is your favorite sport? Talk about an activity you enjoy on the weekend. Write between 120 and 500 words.",
        ),
        prompt(
            "spring-break",
            A2,
            "Spring Break",
            Genre::Informal,
            "كيف قضيت عطلة الربيع؟ أين ذهبت وماذا فعلت؟ اكتب بين 120 و500 كلمة.",
            "How did you spend your spring break? Where did you go and what did you do? Write between 120 and 500 words.",
        ),
        prompt(
            "travel-experience",
            B1,
            "Travel Experience",
            Genre::Formal,
            "اكتب عن تجربة سفر لا تنساها. إلى أين سافرت؟ ماذا تعلمت من هذه الرحلة؟ اكتب بين 120 و500 كلمة.",
            "Write about a travel experience you will not forget. Where did you travel? What did you learn from the trip? Write between 120 and 500 words.",
        ),
    ]
}
