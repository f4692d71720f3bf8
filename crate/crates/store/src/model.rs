use qalam_core::aes::FeatureVector;
use qalam_core::{CefrLevel, EditScript, Token, TokenLabel};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Locale {
    #[default]
    Ar,
    En,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: String,
    #[serde(default)]
    pub native_language: Option<String>,
    #[serde(default)]
    pub dialect: Option<String>,
    #[serde(default)]
    pub self_level: Option<CefrLevel>,
    #[serde(default)]
    pub locale: Locale,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Essay {
    pub essay_id: String,
    pub user_id: String,
    pub prompt_id: String,
    pub created_at: String,
}

/// Result of one run of the check pipeline. Never modified after storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feedback {
    /// Tokens of the submitted text, for locating labels.
    pub tokens: Vec<Token>,
    /// Flagged tokens only.
    pub labels: Vec<TokenLabel>,
    pub corrected_text: String,
    pub script: EditScript,
    pub features: FeatureVector,
    pub cefr: CefrLevel,
    pub config_id: String,
    /// Identity of the detector that produced `labels`.
    pub detector: String,
    pub error_count: usize,
    /// Why a configured remote backend was replaced by a local one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degraded: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submission {
    pub essay_id: String,
    pub revision_no: u32,
    pub text: String,
    pub timestamp: String,
    pub word_count: usize,
    /// Shorter than the prompt level's word minimum. Feedback is still given.
    pub below_minimum: bool,
    pub feedback: Feedback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProgressPoint {
    pub revision_no: u32,
    pub timestamp: String,
    pub error_count: usize,
    pub cefr: CefrLevel,
}

impl From<&Submission> for ProgressPoint {
    fn from(s: &Submission) -> Self {
        ProgressPoint {
            revision_no: s.revision_no,
            timestamp: s.timestamp.clone(),
            error_count: s.feedback.error_count,
            cefr: s.feedback.cefr,
        }
    }
}
