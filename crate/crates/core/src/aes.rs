//! CEFR estimation from interpretable essay features.
//!
//! Each feature is banded into a sub-score 0..=5 by five thresholds; the
//! weighted mean of the sub-scores, floored, is the level index. A length
//! cap then bounds the level for short essays.

use std::collections::HashSet;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ged::TokenLabel;
use crate::level::CefrLevel;
use crate::text::{normalize, NormProfile, SpanRange, Token, TokenKind};

const DEFAULT_CONFIG: &str = include_str!("../data/scoring.toml");

/// Minimum essay length for prompts at `level`.
pub fn min_words_for(level: CefrLevel) -> usize {
    match level {
        CefrLevel::A1 | CefrLevel::A2 => 50,
        CefrLevel::B1 | CefrLevel::B2 => 100,
        CefrLevel::C1 | CefrLevel::C2 => 200,
    }
}

pub fn meets_length_requirement(word_count: usize, prompt_level: CefrLevel) -> bool {
    word_count >= min_words_for(prompt_level)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub word_count: usize,
    /// Words per sentence.
    pub avg_sentence_len: f64,
    /// Distinct normalized word surfaces over word count.
    pub type_token_ratio: f64,
    /// Flagged tokens per 100 words.
    pub error_density: f64,
    /// Punctuation tokens per 100 words.
    pub punct_density: f64,
}

#[derive(Debug, Error)]
pub enum AesError {
    #[error("essay has no words to score")]
    Unscorable,
    #[error("invalid scoring config: {0}")]
    InvalidConfig(String),
    #[error("cannot read scoring config: {0}")]
    Io(#[from] std::io::Error),
    #[error("scorer backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("scorer backend returned a malformed response: {0}")]
    BadResponse(String),
}

pub fn extract_features(
    tokens: &[Token],
    sentences: &[SpanRange],
    labels: &[TokenLabel],
) -> Result<FeatureVector, AesError> {
    let words: Vec<&Token> = tokens.iter().filter(|t| t.is_word()).collect();
    let word_count = words.len();
    if word_count == 0 {
        return Err(AesError::Unscorable);
    }
    let sentence_count = sentences
        .iter()
        .filter(|s| words.iter().any(|w| s.contains(w)))
        .count()
        .max(1);
    let distinct: HashSet<String> = words.iter().map(|w| normalize(&w.surface, NormProfile::ALL)).collect();
    let flagged = labels.iter().filter(|l| l.flagged).count();
    let punct = tokens.iter().filter(|t| t.kind == TokenKind::Punct).count();
    let wc = word_count as f64;
    Ok(FeatureVector {
        word_count,
        avg_sentence_len: wc / sentence_count as f64,
        type_token_ratio: distinct.len() as f64 / wc,
        error_density: 100.0 * flagged as f64 / wc,
        punct_density: 100.0 * punct as f64 / wc,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Larger values are better; thresholds strictly increase.
    Higher,
    /// Smaller values are better; thresholds strictly decrease.
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureBand {
    pub direction: Direction,
    /// Boundaries of sub-scores 1..=5.
    pub thresholds: [f64; 5],
    pub weight: f64,
}

impl FeatureBand {
    pub fn sub_score(&self, value: f64) -> usize {
        self.thresholds
            .iter()
            .filter(|&&t| match self.direction {
                Direction::Higher => value >= t,
                Direction::Lower => value <= t,
            })
            .count()
    }

    /// One value per sub-score 0..=5.
    fn representatives(&self) -> [f64; 6] {
        let t = self.thresholds;
        let below = match self.direction {
            Direction::Higher if t[0] > 0.0 => t[0] / 2.0,
            Direction::Higher => t[0] - 1.0,
            Direction::Lower => t[0] + 1.0,
        };
        [below, t[0], t[1], t[2], t[3], t[4]]
    }

    fn validate(&self, name: &str) -> Result<(), AesError> {
        let ordered = self.thresholds.windows(2).all(|w| match self.direction {
            Direction::Higher => w[0] < w[1],
            Direction::Lower => w[0] > w[1],
        });
        if !ordered || self.thresholds.iter().any(|t| !t.is_finite()) {
            return Err(AesError::InvalidConfig(format!(
                "{name}: thresholds {:?} are not strictly monotone for direction {:?}",
                self.thresholds, self.direction
            )));
        }
        if !(self.weight.is_finite() && self.weight >= 0.0) {
            return Err(AesError::InvalidConfig(format!("{name}: weight must be finite and non-negative")));
        }
        Ok(())
    }
}

/// Essays shorter than `below` words score at most `max_level`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthCap {
    pub below: usize,
    pub max_level: CefrLevel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoringConfig {
    pub config_id: String,
    pub word_count: FeatureBand,
    pub avg_sentence_len: FeatureBand,
    pub type_token_ratio: FeatureBand,
    pub error_density: FeatureBand,
    pub punct_density: FeatureBand,
    #[serde(default)]
    pub length_caps: Vec<LengthCap>,
}

impl ScoringConfig {
    /// The shipped configuration.
    pub fn default_config() -> Self {
        Self::from_toml(DEFAULT_CONFIG).expect("shipped scoring config is valid")
    }

    pub fn from_toml(contents: &str) -> Result<Self, AesError> {
        let cfg: ScoringConfig = toml::from_str(contents).map_err(|e| AesError::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AesError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scoring config serializes")
    }

    fn bands(&self) -> [(&'static str, &FeatureBand); 5] {
        [
            ("word_count", &self.word_count),
            ("avg_sentence_len", &self.avg_sentence_len),
            ("type_token_ratio", &self.type_token_ratio),
            ("error_density", &self.error_density),
            ("punct_density", &self.punct_density),
        ]
    }

    pub fn validate(&self) -> Result<(), AesError> {
        if self.config_id.trim().is_empty() {
            return Err(AesError::InvalidConfig("config_id is empty".into()));
        }
        for (name, band) in self.bands() {
            band.validate(name)?;
        }
        if self.bands().iter().map(|(_, b)| b.weight).sum::<f64>() <= 0.0 {
            return Err(AesError::InvalidConfig("weights sum to zero".into()));
        }
        let caps_ordered = self
            .length_caps
            .windows(2)
            .all(|w| w[0].below < w[1].below && w[0].max_level <= w[1].max_level);
        if !caps_ordered {
            return Err(AesError::InvalidConfig(
                "length_caps must have increasing `below` and non-decreasing `max_level`".into(),
            ));
        }
        let reached = self.reachable_levels();
        if let Some(missing) = CefrLevel::ALL.iter().find(|l| !reached.contains(l)) {
            return Err(AesError::InvalidConfig(format!("no feature vector scores {missing}")));
        }
        Ok(())
    }

    fn length_cap(&self, word_count: usize) -> CefrLevel {
        self.length_caps
            .iter()
            .find(|c| word_count < c.below)
            .map_or(CefrLevel::C2, |c| c.max_level)
    }

    /// Levels reached over a grid holding one value per sub-score band of
    /// every feature plus each cap boundary. Sub-scores and caps are
    /// constant between these points, so the grid covers every outcome.
    fn reachable_levels(&self) -> HashSet<CefrLevel> {
        let mut word_counts: Vec<usize> =
            self.word_count.representatives().iter().map(|v| v.max(1.0).ceil() as usize).collect();
        for cap in &self.length_caps {
            word_counts.push(cap.below);
            word_counts.push(cap.below.saturating_sub(1).max(1));
        }
        let mut reached = HashSet::new();
        for &wc in &word_counts {
            for asl in self.avg_sentence_len.representatives() {
                for ttr in self.type_token_ratio.representatives() {
                    for err in self.error_density.representatives() {
                        for punct in self.punct_density.representatives() {
                            let fv = FeatureVector {
                                word_count: wc,
                                avg_sentence_len: asl,
                                type_token_ratio: ttr,
                                error_density: err,
                                punct_density: punct,
                            };
                            reached.insert(score(&fv, self));
                        }
                    }
                }
            }
        }
        reached
    }
}

/// Banded weighted score; see the module docs.
pub fn score(fv: &FeatureVector, cfg: &ScoringConfig) -> CefrLevel {
    let values = [
        fv.word_count as f64,
        fv.avg_sentence_len,
        fv.type_token_ratio,
        fv.error_density,
        fv.punct_density,
    ];
    let (weighted, total) = cfg
        .bands()
        .iter()
        .zip(values)
        .fold((0.0, 0.0), |(acc, tot), ((_, band), v)| {
            (acc + band.weight * band.sub_score(v) as f64, tot + band.weight)
        });
    let index = ((weighted / total) + 1e-9).floor() as usize;
    let level = CefrLevel::from_ordinal(index.min(5)).unwrap_or(CefrLevel::C2);
    level.min(cfg.length_cap(fv.word_count))
}

/// Where CEFR estimates come from.
#[derive(Debug, Clone)]
pub enum ScorerBackend {
    Banded(ScoringConfig),
    /// `POST {"text": ..}` answered by `{"level": "A1".."C2"}`.
    Remote { endpoint: String, timeout: Duration },
}

#[derive(Serialize)]
struct RemoteScoreRequest<'a> {
    text: &'a str,
}

#[derive(Deserialize)]
struct RemoteScoreResponse {
    level: String,
}

impl ScorerBackend {
    /// Identifier stored with every score.
    pub fn config_id(&self) -> String {
        match self {
            ScorerBackend::Banded(cfg) => cfg.config_id.clone(),
            ScorerBackend::Remote { endpoint, .. } => format!("remote:{endpoint}"),
        }
    }

    pub fn score(&self, text: &str, fv: &FeatureVector) -> Result<CefrLevel, AesError> {
        match self {
            ScorerBackend::Banded(cfg) => Ok(score(fv, cfg)),
            ScorerBackend::Remote { endpoint, timeout } => {
                let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(*timeout)).build().into();
                let resp: RemoteScoreResponse = agent
                    .post(endpoint)
                    .send_json(&RemoteScoreRequest { text })
                    .map_err(|e| AesError::BackendUnavailable(e.to_string()))?
                    .body_mut()
                    .read_json()
                    .map_err(|e| AesError::BadResponse(e.to_string()))?;
                resp.level.parse().map_err(|e: crate::level::ParseLevelError| AesError::BadResponse(e.to_string()))
            }
        }
    }
}
