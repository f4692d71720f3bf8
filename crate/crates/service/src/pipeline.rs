use std::time::Duration;

use qalam_core::aes::{extract_features, AesError};
use qalam_core::gec::{correct_with_labels, CorrectError};
use qalam_core::ged::{run_cascade, GedError};
use qalam_core::text::{count_words, split_sentences, tokenize};
use qalam_core::{DetectorBackend, Lexicon, ScorerBackend, ScoringConfig};
use qalam_store::Feedback;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error("text is empty")]
    EmptyText,
    #[error("text has no words to score")]
    Unscorable,
    #[error("pipeline failure: {0}")]
    Internal(String),
}

/// Detector and scorer backends, each with a local stand-in used when a
/// remote backend fails.
#[derive(Debug, Clone)]
pub struct Engines {
    pub detector: DetectorBackend,
    pub fallback_detector: DetectorBackend,
    pub scorer: ScorerBackend,
    pub fallback_scorer: ScorerBackend,
}

impl Engines {
    pub fn local(lexicon: Lexicon, config: ScoringConfig) -> Self {
        let detector = DetectorBackend::rule(lexicon);
        let scorer = ScorerBackend::Banded(config);
        Engines { fallback_detector: detector.clone(), detector, fallback_scorer: scorer.clone(), scorer }
    }

    pub fn with_remote_detector(mut self, endpoint: impl Into<String>, timeout: Duration) -> Self {
        self.detector = DetectorBackend::remote(endpoint, timeout);
        self
    }

    pub fn with_remote_scorer(mut self, endpoint: impl Into<String>, timeout: Duration) -> Self {
        self.scorer = ScorerBackend::Remote { endpoint: endpoint.into(), timeout };
        self
    }

    /// tokenize → detect → correct → extract features → score.
    pub fn evaluate(&self, text: &str) -> Result<Feedback, PipelineError> {
        if text.trim().is_empty() {
            return Err(PipelineError::EmptyText);
        }
        let tokens = tokenize(text);
        if count_words(&tokens) == 0 {
            return Err(PipelineError::Unscorable);
        }
        let mut degraded = Vec::new();

        let (labels, detector) = match run_cascade(&tokens, &self.detector) {
            Ok(labels) => (labels, self.detector.identity()),
            Err(e) => {
                degraded.push(format!("detector {} failed: {e}", self.detector.identity()));
                let labels = run_cascade(&tokens, &self.fallback_detector).map_err(internal_ged)?;
                (labels, self.fallback_detector.identity())
            }
        };
        let correction = correct_with_labels(text, &tokens, labels).map_err(internal_correct)?;
        let features = extract_features(&tokens, &split_sentences(&tokens), &correction.labels).map_err(|e| match e {
            AesError::Unscorable => PipelineError::Unscorable,
            other => PipelineError::Internal(other.to_string()),
        })?;
        let (cefr, config_id) = match self.scorer.score(text, &features) {
            Ok(level) => (level, self.scorer.config_id()),
            Err(e) => {
                degraded.push(format!("scorer {} failed: {e}", self.scorer.config_id()));
                let level = self
                    .fallback_scorer
                    .score(text, &features)
                    .map_err(|e| PipelineError::Internal(e.to_string()))?;
                (level, self.fallback_scorer.config_id())
            }
        };

        let labels: Vec<_> = correction.labels.into_iter().filter(|l| l.flagged).collect();
        Ok(Feedback {
            error_count: labels.len(),
            tokens,
            labels,
            corrected_text: correction.corrected_text,
            script: correction.script,
            features,
            cefr,
            config_id,
            detector,
            degraded,
        })
    }
}

fn internal_ged(e: GedError) -> PipelineError {
    PipelineError::Internal(e.to_string())
}

fn internal_correct(e: CorrectError) -> PipelineError {
    PipelineError::Internal(e.to_string())
}
