//! Hand-built submission logs.
#![allow(dead_code)]

use qalam_core::aes::FeatureVector;
use qalam_core::text::tokenize;
use qalam_core::{CefrLevel, EditScript};
use qalam_corpus::EssayLog;
use qalam_store::{Essay, Feedback, Locale, Submission, UserProfile};

pub fn submission(essay_id: &str, revision_no: u32, errors: usize, cefr: CefrLevel, words: usize) -> Submission {
    let text = format!("مراجعة رقم {revision_no}.");
    Submission {
        essay_id: essay_id.into(),
        revision_no,
        timestamp: format!("2026-03-0{revision_no}T10:00:00.000000Z"),
        word_count: words,
        below_minimum: words < 50,
        feedback: Feedback {
            tokens: tokenize(&text),
            labels: vec![],
            corrected_text: text.clone(),
            script: EditScript::default(),
            features: FeatureVector {
                word_count: words,
                avg_sentence_len: words as f64,
                type_token_ratio: 1.0,
                error_density: 100.0 * errors as f64 / words as f64,
                punct_density: 0.0,
            },
            cefr,
            config_id: "banded-v1".into(),
            detector: "rule".into(),
            error_count: errors,
            degraded: vec![],
        },
        text,
    }
}

/// Revisions given as (error_count, cefr, word_count).
pub fn essay(user: &str, native_language: Option<&str>, revisions: &[(usize, CefrLevel, usize)]) -> EssayLog {
    let essay_id = format!("essay-{user}");
    EssayLog {
        essay: Essay {
            essay_id: essay_id.clone(),
            user_id: user.into(),
            prompt_id: "travel-experience".into(),
            created_at: "2026-03-01T09:00:00.000000Z".into(),
        },
        user: Some(UserProfile {
            user_id: user.into(),
            native_language: native_language.map(str::to_string),
            dialect: None,
            self_level: None,
            locale: Locale::En,
        }),
        submissions: revisions
            .iter()
            .enumerate()
            .map(|(i, &(e, c, w))| submission(&essay_id, i as u32 + 1, e, c, w))
            .collect(),
    }
}

/// User A wrote once; B went 10 → 7 → 5 errors; C stayed at 4 errors; D
/// went from 3 to 4 errors while the estimate rose from B1 to B2.
pub fn selection_fixture() -> Vec<EssayLog> {
    use CefrLevel::*;
    vec![
        essay("user-a", Some("English"), &[(6, A2, 120)]),
        essay("user-b", None, &[(10, A2, 150), (7, B1, 160), (5, B1, 170)]),
        essay("user-c", Some("French"), &[(4, B1, 130), (4, B1, 135)]),
        essay("user-d", Some("Spanish"), &[(3, B1, 212), (4, B2, 260)]),
    ]
}
