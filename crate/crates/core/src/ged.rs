//! Two-stage grammatical error detection.
//!
//! Stage one flags erroneous tokens, stage two assigns an error class to
//! each flagged token. Stage one is authoritative: stage two never flags a
//! token stage one left alone, and a flagged token always gets a non-OK tag
//! (`UNK` when nothing more specific applies).

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gec::{self, AlignKind, TokenAlignment};
use crate::lexicon::{base_form, Fold, Lexicon};
use crate::text::Token;

/// Error classes, a fixed subset of the ARETA taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorTag {
    Ok,
    OrthHamza,
    OrthTaa,
    OrthAlifMaqsura,
    OrthVowel,
    OrthOther,
    Morph,
    Syntax,
    Semantic,
    Punct,
    Merge,
    Split,
    Unk,
}

impl ErrorTag {
    pub const ALL: [ErrorTag; 13] = [
        ErrorTag::Ok,
        ErrorTag::OrthHamza,
        ErrorTag::OrthTaa,
        ErrorTag::OrthAlifMaqsura,
        ErrorTag::OrthVowel,
        ErrorTag::OrthOther,
        ErrorTag::Morph,
        ErrorTag::Syntax,
        ErrorTag::Semantic,
        ErrorTag::Punct,
        ErrorTag::Merge,
        ErrorTag::Split,
        ErrorTag::Unk,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorTag::Ok => "OK",
            ErrorTag::OrthHamza => "ORTH_HAMZA",
            ErrorTag::OrthTaa => "ORTH_TAA",
            ErrorTag::OrthAlifMaqsura => "ORTH_ALIF_MAQSURA",
            ErrorTag::OrthVowel => "ORTH_VOWEL",
            ErrorTag::OrthOther => "ORTH_OTHER",
            ErrorTag::Morph => "MORPH",
            ErrorTag::Syntax => "SYNTAX",
            ErrorTag::Semantic => "SEMANTIC",
            ErrorTag::Punct => "PUNCT",
            ErrorTag::Merge => "MERGE",
            ErrorTag::Split => "SPLIT",
            ErrorTag::Unk => "UNK",
        }
    }

    /// Learner-facing hint; empty for `OK`.
    pub fn hint(self) -> &'static str {
        match self {
            ErrorTag::Ok => "",
            ErrorTag::OrthHamza => "Check the hamza and its seat (أ إ آ ء ؤ ئ).",
            ErrorTag::OrthTaa => "Check ta marbuta (ة) against ha (ه) at the end of the word.",
            ErrorTag::OrthAlifMaqsura => "Check alif maqsura (ى) against ya (ي) at the end of the word.",
            ErrorTag::OrthVowel => "A long vowel (ا و ي) seems to be missing.",
            ErrorTag::OrthOther => "Check the spelling of this word.",
            ErrorTag::Morph => "Check the form of this word (prefix, suffix or pattern).",
            ErrorTag::Syntax => "Check how this word fits the sentence structure.",
            ErrorTag::Semantic => "This word may not express the intended meaning.",
            ErrorTag::Punct => "Check the punctuation here.",
            ErrorTag::Merge => "Two words seem to be written together; add a space.",
            ErrorTag::Split => "This word seems to be split in two; remove the space.",
            ErrorTag::Unk => "Something looks wrong with this word.",
        }
    }
}

impl fmt::Display for ErrorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("unknown error tag {0:?}")]
pub struct ParseTagError(pub String);

impl FromStr for ErrorTag {
    type Err = ParseTagError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| ParseTagError(s.to_string()))
    }
}

const AMBIGUOUS_NOTE: &str = " Several corrections are possible (ambiguous).";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenLabel {
    pub token_index: usize,
    pub flagged: bool,
    pub tag: ErrorTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggestion: Option<String>,
    pub hint: String,
    pub confidence: f64,
}

impl TokenLabel {
    pub fn ok(token_index: usize, confidence: f64) -> Self {
        TokenLabel {
            token_index,
            flagged: false,
            tag: ErrorTag::Ok,
            suggestion: None,
            hint: String::new(),
            confidence,
        }
    }
}

#[derive(Debug, Error)]
pub enum GedError {
    #[error("detection needs at least one token")]
    EmptyInput,
    #[error("got {flags} flags for {tokens} tokens")]
    LengthMismatch { tokens: usize, flags: usize },
    #[error("detector backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("detector backend returned a malformed response: {0}")]
    BadResponse(String),
}

/// Which rules the lexicon backend runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleSet {
    pub hamza: bool,
    pub taa: bool,
    pub alif_maqsura: bool,
    pub merge: bool,
    pub split: bool,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet { hamza: true, taa: true, alif_maqsura: true, merge: true, split: true }
    }
}

/// Minimum length, in scalars, of each half when a token is split into two
/// lexicon words. Keeps attached one-letter clitics (و ف ب ل ك) from being
/// reported as merged words.
const MIN_MERGE_PART: usize = 2;

#[derive(Debug, Clone)]
pub struct RuleBackend {
    pub lexicon: Lexicon,
    pub rules: RuleSet,
}

#[derive(Debug, Clone, PartialEq)]
struct RuleHit {
    tag: ErrorTag,
    candidates: Vec<String>,
}

impl RuleHit {
    fn suggestion(&self) -> Option<String> {
        match self.candidates.as_slice() {
            [only] => Some(only.clone()),
            _ => None,
        }
    }
}

impl RuleBackend {
    pub fn new(lexicon: Lexicon) -> Self {
        RuleBackend { lexicon, rules: RuleSet::default() }
    }

    fn single_token_rule(&self, base: &str) -> Option<RuleHit> {
        let folds = [
            (self.rules.hamza, Fold::Hamza, ErrorTag::OrthHamza),
            (self.rules.taa, Fold::Taa, ErrorTag::OrthTaa),
            (self.rules.alif_maqsura, Fold::AlifMaqsura, ErrorTag::OrthAlifMaqsura),
        ];
        for (enabled, fold, tag) in folds {
            if !enabled {
                continue;
            }
            let candidates = self.lexicon.fold_neighbors(base, fold);
            if !candidates.is_empty() {
                return Some(RuleHit { tag, candidates });
            }
        }
        if self.rules.merge {
            let chars: Vec<char> = base.chars().collect();
            let candidates: Vec<String> = (MIN_MERGE_PART..=chars.len().saturating_sub(MIN_MERGE_PART))
                .filter_map(|k| {
                    let left: String = chars[..k].iter().collect();
                    let right: String = chars[k..].iter().collect();
                    let l = self.lexicon.surface(&left)?;
                    let r = self.lexicon.surface(&right)?;
                    Some(format!("{l} {r}"))
                })
                .collect();
            if !candidates.is_empty() {
                return Some(RuleHit { tag: ErrorTag::Merge, candidates });
            }
        }
        None
    }

    /// Per-token rule hits. Only tokens missing from the lexicon are
    /// inspected, except that a lexicon word can join an unknown neighbour
    /// in a split pair.
    fn analyze(&self, tokens: &[Token]) -> Vec<Option<RuleHit>> {
        let bases: Vec<String> = tokens.iter().map(|t| base_form(&t.surface)).collect();
        let known: Vec<bool> = bases.iter().map(|b| self.lexicon.contains_base(b)).collect();
        let mut hits: Vec<Option<RuleHit>> = tokens
            .iter()
            .zip(&bases)
            .zip(&known)
            .map(|((t, b), &k)| {
                if t.is_word() && !k {
                    self.single_token_rule(b)
                } else {
                    None
                }
            })
            .collect();

        if self.rules.split {
            let mut i = 0;
            while i + 1 < tokens.len() {
                let pairable = tokens[i].is_word()
                    && tokens[i + 1].is_word()
                    && hits[i].is_none()
                    && hits[i + 1].is_none()
                    && (!known[i] || !known[i + 1]);
                if pairable {
                    let joined = format!("{}{}", bases[i], bases[i + 1]);
                    if let Some(surface) = self.lexicon.surface(&joined) {
                        let hit = RuleHit { tag: ErrorTag::Split, candidates: vec![surface.to_string()] };
                        hits[i] = Some(hit.clone());
                        hits[i + 1] = Some(hit);
                        i += 2;
                        continue;
                    }
                }
                i += 1;
            }
        }
        hits
    }
}

/// A model served over HTTP.
///
/// Wire contract: `POST {"tokens": [..]}` answered by
/// `{"flags": [..], "tags": [..], "suggestions": [..], "confidences": [..]?}`.
#[derive(Debug, Clone)]
pub struct RemoteBackend {
    pub endpoint: String,
    pub timeout: Duration,
}

#[derive(Debug, Serialize)]
struct RemoteRequest<'a> {
    tokens: Vec<&'a str>,
}

#[derive(Debug, Deserialize)]
struct RemoteResponse {
    flags: Vec<bool>,
    tags: Vec<String>,
    suggestions: Vec<Option<String>>,
    #[serde(default)]
    confidences: Option<Vec<f64>>,
}

impl RemoteBackend {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        RemoteBackend { endpoint: endpoint.into(), timeout }
    }

    fn call(&self, tokens: &[Token]) -> Result<RemoteResponse, GedError> {
        let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(self.timeout)).build().into();
        let body = RemoteRequest { tokens: tokens.iter().map(|t| t.surface.as_str()).collect() };
        let mut response = agent
            .post(&self.endpoint)
            .send_json(&body)
            .map_err(|e| GedError::BackendUnavailable(e.to_string()))?;
        let parsed: RemoteResponse =
            response.body_mut().read_json().map_err(|e| GedError::BadResponse(e.to_string()))?;
        let n = tokens.len();
        if parsed.flags.len() != n || parsed.tags.len() != n || parsed.suggestions.len() != n {
            return Err(GedError::BadResponse(format!(
                "expected {n} entries, got flags={} tags={} suggestions={}",
                parsed.flags.len(),
                parsed.tags.len(),
                parsed.suggestions.len()
            )));
        }
        if let Some(c) = &parsed.confidences {
            if c.len() != n {
                return Err(GedError::BadResponse(format!("expected {n} confidences, got {}", c.len())));
            }
        }
        Ok(parsed)
    }
}

#[derive(Debug, Clone)]
pub enum DetectorBackend {
    /// Lexicon lookups plus orthographic folds, merges and splits.
    Rule(RuleBackend),
    /// Labels derived by aligning the input against a known correction.
    Reference { target: Vec<Token> },
    Remote(RemoteBackend),
}

impl DetectorBackend {
    pub fn rule(lexicon: Lexicon) -> Self {
        DetectorBackend::Rule(RuleBackend::new(lexicon))
    }

    pub fn reference(target: Vec<Token>) -> Self {
        DetectorBackend::Reference { target }
    }

    pub fn remote(endpoint: impl Into<String>, timeout: Duration) -> Self {
        DetectorBackend::Remote(RemoteBackend::new(endpoint, timeout))
    }

    /// Short identity recorded alongside stored feedback.
    pub fn identity(&self) -> String {
        match self {
            DetectorBackend::Rule(r) => format!("rule:lexicon={}", r.lexicon.len()),
            DetectorBackend::Reference { .. } => "reference".to_string(),
            DetectorBackend::Remote(r) => format!("remote:{}", r.endpoint),
        }
    }

    /// Raw per-token output before stage-one primacy is enforced.
    fn run(&self, tokens: &[Token], flags_hint: Option<&[bool]>) -> Result<Vec<TokenLabel>, GedError> {
        match self {
            DetectorBackend::Rule(rb) => {
                let mut hits = rb.analyze(tokens);
                if let Some(flags) = flags_hint {
                    // Externally flagged lexicon words still get a fold check.
                    for (i, tok) in tokens.iter().enumerate() {
                        if flags[i] && hits[i].is_none() && tok.is_word() {
                            hits[i] = rb.single_token_rule(&base_form(&tok.surface));
                        }
                    }
                }
                Ok(hits
                    .into_iter()
                    .enumerate()
                    .map(|(i, hit)| match hit {
                        None => TokenLabel::ok(i, 1.0),
                        Some(hit) => label_from_hit(i, &hit),
                    })
                    .collect())
            }
            DetectorBackend::Reference { target } => Ok(labels_from_reference(tokens, target)),
            DetectorBackend::Remote(rb) => {
                let resp = rb.call(tokens)?;
                Ok((0..tokens.len())
                    .map(|i| {
                        let confidence = resp.confidences.as_ref().map_or(1.0, |c| c[i].clamp(0.0, 1.0));
                        let tag = resp.tags[i].parse().unwrap_or(ErrorTag::Unk);
                        if !resp.flags[i] {
                            let mut label = TokenLabel::ok(i, confidence);
                            // the model's class is kept for externally flagged tokens
                            label.tag = tag;
                            return label;
                        }
                        TokenLabel {
                            token_index: i,
                            flagged: true,
                            tag,
                            suggestion: resp.suggestions[i].clone(),
                            hint: tag.hint().to_string(),
                            confidence,
                        }
                    })
                    .collect())
            }
        }
    }
}

fn label_from_hit(i: usize, hit: &RuleHit) -> TokenLabel {
    let suggestion = hit.suggestion();
    let mut hint = hit.tag.hint().to_string();
    if suggestion.is_none() {
        hint.push_str(AMBIGUOUS_NOTE);
    }
    TokenLabel { token_index: i, flagged: true, tag: hit.tag, suggestion, hint, confidence: 1.0 }
}

/// Stage one: one error flag per token.
pub fn detect_binary(tokens: &[Token], backend: &DetectorBackend) -> Result<Vec<bool>, GedError> {
    if tokens.is_empty() {
        return Err(GedError::EmptyInput);
    }
    Ok(backend.run(tokens, None)?.iter().map(|l| l.flagged).collect())
}

/// Stage two: error class for every flagged token, `OK` everywhere else.
pub fn classify_flagged(
    tokens: &[Token],
    flags: &[bool],
    backend: &DetectorBackend,
) -> Result<Vec<ErrorTag>, GedError> {
    Ok(classify_labels(tokens, flags, backend)?.into_iter().map(|l| l.tag).collect())
}

fn classify_labels(
    tokens: &[Token],
    flags: &[bool],
    backend: &DetectorBackend,
) -> Result<Vec<TokenLabel>, GedError> {
    if flags.len() != tokens.len() {
        return Err(GedError::LengthMismatch { tokens: tokens.len(), flags: flags.len() });
    }
    if tokens.is_empty() {
        return Err(GedError::EmptyInput);
    }
    let raw = backend.run(tokens, Some(flags))?;
    Ok(enforce_primacy(raw, flags))
}

fn enforce_primacy(raw: Vec<TokenLabel>, flags: &[bool]) -> Vec<TokenLabel> {
    raw.into_iter()
        .zip(flags)
        .map(|(label, &flag)| {
            if !flag {
                return TokenLabel::ok(label.token_index, label.confidence);
            }
            if label.tag == ErrorTag::Ok {
                return TokenLabel {
                    flagged: true,
                    tag: ErrorTag::Unk,
                    suggestion: None,
                    hint: ErrorTag::Unk.hint().to_string(),
                    ..label
                };
            }
            TokenLabel { flagged: true, ..label }
        })
        .collect()
}

/// Runs stage one then stage two and returns one label per token.
pub fn run_cascade(tokens: &[Token], backend: &DetectorBackend) -> Result<Vec<TokenLabel>, GedError> {
    if tokens.is_empty() {
        return Ok(Vec::new());
    }
    match backend {
        // A remote model answers both stages in one round trip.
        DetectorBackend::Remote(_) => {
            let raw = backend.run(tokens, None)?;
            let flags: Vec<bool> = raw.iter().map(|l| l.flagged).collect();
            Ok(enforce_primacy(raw, &flags))
        }
        _ => {
            let flags = detect_binary(tokens, backend)?;
            classify_labels(tokens, &flags, backend)
        }
    }
}

/// Labels for `src_tokens` derived from an aligned correction.
pub fn labels_from_reference(src_tokens: &[Token], tgt_tokens: &[Token]) -> Vec<TokenLabel> {
    let mut labels: Vec<TokenLabel> = (0..src_tokens.len()).map(|i| TokenLabel::ok(i, 1.0)).collect();
    for al in absorb_inserts(gec::align_tokens(src_tokens, tgt_tokens)) {
        if al.kind == AlignKind::Match {
            continue;
        }
        let source = gec::group_text(&src_tokens[al.src.clone()]);
        let edits = gec::char_edit_script(&source, &gec::group_text(&tgt_tokens[al.tgt.clone()]));
        let tag = gec::derive_tag(&al, &edits, &source).unwrap_or(ErrorTag::Unk);
        let suggestion = crate::text::render(&tgt_tokens[al.tgt.clone()]);
        for i in al.src.clone() {
            labels[i] = TokenLabel {
                token_index: i,
                flagged: true,
                tag,
                suggestion: Some(suggestion.clone()),
                hint: tag.hint().to_string(),
                confidence: 1.0,
            };
        }
    }
    labels
}

/// Labels live on source tokens, so a missing word is reported on the
/// source token after it (or before it, at the end of the text).
fn absorb_inserts(alignments: Vec<TokenAlignment>) -> Vec<TokenAlignment> {
    let mut out: Vec<TokenAlignment> = Vec::with_capacity(alignments.len());
    let mut pending: Option<Range<usize>> = None;
    for mut al in alignments {
        if al.kind == AlignKind::Insert {
            let start = pending.map_or(al.tgt.start, |p| p.start);
            pending = Some(start..al.tgt.end);
            continue;
        }
        if let Some(p) = pending.take() {
            al.tgt.start = p.start;
            al.kind = absorbed_kind(al.kind);
        }
        out.push(al);
    }
    if let (Some(p), Some(last)) = (pending, out.last_mut()) {
        last.tgt.end = p.end;
        last.kind = absorbed_kind(last.kind);
    }
    out
}

fn absorbed_kind(kind: AlignKind) -> AlignKind {
    match kind {
        AlignKind::Match | AlignKind::Delete => AlignKind::Substitute,
        other => other,
    }
}
