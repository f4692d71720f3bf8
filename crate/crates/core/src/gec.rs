//! Character-level edit scripts.
//!
//! A script is a list of token alignment groups, each carrying the
//! character edits that turn the group's source text (its tokens joined by
//! single spaces) into its target text. Merges and splits are whole groups,
//! so their edits delete or insert the separating space.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_general_category::{get_general_category, GeneralCategory};

use crate::ged::{self, DetectorBackend, ErrorTag, GedError, TokenLabel};
use crate::lexicon::HAMZA_FAMILY;
use crate::text::{render_tokens, tokenize, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlignKind {
    Match,
    Substitute,
    Insert,
    Delete,
    /// One source token becomes several target tokens.
    Split,
    /// Several source tokens become one target token.
    Merge,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenAlignment {
    pub src: Range<usize>,
    pub tgt: Range<usize>,
    pub kind: AlignKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditOp {
    Substitute,
    Insert,
    Delete,
}

/// One character operation. `pos` indexes the group's source text; inserts
/// at `pos` go before the source scalar at `pos` (or at the end when
/// `pos == len`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharEdit {
    pub pos: usize,
    pub op: EditOp,
    #[serde(rename = "char", default, skip_serializing_if = "Option::is_none")]
    pub ch: Option<char>,
}

impl CharEdit {
    pub fn substitute(pos: usize, ch: char) -> Self {
        CharEdit { pos, op: EditOp::Substitute, ch: Some(ch) }
    }

    pub fn insert(pos: usize, ch: char) -> Self {
        CharEdit { pos, op: EditOp::Insert, ch: Some(ch) }
    }

    pub fn delete(pos: usize) -> Self {
        CharEdit { pos, op: EditOp::Delete, ch: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScriptGroup {
    pub alignment: TokenAlignment,
    pub edits: Vec<CharEdit>,
}

/// Groups that change something, in source order. Tokens not covered by a
/// group are copied unchanged.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EditScript {
    pub groups: Vec<ScriptGroup>,
}

impl EditScript {
    pub fn is_empty(&self) -> bool {
        self.groups.iter().all(|g| g.edits.is_empty())
    }

    pub fn edit_count(&self) -> usize {
        self.groups.iter().map(|g| g.edits.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionResult {
    pub corrected_text: String,
    pub script: EditScript,
    pub labels: Vec<TokenLabel>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScriptError {
    #[error("malformed script: {0}")]
    Malformed(String),
    #[error("derive_tag called on a match alignment")]
    MatchAlignment,
}

#[derive(Debug, Error)]
pub enum CorrectError {
    #[error(transparent)]
    Detection(#[from] GedError),
    #[error(transparent)]
    Script(#[from] ScriptError),
}

/// Unit-cost edit distance over scalars.
pub fn levenshtein(a: &[char], b: &[char]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Minimal character edit list from `src` to `tgt`.
///
/// Walks left to right over a suffix-distance table, taking the first
/// optimal move in the order match, substitute, delete, insert. The order
/// is total, so the script for a pair is unique.
pub fn char_edit_script(src: &str, tgt: &str) -> Vec<CharEdit> {
    let s: Vec<char> = src.chars().collect();
    let t: Vec<char> = tgt.chars().collect();
    let (n, m) = (s.len(), t.len());
    let w = m + 1;
    // suffix[i * w + j] = distance(s[i..], t[j..])
    let mut suffix = vec![0usize; (n + 1) * w];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            suffix[i * w + j] = if i == n {
                m - j
            } else if j == m {
                n - i
            } else {
                let diag = suffix[(i + 1) * w + j + 1] + usize::from(s[i] != t[j]);
                diag.min(suffix[(i + 1) * w + j] + 1).min(suffix[i * w + j + 1] + 1)
            };
        }
    }

    let mut edits = Vec::with_capacity(suffix[0]);
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        let here = suffix[i * w + j];
        if i < n && j < m && s[i] == t[j] && here == suffix[(i + 1) * w + j + 1] {
            i += 1;
            j += 1;
        } else if i < n && j < m && here == suffix[(i + 1) * w + j + 1] + 1 {
            edits.push(CharEdit::substitute(i, t[j]));
            i += 1;
            j += 1;
        } else if i < n && here == suffix[(i + 1) * w + j] + 1 {
            edits.push(CharEdit::delete(i));
            i += 1;
        } else {
            edits.push(CharEdit::insert(i, t[j]));
            j += 1;
        }
    }
    edits
}

/// Applies character edits to one group's source text.
pub fn apply_char_edits(src: &str, edits: &[CharEdit]) -> Result<String, ScriptError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = String::with_capacity(src.len() + edits.len() * 2);
    let mut cursor = 0;
    for (k, e) in edits.iter().enumerate() {
        if e.pos < cursor {
            return Err(ScriptError::Malformed(format!("edit {k} at {} goes backwards (cursor {cursor})", e.pos)));
        }
        let limit = if e.op == EditOp::Insert { chars.len() } else { chars.len().saturating_sub(1) };
        if e.pos > limit || (e.op != EditOp::Insert && chars.is_empty()) {
            return Err(ScriptError::Malformed(format!(
                "edit {k} at {} is beyond group length {}",
                e.pos,
                chars.len()
            )));
        }
        out.extend(&chars[cursor..e.pos]);
        cursor = e.pos;
        match (e.op, e.ch) {
            (EditOp::Insert, Some(c)) => out.push(c),
            (EditOp::Substitute, Some(c)) => {
                out.push(c);
                cursor += 1;
            }
            (EditOp::Delete, _) => cursor += 1,
            (op, None) => return Err(ScriptError::Malformed(format!("edit {k}: {op:?} without a character"))),
        }
    }
    out.extend(&chars[cursor..]);
    Ok(out)
}

/// A group's text: its token surfaces joined by single spaces.
pub fn group_text(tokens: &[Token]) -> String {
    tokens.iter().map(|t| t.surface.as_str()).collect::<Vec<_>>().join(" ")
}

fn normalized_distance(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 0.0;
    }
    levenshtein(&a, &b) as f64 / longest as f64
}

/// Cost of a merge or split group whose surfaces concatenate exactly.
/// Below one insertion, so an exact fusion beats substitute-plus-insert.
const FUSE_COST: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Step {
    Diag,
    /// `k` source tokens concatenate to one target token.
    Merge(usize),
    /// One source token equals `k` concatenated target tokens.
    Split(usize),
    Del,
    Ins,
}

/// Lengths `k >= 2` such that `many[start..start + k]` concatenates to `one`.
fn fusions(one: &str, many: &[Token], start: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut rest = one;
    for (k, t) in many[start..].iter().enumerate() {
        match rest.strip_prefix(t.surface.as_str()) {
            Some(r) => rest = r,
            None => break,
        }
        if rest.is_empty() {
            if k >= 1 {
                out.push(k + 1);
            }
            break;
        }
    }
    out
}

/// Token-level alignment with merge and split detection.
///
/// Edit-distance DP over tokens: substitution costs the normalized
/// character distance, insertion and deletion cost 1, and a run of tokens
/// whose surfaces concatenate exactly to a single token on the other side
/// forms a merge or split group at a fixed lower cost. The path is read
/// forward, preferring diagonal, merge, split, delete, insert on ties.
pub fn align_tokens(src: &[Token], tgt: &[Token]) -> Vec<TokenAlignment> {
    let (n, m) = (src.len(), tgt.len());
    let w = m + 1;
    let sub_cost = |i: usize, j: usize| {
        if src[i].surface == tgt[j].surface {
            0.0
        } else {
            normalized_distance(&src[i].surface, &tgt[j].surface)
        }
    };
    let candidates = |i: usize, j: usize, suffix: &[f64]| -> Vec<(f64, Step)> {
        let mut c = Vec::with_capacity(4);
        if i < n && j < m {
            c.push((sub_cost(i, j) + suffix[(i + 1) * w + j + 1], Step::Diag));
            for k in fusions(&tgt[j].surface, src, i) {
                c.push((FUSE_COST + suffix[(i + k) * w + j + 1], Step::Merge(k)));
            }
            for k in fusions(&src[i].surface, tgt, j) {
                c.push((FUSE_COST + suffix[(i + 1) * w + j + k], Step::Split(k)));
            }
        }
        if i < n {
            c.push((1.0 + suffix[(i + 1) * w + j], Step::Del));
        }
        if j < m {
            c.push((1.0 + suffix[i * w + j + 1], Step::Ins));
        }
        c
    };

    let mut suffix = vec![0f64; (n + 1) * w];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            if i == n && j == m {
                continue;
            }
            suffix[i * w + j] = candidates(i, j, &suffix).into_iter().map(|(c, _)| c).fold(f64::INFINITY, f64::min);
        }
    }

    let mut out = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        let here = suffix[i * w + j];
        let step = candidates(i, j, &suffix)
            .into_iter()
            .find(|(c, _)| *c == here)
            .map(|(_, s)| s)
            .expect("the minimum is one of the candidates");
        let (di, dj, kind) = match step {
            Step::Diag if src[i].surface == tgt[j].surface => (1, 1, AlignKind::Match),
            Step::Diag => (1, 1, AlignKind::Substitute),
            Step::Merge(k) => (k, 1, AlignKind::Merge),
            Step::Split(k) => (1, k, AlignKind::Split),
            Step::Del => (1, 0, AlignKind::Delete),
            Step::Ins => (0, 1, AlignKind::Insert),
        };
        out.push(TokenAlignment { src: i..i + di, tgt: j..j + dj, kind });
        i += di;
        j += dj;
    }
    out
}

/// Aligns `src` with `tgt` and extracts character edits for every
/// non-matching group.
pub fn build_script(src: &[Token], tgt: &[Token]) -> EditScript {
    let groups = align_tokens(src, tgt)
        .into_iter()
        .filter(|al| al.kind != AlignKind::Match)
        .map(|al| {
            let edits = char_edit_script(&group_text(&src[al.src.clone()]), &group_text(&tgt[al.tgt.clone()]));
            ScriptGroup { alignment: al, edits }
        })
        .collect();
    EditScript { groups }
}

/// Regenerates the corrected text.
///
/// A script without edits returns `src_text` unchanged. Otherwise the
/// result is the canonical rendering of the target tokens: one space
/// between tokens and none before punctuation.
pub fn apply_script(src_text: &str, script: &EditScript) -> Result<String, ScriptError> {
    if script.is_empty() {
        return Ok(src_text.to_string());
    }
    let tokens = tokenize(src_text);
    let mut out: Vec<Token> = Vec::with_capacity(tokens.len());
    let mut cursor = 0;
    for (k, group) in script.groups.iter().enumerate() {
        let range = &group.alignment.src;
        if range.start < cursor || range.end > tokens.len() || range.start > range.end {
            return Err(ScriptError::Malformed(format!(
                "group {k} source range {range:?} is out of order or beyond {} tokens",
                tokens.len()
            )));
        }
        out.extend_from_slice(&tokens[cursor..range.start]);
        let target = apply_char_edits(&group_text(&tokens[range.clone()]), &group.edits)?;
        out.extend(tokenize(&target));
        cursor = range.end;
    }
    out.extend_from_slice(&tokens[cursor..]);
    Ok(render_tokens(out.iter().map(|t| (t.surface.as_str(), t.kind))))
}

fn is_punctuation(c: char) -> bool {
    use GeneralCategory::*;
    matches!(
        get_general_category(c),
        ConnectorPunctuation
            | DashPunctuation
            | OpenPunctuation
            | ClosePunctuation
            | InitialPunctuation
            | FinalPunctuation
            | OtherPunctuation
    )
}

const LONG_VOWELS: [char; 3] = ['ا', 'و', 'ي'];

/// Error class of one non-matching group.
///
/// Rule ladder, first match wins: split groups are MERGE errors (the
/// learner ran two words together) and merge groups are SPLIT errors. For
/// single-token substitutions, the scalars touched by the edits decide:
/// hamza family with a real hamza → ORTH_HAMZA; {ة ه} with ة → ORTH_TAA;
/// {ى ي} with ى → ORTH_ALIF_MAQSURA; only long-vowel insertions →
/// ORTH_VOWEL. Any group touching only punctuation → PUNCT. A substitution
/// keeping a shared stem of at least half the longer word → MORPH.
/// Everything else is UNK.
pub fn derive_tag(alignment: &TokenAlignment, edits: &[CharEdit], source: &str) -> Result<ErrorTag, ScriptError> {
    match alignment.kind {
        AlignKind::Match => return Err(ScriptError::MatchAlignment),
        AlignKind::Split => return Ok(ErrorTag::Merge),
        AlignKind::Merge => return Ok(ErrorTag::Split),
        _ => {}
    }
    let src: Vec<char> = source.chars().collect();
    let mut touched = Vec::new();
    for e in edits {
        if e.op != EditOp::Insert {
            touched.push(*src.get(e.pos).ok_or_else(|| {
                ScriptError::Malformed(format!("edit at {} beyond source length {}", e.pos, src.len()))
            })?);
        }
        if let Some(c) = e.ch {
            touched.push(c);
        }
    }
    touched.retain(|c| !c.is_whitespace());
    if touched.is_empty() {
        return Ok(ErrorTag::Unk);
    }
    let all_in = |set: &[char]| touched.iter().all(|c| set.contains(c));
    let any_of = |c: char| touched.contains(&c);

    if alignment.kind == AlignKind::Substitute {
        if all_in(&HAMZA_FAMILY) && touched.iter().any(|&c| c != 'ا') {
            return Ok(ErrorTag::OrthHamza);
        }
        if all_in(&['ة', 'ه']) && any_of('ة') {
            return Ok(ErrorTag::OrthTaa);
        }
        if all_in(&['ى', 'ي']) && any_of('ى') {
            return Ok(ErrorTag::OrthAlifMaqsura);
        }
        if edits.iter().all(|e| e.op == EditOp::Insert) && all_in(&LONG_VOWELS) {
            return Ok(ErrorTag::OrthVowel);
        }
    }
    if touched.iter().all(|&c| is_punctuation(c)) {
        return Ok(ErrorTag::Punct);
    }
    if alignment.kind == AlignKind::Substitute {
        let target: Vec<char> = apply_char_edits(source, edits)?.chars().collect();
        let longest = src.len().max(target.len());
        let stem = longest_common_substring(&src, &target);
        if stem >= 2 && 2 * stem >= longest {
            return Ok(ErrorTag::Morph);
        }
    }
    Ok(ErrorTag::Unk)
}

fn longest_common_substring(a: &[char], b: &[char]) -> usize {
    let mut best = 0;
    let mut prev = vec![0usize; b.len() + 1];
    for ca in a {
        let mut cur = vec![0usize; b.len() + 1];
        for (j, cb) in b.iter().enumerate() {
            if ca == cb {
                cur[j + 1] = prev[j] + 1;
                best = best.max(cur[j + 1]);
            }
        }
        prev = cur;
    }
    best
}

/// Detects errors in `source` and applies every uniquely-resolved
/// suggestion.
pub fn correct(source: &str, backend: &DetectorBackend) -> Result<CorrectionResult, CorrectError> {
    let tokens = tokenize(source);
    let labels = ged::run_cascade(&tokens, backend)?;
    correct_with_labels(source, &tokens, labels)
}

/// Builds the correction from labels already computed for `tokens`.
///
/// Flagged tokens with a suggestion are replaced by it (an empty suggestion
/// deletes the token). A run of adjacent SPLIT labels sharing a suggestion is
/// one split word and produces a single copy. Flagged tokens without a
/// suggestion stay as written and appear in no script group.
pub fn correct_with_labels(
    source: &str,
    tokens: &[Token],
    labels: Vec<TokenLabel>,
) -> Result<CorrectionResult, CorrectError> {
    let mut target: Vec<Token> = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let label = &labels[i];
        match (&label.suggestion, label.flagged) {
            (Some(s), true) => {
                target.extend(tokenize(s));
                i += 1;
                if label.tag == ErrorTag::Split {
                    while labels
                        .get(i)
                        .is_some_and(|next| next.tag == ErrorTag::Split && next.suggestion == label.suggestion)
                    {
                        i += 1;
                    }
                }
            }
            _ => {
                target.push(tokens[i].clone());
                i += 1;
            }
        }
    }
    let script = build_script(tokens, &target);
    let corrected_text = apply_script(source, &script)?;
    Ok(CorrectionResult { corrected_text, script, labels })
}
