//! M2 annotation format: an `S` line with space-joined source tokens, one
//! `A` line per edit, and a blank line after each sentence.

use std::path::Path;

use qalam_core::text::tokenize;
use qalam_core::ErrorTag;
use thiserror::Error;

use crate::CorpusRecord;

pub const HEADER: &str = "# qalam corpus export (M2). User ids are replaced by one-way keys; \
essay text is not scrubbed of names or numbers.";

const NO_CORRECTION: &str = "-NONE-";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum M2Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("reading {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M2Edit {
    /// Token span `[start, end)` in the source.
    pub start: usize,
    pub end: usize,
    pub tag: ErrorTag,
    /// `None` when the error has no single suggested fix. An empty string
    /// deletes the span.
    pub correction: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct M2Sentence {
    pub tokens: Vec<String>,
    pub edits: Vec<M2Edit>,
}

impl M2Sentence {
    /// Flagged labels become edits; a run of SPLIT labels sharing one
    /// suggestion is a single edit over the run.
    pub fn from_record(record: &CorpusRecord) -> Self {
        let tokens: Vec<String> = tokenize(&record.source_text).into_iter().map(|t| t.surface).collect();
        let mut labels: Vec<_> = record.labels.iter().filter(|l| l.flagged).collect();
        labels.sort_by_key(|l| l.token_index);
        let mut edits: Vec<M2Edit> = Vec::new();
        for l in labels {
            if let Some(prev) = edits.last_mut() {
                if l.tag == ErrorTag::Split
                    && prev.tag == ErrorTag::Split
                    && prev.end == l.token_index
                    && prev.correction == l.suggestion
                {
                    prev.end += 1;
                    continue;
                }
            }
            edits.push(M2Edit {
                start: l.token_index,
                end: l.token_index + 1,
                tag: l.tag,
                correction: l.suggestion.clone(),
            });
        }
        M2Sentence { tokens, edits }
    }
}

pub fn render(sentences: &[M2Sentence]) -> String {
    let mut out = format!("{HEADER}\n\n");
    for s in sentences {
        out.push_str("S ");
        out.push_str(&s.tokens.join(" "));
        out.push('\n');
        for e in &s.edits {
            let correction = e.correction.as_deref().unwrap_or(NO_CORRECTION);
            out.push_str(&format!(
                "A {} {}|||{}|||{}|||REQUIRED|||-NONE-|||0\n",
                e.start,
                e.end,
                e.tag.as_str(),
                correction
            ));
        }
        out.push('\n');
    }
    out
}

pub fn parse(text: &str) -> Result<Vec<M2Sentence>, M2Error> {
    let mut out: Vec<M2Sentence> = Vec::new();
    let mut current: Option<M2Sentence> = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let err = |message: String| M2Error::Syntax { line: lineno, message };
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            out.extend(current.take());
            continue;
        }
        if let Some(rest) = line.strip_prefix('S').filter(|r| r.is_empty() || r.starts_with(' ')) {
            if current.is_some() {
                return Err(err("S line without a blank line before it".into()));
            }
            let tokens = rest.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect();
            current = Some(M2Sentence { tokens, edits: Vec::new() });
        } else if let Some(rest) = line.strip_prefix("A ") {
            let sentence = current.as_mut().ok_or_else(|| err("A line before any S line".into()))?;
            let fields: Vec<&str> = rest.split("|||").collect();
            if fields.len() != 6 {
                return Err(err(format!("expected 6 fields, found {}", fields.len())));
            }
            let mut span = fields[0].split(' ');
            let mut num = |what: &str| -> Result<usize, M2Error> {
                span.next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| err(format!("bad {what} offset in {:?}", fields[0])))
            };
            let (start, end) = (num("start")?, num("end")?);
            if start > end || end > sentence.tokens.len() {
                return Err(err(format!("span {start}..{end} outside {} tokens", sentence.tokens.len())));
            }
            let tag: ErrorTag = fields[1].parse().map_err(|e| err(format!("{e}")))?;
            let correction = match fields[2] {
                NO_CORRECTION => None,
                c => Some(c.to_string()),
            };
            sentence.edits.push(M2Edit { start, end, tag, correction });
        } else {
            return Err(err(format!("unrecognized line {line:?}")));
        }
    }
    out.extend(current);
    Ok(out)
}

pub fn parse_file(path: impl AsRef<Path>) -> Result<Vec<M2Sentence>, M2Error> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| M2Error::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse(&text)
}
