//! Word-level revision diff.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffKind {
    Equal,
    Deleted,
    Inserted,
}

/// A run of tokens sharing one diff kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffOp {
    pub op: DiffKind,
    pub tokens: Vec<String>,
}

/// Longest-common-subsequence diff from `from` to `to`. Within a changed
/// region deletions come before insertions.
pub fn diff_tokens(from: &[String], to: &[String]) -> Vec<DiffOp> {
    let (n, m) = (from.len(), to.len());
    let w = m + 1;
    let mut lcs = vec![0u32; (n + 1) * w];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            lcs[i * w + j] = if from[i] == to[j] {
                lcs[(i + 1) * w + j + 1] + 1
            } else {
                lcs[(i + 1) * w + j].max(lcs[i * w + j + 1])
            };
        }
    }

    let mut out: Vec<DiffOp> = Vec::new();
    let mut push = |op: DiffKind, tok: &String| match out.last_mut() {
        Some(last) if last.op == op => last.tokens.push(tok.clone()),
        _ => out.push(DiffOp { op, tokens: vec![tok.clone()] }),
    };
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        if i < n && j < m && from[i] == to[j] {
            push(DiffKind::Equal, &from[i]);
            i += 1;
            j += 1;
        } else if i < n && (j == m || lcs[(i + 1) * w + j] >= lcs[i * w + j + 1]) {
            push(DiffKind::Deleted, &from[i]);
            i += 1;
        } else {
            push(DiffKind::Inserted, &to[j]);
            j += 1;
        }
    }
    out
}
