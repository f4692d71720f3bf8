//! Shared test tooling: independent oracles, the seeded-error generator and
//! a mock remote detector.
#![allow(dead_code)]

use std::collections::HashSet;
use std::net::SocketAddr;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Plain quadratic Levenshtein table, written independently of the crate.
pub fn oracle_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
            d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
        }
    }
    d[a.len()][b.len()]
}

pub const ARABIC_LETTERS: &[char] = &[
    'ا', 'أ', 'إ', 'آ', 'ء', 'ؤ', 'ئ', 'ب', 'ت', 'ة', 'ث', 'ج', 'ح', 'خ', 'د', 'ذ', 'ر', 'ز', 'س', 'ش', 'ص', 'ض',
    'ط', 'ظ', 'ع', 'غ', 'ف', 'ق', 'ك', 'ل', 'م', 'ن', 'ه', 'و', 'ى', 'ي',
];

pub fn random_word(rng: &mut impl Rng, min: usize, max: usize) -> String {
    let len = rng.random_range(min..=max);
    (0..len).map(|_| *ARABIC_LETTERS.choose(rng).unwrap()).collect()
}

/// Like [`random_word`] but sometimes vowelled with short-vowel marks.
pub fn random_marked_word(rng: &mut impl Rng, min: usize, max: usize) -> String {
    let mut out = String::new();
    for c in random_word(rng, min, max).chars() {
        out.push(c);
        if rng.random_bool(0.15) {
            out.push(*['\u{064E}', '\u{064F}', '\u{0650}', '\u{0651}', '\u{0652}'].choose(rng).unwrap());
        }
    }
    out
}

/// Canonical text: words separated by single spaces, punctuation attached
/// to the preceding word.
pub fn random_text(rng: &mut impl Rng, max_words: usize) -> String {
    let n = rng.random_range(0..=max_words);
    let mut out = String::new();
    for i in 0..n {
        if rng.random_bool(0.12) && i > 0 {
            out.push(*['.', '،', '؟', '!'].choose(rng).unwrap());
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&random_marked_word(rng, 1, 7));
    }
    out
}

/// Derives a target from `src` by applying random word-level and
/// character-level changes, including merges and splits.
pub fn mutate_text(rng: &mut impl Rng, src: &str) -> String {
    let mut words: Vec<String> = src.split(' ').filter(|w| !w.is_empty()).map(str::to_string).collect();
    let changes = rng.random_range(0..=4);
    for _ in 0..changes {
        if words.is_empty() {
            words.push(random_word(rng, 1, 5));
            continue;
        }
        let i = rng.random_range(0..words.len());
        match rng.random_range(0..6) {
            0 if i + 1 < words.len() && !words[i + 1].starts_with(['.', '،', '؟', '!']) => {
                let next = words.remove(i + 1);
                words[i].push_str(&next);
            }
            1 => {
                let chars: Vec<char> = words[i].chars().collect();
                if chars.len() >= 2 && chars.iter().all(|c| ARABIC_LETTERS.contains(c)) {
                    let k = rng.random_range(1..chars.len());
                    let (a, b): (String, String) = (chars[..k].iter().collect(), chars[k..].iter().collect());
                    words[i] = a;
                    words.insert(i + 1, b);
                }
            }
            2 => {
                words.remove(i);
            }
            3 => words.insert(i, random_word(rng, 1, 5)),
            _ => {
                let mut chars: Vec<char> = words[i].chars().collect();
                let k = rng.random_range(0..chars.len());
                if chars[k].is_alphabetic() {
                    chars[k] = *ARABIC_LETTERS.choose(rng).unwrap();
                }
                words[i] = chars.into_iter().collect();
            }
        }
    }
    words.join(" ")
}

// ---------------------------------------------------------------------------
// Seeded rule-covered errors

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Perturbation {
    Hamza,
    Taa,
    AlifMaqsura,
    /// Two words written as one.
    Merge,
    /// One word written as two.
    Split,
}

impl Perturbation {
    pub const ALL: [Perturbation; 5] =
        [Perturbation::Hamza, Perturbation::Taa, Perturbation::AlifMaqsura, Perturbation::Merge, Perturbation::Split];

    pub fn tag_name(self) -> &'static str {
        match self {
            Perturbation::Hamza => "ORTH_HAMZA",
            Perturbation::Taa => "ORTH_TAA",
            Perturbation::AlifMaqsura => "ORTH_ALIF_MAQSURA",
            Perturbation::Merge => "MERGE",
            Perturbation::Split => "SPLIT",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeededCase {
    pub correct: Vec<String>,
    pub perturbed: Vec<String>,
    /// Word positions in `perturbed` that carry the error.
    pub positions: Vec<usize>,
    pub kind: Perturbation,
}

impl SeededCase {
    pub fn correct_text(&self) -> String {
        format!("{}.", self.correct.join(" "))
    }

    pub fn perturbed_text(&self) -> String {
        format!("{}.", self.perturbed.join(" "))
    }
}

const HAMZA_FAMILY: [char; 8] = ['ا', 'أ', 'إ', 'آ', 'ء', 'ؤ', 'ئ', 'ٱ'];
const ALIF_SEATS: [char; 4] = ['ا', 'أ', 'إ', 'آ'];

fn fold(word: &str, class: Perturbation) -> String {
    word.chars()
        .map(|c| match class {
            Perturbation::Hamza if HAMZA_FAMILY.contains(&c) => '*',
            Perturbation::Taa if c == 'ة' => 'ه',
            Perturbation::AlifMaqsura if c == 'ى' => 'ي',
            _ => c,
        })
        .collect()
}

/// Every fix the detection rules could propose for the word at `pos`,
/// written out from the rule definitions: the three letter folds, a split
/// into two lexicon words of at least two letters each, and a join with
/// either neighbour.
fn rule_candidates(lex: &HashSet<String>, words: &[String], pos: usize) -> Vec<(Perturbation, String)> {
    let word = &words[pos];
    let mut out = Vec::new();
    for class in [Perturbation::Hamza, Perturbation::Taa, Perturbation::AlifMaqsura] {
        let key = fold(word, class);
        let mut hits: Vec<&String> = lex.iter().filter(|w| *w != word && fold(w, class) == key).collect();
        hits.sort();
        out.extend(hits.into_iter().map(|w| (class, w.clone())));
    }
    let chars: Vec<char> = word.chars().collect();
    for k in 2..=chars.len().saturating_sub(2) {
        let a: String = chars[..k].iter().collect();
        let b: String = chars[k..].iter().collect();
        if lex.contains(&a) && lex.contains(&b) {
            out.push((Perturbation::Merge, format!("{a} {b}")));
        }
    }
    if pos > 0 {
        let joined = format!("{}{}", words[pos - 1], word);
        if lex.contains(&joined) {
            out.push((Perturbation::Split, joined));
        }
    }
    if pos + 1 < words.len() {
        let joined = format!("{}{}", word, words[pos + 1]);
        if lex.contains(&joined) {
            out.push((Perturbation::Split, joined));
        }
    }
    out
}

fn try_perturb(
    rng: &mut ChaCha8Rng,
    lex: &HashSet<String>,
    correct: &[String],
    kind: Perturbation,
) -> Option<(Vec<String>, Vec<usize>)> {
    let i = rng.random_range(0..correct.len());
    let mut words = correct.to_vec();
    let (positions, fix) = match kind {
        Perturbation::Hamza => {
            let chars: Vec<char> = words[i].chars().collect();
            let seats: Vec<usize> = (0..chars.len()).filter(|&k| ALIF_SEATS.contains(&chars[k])).collect();
            let &k = seats.choose(rng)?;
            let options: Vec<char> = ALIF_SEATS.iter().copied().filter(|&c| c != chars[k]).collect();
            let mut new = chars.clone();
            new[k] = *options.choose(rng)?;
            words[i] = new.into_iter().collect();
            (vec![i], correct[i].clone())
        }
        Perturbation::Taa => {
            words[i] = words[i].strip_suffix('ة').map(|s| format!("{s}ه"))?;
            (vec![i], correct[i].clone())
        }
        Perturbation::AlifMaqsura => {
            words[i] = words[i].strip_suffix('ى').map(|s| format!("{s}ي"))?;
            (vec![i], correct[i].clone())
        }
        Perturbation::Merge => {
            if i + 1 >= words.len() || words[i].chars().count() < 2 || words[i + 1].chars().count() < 2 {
                return None;
            }
            let next = words.remove(i + 1);
            words[i].push_str(&next);
            (vec![i], format!("{} {}", correct[i], correct[i + 1]))
        }
        Perturbation::Split => {
            let chars: Vec<char> = words[i].chars().collect();
            if chars.len() < 4 {
                return None;
            }
            let k = rng.random_range(2..=chars.len() - 2);
            words[i] = chars[..k].iter().collect();
            words.insert(i + 1, chars[k..].iter().collect());
            (vec![i, i + 1], correct[i].clone())
        }
    };
    // Exactly one rule may apply, with exactly one fix: the original text.
    for &p in &positions {
        if lex.contains(&words[p]) || rule_candidates(lex, &words, p) != vec![(kind, fix.clone())] {
            return None;
        }
    }
    Some((words, positions))
}

/// Deterministic suite of lexicon sentences, each carrying exactly one
/// rule-covered error, `per_kind` cases per error class.
pub fn seeded_suite(lexicon_words: &[&str], per_kind: usize, seed: u64) -> Vec<SeededCase> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab: Vec<String> = lexicon_words
        .iter()
        .filter(|w| w.chars().all(|c| c.is_alphabetic()))
        .map(|w| w.to_string())
        .collect();
    let lex: HashSet<String> = vocab.iter().cloned().collect();
    let mut cases = Vec::new();
    for kind in Perturbation::ALL {
        let mut made = 0;
        let mut attempts = 0;
        while made < per_kind {
            attempts += 1;
            assert!(attempts < per_kind * 10_000, "cannot generate {kind:?} cases from this lexicon");
            let len = rng.random_range(4..=9);
            let correct: Vec<String> = (0..len).map(|_| vocab.choose(&mut rng).unwrap().clone()).collect();
            if let Some((perturbed, positions)) = try_perturb(&mut rng, &lex, &correct, kind) {
                cases.push(SeededCase { correct, perturbed, positions, kind });
                made += 1;
            }
        }
    }
    cases
}

// ---------------------------------------------------------------------------
// Mock remote services

#[derive(serde::Deserialize)]
struct DetectRequest {
    tokens: Vec<String>,
}

/// Serves a deliberately inconsistent detector: flags every other token,
/// tags every token (OK on some flagged ones, real tags on unflagged ones).
pub fn spawn_mock_detector() -> SocketAddr {
    use axum::{routing::post, Json, Router};
    let app = Router::new()
        .route(
            "/detect",
            post(|Json(req): Json<DetectRequest>| async move {
                let n = req.tokens.len();
                let flags: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
                let tags: Vec<&str> = (0..n)
                    .map(|i| match i % 4 {
                        0 => "OK",
                        1 => "ORTH_HAMZA",
                        2 => "MORPH",
                        _ => "NOT_A_TAG",
                    })
                    .collect();
                let suggestions: Vec<Option<String>> =
                    req.tokens.iter().enumerate().map(|(i, t)| (i % 2 == 0).then(|| format!("{t}!"))).collect();
                let confidences: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37) % 1.3).collect();
                Json(serde_json::json!({
                    "flags": flags, "tags": tags, "suggestions": suggestions, "confidences": confidences
                }))
            }),
        )
        .route(
            "/short",
            post(|| async { Json(serde_json::json!({"flags": [], "tags": [], "suggestions": []})) }),
        )
        .route("/score", post(|| async { Json(serde_json::json!({"level": "B2"})) }));
    spawn(app)
}

fn spawn(app: axum::Router) -> SocketAddr {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_multi_thread().worker_threads(2).enable_all().build().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, app).await.unwrap();
        });
    });
    rx.recv().unwrap()
}
