//! Arabic-aware text handling: normalization for matching, tokenization with
//! scalar offsets, word counting and sentence splitting.
//!
//! All offsets are Unicode scalar indices (`char` positions), never bytes.
//! Normalization is a matching aid; stored and displayed text is never passed
//! through it.

use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};

pub const TATWEEL: char = '\u{0640}';
pub const TAA_MARBUTA: char = 'ة';
pub const HAA: char = 'ه';
pub const ALIF: char = 'ا';

/// Alif carriers folded to bare alif by [`NormProfile::unify_hamza_seats`].
pub const HAMZA_SEATED_ALIFS: [char; 4] = ['أ', 'إ', 'آ', 'ٱ'];

const SENTENCE_TERMINATORS: [char; 4] = ['.', '!', '؟', '?'];
const OPENING_PUNCT: [char; 6] = ['(', '[', '{', '«', '“', '‘'];

/// Which matching folds [`normalize`] applies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormProfile {
    pub strip_diacritics: bool,
    pub strip_tatweel: bool,
    /// Fold أ/إ/آ/ٱ to ا.
    pub unify_hamza_seats: bool,
    /// Fold ة to ه.
    pub unify_taa: bool,
}

impl NormProfile {
    pub const IDENTITY: NormProfile = NormProfile {
        strip_diacritics: false,
        strip_tatweel: false,
        unify_hamza_seats: false,
        unify_taa: false,
    };

    pub const ALL: NormProfile = NormProfile {
        strip_diacritics: true,
        strip_tatweel: true,
        unify_hamza_seats: true,
        unify_taa: true,
    };

    /// Strips diacritics and tatweel but keeps letter identity. Used for
    /// lexicon lookups.
    pub const SURFACE: NormProfile = NormProfile {
        strip_diacritics: true,
        strip_tatweel: true,
        unify_hamza_seats: false,
        unify_taa: false,
    };
}

pub fn is_nonspacing_mark(c: char) -> bool {
    get_general_category(c) == GeneralCategory::NonspacingMark
}

fn is_mark(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::NonspacingMark | GeneralCategory::EnclosingMark | GeneralCategory::SpacingMark
    )
}

/// Returns a normalized copy of `text`. Idempotent for every profile.
pub fn normalize(text: &str, profile: NormProfile) -> String {
    text.chars()
        .filter(|&c| !(profile.strip_diacritics && is_nonspacing_mark(c)))
        .filter(|&c| !(profile.strip_tatweel && c == TATWEEL))
        .map(|c| {
            if profile.unify_hamza_seats && HAMZA_SEATED_ALIFS.contains(&c) {
                ALIF
            } else if profile.unify_taa && c == TAA_MARBUTA {
                HAA
            } else {
                c
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenKind {
    Word,
    Punct,
    Number,
    Latin,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Inclusive scalar offset.
    pub start: usize,
    /// Exclusive scalar offset.
    pub end: usize,
    pub kind: TokenKind,
}

impl Token {
    pub fn new(surface: impl Into<String>, start: usize, end: usize, kind: TokenKind) -> Self {
        Token { surface: surface.into(), start, end, kind }
    }

    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// End-exclusive range of scalar offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpanRange {
    pub start: usize,
    pub end: usize,
}

impl SpanRange {
    pub fn contains(&self, token: &Token) -> bool {
        self.start <= token.start && token.end <= self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Space,
    Letter,
    Latin,
    Digit,
    Mark,
    Punct,
}

fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic()
        || matches!(c as u32, 0x00C0..=0x024F | 0x1E00..=0x1EFF) && c.is_alphabetic()
}

fn classify(c: char) -> CharClass {
    if c.is_whitespace() {
        CharClass::Space
    } else if c.is_numeric() {
        CharClass::Digit
    } else if is_mark(c) {
        CharClass::Mark
    } else if is_latin_letter(c) {
        CharClass::Latin
    } else if c.is_alphabetic() {
        CharClass::Letter
    } else {
        CharClass::Punct
    }
}

/// Splits `text` into word, number, Latin and punctuation tokens.
///
/// Whitespace separates tokens; every punctuation scalar is its own token;
/// runs change token whenever the character class changes. Combining marks
/// continue the current word, number or Latin token.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current: Option<(usize, TokenKind, String)> = None;

    let flush = |current: &mut Option<(usize, TokenKind, String)>, end: usize, out: &mut Vec<Token>| {
        if let Some((start, kind, surface)) = current.take() {
            out.push(Token { surface, start, end, kind });
        }
    };

    for (i, c) in text.chars().enumerate() {
        let class = classify(c);
        let kind = match class {
            CharClass::Space => {
                flush(&mut current, i, &mut tokens);
                continue;
            }
            CharClass::Punct => {
                flush(&mut current, i, &mut tokens);
                tokens.push(Token { surface: c.to_string(), start: i, end: i + 1, kind: TokenKind::Punct });
                continue;
            }
            CharClass::Mark => match &current {
                Some((_, kind, _)) => *kind,
                None => TokenKind::Word,
            },
            CharClass::Letter => TokenKind::Word,
            CharClass::Latin => TokenKind::Latin,
            CharClass::Digit => TokenKind::Number,
        };
        match &mut current {
            Some((_, cur_kind, surface)) if *cur_kind == kind => surface.push(c),
            _ => {
                flush(&mut current, i, &mut tokens);
                current = Some((i, kind, c.to_string()));
            }
        }
    }
    let len = text.chars().count();
    flush(&mut current, len, &mut tokens);
    tokens
}

pub fn count_words(tokens: &[Token]) -> usize {
    tokens.iter().filter(|t| t.is_word()).count()
}

fn is_terminator(token: &Token) -> bool {
    token.kind == TokenKind::Punct
        && token.surface.chars().all(|c| SENTENCE_TERMINATORS.contains(&c))
}

/// Splits a token stream into sentence spans. A sentence ends after a run
/// of terminators (`.`, `!`, `?`, `؟`); trailing material without a
/// terminator forms the last sentence.
pub fn split_sentences(tokens: &[Token]) -> Vec<SpanRange> {
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut iter = tokens.iter().peekable();
    while let Some(token) = iter.next() {
        let s = *start.get_or_insert(token.start);
        if is_terminator(token) {
            let mut end = token.end;
            while let Some(next) = iter.peek() {
                if !is_terminator(next) {
                    break;
                }
                end = next.end;
                iter.next();
            }
            spans.push(SpanRange { start: s, end });
            start = None;
        }
    }
    if let (Some(s), Some(last)) = (start, tokens.last()) {
        spans.push(SpanRange { start: s, end: last.end });
    }
    spans
}

#[cfg(test)]
fn opens(token: &Token) -> bool {
    token.kind == TokenKind::Punct && token.surface.chars().all(|c| OPENING_PUNCT.contains(&c))
}

/// Joins token surfaces canonically: one space between tokens, no space
/// before punctuation (other than opening brackets) and none after an
/// opening bracket.
pub fn render_tokens<'a, I>(tokens: I) -> String
where
    I: IntoIterator<Item = (&'a str, TokenKind)>,
{
    let mut out = String::new();
    let mut prev_opens = true;
    for (surface, kind) in tokens {
        let is_open = kind == TokenKind::Punct && surface.chars().all(|c| OPENING_PUNCT.contains(&c));
        let glue = prev_opens || (kind == TokenKind::Punct && !is_open);
        if !glue {
            out.push(' ');
        }
        out.push_str(surface);
        prev_opens = is_open;
    }
    out
}

pub fn render(tokens: &[Token]) -> String {
    render_tokens(tokens.iter().map(|t| (t.surface.as_str(), t.kind)))
}

/// Byte range of scalar span `[start, end)` within `text`.
pub fn byte_range(text: &str, start: usize, end: usize) -> std::ops::Range<usize> {
    let mut indices = text.char_indices().map(|(b, _)| b).chain(std::iter::once(text.len()));
    let mut b_start = text.len();
    let mut b_end = text.len();
    for (i, b) in indices.by_ref().enumerate() {
        if i == start {
            b_start = b;
        }
        if i == end {
            b_end = b;
            break;
        }
    }
    b_start..b_end
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn opening_punct_helper_agrees_with_renderer() {
        let toks = tokenize("قال (نعم).");
        assert!(opens(&toks[1]));
        assert_eq!(render(&toks), "قال (نعم).");
    }

    #[test]
    fn strips_diacritics() {
        let profile = NormProfile { strip_diacritics: true, ..NormProfile::IDENTITY };
        assert_eq!(normalize("كَتَبَ", profile), "كتب");
    }

    #[test]
    fn latin_is_untouched_by_every_fold() {
        assert_eq!(normalize("abc", NormProfile::ALL), "abc");
    }

    #[test]
    fn folds_taa() {
        let profile = NormProfile { unify_taa: true, ..NormProfile::IDENTITY };
        assert_eq!(normalize("مدرسة", profile), "مدرسه");
    }

    #[test]
    fn folds_hamza_seats_and_tatweel() {
        let profile = NormProfile { unify_hamza_seats: true, strip_tatweel: true, ..NormProfile::IDENTITY };
        assert_eq!(normalize("إنشـــاء أمل آمن", profile), "انشاء امل امن");
    }

    #[test]
    fn tokenizes_sentence_with_period() {
        let toks = tokenize("ذهب الولد.");
        assert_eq!(
            toks,
            vec![
                Token::new("ذهب", 0, 3, TokenKind::Word),
                Token::new("الولد", 4, 9, TokenKind::Word),
                Token::new(".", 9, 10, TokenKind::Punct),
            ]
        );
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \n").is_empty());
        assert_eq!(count_words(&[]), 0);
        assert!(split_sentences(&[]).is_empty());
    }

    #[test]
    fn digits_form_one_number_token() {
        assert_eq!(tokenize("2024"), vec![Token::new("2024", 0, 4, TokenKind::Number)]);
        assert_eq!(tokenize("٢٠٢٤")[0].kind, TokenKind::Number);
    }

    #[test]
    fn mixed_script_splits_on_class_change() {
        let toks = tokenize("العربيةabc12");
        let kinds: Vec<_> = toks.iter().map(|t| t.kind).collect();
        assert_eq!(kinds, vec![TokenKind::Word, TokenKind::Latin, TokenKind::Number]);
    }

    #[test]
    fn diacritics_stay_inside_word() {
        let toks = tokenize("كَتَبَ الدَّرْسَ");
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].surface, "كَتَبَ");
    }

    #[test]
    fn counts_only_words() {
        assert_eq!(count_words(&tokenize("ذهب الولد.")), 2);
        assert_eq!(count_words(&tokenize("ذهب 3 abc ،")), 1);
    }

    #[test]
    fn sentences_split_on_terminators() {
        let toks = tokenize("ذهب. رجع.");
        assert_eq!(split_sentences(&toks).len(), 2);
        let toks = tokenize("ذهب الولد الى البيت");
        assert_eq!(split_sentences(&toks), vec![SpanRange { start: 0, end: toks.last().unwrap().end }]);
    }

    #[test]
    fn terminator_runs_stay_with_their_sentence() {
        let toks = tokenize("حقا؟! نعم... ثم");
        let spans = split_sentences(&toks);
        assert_eq!(spans.len(), 3);
        assert_eq!(spans[0], SpanRange { start: 0, end: 5 });
    }

    #[test]
    fn renders_without_space_before_punct() {
        assert_eq!(render(&tokenize("ذهب   الولد .")), "ذهب الولد.");
    }

    #[test]
    fn byte_range_maps_scalars() {
        let text = "ab ذهب";
        let r = byte_range(text, 3, 6);
        assert_eq!(&text[r], "ذهب");
    }
}
