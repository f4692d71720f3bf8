//! Surface-form lexicon with fold indices used by the rule detector.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use crate::text::{normalize, NormProfile};

/// Every scalar that can carry or be a hamza, including bare alif.
pub const HAMZA_FAMILY: [char; 8] = ['ا', 'أ', 'إ', 'آ', 'ء', 'ؤ', 'ئ', 'ٱ'];

const SEED_LEXICON: &str = include_str!("../data/lexicon.txt");

/// The orthographic folds the rule detector knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fold {
    /// Any hamza-family scalar to one placeholder.
    Hamza,
    /// ة to ه.
    Taa,
    /// ى to ي.
    AlifMaqsura,
}

impl Fold {
    pub const ALL: [Fold; 3] = [Fold::Hamza, Fold::Taa, Fold::AlifMaqsura];

    pub fn apply(self, base: &str) -> String {
        base.chars()
            .map(|c| match self {
                Fold::Hamza if HAMZA_FAMILY.contains(&c) => 'ء',
                Fold::Taa if c == 'ة' => 'ه',
                Fold::AlifMaqsura if c == 'ى' => 'ي',
                _ => c,
            })
            .collect()
    }
}

/// Lookup form of a surface: diacritics and tatweel removed.
pub fn base_form(surface: &str) -> String {
    normalize(surface, NormProfile::SURFACE)
}

#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    /// base form -> surface as written in the lexicon
    entries: HashMap<String, String>,
    folds: HashMap<Fold, HashMap<String, BTreeSet<String>>>,
}

impl Lexicon {
    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon::default();
        for w in words {
            lex.insert(w.as_ref());
        }
        lex
    }

    /// Parses the lexicon file format: one surface per line, `#` starts a
    /// comment, blank lines ignored.
    pub fn parse(contents: &str) -> Self {
        Self::from_words(
            contents
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty()),
        )
    }

    pub fn load(path: impl AsRef<Path>) -> std::io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    /// The lexicon shipped with the crate.
    pub fn seed() -> Self {
        Self::parse(SEED_LEXICON)
    }

    pub fn insert(&mut self, surface: &str) {
        let base = base_form(surface);
        if base.is_empty() || self.entries.contains_key(&base) {
            return;
        }
        for fold in Fold::ALL {
            self.folds
                .entry(fold)
                .or_default()
                .entry(fold.apply(&base))
                .or_default()
                .insert(base.clone());
        }
        self.entries.insert(base, surface.to_string());
    }

    pub fn contains(&self, surface: &str) -> bool {
        self.entries.contains_key(&base_form(surface))
    }

    pub fn contains_base(&self, base: &str) -> bool {
        self.entries.contains_key(base)
    }

    /// Lexicon surface for a base form.
    pub fn surface(&self, base: &str) -> Option<&str> {
        self.entries.get(base).map(String::as_str)
    }

    /// Lexicon entries other than `base` that share its key under `fold`,
    /// as lexicon surfaces in sorted order.
    pub fn fold_neighbors(&self, base: &str, fold: Fold) -> Vec<String> {
        let key = fold.apply(base);
        self.folds
            .get(&fold)
            .and_then(|idx| idx.get(&key))
            .map(|set| {
                set.iter()
                    .filter(|b| b.as_str() != base)
                    .filter_map(|b| self.surface(b).map(str::to_string))
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All lexicon surfaces, sorted.
    pub fn words(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.entries.values().map(String::as_str).collect();
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let lex = Lexicon::parse("# header\nإنشاء\n\nمدرسة  # trailing\n");
        assert_eq!(lex.len(), 2);
        assert!(lex.contains("مدرسة"));
        assert!(!lex.contains("# header"));
    }

    #[test]
    fn lookup_ignores_diacritics() {
        let lex = Lexicon::from_words(["كتب"]);
        assert!(lex.contains("كَتَبَ"));
    }

    #[test]
    fn hamza_neighbors() {
        let lex = Lexicon::from_words(["إنشاء", "أمل", "آمل"]);
        assert_eq!(lex.fold_neighbors("انشاء", Fold::Hamza), vec!["إنشاء"]);
        assert_eq!(lex.fold_neighbors("امل", Fold::Hamza).len(), 2);
        assert!(lex.fold_neighbors("إنشاء", Fold::Hamza).is_empty());
    }

    #[test]
    fn seed_lexicon_loads() {
        let lex = Lexicon::seed();
        assert!(lex.len() > 200);
        assert!(lex.contains("إنشاء"));
        assert!(lex.contains("مدرسة"));
        assert!(!lex.contains("انشاء"));
    }
}
