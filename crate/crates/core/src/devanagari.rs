//! Devanagari text normalization, character classes, whitespace tokens and
//! danda-delimited sentences.
//!
//! Everything downstream (sandhi splitting, corpus building, statistics,
//! ROUGE) works on [`CleanText`], so the rules here decide what a "word" and
//! a "sentence" are for the whole toolkit:
//!
//! * a token is a maximal run of non-space characters of clean text;
//! * a danda (`।` or `॥`) is always its own token;
//! * a sentence ends after a danda token.

use std::fmt;

pub const DANDA: char = '\u{0964}';
pub const DOUBLE_DANDA: char = '\u{0965}';

/// Class of a single character with respect to the Devanagari block layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CharClass {
    IndependentVowel,
    Consonant,
    /// Dependent vowel signs and other combining marks (nukta, stress marks).
    Matra,
    Virama,
    /// Anusvara and the candrabindu nasal signs.
    Anusvara,
    Visarga,
    Danda,
    /// ASCII or Devanagari digit.
    Digit,
    Other,
}

impl CharClass {
    pub fn as_str(self) -> &'static str {
        match self {
            CharClass::IndependentVowel => "independent-vowel",
            CharClass::Consonant => "consonant",
            CharClass::Matra => "matra",
            CharClass::Virama => "virama",
            CharClass::Anusvara => "anusvara",
            CharClass::Visarga => "visarga",
            CharClass::Danda => "danda",
            CharClass::Digit => "digit",
            CharClass::Other => "other",
        }
    }
}

impl fmt::Display for CharClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classifies a Unicode scalar value.
///
/// Avagraha (`ऽ`) and the Om sign are grouped with the independent vowels:
/// the avagraha stands for an elided initial `अ` and both occur word-initially
/// or word-internally like a vowel letter. Unassigned code points of the block
/// and the abbreviation signs are `Other`.
pub fn classify_char(c: char) -> CharClass {
    match c as u32 {
        0x30..=0x39 | 0x0966..=0x096F => CharClass::Digit,
        0x0900..=0x0902 => CharClass::Anusvara,
        0x0903 => CharClass::Visarga,
        0x0904..=0x0914 | 0x0960..=0x0961 | 0x0972..=0x0977 | 0x093D | 0x0950 => {
            CharClass::IndependentVowel
        }
        0x0915..=0x0939 | 0x0958..=0x095F | 0x0978..=0x097F => CharClass::Consonant,
        0x093A..=0x093C
        | 0x093E..=0x094C
        | 0x094E..=0x094F
        | 0x0951..=0x0957
        | 0x0962..=0x0963 => CharClass::Matra,
        0x094D => CharClass::Virama,
        0x0964..=0x0965 => CharClass::Danda,
        _ => CharClass::Other,
    }
}

pub fn is_danda(c: char) -> bool {
    c == DANDA || c == DOUBLE_DANDA
}

/// A token made only of danda marks.
pub fn is_danda_token(token: &str) -> bool {
    !token.is_empty() && token.chars().all(is_danda)
}

fn is_zero_width(c: char) -> bool {
    matches!(c, '\u{200B}'..='\u{200D}' | '\u{FEFF}')
}

/// Normalized Devanagari text.
///
/// Holds only Devanagari letters and signs, dandas, digits and single
/// spaces, with every danda separated from its neighbours by a space.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CleanText(String);

impl CleanText {
    /// Normalizes `raw`; equivalent to [`normalize`].
    pub fn new(raw: &str) -> Self {
        normalize(raw)
    }

    pub fn empty() -> Self {
        CleanText(String::new())
    }

    /// Joins already-clean tokens with single spaces.
    pub(crate) fn from_clean_tokens<'a>(tokens: impl IntoIterator<Item = &'a str>) -> Self {
        let mut s = String::new();
        for t in tokens {
            if t.is_empty() {
                continue;
            }
            if !s.is_empty() {
                s.push(' ');
            }
            s.push_str(t);
        }
        CleanText(s)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tokens(&self) -> Vec<&str> {
        tokenize(self)
    }

    pub fn token_count(&self) -> usize {
        self.0.split(' ').filter(|t| !t.is_empty()).count()
    }
}

impl fmt::Display for CleanText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for CleanText {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl PartialEq<str> for CleanText {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for CleanText {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// Cleans raw text into [`CleanText`].
///
/// * `!` and `?` become a danda;
/// * zero-width characters are dropped;
/// * any whitespace, punctuation or symbol becomes a space;
/// * everything else outside the kept classes (Latin letters, other scripts,
///   control characters) is dropped;
/// * dandas are padded with spaces, runs of spaces collapse to one, and the
///   result is trimmed.
///
/// Total and idempotent.
pub fn normalize(raw: &str) -> CleanText {
    let mut spaced = String::with_capacity(raw.len());
    for c in raw.chars() {
        if c == '!' || c == '?' {
            spaced.push(' ');
            spaced.push(DANDA);
            spaced.push(' ');
            continue;
        }
        if is_zero_width(c) {
            continue;
        }
        match classify_char(c) {
            CharClass::Danda => {
                spaced.push(' ');
                spaced.push(c);
                spaced.push(' ');
            }
            CharClass::Other => {
                if c.is_whitespace() || c.is_ascii_punctuation() || is_symbol_or_punct(c) {
                    spaced.push(' ');
                }
            }
            _ => spaced.push(c),
        }
    }
    CleanText::from_clean_tokens(spaced.split(' '))
}

// Non-ASCII punctuation and symbols that commonly separate words in scraped
// text. Letters of other scripts are not in these ranges and are deleted.
fn is_symbol_or_punct(c: char) -> bool {
    matches!(c as u32,
        0x00A0..=0x00BF
        | 0x00D7 | 0x00F7
        | 0x2000..=0x206F
        | 0x2190..=0x2BFF
        | 0x3000..=0x303F
        | 0xFE30..=0xFE4F
        | 0xFF01..=0xFF0F
        | 0xFF1A..=0xFF20
    )
}

/// Whitespace tokens of clean text. Dandas are tokens of their own.
pub fn tokenize(text: &CleanText) -> Vec<&str> {
    text.0.split(' ').filter(|t| !t.is_empty()).collect()
}

/// Splits a paragraph after each danda token.
///
/// Each sentence keeps its terminal danda. A danda that follows another
/// danda is attached to the preceding sentence, so joining the output with
/// spaces gives back the input.
pub fn segment_sentences(paragraph: &CleanText) -> Vec<CleanText> {
    let mut sentences: Vec<Vec<&str>> = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for token in tokenize(paragraph) {
        if is_danda_token(token) {
            if current.is_empty() {
                match sentences.last_mut() {
                    Some(prev) => prev.push(token),
                    None => sentences.push(vec![token]),
                }
            } else {
                current.push(token);
                sentences.push(std::mem::take(&mut current));
            }
        } else {
            current.push(token);
        }
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    sentences
        .into_iter()
        .map(CleanText::from_clean_tokens)
        .collect()
}
