use std::collections::HashMap;
use std::path::Path;

use crate::devanagari::{normalize, tokenize, CleanText};
use crate::error::{read_to_string, Error, Result};

/// Word-specific splits: a sandhified token and the split annotated for it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordSplitDict {
    entries: HashMap<String, CleanText>,
}

impl WordSplitDict {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entry. The key must normalize to a single token; `+` in the
    /// split is a word break.
    pub fn insert(&mut self, word: &str, split: &str) -> Result<()> {
        let key = normalize(word);
        match key.tokens().as_slice() {
            [single] => {
                let value = normalize(&split.replace('+', " "));
                if value.is_empty() {
                    return Err(Error::InvalidArgument(format!("empty split for {word:?}")));
                }
                self.entries.insert((*single).to_string(), value);
                Ok(())
            }
            [] => Err(Error::InvalidArgument("empty dictionary word".into())),
            _ => Err(Error::InvalidArgument(format!("dictionary word {word:?} is not a single token"))),
        }
    }

    /// Parses `word\tsplit` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut dict = WordSplitDict::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 2 {
                return Err(Error::parse(
                    origin,
                    i + 1,
                    format!("expected 2 tab-separated columns, found {}", cols.len()),
                ));
            }
            dict.insert(cols[0], cols[1])
                .map_err(|e| Error::parse(origin, i + 1, e.to_string()))?;
        }
        Ok(dict)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&read_to_string(path)?, &path.display().to_string())
    }

    pub fn get(&self, word: &str) -> Option<&CleanText> {
        self.entries.get(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Replaces every token equal to a dictionary key by its split, in one
/// left-to-right pass. Returns the new text and the number of replacements.
pub fn apply_word_specific(text: &CleanText, dict: &WordSplitDict) -> (CleanText, usize) {
    let mut replaced = 0;
    let out: Vec<&str> = tokenize(text)
        .into_iter()
        .map(|t| match dict.get(t) {
            Some(split) => {
                replaced += 1;
                split.as_str()
            }
            None => t,
        })
        .collect();
    (CleanText::from_clean_tokens(out), replaced)
}
