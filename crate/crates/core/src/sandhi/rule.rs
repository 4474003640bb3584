use std::collections::BTreeSet;
use std::fmt;

use crate::devanagari::{is_danda, normalize};
use crate::error::{Error, Result};

/// Where in a token a rule's pattern has to sit for the rule to fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Anchor {
    /// The token must equal the pattern.
    WholeWord,
    /// The pattern must end the token.
    WordSuffix,
    /// The pattern must end the token and be followed by a word boundary.
    /// With whitespace tokens this matches exactly like [`Anchor::WordSuffix`];
    /// it is kept distinct because the table marks these rows explicitly.
    WordFinalBoundary,
    /// The first occurrence of the pattern anywhere inside the token.
    Anywhere,
}

impl Anchor {
    pub fn as_str(self) -> &'static str {
        match self {
            Anchor::WholeWord => "whole-word",
            Anchor::WordSuffix => "word-suffix",
            Anchor::WordFinalBoundary => "word-final-boundary",
            Anchor::Anywhere => "anywhere",
        }
    }
}

impl fmt::Display for Anchor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What firing a rule does to the token count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// More tokens out than in.
    Split,
    /// Same number of tokens, different spelling (e.g. `कोदूशं → कीदृशम्`).
    Correction,
    /// Fewer tokens out than in.
    Deletion,
    /// Pattern and replacement are identical.
    NoOp,
}

impl RuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleKind::Split => "split",
            RuleKind::Correction => "correction",
            RuleKind::Deletion => "deletion",
            RuleKind::NoOp => "no-op",
        }
    }
}

/// One row of a split-rule table.
///
/// `pattern` and `replacement` are stored in clean form: a pattern that ends
/// in a danda becomes two tokens (`मस्ति।` is matched as `मस्ति ।`). A pattern
/// holding characters that normalization removes or rewrites can never match
/// clean text; such a rule is kept but marked unreachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRule {
    line: usize,
    raw_pattern: String,
    pattern: Vec<String>,
    table_replacement: Vec<String>,
    replacement: Vec<String>,
    exceptions: BTreeSet<String>,
    anchor: Anchor,
    reachable: bool,
}

impl SplitRule {
    /// Builds a rule from plain strings. `replacement` may use `+` for a word
    /// break and may be empty (the match is deleted).
    pub fn new<I, S>(pattern: &str, replacement: &str, exceptions: I, anchor: Anchor) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self::build(0, pattern, replacement, exceptions, anchor).map_err(Error::InvalidArgument)
    }

    fn build<I, S>(
        line: usize,
        pattern: &str,
        replacement: &str,
        exceptions: I,
        anchor: Anchor,
    ) -> std::result::Result<Self, String>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let raw_pattern = pattern.trim().to_string();
        if raw_pattern.is_empty() {
            return Err("empty pattern".into());
        }
        let clean_pattern = normalize(&raw_pattern);
        let squeezed = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
        let reachable =
            !clean_pattern.is_empty() && squeezed(clean_pattern.as_str()) == squeezed(&raw_pattern);
        let pattern: Vec<String> = if reachable {
            clean_pattern.tokens().into_iter().map(str::to_string).collect()
        } else {
            vec![raw_pattern.clone()]
        };

        let replacement: Vec<String> = normalize(&replacement.replace('+', " "))
            .tokens()
            .into_iter()
            .map(str::to_string)
            .collect();

        let mut exc = BTreeSet::new();
        for e in exceptions {
            let e = e.as_ref().trim();
            if e.is_empty() {
                continue;
            }
            if !e.contains(pattern[0].as_str()) {
                return Err(format!(
                    "exception {e:?} does not contain pattern {:?} and can never apply",
                    pattern[0]
                ));
            }
            exc.insert(e.to_string());
        }

        Ok(SplitRule {
            line,
            raw_pattern,
            table_replacement: replacement.clone(),
            replacement,
            pattern,
            exceptions: exc,
            anchor,
            reachable,
        })
    }

    /// Parses one tab-separated `common_error, correction, exception` row.
    ///
    /// * `+` in the correction becomes a space;
    /// * a trailing `_` on pattern or correction anchors the rule to the word
    ///   end ([`Anchor::WordFinalBoundary`]);
    /// * a correction wrapped in `_` on the left, a pattern ending in a
    ///   danda, a multi-token pattern, or a self-mapping row anchors to
    ///   whole words;
    /// * everything else is a [`Anchor::WordSuffix`] rule;
    /// * exceptions are comma-separated words.
    pub fn parse_row(line: usize, row: &str, origin: &str) -> Result<Self> {
        let cols: Vec<&str> = row.split('\t').collect();
        if cols.len() < 2 || cols.len() > 3 {
            return Err(Error::parse(
                origin,
                line,
                format!("expected 3 tab-separated columns, found {}", cols.len()),
            ));
        }
        let raw_pattern = cols[0].trim();
        let raw_correction = cols[1].trim();
        let exceptions = cols.get(2).copied().unwrap_or("");

        let final_boundary = raw_pattern.ends_with('_') || raw_correction.ends_with('_');
        let left_boundary = raw_pattern.starts_with('_') || raw_correction.starts_with('_');
        let pattern = raw_pattern.trim_matches('_');
        let correction = raw_correction.trim_matches('_');

        let anchor = if left_boundary
            || pattern.ends_with(is_danda)
            || pattern.trim().contains(char::is_whitespace)
            || pattern == correction.replace('+', " ")
        {
            Anchor::WholeWord
        } else if final_boundary {
            Anchor::WordFinalBoundary
        } else {
            Anchor::WordSuffix
        };

        Self::build(line, pattern, correction, exceptions.split(','), anchor)
            .map_err(|m| Error::parse(origin, line, m))
    }

    /// 1-based line in the table this rule came from; 0 when built in code.
    pub fn line(&self) -> usize {
        self.line
    }

    /// The pattern as written in the table, without anchor markers.
    pub fn raw_pattern(&self) -> &str {
        &self.raw_pattern
    }

    pub fn pattern_tokens(&self) -> &[String] {
        &self.pattern
    }

    pub fn pattern(&self) -> String {
        self.pattern.join(" ")
    }

    /// Replacement tokens after closure under the owning rule set.
    pub fn replacement_tokens(&self) -> &[String] {
        &self.replacement
    }

    pub fn replacement(&self) -> String {
        self.replacement.join(" ")
    }

    /// Replacement as the table wrote it, before closure.
    pub fn table_replacement(&self) -> String {
        self.table_replacement.join(" ")
    }

    pub fn exceptions(&self) -> &BTreeSet<String> {
        &self.exceptions
    }

    pub fn anchor(&self) -> Anchor {
        self.anchor
    }

    /// False when the pattern contains characters that never survive
    /// normalization, so the rule cannot fire on clean text.
    pub fn is_reachable(&self) -> bool {
        self.reachable
    }

    pub fn kind(&self) -> RuleKind {
        if self.pattern == self.replacement {
            return RuleKind::NoOp;
        }
        match self.replacement.len().cmp(&self.pattern.len()) {
            std::cmp::Ordering::Greater => RuleKind::Split,
            std::cmp::Ordering::Equal => RuleKind::Correction,
            std::cmp::Ordering::Less => RuleKind::Deletion,
        }
    }

    /// Number of pattern characters, the precedence key.
    pub(crate) fn pattern_len(&self) -> usize {
        self.pattern.iter().map(|t| t.chars().count()).sum()
    }

    pub(crate) fn set_replacement(&mut self, tokens: Vec<String>) {
        self.replacement = tokens;
    }

    /// Tries to match at `tokens[at..]`. Returns the number of tokens
    /// consumed and the text before/after the match inside the first token.
    pub(crate) fn match_at<'t>(&self, tokens: &[&'t str], at: usize) -> Option<Match<'t>> {
        if !self.reachable {
            return None;
        }
        let k = self.pattern.len();
        if at + k > tokens.len() {
            return None;
        }
        if tokens[at + 1..at + k]
            .iter()
            .zip(&self.pattern[1..])
            .any(|(t, p)| *t != p.as_str())
        {
            return None;
        }
        let token = tokens[at];
        if self.exceptions.contains(token) {
            return None;
        }
        let head = self.pattern[0].as_str();
        let (stem, tail) = match self.anchor {
            Anchor::WholeWord => (token == head).then_some(("", ""))?,
            Anchor::WordSuffix | Anchor::WordFinalBoundary => {
                let stem = token.strip_suffix(head)?;
                (stem, "")
            }
            Anchor::Anywhere if k == 1 => {
                let pos = token.find(head)?;
                (&token[..pos], &token[pos + head.len()..])
            }
            Anchor::Anywhere => (token.strip_suffix(head)?, ""),
        };
        Some(Match {
            consumed: k,
            stem,
            tail,
        })
    }

    /// Appends the rewrite of a match to `out`.
    pub(crate) fn rewrite(&self, m: &Match<'_>, out: &mut Vec<String>) {
        let n = self.replacement.len();
        if n == 0 {
            let joined = format!("{}{}", m.stem, m.tail);
            if !joined.is_empty() {
                out.push(joined);
            }
            return;
        }
        for (i, r) in self.replacement.iter().enumerate() {
            let mut t = String::new();
            if i == 0 {
                t.push_str(m.stem);
            }
            t.push_str(r);
            if i == n - 1 {
                t.push_str(m.tail);
            }
            out.push(t);
        }
    }
}

impl fmt::Display for SplitRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: ", self.line)?;
        }
        write!(f, "{} -> {} [{}]", self.pattern(), self.replacement(), self.anchor)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Match<'t> {
    pub consumed: usize,
    pub stem: &'t str,
    pub tail: &'t str,
}
