//! Rule-based sandhi and samyoga splitting.
//!
//! Splitting runs in two phases over [`CleanText`]:
//!
//! 1. word-specific splits from a [`WordSplitDict`] replace whole tokens;
//! 2. common patterns from a [`RuleSet`] are applied once, left to right,
//!    at most one rule per token position.
//!
//! Phase 2 sees the output of phase 1 but nothing is re-applied afterwards.

mod dict;
mod engine;
mod report;
mod rule;

pub use dict::{apply_word_specific, WordSplitDict};
pub use engine::{AuditReport, RuleFires, RuleSet, SHIPPED_RULES};
pub use report::{split_report, split_report_many, SplitReport};
pub use rule::{Anchor, RuleKind, SplitRule};

use crate::devanagari::CleanText;

/// Applies the common patterns of `rules` to `text` once.
pub fn apply_common_patterns(text: &CleanText, rules: &RuleSet) -> CleanText {
    rules.apply(text)
}

/// Both splitting phases with shared fire counters.
#[derive(Debug, Clone)]
pub struct SandhiSplitter {
    dict: WordSplitDict,
    rules: RuleSet,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitStats {
    pub word_specific: usize,
    pub fires: RuleFires,
}

impl SandhiSplitter {
    pub fn new(rules: RuleSet, dict: Option<WordSplitDict>) -> Self {
        SandhiSplitter {
            dict: dict.unwrap_or_default(),
            rules,
        }
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn split(&self, text: &CleanText, stats: &mut SplitStats) -> CleanText {
        let text = if self.dict.is_empty() {
            text.clone()
        } else {
            let (t, n) = apply_word_specific(text, &self.dict);
            stats.word_specific += n;
            t
        };
        self.rules.apply_counted(&text, &mut stats.fires)
    }
}
