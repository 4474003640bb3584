use std::collections::{BTreeMap, HashSet};

use crate::devanagari::{tokenize, CleanText};

use super::engine::RuleFires;

/// Token counts before and after splitting, plus how often each rule fired.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitReport {
    pub total_before: usize,
    pub total_after: usize,
    pub unique_before: usize,
    pub unique_after: usize,
    /// Rule index to fire count; rules that never fired are absent.
    pub rule_fire_counts: BTreeMap<usize, u64>,
}

/// Report for a single text.
pub fn split_report(before: &CleanText, after: &CleanText, fires: &RuleFires) -> SplitReport {
    split_report_many(std::slice::from_ref(before), std::slice::from_ref(after), fires)
}

/// Report over a whole corpus given line by line.
pub fn split_report_many(before: &[CleanText], after: &[CleanText], fires: &RuleFires) -> SplitReport {
    let (total_before, unique_before) = counts(before);
    let (total_after, unique_after) = counts(after);
    SplitReport {
        total_before,
        total_after,
        unique_before,
        unique_after,
        rule_fire_counts: fires.nonzero().collect(),
    }
}

fn counts(texts: &[CleanText]) -> (usize, usize) {
    let mut total = 0;
    let mut unique = HashSet::new();
    for t in texts {
        for tok in tokenize(t) {
            total += 1;
            unique.insert(tok);
        }
    }
    (total, unique.len())
}
