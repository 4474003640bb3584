use std::collections::HashMap;
use std::path::Path;

use crate::devanagari::{tokenize, CleanText};
use crate::error::{read_to_string, Error, Result};

use super::rule::{Anchor, RuleKind, SplitRule};

/// The split table shipped with the crate.
pub const SHIPPED_RULES: &str = include_str!("../../data/sandhi_rules.tsv");

const HEADER: &str = "common_error";
const MAX_CLOSURE_ROUNDS: usize = 16;
const MAX_REPLACEMENT_TOKENS: usize = 64;

/// How often each rule fired, indexed like [`RuleSet::rules`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleFires {
    counts: Vec<u64>,
}

impl RuleFires {
    pub fn new(rule_count: usize) -> Self {
        RuleFires {
            counts: vec![0; rule_count],
        }
    }

    pub fn record(&mut self, rule: usize) {
        if rule >= self.counts.len() {
            self.counts.resize(rule + 1, 0);
        }
        self.counts[rule] += 1;
    }

    pub fn get(&self, rule: usize) -> u64 {
        self.counts.get(rule).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(rule index, count)` for every rule that fired at least once.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 0)
            .map(|(i, c)| (i, *c))
    }

    pub fn merge(&mut self, other: &RuleFires) {
        for (i, c) in other.nonzero() {
            if i >= self.counts.len() {
                self.counts.resize(i + 1, 0);
            }
            self.counts[i] += c;
        }
    }
}

/// Findings of the load-time audit. None of them is an error; a rule set
/// that cannot be brought to a fixpoint fails to load instead.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    /// Rules whose table replacement was itself rewritten by other rules;
    /// `(rule, table replacement, closed replacement)`.
    pub closed: Vec<(usize, String, String)>,
    /// Rules whose pattern cannot occur in clean text.
    pub unreachable: Vec<usize>,
    /// Self-mapping rows.
    pub no_op: Vec<usize>,
    /// `(rule, earlier rule)` pairs with the same pattern and anchor; the later
    /// rule never fires.
    pub duplicates: Vec<(usize, usize)>,
}

/// An ordered, immutable set of split rules.
///
/// Precedence is longest pattern first, then table order. At each token
/// position the first matching rule fires and its replacement is emitted as
/// is; one left-to-right pass is made over the text.
///
/// At construction each replacement is closed under the set (rewritten
/// until no rule fires on it), then every reachable pattern is checked to
/// be a fixpoint of a second pass. A set failing either step is rejected.
#[derive(Debug, Clone)]
pub struct RuleSet {
    rules: Vec<SplitRule>,
    rank: Vec<usize>,
    by_last_char: HashMap<char, Vec<usize>>,
    anywhere: Vec<usize>,
    audit: AuditReport,
}

impl RuleSet {
    pub fn new(rules: Vec<SplitRule>) -> Result<Self> {
        let mut order: Vec<usize> = (0..rules.len()).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(rules[i].pattern_len()), i));
        let mut rank = vec![0; rules.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }

        let mut by_last_char: HashMap<char, Vec<usize>> = HashMap::new();
        let mut anywhere = Vec::new();
        for &i in &order {
            let rule = &rules[i];
            if !rule.is_reachable() {
                continue;
            }
            if rule.anchor() == Anchor::Anywhere && rule.pattern_tokens().len() == 1 {
                anywhere.push(i);
            } else if let Some(c) = rule.pattern_tokens()[0].chars().last() {
                by_last_char.entry(c).or_default().push(i);
            }
        }

        let mut set = RuleSet {
            rules,
            rank,
            by_last_char,
            anywhere,
            audit: AuditReport::default(),
        };
        set.close_replacements()?;
        set.audit = set.build_audit();
        set.check_fixpoint()?;
        Ok(set)
    }

    /// Parses a rule table. Blank lines, `#` comments and a
    /// `common_error\tcorrection\texception` header are skipped.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            if trimmed.split('\t').next().map(str::trim) == Some(HEADER) {
                continue;
            }
            rules.push(SplitRule::parse_row(i + 1, trimmed, origin)?);
        }
        RuleSet::new(rules)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::parse(&read_to_string(path)?, &path.display().to_string())
    }

    /// The table shipped in `data/sandhi_rules.tsv`.
    pub fn shipped() -> Self {
        Self::parse(SHIPPED_RULES, "sandhi_rules.tsv").expect("shipped rule table loads")
    }

    pub fn rules(&self) -> &[SplitRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn audit(&self) -> &AuditReport {
        &self.audit
    }

    /// Applies the rules in one pass.
    pub fn apply(&self, text: &CleanText) -> CleanText {
        let mut fires = RuleFires::new(self.rules.len());
        self.apply_counted(text, &mut fires)
    }

    /// Applies the rules in one pass, counting every firing into `fires`.
    pub fn apply_counted(&self, text: &CleanText, fires: &mut RuleFires) -> CleanText {
        let tokens = tokenize(text);
        let out = self.rewrite_tokens(&tokens, |i| fires.record(i));
        CleanText::from_clean_tokens(out.iter().map(String::as_str))
    }

    /// Applies the rules in one pass and lists the fired rules in text order.
    pub fn apply_traced(&self, text: &CleanText) -> (CleanText, Vec<usize>) {
        let tokens = tokenize(text);
        let mut trace = Vec::new();
        let out = self.rewrite_tokens(&tokens, |i| trace.push(i));
        (CleanText::from_clean_tokens(out.iter().map(String::as_str)), trace)
    }

    fn rewrite_tokens(&self, tokens: &[&str], mut on_fire: impl FnMut(usize)) -> Vec<String> {
        let mut out = Vec::with_capacity(tokens.len() + tokens.len() / 4);
        let mut at = 0;
        while at < tokens.len() {
            match self.first_match(tokens, at) {
                Some((rule, m)) => {
                    self.rules[rule].rewrite(&m, &mut out);
                    on_fire(rule);
                    at += m.consumed;
                }
                None => {
                    out.push(tokens[at].to_string());
                    at += 1;
                }
            }
        }
        out
    }

    fn first_match<'t>(
        &self,
        tokens: &[&'t str],
        at: usize,
    ) -> Option<(usize, super::rule::Match<'t>)> {
        let last = tokens[at].chars().last()?;
        let bucket = self.by_last_char.get(&last).map(Vec::as_slice).unwrap_or(&[]);
        let (mut b, mut a) = (0, 0);
        // Merge the two precedence-ordered candidate lists.
        while b < bucket.len() || a < self.anywhere.len() {
            let take_bucket = match (bucket.get(b), self.anywhere.get(a)) {
                (Some(&x), Some(&y)) => self.rank[x] < self.rank[y],
                (Some(_), None) => true,
                _ => false,
            };
            let rule = if take_bucket {
                b += 1;
                bucket[b - 1]
            } else {
                a += 1;
                self.anywhere[a - 1]
            };
            if let Some(m) = self.rules[rule].match_at(tokens, at) {
                return Some((rule, m));
            }
        }
        None
    }

    fn close_replacements(&mut self) -> Result<()> {
        for _ in 0..MAX_CLOSURE_ROUNDS {
            let mut changed = false;
            for i in 0..self.rules.len() {
                if !self.rules[i].is_reachable() || self.rules[i].kind() == RuleKind::NoOp {
                    continue;
                }
                let current = self.rules[i].replacement_tokens().to_vec();
                let refs: Vec<&str> = current.iter().map(String::as_str).collect();
                let next = self.rewrite_tokens(&refs, |_| {});
                if next.len() > MAX_REPLACEMENT_TOKENS {
                    return Err(Error::InvalidArgument(format!(
                        "rule replacements do not reach a fixpoint: {} keeps growing",
                        self.rules[i]
                    )));
                }
                if next != current {
                    self.rules[i].set_replacement(next);
                    changed = true;
                }
            }
            if !changed {
                return Ok(());
            }
        }
        let cycling: Vec<String> = self
            .rules
            .iter()
            .filter(|r| {
                let refs: Vec<&str> = r.replacement_tokens().iter().map(String::as_str).collect();
                r.is_reachable() && self.rewrite_tokens(&refs, |_| {}) != r.replacement_tokens()
            })
            .map(|r| r.to_string())
            .collect();
        Err(Error::InvalidArgument(format!(
            "rule replacements do not reach a fixpoint: {}",
            cycling.join("; ")
        )))
    }

    fn check_fixpoint(&self) -> Result<()> {
        for rule in self.rules.iter().filter(|r| r.is_reachable()) {
            let probe = CleanText::from_clean_tokens(rule.pattern_tokens().iter().map(String::as_str));
            let once = self.apply(&probe);
            let twice = self.apply(&once);
            if once != twice {
                return Err(Error::InvalidArgument(format!(
                    "{rule} is not stable under a second pass: {probe} -> {once} -> {twice}"
                )));
            }
        }
        Ok(())
    }

    fn build_audit(&self) -> AuditReport {
        let mut report = AuditReport::default();
        for (i, rule) in self.rules.iter().enumerate() {
            if !rule.is_reachable() {
                report.unreachable.push(i);
                continue;
            }
            if rule.kind() == RuleKind::NoOp {
                report.no_op.push(i);
            }
            let table = rule.table_replacement();
            if table != rule.replacement() {
                report.closed.push((i, table, rule.replacement()));
            }
            if let Some(j) = self.rules[..i].iter().position(|r| {
                r.is_reachable()
                    && r.pattern_tokens() == rule.pattern_tokens()
                    && r.anchor() == rule.anchor()
                    && r.exceptions().is_subset(rule.exceptions())
            }) {
                report.duplicates.push((i, j));
            }
        }
        report
    }
}
