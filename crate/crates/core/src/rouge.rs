//! ROUGE-1, ROUGE-2 and ROUGE-L over whitespace tokens.
//!
//! No stemming or stopword removal is done. ROUGE-L uses one LCS over the
//! whole token sequence rather than a sentence-level union.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RougeScore {
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

impl RougeScore {
    /// Builds a score from recall and precision; F1 is their harmonic mean,
    /// or 0 when both are 0.
    pub fn from_rp(recall: f64, precision: f64) -> Self {
        let f1 = if recall + precision == 0.0 {
            0.0
        } else {
            2.0 * recall * precision / (recall + precision)
        };
        RougeScore {
            recall,
            precision,
            f1,
        }
    }

    fn from_counts(hit: usize, ref_total: usize, hyp_total: usize) -> Self {
        if ref_total == 0 || hyp_total == 0 {
            return RougeScore::default();
        }
        RougeScore::from_rp(hit as f64 / ref_total as f64, hit as f64 / hyp_total as f64)
    }
}

impl fmt::Display for RougeScore {
    /// Tab-separated recall, precision, F1 to three decimals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3}\t{:.3}\t{:.3}", self.recall, self.precision, self.f1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    Rouge1,
    Rouge2,
    RougeL,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Rouge1, Variant::Rouge2, Variant::RougeL];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Rouge1 => "rouge-1",
            Variant::Rouge2 => "rouge-2",
            Variant::RougeL => "rouge-l",
        }
    }

    pub fn score<T: Eq + Hash>(self, reference: &[T], hypothesis: &[T]) -> RougeScore {
        match self {
            Variant::Rouge1 => ngram_score(reference, hypothesis, 1),
            Variant::Rouge2 => ngram_score(reference, hypothesis, 2),
            Variant::RougeL => rouge_l(reference, hypothesis),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().trim_start_matches("rouge-") {
            "1" => Ok(Variant::Rouge1),
            "2" => Ok(Variant::Rouge2),
            "l" => Ok(Variant::RougeL),
            _ => Err(Error::InvalidArgument(format!("unknown ROUGE variant {s:?}"))),
        }
    }
}

fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut m = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

/// Clipped n-gram overlap: sum over distinct n-grams of the smaller count.
pub fn ngram_overlap<T: Eq + Hash>(reference: &[T], hypothesis: &[T], n: usize) -> usize {
    let r = ngram_counts(reference, n);
    let h = ngram_counts(hypothesis, n);
    h.iter()
        .map(|(g, &c)| r.get(g).map_or(0, |&rc| rc.min(c)))
        .sum()
}

fn ngram_score<T: Eq + Hash>(reference: &[T], hypothesis: &[T], n: usize) -> RougeScore {
    let total = |len: usize| (len + 1).saturating_sub(n);
    RougeScore::from_counts(
        ngram_overlap(reference, hypothesis, n),
        total(reference.len()),
        total(hypothesis.len()),
    )
}

/// ROUGE-N. `n` must be at least 1. If either side has no n-grams the score
/// is all zeros.
pub fn rouge_n<T: Eq + Hash>(reference: &[T], hypothesis: &[T], n: usize) -> Result<RougeScore> {
    if n == 0 {
        return Err(Error::InvalidArgument("ROUGE-N order must be at least 1".into()));
    }
    Ok(ngram_score(reference, hypothesis, n))
}

/// Length of the longest common subsequence, in O(|a|·|b|) time and
/// O(min) memory.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut row = vec![0usize; short.len() + 1];
    for x in long {
        let mut diag = 0;
        for (j, y) in short.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[short.len()]
}

pub fn rouge_l<T: PartialEq>(reference: &[T], hypothesis: &[T]) -> RougeScore {
    RougeScore::from_counts(
        lcs_len(reference, hypothesis),
        reference.len(),
        hypothesis.len(),
    )
}

/// Per-variant macro average over pairs, in the order `variants` are given.
pub fn rouge_batch<T, R, H>(pairs: &[(R, H)], variants: &[Variant]) -> Result<Vec<(Variant, RougeScore)>>
where
    T: Eq + Hash,
    R: AsRef<[T]>,
    H: AsRef<[T]>,
{
    if pairs.is_empty() {
        return Err(Error::Empty("ROUGE pair list"));
    }
    let n = pairs.len() as f64;
    Ok(variants
        .iter()
        .map(|&v| {
            let (mut r, mut p, mut f) = (0.0, 0.0, 0.0);
            for (reference, hypothesis) in pairs {
                let s = v.score(reference.as_ref(), hypothesis.as_ref());
                r += s.recall;
                p += s.precision;
                f += s.f1;
            }
            let mean = RougeScore {
                recall: r / n,
                precision: p / n,
                f1: f / n,
            };
            (v, mean)
        })
        .collect())
}
