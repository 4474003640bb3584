//! Human evaluation aggregates: scaled-ranking counts and best-worst scores.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quality {
    CoherenceReadability,
    FactualConsistency,
    KeywordCapture,
    Overall,
}

impl Quality {
    pub const ALL: [Quality; 4] = [
        Quality::CoherenceReadability,
        Quality::FactualConsistency,
        Quality::KeywordCapture,
        Quality::Overall,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Quality::CoherenceReadability => "coherence_readability",
            Quality::FactualConsistency => "factual_consistency",
            Quality::KeywordCapture => "keyword_capture",
            Quality::Overall => "overall",
        }
    }
}

impl fmt::Display for Quality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Quality::ALL
            .into_iter()
            .find(|q| q.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown quality {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rating {
    pub evaluator: String,
    pub system: String,
    pub quality: Quality,
    score: u8,
}

impl Rating {
    pub fn new(evaluator: impl Into<String>, system: impl Into<String>, quality: Quality, score: u8) -> Result<Self> {
        if !(1..=5).contains(&score) {
            return Err(Error::InvalidArgument(format!("score {score} is outside 1..=5")));
        }
        Ok(Rating {
            evaluator: evaluator.into(),
            system: system.into(),
            quality,
            score,
        })
    }

    pub fn score(&self) -> u8 {
        self.score
    }
}

/// "Very good" (4) or better.
pub const DEFAULT_THRESHOLD: u8 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledCount {
    pub system: String,
    pub high: usize,
    pub low: usize,
    pub n: usize,
}

/// Per system, how many ratings of `quality` reach `threshold`. Systems are
/// listed in order of first appearance. Ratings of other qualities are
/// ignored; an error is returned if none remain.
pub fn scaled_counts(ratings: &[Rating], quality: Quality, threshold: u8) -> Result<Vec<ScaledCount>> {
    let mut out: Vec<ScaledCount> = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for r in ratings.iter().filter(|r| r.quality == quality) {
        let i = *index.entry(&r.system).or_insert_with(|| {
            out.push(ScaledCount {
                system: r.system.clone(),
                high: 0,
                low: 0,
                n: 0,
            });
            out.len() - 1
        });
        let c = &mut out[i];
        c.n += 1;
        if r.score >= threshold {
            c.high += 1;
        } else {
            c.low += 1;
        }
    }
    if out.is_empty() {
        return Err(Error::Empty("ratings for the requested quality"));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vote {
    Best,
    Worst,
}

impl FromStr for Vote {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "best" | "1" | "+1" => Ok(Vote::Best),
            "worst" | "-1" => Ok(Vote::Worst),
            other => Err(Error::InvalidArgument(format!("unknown vote {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BWVote {
    pub evaluator: String,
    pub system: String,
    pub vote: Vote,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BestWorst {
    pub best: usize,
    pub worst: usize,
}

impl BestWorst {
    pub fn score(&self) -> i64 {
        self.best as i64 - self.worst as i64
    }
}

/// Best and worst counts per system. Systems listed in `systems` but never
/// voted for appear with a score of 0.
pub fn best_worst<'a>(votes: &[BWVote], systems: impl IntoIterator<Item = &'a str>) -> BTreeMap<String, BestWorst> {
    let mut out: BTreeMap<String, BestWorst> =
        systems.into_iter().map(|s| (s.to_string(), BestWorst::default())).collect();
    for v in votes {
        let e = out.entry(v.system.clone()).or_default();
        match v.vote {
            Vote::Best => e.best += 1,
            Vote::Worst => e.worst += 1,
        }
    }
    out
}

/// Descending by score; equal scores in lexicographic order of the label.
pub fn rank_systems(scores: &BTreeMap<String, BestWorst>) -> Vec<(String, i64)> {
    let mut v: Vec<(String, i64)> = scores.iter().map(|(s, bw)| (s.clone(), bw.score())).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v
}

fn csv_records(text: &str, origin: &str, expected: &[&str]) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(crate::corpus::delimiter_of(text))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_ascii_lowercase).collect();
    if headers != expected {
        return Err(Error::parse(origin, 1, format!("expected header {}", expected.join(","))));
    }
    rdr.records()
        .enumerate()
        .map(|(i, r)| {
            r.map(|r| (i + 2, r))
                .map_err(|e| Error::parse(origin, i + 2, e.to_string()))
        })
        .collect()
}

/// Reads `evaluator,system,quality,score` rows.
pub fn read_ratings(text: &str, origin: &str) -> Result<Vec<Rating>> {
    csv_records(text, origin, &["evaluator", "system", "quality", "score"])?
        .into_iter()
        .map(|(line, r)| {
            let at = |e: Error| Error::parse(origin, line, e.to_string());
            let score: u8 = r[3]
                .parse()
                .map_err(|_| Error::parse(origin, line, format!("bad score {:?}", &r[3])))?;
            Rating::new(&r[0], &r[1], r[2].parse().map_err(at)?, score).map_err(at)
        })
        .collect()
}

/// Reads `evaluator,system,vote` rows; a vote is `best`/`worst` or `1`/`-1`.
pub fn read_votes(text: &str, origin: &str) -> Result<Vec<BWVote>> {
    csv_records(text, origin, &["evaluator", "system", "vote"])?
        .into_iter()
        .map(|(line, r)| {
            Ok(BWVote {
                evaluator: r[0].to_string(),
                system: r[1].to_string(),
                vote: r[2].parse().map_err(|e: Error| Error::parse(origin, line, e.to_string()))?,
            })
        })
        .collect()
}

pub fn scaled_report(counts: &[ScaledCount]) -> String {
    let mut s = String::from("system\thigh\tlow\tn\n");
    for c in counts {
        s.push_str(&format!("{}\t{}\t{}\t{}\n", c.system, c.high, c.low, c.n));
    }
    s
}

/// Best-worst table in rank order.
pub fn best_worst_report(scores: &BTreeMap<String, BestWorst>) -> String {
    let mut s = String::from("rank\tsystem\tbest\tworst\tscore\n");
    for (i, (system, score)) in rank_systems(scores).into_iter().enumerate() {
        let bw = scores[&system];
        s.push_str(&format!("{}\t{system}\t{}\t{}\t{score}\n", i + 1, bw.best, bw.worst));
    }
    s
}
