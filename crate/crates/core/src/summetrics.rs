//! Corpus statistics and summary-quality measures.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::corpus::DocSummaryPair;
use crate::devanagari::{tokenize, CleanText};
use crate::error::{Error, Result};

/// Token and sentence counts for one source.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Totals {
    pub total_tokens: usize,
    pub unique_tokens: usize,
    pub sentence_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusStats {
    /// Over all sources; `unique_tokens` is the size of the union vocabulary.
    pub overall: Totals,
    pub per_source: BTreeMap<String, Totals>,
}

fn totals<'a>(sentences: impl IntoIterator<Item = &'a CleanText>, vocab: &mut HashSet<&'a str>) -> Totals {
    let mut local = HashSet::new();
    let mut t = Totals::default();
    for s in sentences {
        t.sentence_count += 1;
        for tok in tokenize(s) {
            t.total_tokens += 1;
            local.insert(tok);
            vocab.insert(tok);
        }
    }
    t.unique_tokens = local.len();
    t
}

/// Counts tokens and sentences per source. Token and sentence totals add up
/// across sources; unique counts do not, since vocabularies overlap.
pub fn corpus_stats<'a, S, I>(sources: impl IntoIterator<Item = (S, I)>) -> CorpusStats
where
    S: Into<String>,
    I: IntoIterator<Item = &'a CleanText>,
{
    let mut vocab = HashSet::new();
    let mut stats = CorpusStats::default();
    for (name, sentences) in sources {
        let t = totals(sentences, &mut vocab);
        let entry = stats.per_source.entry(name.into()).or_default();
        entry.total_tokens += t.total_tokens;
        entry.sentence_count += t.sentence_count;
        // a repeated source name merges; its unique count is then an upper bound
        entry.unique_tokens += t.unique_tokens;
        stats.overall.total_tokens += t.total_tokens;
        stats.overall.sentence_count += t.sentence_count;
    }
    stats.overall.unique_tokens = vocab.len();
    stats
}

impl CorpusStats {
    /// Tab-separated table with a header and a final `total` row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("source\tsentences\ttokens\tunique_tokens\n");
        let row = |name: &str, t: &Totals| {
            format!("{name}\t{}\t{}\t{}\n", t.sentence_count, t.total_tokens, t.unique_tokens)
        };
        for (name, t) in &self.per_source {
            out.push_str(&row(name, t));
        }
        out.push_str(&row("total", &self.overall));
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum NoveltyMode {
    /// Distinct n-grams.
    #[default]
    Set,
    /// Every n-gram occurrence; an occurrence is novel when the document
    /// does not contain that n-gram at all.
    Multiset,
}

/// Percentage of summary n-grams that never occur in the document.
pub fn novel_ngram_pct(pair: &DocSummaryPair, n: usize, mode: NoveltyMode) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n-gram order must be at least 1".into()));
    }
    let summary = tokenize(&pair.summary);
    if summary.len() < n {
        return Err(Error::InvalidArgument(format!(
            "summary has {} tokens, fewer than n = {n}",
            summary.len()
        )));
    }
    let document = tokenize(&pair.document);
    let doc_grams: HashSet<&[&str]> = document.windows(n).collect();
    let (novel, total) = match mode {
        NoveltyMode::Set => {
            let grams: HashSet<&[&str]> = summary.windows(n).collect();
            let novel = grams.iter().filter(|g| !doc_grams.contains(*g)).count();
            (novel, grams.len())
        }
        NoveltyMode::Multiset => {
            let novel = summary.windows(n).filter(|g| !doc_grams.contains(g)).count();
            (novel, summary.len() + 1 - n)
        }
    };
    Ok(100.0 * novel as f64 / total as f64)
}

/// Document tokens per summary token.
pub fn compression_rate(pair: &DocSummaryPair) -> Result<f64> {
    let s = pair.summary.token_count();
    if s == 0 {
        return Err(Error::Empty("summary"));
    }
    Ok(pair.document.token_count() as f64 / s as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Summary,
    Reflective,
    Unrelated,
    Other,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::Summary,
        Category::Reflective,
        Category::Unrelated,
        Category::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Summary => "summary",
            Category::Reflective => "reflective",
            Category::Unrelated => "unrelated",
            Category::Other => "other",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Category::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown category {s:?}")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AssessmentTally {
    counts: [usize; 4],
}

impl AssessmentTally {
    pub fn from_counts(summary: usize, reflective: usize, unrelated: usize, other: usize) -> Self {
        AssessmentTally {
            counts: [summary, reflective, unrelated, other],
        }
    }

    pub fn add(&mut self, c: Category) {
        self.counts[c as usize] += 1;
    }

    pub fn count(&self, c: Category) -> usize {
        self.counts[c as usize]
    }

    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }
}

impl FromIterator<Category> for AssessmentTally {
    fn from_iter<I: IntoIterator<Item = Category>>(iter: I) -> Self {
        let mut t = AssessmentTally::default();
        iter.into_iter().for_each(|c| t.add(c));
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suitability {
    /// One-decimal percentages in [`Category::ALL`] order, summing to 100.
    pub percentages: [f64; 4],
    pub worthy_pct: f64,
}

impl Suitability {
    pub fn pct(&self, c: Category) -> f64 {
        self.percentages[c as usize]
    }
}

pub const DEFAULT_WORTHY: [Category; 2] = [Category::Summary, Category::Reflective];

/// Category percentages rounded to one decimal place, using the largest
/// remainder method so the four values still sum to exactly 100.0.
pub fn assess_suitability(tally: &AssessmentTally, worthy: &[Category]) -> Result<Suitability> {
    let n = tally.n();
    if n == 0 {
        return Err(Error::Empty("assessment tally"));
    }
    // work in tenths of a percent: 1000 units total
    let exact: Vec<(u64, u64)> = tally
        .counts
        .iter()
        .map(|&c| {
            let num = c as u64 * 1000;
            (num / n as u64, num % n as u64)
        })
        .collect();
    let mut units: Vec<u64> = exact.iter().map(|e| e.0).collect();
    let short = 1000 - units.iter().sum::<u64>();
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| exact[b].1.cmp(&exact[a].1).then(a.cmp(&b)));
    for &i in order.iter().take(short as usize) {
        units[i] += 1;
    }
    let worthy: HashSet<Category> = worthy.iter().copied().collect();
    let worthy_units: u64 = Category::ALL
        .iter()
        .filter(|c| worthy.contains(c))
        .map(|&c| units[c as usize])
        .sum();
    let mut percentages = [0.0; 4];
    for (p, u) in percentages.iter_mut().zip(&units) {
        *p = *u as f64 / 10.0;
    }
    Ok(Suitability {
        percentages,
        worthy_pct: worthy_units as f64 / 10.0,
    })
}

/// Reads `pair_id,category` rows. A pair rated twice is an error.
pub fn read_assessments(text: &str, origin: &str) -> Result<Vec<(String, Category)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(crate::corpus::delimiter_of(text))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["pair_id", "category"] {
        return Err(Error::parse(origin, 1, "expected header pair_id,category"));
    }
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(origin, line, e.to_string()))?;
        let id = rec[0].to_string();
        let cat: Category = rec[1].parse().map_err(|e: Error| Error::parse(origin, line, e.to_string()))?;
        if let Some(prev) = seen.insert(id.clone(), line) {
            return Err(Error::parse(origin, line, format!("pair {id} already rated on line {prev}")));
        }
        out.push((id, cat));
    }
    Ok(out)
}
