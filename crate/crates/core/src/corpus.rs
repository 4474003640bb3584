//! LM sentence corpus and document-summary pair construction.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::devanagari::{normalize, segment_sentences, CleanText};
use crate::error::{Error, Result};

/// A corpus source and the integer its paragraph IDs start from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpec {
    pub name: String,
    pub base_id: u64,
    /// `false` for sources (such as Wikipedia dumps) whose articles are not
    /// paragraph-numbered; every paragraph of an article then shares one ID.
    pub has_paragraph_ids: bool,
}

impl SourceSpec {
    pub fn new(name: impl Into<String>, base_id: u64, has_paragraph_ids: bool) -> Self {
        SourceSpec {
            name: name.into(),
            base_id,
            has_paragraph_ids,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paragraph {
    pub id: u64,
    pub text: CleanText,
}

/// One line of the LM corpus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SentenceRecord {
    pub para_id: u64,
    pub sentence: CleanText,
}

impl fmt::Display for SentenceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", self.para_id, self.sentence)
    }
}

/// One row of the summarization corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocSummaryPair {
    pub title: CleanText,
    pub document: CleanText,
    pub summary: CleanText,
    pub id: u64,
}

/// Splits an article on blank lines and numbers its paragraphs.
///
/// Returns the paragraphs and the next free ID. Paragraphs that are empty
/// after cleaning are dropped and do not consume an ID. For a source without
/// paragraph IDs the whole article gets `next_id`.
pub fn paragraphs(article: &str, spec: &SourceSpec, next_id: u64) -> Result<(Vec<Paragraph>, u64)> {
    if next_id < spec.base_id {
        return Err(Error::InvalidArgument(format!(
            "next id {next_id} is below base id {} of source {}",
            spec.base_id, spec.name
        )));
    }
    let article = article.replace("\r\n", "\n");
    let mut out = Vec::new();
    let mut id = next_id;
    for chunk in article.split("\n\n") {
        let text = normalize(chunk);
        if text.is_empty() {
            continue;
        }
        out.push(Paragraph { id, text });
        if spec.has_paragraph_ids {
            id += 1;
        }
    }
    if !spec.has_paragraph_ids && !out.is_empty() {
        id += 1;
    }
    Ok((out, id))
}

/// One record per sentence, in document order, carrying its paragraph ID.
pub fn lm_records(paragraphs: &[Paragraph]) -> Vec<SentenceRecord> {
    paragraphs
        .iter()
        .flat_map(|p| {
            segment_sentences(&p.text)
                .into_iter()
                .map(move |sentence| SentenceRecord {
                    para_id: p.id,
                    sentence,
                })
        })
        .collect()
}

/// Union of two sentence collections keeping first occurrences, `a` first.
pub fn dedup_merge<A, B>(a: A, b: B) -> Vec<CleanText>
where
    A: IntoIterator<Item = CleanText>,
    B: IntoIterator<Item = CleanText>,
{
    let mut seen = HashSet::new();
    a.into_iter()
        .chain(b)
        .filter(|s| seen.insert(s.clone()))
        .collect()
}

/// Drops records whose sentence already occurred earlier.
pub fn dedup_records(records: Vec<SentenceRecord>) -> Vec<SentenceRecord> {
    let mut seen = HashSet::new();
    records
        .into_iter()
        .filter(|r| seen.insert(r.sentence.clone()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSizes {
    pub train: usize,
    pub test: usize,
}

/// `train = floor(n * ratio)`, `test = n - train`.
///
/// Products within 1e-9 of an integer are taken as that integer, so that
/// `200 * 0.99` gives 198 despite binary rounding.
pub fn split_sizes(n: usize, train_ratio: f64) -> Result<SplitSizes> {
    check_ratio(train_ratio)?;
    let exact = n as f64 * train_ratio;
    let nearest = exact.round();
    let train = if (exact - nearest).abs() <= 1e-9 * exact.max(1.0) {
        nearest
    } else {
        exact.floor()
    } as usize;
    let train = train.min(n);
    Ok(SplitSizes {
        train,
        test: n - train,
    })
}

pub(crate) fn check_ratio(ratio: f64) -> Result<()> {
    if ratio.is_finite() && ratio > 0.0 && ratio < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "train ratio must lie strictly between 0 and 1, got {ratio}"
        )))
    }
}

/// Difference between computed split sizes and a previously reported split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitDiscrepancy {
    pub n: usize,
    pub computed: SplitSizes,
    pub reported: SplitSizes,
}

impl SplitDiscrepancy {
    pub fn train_delta(&self) -> i64 {
        self.reported.train as i64 - self.computed.train as i64
    }

    pub fn total_delta(&self) -> i64 {
        (self.reported.train + self.reported.test) as i64 - self.n as i64
    }
}

impl fmt::Display for SplitDiscrepancy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "split of {} records is {}/{} but {}/{} was expected (train {:+}, total {:+})",
            self.n,
            self.computed.train,
            self.computed.test,
            self.reported.train,
            self.reported.test,
            self.train_delta(),
            self.total_delta()
        )
    }
}

/// Computes split sizes and compares them with an expected split, logging a
/// warning when they differ.
pub fn split_sizes_checked(
    n: usize,
    train_ratio: f64,
    expected: Option<SplitSizes>,
) -> Result<(SplitSizes, Option<SplitDiscrepancy>)> {
    let computed = split_sizes(n, train_ratio)?;
    let discrepancy = expected
        .filter(|e| *e != computed)
        .map(|reported| SplitDiscrepancy {
            n,
            computed,
            reported,
        });
    if let Some(d) = &discrepancy {
        log::warn!("{d}");
    }
    Ok((computed, discrepancy))
}

/// Seeded shuffle, then a `split_sizes` partition. The same seed gives the
/// same partition.
pub fn shuffle_split<T>(mut records: Vec<T>, train_ratio: f64, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    if records.is_empty() {
        return Err(Error::Empty("records to split"));
    }
    let sizes = split_sizes(records.len(), train_ratio)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    records.shuffle(&mut rng);
    let test = records.split_off(sizes.train);
    Ok((records, test))
}

/// First sentence as summary, remaining sentences as document. `None` for
/// paragraphs with fewer than two sentences.
pub fn first_sentence_pairs(paragraph: &Paragraph) -> Option<DocSummaryPair> {
    let sentences = segment_sentences(&paragraph.text);
    if sentences.len() < 2 {
        return None;
    }
    let mut iter = sentences.into_iter();
    let summary = iter.next()?;
    let rest: Vec<CleanText> = iter.collect();
    let document = CleanText::from_clean_tokens(rest.iter().map(CleanText::as_str));
    Some(DocSummaryPair {
        title: CleanText::empty(),
        document,
        summary,
        id: paragraph.id,
    })
}

/// A raw journal row; fields are cleaned by [`journal_triples`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JournalRow {
    pub title: String,
    pub document: String,
    pub summary: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JournalBuild {
    pub pairs: Vec<DocSummaryPair>,
    /// Rows dropped for an empty document or summary.
    pub skipped: usize,
}

/// Cleans journal rows into pairs with IDs counting up from `base_id`.
/// Rows with an empty document or summary are skipped and counted.
pub fn journal_triples(rows: &[JournalRow], base_id: u64) -> JournalBuild {
    let mut build = JournalBuild::default();
    let mut id = base_id;
    for (i, row) in rows.iter().enumerate() {
        let document = normalize(&row.document);
        let summary = normalize(&row.summary);
        if document.is_empty() || summary.is_empty() {
            log::warn!("journal row {} skipped: empty document or summary", i + 1);
            build.skipped += 1;
            continue;
        }
        build.pairs.push(DocSummaryPair {
            title: normalize(&row.title),
            document,
            summary,
            id,
        });
        id += 1;
    }
    build
}

/// Groups consecutive records sharing an ID back into paragraphs.
pub fn group_paragraphs(records: &[SentenceRecord]) -> Vec<Paragraph> {
    let mut out: Vec<Paragraph> = Vec::new();
    let mut tokens: Vec<&str> = Vec::new();
    let mut current: Option<u64> = None;
    for r in records {
        if current != Some(r.para_id) {
            if let Some(id) = current {
                out.push(Paragraph {
                    id,
                    text: CleanText::from_clean_tokens(tokens.drain(..)),
                });
            }
            current = Some(r.para_id);
        }
        tokens.push(r.sentence.as_str());
    }
    if let Some(id) = current {
        out.push(Paragraph {
            id,
            text: CleanText::from_clean_tokens(tokens.drain(..)),
        });
    }
    out
}

/// Writes `<para_id>\t<sentence>` lines.
pub fn write_lm_corpus<W: Write>(mut w: W, records: &[SentenceRecord]) -> std::io::Result<()> {
    for r in records {
        writeln!(w, "{r}")?;
    }
    Ok(())
}

pub fn read_lm_corpus<R: BufRead>(r: R, origin: &str) -> Result<Vec<SentenceRecord>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::parse(origin, i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let (id, sentence) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(origin, i + 1, "expected <para_id>\\t<sentence>"))?;
        let para_id = id
            .trim()
            .parse()
            .map_err(|_| Error::parse(origin, i + 1, format!("bad paragraph id {id:?}")))?;
        let sentence = normalize(sentence);
        if sentence.is_empty() {
            return Err(Error::parse(origin, i + 1, "empty sentence"));
        }
        out.push(SentenceRecord { para_id, sentence });
    }
    Ok(out)
}

pub const PAIR_HEADER: [&str; 4] = ["title", "document", "summary", "id"];

/// Writes pairs as CSV with a `title,document,summary,id` header.
pub fn write_pairs<W: Write>(w: W, pairs: &[DocSummaryPair]) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    wtr.write_record(PAIR_HEADER)?;
    for p in pairs {
        wtr.write_record([
            p.title.as_str(),
            p.document.as_str(),
            p.summary.as_str(),
            &p.id.to_string(),
        ])?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads pair CSV; a tab-separated file is accepted when the header line
/// contains a tab.
pub fn read_pairs(text: &str, origin: &str) -> Result<Vec<DocSummaryPair>> {
    let delimiter = delimiter_of(text);
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::parse(origin, 1, format!("missing column {name:?}")))
    };
    let (ti, di, si, ii) = (col("title")?, col("document")?, col("summary")?, col("id")?);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let field = |k: usize| rec.get(k).unwrap_or("");
        let id = field(ii)
            .trim()
            .parse()
            .map_err(|_| Error::parse(origin, line, format!("bad id {:?}", field(ii))))?;
        let pair = DocSummaryPair {
            title: normalize(field(ti)),
            document: normalize(field(di)),
            summary: normalize(field(si)),
            id,
        };
        if pair.document.is_empty() || pair.summary.is_empty() {
            return Err(Error::parse(origin, line, "empty document or summary"));
        }
        out.push(pair);
    }
    Ok(out)
}

/// Reads journal rows (`title,document,summary[,id]`). Rows missing a column
/// are skipped with a warning.
pub fn read_journal_rows(text: &str, origin: &str) -> Result<Vec<JournalRow>> {
    let delimiter = delimiter_of(text);
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::parse(origin, 1, format!("missing column {name:?}")))
    };
    let (ti, di, si) = (col("title")?, col("document")?, col("summary")?);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = match rec {
            Ok(r) => r,
            Err(e) => {
                log::warn!("{origin}:{}: skipped malformed row: {e}", i + 2);
                continue;
            }
        };
        match (rec.get(ti), rec.get(di), rec.get(si)) {
            (Some(t), Some(d), Some(s)) => out.push(JournalRow {
                title: t.to_string(),
                document: d.to_string(),
                summary: s.to_string(),
            }),
            _ => log::warn!("{origin}:{}: skipped row with missing columns", i + 2),
        }
    }
    Ok(out)
}

pub(crate) fn delimiter_of(text: &str) -> u8 {
    match text.lines().next() {
        Some(h) if h.contains('\t') => b'\t',
        _ => b',',
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(ids: bool) -> SourceSpec {
        SourceSpec::new("mkb", 100000, ids)
    }

    #[test]
    fn two_paragraphs_get_consecutive_ids() {
        let (p, next) = paragraphs("क ।\n\nख ।", &spec(true), 100000).unwrap();
        assert_eq!(p.iter().map(|p| p.id).collect::<Vec<_>>(), [100000, 100001]);
        assert_eq!(next, 100002);
    }

    #[test]
    fn one_paragraph_one_id() {
        let (p, _) = paragraphs("क ।\nख ।", &spec(true), 100000).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].text, "क । ख ।");
    }

    #[test]
    fn empty_segments_dropped() {
        let (p, _) = paragraphs("क\n\n\n\nख", &spec(true), 100000).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[1].id, 100001);
        let (p, next) = paragraphs("", &spec(true), 100000).unwrap();
        assert!(p.is_empty());
        assert_eq!(next, 100000);
    }

    #[test]
    fn unnumbered_source_shares_one_id() {
        let (p, next) = paragraphs("क\n\nख\n\nग", &spec(false), 100005).unwrap();
        assert!(p.iter().all(|p| p.id == 100005));
        assert_eq!(next, 100006);
    }

    #[test]
    fn next_id_below_base_is_rejected() {
        assert!(paragraphs("क", &spec(true), 99).is_err());
    }

    #[test]
    fn records_share_paragraph_id() {
        let p = vec![Paragraph {
            id: 17680,
            text: normalize("क ख । ग घ ।"),
        }];
        let r = lm_records(&p);
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|r| r.para_id == 17680));
        assert!(lm_records(&[Paragraph { id: 1, text: CleanText::empty() }]).is_empty());
    }

    #[test]
    fn three_paragraphs_three_ids() {
        let (p, _) = paragraphs("क ।\n\nख ।\n\nग ।", &spec(true), 100000).unwrap();
        let r = lm_records(&p);
        let ids: HashSet<u64> = r.iter().map(|r| r.para_id).collect();
        assert_eq!((r.len(), ids.len()), (3, 3));
    }

    #[test]
    fn dedup_examples() {
        let s = |x: &str| normalize(x);
        assert_eq!(
            dedup_merge([s("क"), s("ख")], [s("ख"), s("ग")]),
            [s("क"), s("ख"), s("ग")]
        );
        assert_eq!(dedup_merge([s("क"), s("ख")], [s("क"), s("ख")]), [s("क"), s("ख")]);
        assert_eq!(dedup_merge([s("क")], Vec::new()), [s("क")]);
    }

    #[test]
    fn split_size_examples() {
        assert_eq!(split_sizes(482517, 0.9).unwrap(), SplitSizes { train: 434265, test: 48252 });
        assert_eq!(split_sizes(10, 0.5).unwrap(), SplitSizes { train: 5, test: 5 });
        assert_eq!(split_sizes(15421, 0.99).unwrap(), SplitSizes { train: 15266, test: 155 });
        assert_eq!(split_sizes(200, 0.99).unwrap(), SplitSizes { train: 198, test: 2 });
        assert_eq!(split_sizes(0, 0.9).unwrap(), SplitSizes { train: 0, test: 0 });
        for bad in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(split_sizes(10, bad).is_err());
        }
    }

    #[test]
    fn discrepancy_is_reported() {
        let expected = SplitSizes { train: 15268, test: 155 };
        let (sizes, d) = split_sizes_checked(15421, 0.99, Some(expected)).unwrap();
        assert_eq!(sizes, SplitSizes { train: 15266, test: 155 });
        let d = d.unwrap();
        assert_eq!((d.train_delta(), d.total_delta()), (2, 2));
        let (_, none) = split_sizes_checked(10, 0.5, Some(SplitSizes { train: 5, test: 5 })).unwrap();
        assert!(none.is_none());
    }

    #[test]
    fn shuffle_split_is_deterministic_and_partitions() {
        let v: Vec<u32> = (0..200).collect();
        let (a1, b1) = shuffle_split(v.clone(), 0.99, 42).unwrap();
        let (a2, b2) = shuffle_split(v.clone(), 0.99, 42).unwrap();
        assert_eq!((&a1, &b1), (&a2, &b2));
        assert_eq!((a1.len(), b1.len()), (198, 2));
        let mut all: Vec<u32> = a1.iter().chain(&b1).copied().collect();
        all.sort();
        assert_eq!(all, v);
        assert!(shuffle_split(Vec::<u32>::new(), 0.5, 1).is_err());
    }

    #[test]
    fn first_sentence_examples() {
        let p = |t: &str| Paragraph { id: 7, text: normalize(t) };
        let pair = first_sentence_pairs(&p("क । ख । ग ।")).unwrap();
        assert_eq!(pair.summary, "क ।");
        assert_eq!(pair.document, "ख । ग ।");
        assert!(pair.title.is_empty());
        assert_eq!(pair.id, 7);
        assert!(first_sentence_pairs(&p("क ख ।")).is_none());
        assert_eq!(first_sentence_pairs(&p("क । ख")).unwrap().document, "ख");
    }

    #[test]
    fn journal_examples() {
        let row = |s: &str| JournalRow {
            title: "शीर्षकम्".into(),
            document: "लेखः ।".into(),
            summary: s.into(),
        };
        let rows: Vec<_> = (0..7).map(|_| row("सारः ।")).collect();
        let b = journal_triples(&rows, 6100000);
        assert_eq!(b.pairs.len(), 7);
        assert_eq!(b.pairs.first().unwrap().id, 6100000);
        assert_eq!(b.pairs.last().unwrap().id, 6100006);
        assert!(journal_triples(&[], 1).pairs.is_empty());
        let b = journal_triples(&[row("सारः"), row(""), row("अन्यः")], 1);
        assert_eq!((b.pairs.len(), b.skipped), (2, 1));
    }

    #[test]
    fn group_paragraphs_inverts_lm_records() {
        let paras = vec![
            Paragraph { id: 1, text: normalize("क । ख ।") },
            Paragraph { id: 2, text: normalize("ग ।") },
        ];
        assert_eq!(group_paragraphs(&lm_records(&paras)), paras);
    }

    #[test]
    fn lm_corpus_io() {
        let recs = vec![SentenceRecord { para_id: 17680, sentence: normalize("क ख ।") }];
        let mut buf = Vec::new();
        write_lm_corpus(&mut buf, &recs).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "17680\tक ख ।\n");
        assert_eq!(read_lm_corpus(&buf[..], "c").unwrap(), recs);
        let err = read_lm_corpus("x\tक\n".as_bytes(), "c.tsv").unwrap_err();
        assert!(err.to_string().starts_with("c.tsv:1:"), "{err}");
    }

    #[test]
    fn pair_csv_quotes_and_reads_back() {
        let pairs = vec![DocSummaryPair {
            title: CleanText::empty(),
            document: normalize("ख । ग ।"),
            summary: normalize("क ।"),
            id: 7100000,
        }];
        let mut buf = Vec::new();
        write_pairs(&mut buf, &pairs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("title,document,summary,id\n"));
        assert_eq!(read_pairs(&text, "p").unwrap(), pairs);
    }

    #[test]
    fn journal_rows_skip_malformed() {
        let text = "title,document,summary\nक,ख ।,ग ।\nonly-one\n";
        let rows = read_journal_rows(text, "j").unwrap();
        assert_eq!(rows.len(), 1);
    }
}
