use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use samksepa_core::corpus::{
    dedup_records, first_sentence_pairs, group_paragraphs, journal_triples, lm_records, paragraphs,
    read_journal_rows, read_lm_corpus, read_pairs, shuffle_split, split_sizes_checked, write_lm_corpus,
    write_pairs, DocSummaryPair, SentenceRecord, SplitSizes,
};
use samksepa_core::human_eval::{
    best_worst, best_worst_report, read_ratings, read_votes, scaled_counts, scaled_report, Quality,
};
use samksepa_core::ledger::{early_stop, fit_class, load_ledger, EarlyStop};
use samksepa_core::rouge::{rouge_batch, Variant};
use samksepa_core::sandhi::{split_report_many, RuleSet, SandhiSplitter, SplitStats, WordSplitDict};
use samksepa_core::summetrics::{
    assess_suitability, compression_rate, corpus_stats, novel_ngram_pct, read_assessments, AssessmentTally,
    Category, NoveltyMode, DEFAULT_WORTHY,
};
use samksepa_core::{normalize, CleanText, Error};

use crate::files::{join_paragraphs, read, read_tsv_rows, sources, stage_paths, write_manifest, write_output};
use crate::{CliError, CliResult, Command, InputArgs, Settings};

pub fn dispatch(cmd: &Command, s: &Settings, stdout: &mut dyn Write) -> CliResult<String> {
    match cmd {
        Command::Clean(input) => clean(input, s).map(|r| r.summary),
        Command::SplitSandhi { rules, dict, input } => {
            split_sandhi(input, rules.as_deref(), dict.as_deref(), s).map(|r| r.summary)
        }
        Command::BuildLm { input, ratio } => build_lm(input, *ratio, s),
        Command::BuildSum {
            lm,
            journal,
            journal_base_id,
            ratio,
            expect_train,
            expect_test,
        } => {
            let expected = expect_train
                .zip(*expect_test)
                .map(|(train, test)| SplitSizes { train, test });
            build_sum(lm.as_deref(), journal.as_deref(), *journal_base_id, *ratio, expected, s)
        }
        Command::Stats {
            lm,
            pairs,
            assessments,
            multiset,
        } => stats(lm.as_deref(), pairs.as_deref(), assessments.as_deref(), *multiset, s),
        Command::Rouge {
            pairs,
            reference,
            hypothesis,
            detail,
        } => rouge(pairs.as_deref(), reference.as_deref(), hypothesis.as_deref(), *detail, s, stdout),
        Command::Ledger {
            files,
            patience,
            min_delta,
            epsilon,
        } => ledger(
            files,
            EarlyStop {
                patience: *patience,
                min_delta: *min_delta,
            },
            *epsilon,
            s,
        ),
        Command::Humaneval {
            ratings,
            votes,
            threshold,
        } => humaneval(ratings.as_deref(), votes.as_deref(), *threshold, s),
        Command::Pipeline => pipeline(s),
    }
}

pub struct StageResult {
    pub summary: String,
    pub manifest: PathBuf,
}

fn split_paragraphs(raw: &str) -> Vec<CleanText> {
    raw.replace("\r\n", "\n")
        .split("\n\n")
        .map(normalize)
        .filter(|p| !p.is_empty())
        .collect()
}

fn clean(input: &InputArgs, s: &Settings) -> CliResult<StageResult> {
    let dir = s.out.join("clean");
    let mut written = Vec::new();
    let (mut files, mut paras, mut tokens) = (0, 0, 0);
    for src in sources(input, s)? {
        let outputs = stage_paths(&dir, &src)?;
        for (inp, outp) in src.inputs.iter().zip(&outputs) {
            let cleaned = split_paragraphs(&read(inp)?);
            paras += cleaned.len();
            tokens += cleaned.iter().map(CleanText::token_count).sum::<usize>();
            write_output(outp, join_paragraphs(&cleaned))?;
            files += 1;
        }
        written.push((src.spec, outputs));
    }
    let manifest = write_manifest(&dir, &written)?;
    Ok(StageResult {
        summary: format!(
            "clean: {files} files, {paras} paragraphs, {tokens} tokens -> {}",
            dir.display()
        ),
        manifest,
    })
}

fn split_sandhi(input: &InputArgs, rules: Option<&Path>, dict: Option<&Path>, s: &Settings) -> CliResult<StageResult> {
    let rules = match rules.or(s.config.rules.as_deref()) {
        Some(p) => RuleSet::load(p)?,
        None => RuleSet::shipped(),
    };
    let audit = rules.audit();
    if !audit.unreachable.is_empty() {
        log::info!("{} rules cannot match normalized text", audit.unreachable.len());
    }
    let dict = dict
        .or(s.config.dict.as_deref())
        .map(WordSplitDict::load)
        .transpose()?;
    let splitter = SandhiSplitter::new(rules, dict);

    let dir = s.out.join("split");
    let mut stats = SplitStats::default();
    let (mut before, mut after) = (Vec::new(), Vec::new());
    let mut written = Vec::new();
    for src in sources(input, s)? {
        let outputs = stage_paths(&dir, &src)?;
        for (inp, outp) in src.inputs.iter().zip(&outputs) {
            let paras = split_paragraphs(&read(inp)?);
            let split: Vec<CleanText> = paras.iter().map(|p| splitter.split(p, &mut stats)).collect();
            write_output(outp, join_paragraphs(&split))?;
            before.extend(paras);
            after.extend(split);
        }
        written.push((src.spec, outputs));
    }
    let manifest = write_manifest(&dir, &written)?;

    let report = split_report_many(&before, &after, &stats.fires);
    let mut t = String::from("metric\tvalue\n");
    let _ = writeln!(t, "total_before\t{}", report.total_before);
    let _ = writeln!(t, "total_after\t{}", report.total_after);
    let _ = writeln!(t, "unique_before\t{}", report.unique_before);
    let _ = writeln!(t, "unique_after\t{}", report.unique_after);
    let _ = writeln!(t, "word_specific\t{}", stats.word_specific);
    let _ = writeln!(t, "rule_fires\t{}", stats.fires.total());
    write_output(&dir.join("report.tsv"), t)?;

    let mut f = String::from("line\tpattern\treplacement\tkind\tfires\n");
    for (i, n) in &report.rule_fire_counts {
        let r = &splitter.rules().rules()[*i];
        let _ = writeln!(f, "{}\t{}\t{}\t{}\t{n}", r.line(), r.pattern(), r.replacement(), r.kind().as_str());
    }
    write_output(&dir.join("rule_fires.tsv"), f)?;

    Ok(StageResult {
        summary: format!(
            "split-sandhi: {} -> {} tokens, {} word splits, {} rule fires -> {}",
            report.total_before,
            report.total_after,
            stats.word_specific,
            stats.fires.total(),
            dir.display()
        ),
        manifest,
    })
}

fn lm_files(records: &[SentenceRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_lm_corpus(&mut buf, records).expect("writing to memory");
    buf
}

fn build_lm(input: &InputArgs, ratio: Option<f64>, s: &Settings) -> CliResult<String> {
    let ratio = ratio.unwrap_or(s.config.train_ratio_lm);
    let mut records = Vec::new();
    let mut ranges = String::from("source\tfirst_id\tnext_id\n");
    for src in sources(input, s)? {
        let mut next = src.spec.base_id;
        for inp in &src.inputs {
            let (paras, n) = paragraphs(&read(inp)?, &src.spec, next)?;
            next = n;
            records.extend(lm_records(&paras));
        }
        let _ = writeln!(ranges, "{}\t{}\t{next}", src.spec.name, src.spec.base_id);
    }
    let total = records.len();
    let records = dedup_records(records);
    let dropped = total - records.len();
    let (train, test) = shuffle_split(records.clone(), ratio, s.config.seed)?;

    let dir = s.out.join("lm");
    write_output(&dir.join("corpus.tsv"), lm_files(&records))?;
    write_output(&dir.join("train.tsv"), lm_files(&train))?;
    write_output(&dir.join("test.tsv"), lm_files(&test))?;
    write_output(&dir.join("sources.tsv"), ranges)?;
    Ok(format!(
        "build-lm: {} sentences ({dropped} duplicates dropped), train {}, test {} -> {}",
        records.len(),
        train.len(),
        test.len(),
        dir.display()
    ))
}

fn pair_csv(pairs: &[DocSummaryPair]) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    write_pairs(&mut buf, pairs)?;
    Ok(buf)
}

fn build_sum(
    lm: Option<&Path>,
    journal: Option<&Path>,
    journal_base_id: Option<u64>,
    ratio: Option<f64>,
    expected: Option<SplitSizes>,
    s: &Settings,
) -> CliResult<String> {
    let lm = lm.map(Path::to_path_buf).unwrap_or_else(|| s.out.join("lm").join("corpus.tsv"));
    let records = read_lm_corpus(read(&lm)?.as_bytes(), &lm.display().to_string())?;
    let paras = group_paragraphs(&records);
    let mut pairs: Vec<DocSummaryPair> = paras.iter().filter_map(first_sentence_pairs).collect();
    let from_paragraphs = pairs.len();

    let mut skipped = 0;
    if let Some(j) = journal.or(s.config.journal.as_deref()) {
        let rows = read_journal_rows(&read(j)?, &j.display().to_string())?;
        let built = journal_triples(&rows, journal_base_id.unwrap_or(s.config.journal_base_id));
        skipped = built.skipped;
        pairs.extend(built.pairs);
    }
    if pairs.is_empty() {
        return Err(Error::Empty("document-summary pairs").into());
    }
    let ratio = ratio.unwrap_or(s.config.train_ratio_sum);
    let (sizes, discrepancy) = split_sizes_checked(pairs.len(), ratio, expected)?;
    let (train, test) = shuffle_split(pairs.clone(), ratio, s.config.seed)?;
    debug_assert_eq!(train.len(), sizes.train);

    let dir = s.out.join("sum");
    write_output(&dir.join("pairs.csv"), pair_csv(&pairs)?)?;
    write_output(&dir.join("train.csv"), pair_csv(&train)?)?;
    write_output(&dir.join("test.csv"), pair_csv(&test)?)?;
    let mut summary = format!(
        "build-sum: {} pairs ({from_paragraphs} from paragraphs, {} journal, {skipped} skipped), train {}, test {} -> {}",
        pairs.len(),
        pairs.len() - from_paragraphs,
        sizes.train,
        sizes.test,
        dir.display()
    );
    if let Some(d) = discrepancy {
        let _ = write!(summary, "; {d}");
    }
    Ok(summary)
}

fn source_of(ranges: &[(String, u64, u64)], id: u64) -> &str {
    ranges
        .iter()
        .find(|(_, lo, hi)| (*lo..*hi).contains(&id))
        .map_or("unknown", |r| r.0.as_str())
}

fn read_ranges(path: &Path) -> CliResult<Vec<(String, u64, u64)>> {
    read_tsv_rows(path, 3)?
        .into_iter()
        .filter(|(_, c)| c[0] != "source")
        .map(|(line, c)| {
            let num = |x: &str| {
                x.trim().parse::<u64>().map_err(|_| Error::Parse {
                    origin: path.display().to_string(),
                    line,
                    message: format!("bad id {x:?}"),
                })
            };
            Ok((c[0].clone(), num(&c[1])?, num(&c[2])?))
        })
        .collect()
}

fn stats(
    lm: Option<&Path>,
    pairs: Option<&Path>,
    assessments: Option<&Path>,
    multiset: bool,
    s: &Settings,
) -> CliResult<String> {
    let existing = |p: PathBuf| p.is_file().then_some(p);
    let lm = lm.map(Path::to_path_buf).or_else(|| existing(s.out.join("lm").join("corpus.tsv")));
    let pairs = pairs
        .map(Path::to_path_buf)
        .or_else(|| existing(s.out.join("sum").join("pairs.csv")));
    if lm.is_none() && pairs.is_none() && assessments.is_none() {
        return Err(CliError::Usage("stats needs --lm, --pairs or --assessments".into()));
    }
    let dir = s.out.join("stats");
    let mut parts = Vec::new();

    if let Some(lm) = lm {
        let records = read_lm_corpus(read(&lm)?.as_bytes(), &lm.display().to_string())?;
        let ranges_path = lm.with_file_name("sources.tsv");
        let ranges = if ranges_path.is_file() {
            read_ranges(&ranges_path)?
        } else {
            Vec::new()
        };
        let mut by_source: BTreeMap<&str, Vec<&CleanText>> = BTreeMap::new();
        for r in &records {
            by_source.entry(source_of(&ranges, r.para_id)).or_default().push(&r.sentence);
        }
        let cs = corpus_stats(by_source.into_iter().map(|(k, v)| (k, v.into_iter())));
        write_output(&dir.join("corpus.tsv"), cs.to_tsv())?;
        parts.push(format!(
            "{} sentences, {} tokens, {} unique",
            cs.overall.sentence_count, cs.overall.total_tokens, cs.overall.unique_tokens
        ));
    }

    if let Some(p) = pairs {
        let pairs = read_pairs(&read(&p)?, &p.display().to_string())?;
        let mode = if multiset { NoveltyMode::Multiset } else { NoveltyMode::Set };
        let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
        let compression: Vec<f64> = pairs.iter().map(compression_rate).collect::<Result<_, _>>()?;
        let novel = |n| pairs.iter().filter_map(|p| novel_ngram_pct(p, n, mode).ok()).collect::<Vec<f64>>();
        let (uni, bi) = (novel(1), novel(2));
        let mut t = String::from("metric\tvalue\n");
        let _ = writeln!(t, "pairs\t{}", pairs.len());
        let _ = writeln!(t, "mean_compression\t{:.3}", mean(&compression));
        let _ = writeln!(t, "novel_unigram_pct\t{:.1}", mean(&uni));
        let _ = writeln!(t, "novel_bigram_pct\t{:.1}", mean(&bi));
        let _ = writeln!(t, "bigram_pairs_skipped\t{}", pairs.len() - bi.len());
        let _ = writeln!(t, "novelty_mode\t{}", if multiset { "multiset" } else { "set" });
        write_output(&dir.join("pairs.tsv"), t)?;
        parts.push(format!(
            "{} pairs, novel unigrams {:.1}%",
            pairs.len(),
            mean(&uni)
        ));
    }

    if let Some(a) = assessments {
        let rows = read_assessments(&read(a)?, &a.display().to_string())?;
        let tally: AssessmentTally = rows.iter().map(|r| r.1).collect();
        let suit = assess_suitability(&tally, &DEFAULT_WORTHY)?;
        let mut t = String::from("category\tcount\tpct\n");
        for c in Category::ALL {
            let _ = writeln!(t, "{c}\t{}\t{:.1}", tally.count(c), suit.pct(c));
        }
        let worthy: usize = DEFAULT_WORTHY.iter().map(|&c| tally.count(c)).sum();
        let _ = writeln!(t, "worthy\t{worthy}\t{:.1}", suit.worthy_pct);
        write_output(&dir.join("assessment.tsv"), t)?;
        parts.push(format!("{} assessed, {:.1}% worthy", tally.n(), suit.worthy_pct));
    }
    Ok(format!("stats: {} -> {}", parts.join("; "), dir.display()))
}

fn rouge(
    pairs: Option<&Path>,
    reference: Option<&Path>,
    hypothesis: Option<&Path>,
    detail: bool,
    s: &Settings,
    stdout: &mut dyn Write,
) -> CliResult<String> {
    let rows: Vec<(String, CleanText, CleanText)> = match (pairs, reference, hypothesis) {
        (Some(p), _, _) => read_tsv_rows(p, 3)?
            .into_iter()
            .map(|(_, c)| (c[0].clone(), normalize(&c[1]), normalize(&c[2])))
            .collect(),
        (None, Some(r), Some(h)) => {
            let hyps: BTreeMap<String, String> = read_tsv_rows(h, 2)?
                .into_iter()
                .map(|(_, c)| (c[0].clone(), c[1].clone()))
                .collect();
            read_tsv_rows(r, 2)?
                .into_iter()
                .map(|(_, c)| {
                    let hyp = hyps.get(&c[0]).ok_or_else(|| {
                        Error::InvalidArgument(format!("no hypothesis for id {}", c[0]))
                    })?;
                    Ok((c[0].clone(), normalize(&c[1]), normalize(hyp)))
                })
                .collect::<CliResult<_>>()?
        }
        _ => return Err(CliError::Usage("rouge needs --pairs or both --ref and --hyp".into())),
    };
    let tokens: Vec<(Vec<&str>, Vec<&str>)> = rows.iter().map(|(_, r, h)| (r.tokens(), h.tokens())).collect();
    let scores = rouge_batch(&tokens, &Variant::ALL)?;

    let mut table = String::from("variant\trecall\tprecision\tf1\n");
    for (v, sc) in &scores {
        let _ = writeln!(table, "{v}\t{sc}");
    }
    let dir = s.out.join("rouge");
    write_output(&dir.join("scores.tsv"), &table)?;
    if detail {
        let mut d = String::from("id\tvariant\trecall\tprecision\tf1\n");
        for ((id, _, _), (r, h)) in rows.iter().zip(&tokens) {
            for v in Variant::ALL {
                let _ = writeln!(d, "{id}\t{v}\t{}", v.score(r, h));
            }
        }
        write_output(&dir.join("detail.tsv"), d)?;
    }
    stdout.write_all(table.as_bytes()).map_err(|e| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    })?;
    // stdout carries the table only
    log::info!("rouge: {} pairs -> {}", rows.len(), dir.display());
    Ok(String::new())
}

fn ledger(files: &[PathBuf], cfg: EarlyStop, epsilon: f64, s: &Settings) -> CliResult<String> {
    let dir = s.out.join("ledger");
    let mut summary = String::from("ledger\trows\tbest_epoch\tstop_epoch\tmax_rel_error\tmismatches\n");
    let mut mismatches = 0;
    for f in files {
        let l = load_ledger(f)?;
        let stop = early_stop(&l.records, cfg)?;
        let stem = f
            .file_stem()
            .map(|x| x.to_string_lossy().into_owned())
            .unwrap_or_else(|| "ledger".into());
        let mut t = String::from("epoch\ttrain_loss\teval_loss\tperplexity\tfit\n");
        for r in &l.records {
            let _ = writeln!(
                t,
                "{}\t{}\t{}\t{:.6}\t{}",
                r.epoch,
                r.train_loss,
                r.eval_loss,
                r.eval_loss.exp(),
                fit_class(r, epsilon)
            );
        }
        write_output(&dir.join(format!("{stem}.tsv")), t)?;
        let _ = writeln!(
            summary,
            "{stem}\t{}\t{}\t{}\t{}\t{}",
            l.records.len(),
            stop.best_epoch,
            stop.stop_epoch.map_or("-".to_string(), |e| e.to_string()),
            l.max_relative_error().map_or("-".to_string(), |e| format!("{e:.2e}")),
            l.mismatches.len()
        );
        mismatches += l.mismatches.len();
    }
    write_output(&dir.join("summary.tsv"), summary)?;
    Ok(format!(
        "ledger: {} files, {mismatches} perplexity mismatches -> {}",
        files.len(),
        dir.display()
    ))
}

fn humaneval(ratings: Option<&Path>, votes: Option<&Path>, threshold: u8, s: &Settings) -> CliResult<String> {
    if ratings.is_none() && votes.is_none() {
        return Err(CliError::Usage("humaneval needs --ratings or --votes".into()));
    }
    let dir = s.out.join("humaneval");
    let mut parts = Vec::new();
    let mut systems: Vec<String> = Vec::new();
    if let Some(r) = ratings {
        let ratings = read_ratings(&read(r)?, &r.display().to_string())?;
        for q in Quality::ALL {
            if !ratings.iter().any(|x| x.quality == q) {
                continue;
            }
            let counts = scaled_counts(&ratings, q, threshold)?;
            write_output(&dir.join(format!("scaled_{q}.tsv")), scaled_report(&counts))?;
            parts.push(format!("{q} over {} systems", counts.len()));
        }
        for x in &ratings {
            if !systems.contains(&x.system) {
                systems.push(x.system.clone());
            }
        }
    }
    if let Some(v) = votes {
        let votes = read_votes(&read(v)?, &v.display().to_string())?;
        let bw = best_worst(&votes, systems.iter().map(String::as_str));
        write_output(&dir.join("best_worst.tsv"), best_worst_report(&bw))?;
        parts.push(format!("{} votes over {} systems", votes.len(), bw.len()));
    }
    Ok(format!("humaneval: {} -> {}", parts.join("; "), dir.display()))
}

fn pipeline(s: &Settings) -> CliResult<String> {
    let manifest = s
        .config
        .manifest
        .clone()
        .ok_or_else(|| CliError::Usage("pipeline needs a config with a manifest".into()))?;
    let from = |m: PathBuf| InputArgs {
        files: Vec::new(),
        manifest: Some(m),
        source: "input".into(),
        base_id: 100_000,
        no_paragraph_ids: false,
    };
    let cleaned = clean(&from(manifest), s)?;
    let split = split_sandhi(&from(cleaned.manifest.clone()), None, None, s)?;
    let lm = build_lm(&from(split.manifest.clone()), None, s)?;
    let sum = build_sum(None, None, None, None, None, s)?;
    let st = stats(None, None, None, false, s)?;
    Ok([cleaned.summary, split.summary, lm, sum, st].join("\n"))
}
