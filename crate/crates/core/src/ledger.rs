//! Epoch-wise training ledgers: perplexity, early stopping, fit labels.

use std::fmt;
use std::path::Path;

use crate::error::{read_to_string, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: u32,
    pub train_loss: f64,
    pub eval_loss: f64,
}

impl EpochRecord {
    pub fn new(epoch: u32, train_loss: f64, eval_loss: f64) -> Self {
        EpochRecord {
            epoch,
            train_loss,
            eval_loss,
        }
    }
}

/// `e^loss`.
pub fn perplexity(loss: f64) -> Result<f64> {
    if !loss.is_finite() {
        return Err(Error::InvalidArgument(format!("loss must be finite, got {loss}")));
    }
    Ok(loss.exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarlyStop {
    pub patience: u32,
    pub min_delta: f64,
}

impl Default for EarlyStop {
    fn default() -> Self {
        EarlyStop {
            patience: 3,
            min_delta: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopPoint {
    pub best_epoch: u32,
    pub stop_epoch: Option<u32>,
}

/// Scans the ledger with a patience counter.
///
/// The counter resets whenever eval loss beats the running minimum by more
/// than `min_delta` and otherwise grows by one; the stop fires at the first
/// epoch where it reaches `patience`. `best_epoch` is the earliest epoch with
/// the lowest eval loss among the epochs actually run, i.e. up to the stop.
pub fn early_stop(ledger: &[EpochRecord], cfg: EarlyStop) -> Result<StopPoint> {
    if ledger.is_empty() {
        return Err(Error::Empty("ledger"));
    }
    if cfg.patience == 0 || cfg.min_delta.is_nan() || cfg.min_delta < 0.0 {
        return Err(Error::InvalidArgument(
            "patience must be at least 1 and min_delta non-negative".into(),
        ));
    }
    let mut running = ledger[0].eval_loss;
    let mut waited = 0;
    let mut stop = None;
    let mut end = ledger.len();
    for (i, r) in ledger.iter().enumerate().skip(1) {
        if r.eval_loss < running - cfg.min_delta {
            running = r.eval_loss;
            waited = 0;
        } else {
            waited += 1;
            if waited >= cfg.patience {
                stop = Some(r.epoch);
                end = i + 1;
                break;
            }
        }
    }
    let best = ledger[..end]
        .iter()
        .fold(&ledger[0], |b, r| if r.eval_loss < b.eval_loss { r } else { b });
    Ok(StopPoint {
        best_epoch: best.epoch,
        stop_epoch: stop,
    })
}

/// Fit label following the literal rule: train loss above eval loss is
/// called overfit, eval loss above train loss underfit. This is the reverse
/// of the usual convention, and the labels say so.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FitClass {
    Overfit,
    Underfit,
    Converged,
}

impl FitClass {
    pub fn as_str(self) -> &'static str {
        match self {
            FitClass::Overfit => "overfit-tl-above-el",
            FitClass::Underfit => "underfit-el-above-tl",
            FitClass::Converged => "converged",
        }
    }
}

impl fmt::Display for FitClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn fit_class(record: &EpochRecord, epsilon: f64) -> FitClass {
    let gap = record.train_loss - record.eval_loss;
    if gap.abs() <= epsilon {
        FitClass::Converged
    } else if gap > 0.0 {
        FitClass::Overfit
    } else {
        FitClass::Underfit
    }
}

/// Relative tolerance for the perplexity cross-check.
pub const PERPLEXITY_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerplexityMismatch {
    pub line: usize,
    pub epoch: u32,
    pub printed: f64,
    pub computed: f64,
}

impl PerplexityMismatch {
    pub fn relative_error(&self) -> f64 {
        (self.printed - self.computed).abs() / self.printed.abs()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ledger {
    pub records: Vec<EpochRecord>,
    /// Printed perplexities, when the file has that column.
    pub printed_perplexity: Option<Vec<f64>>,
    pub mismatches: Vec<PerplexityMismatch>,
}

impl Ledger {
    /// Largest relative error of a printed perplexity against `exp(eval_loss)`.
    pub fn max_relative_error(&self) -> Option<f64> {
        let printed = self.printed_perplexity.as_ref()?;
        self.records
            .iter()
            .zip(printed)
            .map(|(r, &p)| (p - r.eval_loss.exp()).abs() / p.abs())
            .fold(None, |m, e| Some(m.map_or(e, |m: f64| m.max(e))))
    }
}

fn column(headers: &[String], names: &[&str]) -> Option<usize> {
    headers.iter().position(|h| names.contains(&h.as_str()))
}

/// Parses a comma- or tab-separated ledger with a header naming
/// `epoch`, `train_loss`, `eval_loss` and optionally `perplexity`
/// (short names `tl`, `el`, `ppl` are accepted).
pub fn parse_ledger(text: &str, origin: &str) -> Result<Ledger> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (header_line, header) = lines.next().ok_or(Error::Empty("ledger file"))?;
    let delim = if header.contains('\t') { '\t' } else { ',' };
    let headers: Vec<String> = header.split(delim).map(|h| h.trim().to_ascii_lowercase()).collect();
    let need = |names: &[&str]| {
        column(&headers, names).ok_or_else(|| {
            Error::parse(origin, header_line, format!("header lacks a {} column", names[0]))
        })
    };
    let ei = need(&["epoch"])?;
    let ti = need(&["train_loss", "tl"])?;
    let vi = need(&["eval_loss", "el"])?;
    let pi = column(&headers, &["perplexity", "ppl"]);

    let mut ledger = Ledger {
        printed_perplexity: pi.map(|_| Vec::new()),
        ..Ledger::default()
    };
    for (line, row) in lines {
        let cells: Vec<&str> = row.split(delim).map(str::trim).collect();
        if cells.len() != headers.len() {
            return Err(Error::parse(
                origin,
                line,
                format!("expected {} columns, found {}", headers.len(), cells.len()),
            ));
        }
        let num = |k: usize| -> Result<f64> {
            let v: f64 = cells[k]
                .parse()
                .map_err(|_| Error::parse(origin, line, format!("bad number {:?}", cells[k])))?;
            if v.is_finite() && v >= 0.0 {
                Ok(v)
            } else {
                Err(Error::parse(origin, line, format!("value {v} is not a finite non-negative number")))
            }
        };
        let epoch: u32 = cells[ei]
            .parse()
            .map_err(|_| Error::parse(origin, line, format!("bad epoch {:?}", cells[ei])))?;
        if let Some(prev) = ledger.records.last() {
            if epoch <= prev.epoch {
                return Err(Error::parse(
                    origin,
                    line,
                    format!("epoch {epoch} does not follow epoch {}", prev.epoch),
                ));
            }
        }
        let rec = EpochRecord::new(epoch, num(ti)?, num(vi)?);
        if let (Some(pi), Some(printed)) = (pi, ledger.printed_perplexity.as_mut()) {
            let p = num(pi)?;
            printed.push(p);
            let computed = rec.eval_loss.exp();
            let m = PerplexityMismatch {
                line,
                epoch,
                printed: p,
                computed,
            };
            let rel = m.relative_error();
            if rel.is_nan() || rel >= PERPLEXITY_TOLERANCE {
                log::warn!(
                    "{origin}:{line}: perplexity {p} differs from exp({}) = {computed:.6}",
                    rec.eval_loss
                );
                ledger.mismatches.push(m);
            }
        }
        ledger.records.push(rec);
    }
    if ledger.records.is_empty() {
        return Err(Error::Empty("ledger rows"));
    }
    Ok(ledger)
}

pub fn load_ledger(path: impl AsRef<Path>) -> Result<Ledger> {
    let path = path.as_ref();
    parse_ledger(&read_to_string(path)?, &path.display().to_string())
}
