//! CSV ingestion and report records.
//!
//! Machine output is JSON lines. Every line is an envelope
//! `{schema_version, command, seed, kind, payload}`; `kind` names the
//! payload type (`header`, `pair`, `ordering`, `gaussianity`, `trial`,
//! `summary`, and `timing` when requested).

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DirectionModel, PairDataset};
use crate::search::{DirectionEstimate, GaussianityCheck, Ordering};
use crate::serde_float;
use crate::synth::{SuccessReport, TrialRecord};

pub const SCHEMA_VERSION: u32 = 1;

const MISSING: [&str; 8] = ["", "NA", "N/A", "na", "NaN", "nan", "null", "."];

/// A CSV file held as raw text; columns are parsed on selection so that
/// unrelated non-numeric columns do not get in the way.
#[derive(Debug, Clone)]
pub struct CsvTable {
    headers: Vec<String>,
    records: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let mut records = Vec::new();
        for rec in reader.records() {
            records.push(rec?.iter().map(str::to_string).collect());
        }
        Ok(Self { headers, records })
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    /// Values of one column; `None` marks a missing or non-finite entry.
    pub fn column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let k = self
            .headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::invalid(format!("no column named '{name}'")))?;
        self.records
            .iter()
            .enumerate()
            .map(|(i, rec)| {
                let cell = rec.get(k).map(String::as_str).unwrap_or("");
                if MISSING.contains(&cell) {
                    return Ok(None);
                }
                let v: f64 = cell.parse().map_err(|_| {
                    Error::invalid(format!("column '{name}' is not numeric: '{cell}' on data row {}", i + 1))
                })?;
                Ok(v.is_finite().then_some(v))
            })
            .collect()
    }

    /// Listwise-complete rows of the named columns.
    pub fn select(&self, columns: &[String]) -> Result<Ingested> {
        let cols = columns.iter().map(|c| self.column(c)).collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::new();
        let mut rejected = 0;
        for i in 0..self.records.len() {
            let row: Option<Vec<f64>> = cols.iter().map(|c| c[i]).collect();
            match row {
                Some(r) => rows.push(r),
                None => rejected += 1,
            }
        }
        if rows.is_empty() {
            return Err(Error::invalid(format!("no complete rows for columns {columns:?}")));
        }
        Ok(Ingested { labels: columns.to_vec(), rows, rejected })
    }

    pub fn pair(&self, a: &str, b: &str) -> Result<Ingested> {
        self.select(&[a.to_string(), b.to_string()])
    }
}

/// Rows that survived listwise deletion.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub labels: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub rejected: usize,
}

impl Ingested {
    pub fn into_pair(self) -> Result<PairDataset> {
        if self.labels.len() != 2 {
            return Err(Error::invalid(format!("expected 2 columns, got {}", self.labels.len())));
        }
        let rows = self.rows.iter().map(|r| [r[0], r[1]]).collect();
        let [a, b]: [String; 2] = self.labels.try_into().expect("two labels");
        PairDataset::new(rows, [a, b])
    }
}

pub fn ingest_csv(path: impl AsRef<Path>, columns: &[String]) -> Result<Ingested> {
    CsvTable::read(path)?.select(columns)
}

/// One analyzed pair, with the winning hyperparameters in grid-fraction
/// and absolute form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub labels: [String; 2],
    pub winner: DirectionModel,
    pub decided: bool,
    /// `"a -> b"`, or `"undecided"`.
    pub direction: String,
    /// Best log-marginal of M1 (`labels[0] → labels[1]`) and of M2.
    #[serde(with = "serde_float")]
    pub log_ml_m1: f64,
    #[serde(with = "serde_float")]
    pub log_ml_m2: f64,
    pub tau1_frac: f64,
    pub tau1: f64,
    pub tau2_frac: f64,
    pub tau2: f64,
    pub sigma12: f64,
    #[serde(with = "serde_float")]
    pub mc_se: f64,
    pub n: usize,
    pub rejected_rows: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl PairReport {
    pub fn new(data: &PairDataset, est: &DirectionEstimate, rejected_rows: usize) -> Self {
        let labels = data.labels().clone();
        let direction = if est.decided {
            let (cause, effect) = match est.winner {
                DirectionModel::M1 => (&labels[0], &labels[1]),
                DirectionModel::M2 => (&labels[1], &labels[0]),
            };
            format!("{cause} -> {effect}")
        } else {
            "undecided".to_string()
        };
        let var = [data.sample_variance(0), data.sample_variance(1)];
        let fracs = est.best_tau_fracs.unwrap_or_else(|| {
            [(est.best_hyper.tau_indvdl[0] / var[0]).sqrt(), (est.best_hyper.tau_indvdl[1] / var[1]).sqrt()]
        });
        Self {
            labels,
            winner: est.winner,
            decided: est.decided,
            direction,
            log_ml_m1: est.best_per_model[0].log_ml,
            log_ml_m2: est.best_per_model[1].log_ml,
            tau1_frac: fracs[0],
            tau1: est.best_hyper.tau_indvdl[0],
            tau2_frac: fracs[1],
            tau2: est.best_hyper.tau_indvdl[1],
            sigma12: est.best_hyper.sigma12,
            mc_se: est.best_mc_se,
            n: data.n(),
            rejected_rows,
            wall_ms: None,
        }
    }
}

/// Gaussianity comparison for one pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianityReport {
    pub labels: [String; 2],
    #[serde(flatten)]
    pub check: GaussianityCheck,
    pub n: usize,
    pub rejected_rows: usize,
}

/// Experiment summary without the per-trial records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub trials: usize,
    pub successes: usize,
    pub success_pct: f64,
    pub se_pct: f64,
}

impl From<&SuccessReport> for SummaryRecord {
    fn from(r: &SuccessReport) -> Self {
        Self { trials: r.trials, successes: r.successes, success_pct: r.success_pct, se_pct: r.se_pct }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub kind: String,
    pub payload: T,
}

/// Writes envelopes for one command, one JSON object per line.
pub struct JsonLines<'a> {
    out: &'a mut dyn Write,
    command: &'a str,
    seed: u64,
}

impl<'a> JsonLines<'a> {
    pub fn new(out: &'a mut dyn Write, command: &'a str, seed: u64) -> Self {
        Self { out, command, seed }
    }

    pub fn emit<T: Serialize>(&mut self, kind: &str, payload: &T) -> Result<()> {
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            command: self.command.to_string(),
            seed: self.seed,
            kind: kind.to_string(),
            payload,
        };
        serde_json::to_writer(&mut *self.out, &env)?;
        self.out.write_all(b"\n")?;
        Ok(())
    }
}

fn tau_cell(frac: f64, label: &str) -> String {
    if frac == 0.0 {
        "0".to_string()
    } else {
        format!("{frac:.1}^2 var({label})")
    }
}

/// Human-readable table of pair reports.
pub fn write_pair_table(out: &mut dyn Write, reports: &[PairReport]) -> Result<()> {
    writeln!(
        out,
        "{:<24} {:<24} {:>22} {:>22} {:>7} {:>12} {:>12} {:>8}",
        "pair", "estimated", "tau1", "tau2", "sigma12", "logML(M1)", "logML(M2)", "mc_se"
    )?;
    for r in reports {
        let pair = format!("({}, {})", r.labels[0], r.labels[1]);
        writeln!(
            out,
            "{:<24} {:<24} {:>22} {:>22} {:>7.1} {:>12.3} {:>12.3} {:>8.3}",
            pair,
            r.direction,
            tau_cell(r.tau1_frac, &r.labels[0]),
            tau_cell(r.tau2_frac, &r.labels[1]),
            r.sigma12,
            r.log_ml_m1,
            r.log_ml_m2,
            r.mc_se
        )?;
        let mut notes = vec![format!("n={}", r.n)];
        if r.rejected_rows > 0 {
            notes.push(format!("{} incomplete rows dropped", r.rejected_rows));
        }
        if let Some(ms) = r.wall_ms {
            notes.push(format!("{:.0} ms", ms));
        }
        writeln!(out, "{:<24} {}", "", notes.join(", "))?;
    }
    Ok(())
}

pub fn write_ordering_table(out: &mut dyn Write, ordering: &Ordering) -> Result<()> {
    let items: Vec<String> = ordering.order.iter().zip(&ordering.wins).map(|(l, w)| format!("{l} ({w})")).collect();
    writeln!(out, "ordering [{}]: {}", ordering.method, items.join(" > "))?;
    if ordering.tie_broken {
        writeln!(out, "warning: tied win counts (cycle or undecided pairs), ties broken by label")?;
    }
    Ok(())
}

pub fn write_trial_table(out: &mut dyn Write, records: &[TrialRecord]) -> Result<()> {
    writeln!(
        out,
        "{:>5} {:>5} {:>9} {:>7} {:>12} {:>12}",
        "trial", "truth", "estimated", "correct", "best", "runner-up"
    )?;
    for r in records {
        writeln!(
            out,
            "{:>5} {:>5} {:>9} {:>7} {:>12.3} {:>12.3}",
            r.trial, r.truth, r.estimated, r.correct, r.best_log_ml, r.runner_up_log_ml
        )?;
    }
    Ok(())
}

pub fn write_summary_table(out: &mut dyn Write, s: &SummaryRecord) -> Result<()> {
    writeln!(out, "successful discoveries: {}/{} = {:.1}% (se {:.2})", s.successes, s.trials, s.success_pct, s.se_pct)?;
    Ok(())
}

pub fn write_gaussianity_table(out: &mut dyn Write, reports: &[GaussianityReport]) -> Result<()> {
    writeln!(out, "{:<24} {:>14} {:>14} {:>18}", "pair", "laplace logML", "gauss logML", "gaussian preferred")?;
    for r in reports {
        writeln!(
            out,
            "{:<24} {:>14.3} {:>14.3} {:>18}",
            format!("({}, {})", r.labels[0], r.labels[1]),
            r.check.laplace_best_log_ml,
            r.check.gaussian_best_log_ml,
            r.check.gaussian_preferred
        )?;
    }
    Ok(())
}
