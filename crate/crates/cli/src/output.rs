//! `traces.csv` and `summary.csv`.

use std::path::Path;

use momab_core::{AggregateResult, RegretTrace};

use crate::CliError;

pub const TRACES_FILE: &str = "traces.csv";
pub const SUMMARY_FILE: &str = "summary.csv";

/// 17 significant digits, enough to reproduce any `f64` exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub algorithm: String,
    pub trial: usize,
    pub t: u64,
    pub cumulative_regret: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: String,
    pub t: u64,
    pub mean: f64,
    pub std: f64,
    pub band: f64,
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>, CliError> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| CliError::csv(path, e))
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CliError> {
    csv::ReaderBuilder::new().from_path(path).map_err(|e| CliError::csv(path, e))
}

fn parse<T: std::str::FromStr>(path: &Path, field: &str, column: &str) -> Result<T, CliError> {
    field
        .parse()
        .map_err(|_| CliError::Parse(format!("{}: bad {column} value `{field}`", path.display())))
}

pub fn write_traces(path: &Path, traces: &[RegretTrace]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    let csv_err = |e| CliError::csv(path, e);
    w.write_record(["algorithm", "trial", "t", "cumulative_regret"]).map_err(csv_err)?;
    for tr in traces {
        for s in &tr.samples {
            w.write_record([
                tr.algorithm.name().to_string(),
                tr.trial.to_string(),
                s.t.to_string(),
                fmt_float(s.cumulative_regret),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn write_summary(path: &Path, aggregates: &[&AggregateResult]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    let csv_err = |e| CliError::csv(path, e);
    w.write_record(["algorithm", "t", "mean", "std", "band"]).map_err(csv_err)?;
    for a in aggregates {
        for i in 0..a.t.len() {
            w.write_record([
                a.algorithm.name().to_string(),
                a.t[i].to_string(),
                fmt_float(a.mean[i]),
                fmt_float(a.std[i]),
                fmt_float(a.band[i]),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

pub fn read_traces(path: &Path) -> Result<Vec<TraceRow>, CliError> {
    let mut r = reader(path)?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::csv(path, e))?;
        if rec.len() != 4 {
            return Err(CliError::Parse(format!("{}: expected 4 columns", path.display())));
        }
        rows.push(TraceRow {
            algorithm: rec[0].to_string(),
            trial: parse(path, &rec[1], "trial")?,
            t: parse(path, &rec[2], "t")?,
            cumulative_regret: parse(path, &rec[3], "cumulative_regret")?,
        });
    }
    Ok(rows)
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>, CliError> {
    let mut r = reader(path)?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::csv(path, e))?;
        if rec.len() != 5 {
            return Err(CliError::Parse(format!("{}: expected 5 columns", path.display())));
        }
        rows.push(SummaryRow {
            algorithm: rec[0].to_string(),
            t: parse(path, &rec[1], "t")?,
            mean: parse(path, &rec[2], "mean")?,
            std: parse(path, &rec[3], "std")?,
            band: parse(path, &rec[4], "band")?,
        });
    }
    Ok(rows)
}
