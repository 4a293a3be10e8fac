//! JSON and CSV serialization of suite results.
//!
//! CSV has one row per term:
//! `theorem_id,instance_seed,term_index,term_label,value,margin,verdict`.
//! `margin` is `next - current` and is empty on the last term of a chain;
//! `instance_seed` is empty for chains without a seeded instance. Reals are
//! printed with 17 significant digits.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::suite::SuiteResult;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidParameter {
                name: "format".into(),
                value: f64::NAN,
                reason: format!("unknown report format `{other}` (expected json or csv)"),
            }),
        }
    }
}

pub const CSV_HEADER: [&str; 7] = [
    "theorem_id",
    "instance_seed",
    "term_index",
    "term_label",
    "value",
    "margin",
    "verdict",
];

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn emit_report(result: &SuiteResult, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => Ok(serde_json::to_string_pretty(result)? + "\n"),
        ReportFormat::Csv => emit_csv(result),
    }
}

fn emit_csv(result: &SuiteResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in &result.reports {
        let seed = r.instance_seed.map(|s| s.to_string()).unwrap_or_default();
        let verdict = r.verdict.to_string();
        for (i, term) in r.terms.iter().enumerate() {
            let margin = r.margins.get(i).map(|&m| real(m)).unwrap_or_default();
            w.write_record([
                r.theorem_id.as_str(),
                &seed,
                &i.to_string(),
                &term.label,
                &real(term.value),
                &margin,
                &verdict,
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is built from UTF-8 fields"))
}

pub fn write_report(result: &SuiteResult, format: ReportFormat, path: &Path) -> Result<()> {
    fs::write(path, emit_report(result, format)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::TheoremId;
    use crate::suite::{run_suite, SuiteConfig};

    fn result() -> SuiteResult {
        run_suite(&SuiteConfig {
            trials: 3,
            dims: vec![2, 3],
            theorems: vec![TheoremId::HK, TheoremId::FalsifyR0],
            ..SuiteConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn csv_rows_and_digits() {
        let res = result();
        let csv = emit_report(&res, ReportFormat::Csv).unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        let rows: usize = res.reports.iter().map(|r| r.terms.len()).sum();
        assert_eq!(lines.len(), rows + 1);
        let mut rdr = csv::Reader::from_reader(csv.as_bytes());
        let records: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        let first = &records[0];
        assert_eq!(&first[0], "HK");
        assert_eq!(first[4].parse::<f64>().unwrap(), res.reports[0].terms[0].value);
        let mantissa = first[4].split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
        let last = records.last().unwrap();
        assert_eq!(&last[0], "FALSIFY-r0");
        assert_eq!(&last[1], "");
        assert_eq!(&last[5], "");
        assert_eq!(&last[6], "violated");
    }

    #[test]
    fn csv_is_deterministic() {
        let a = emit_report(&result(), ReportFormat::Csv).unwrap();
        let b = emit_report(&result(), ReportFormat::Csv).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_round_trips() {
        let res = result();
        let json = emit_report(&res, ReportFormat::Json).unwrap();
        let back: SuiteResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back.reports, res.reports);
        assert_eq!(back.counts, res.counts);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let first = &v["reports"][0];
        for key in ["theorem_id", "params", "terms", "margins", "verdict"] {
            assert!(!first[key].is_null(), "{key}");
        }
    }

    #[test]
    fn format_parsing() {
        assert_eq!("CSV".parse::<ReportFormat>().unwrap(), ReportFormat::Csv);
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
