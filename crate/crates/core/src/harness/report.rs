//! JSON-lines and CSV reports.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::verify::{Summary, VerificationRecord};

/// Column order shared by both formats.
pub const COLUMNS: [&str; 7] = [
    "instance_id",
    "family",
    "actual_log2",
    "bound_log2",
    "margin_log2",
    "status",
    "witness",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Jsonl,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(ReportFormat::Jsonl),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::Parse(format!("unknown report format '{s}'"))),
        }
    }
}

enum Sink<W: Write> {
    Jsonl(W),
    Csv(Box<csv::Writer<W>>),
}

/// Streams records to a writer. JSONL ends with the summary object; CSV
/// holds records only, under a header row that is written even when there
/// are none.
pub struct ReportWriter<W: Write> {
    sink: Sink<W>,
    label: String,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ReportWriter<BufWriter<File>> {
    pub fn create(path: &Path, format: ReportFormat) -> Result<Self> {
        let label = path.display().to_string();
        let f = File::create(path).map_err(|e| Error::io(&label, e))?;
        ReportWriter::new(BufWriter::new(f), format, label)
    }
}

impl<W: Write> ReportWriter<W> {
    pub fn new(w: W, format: ReportFormat, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        let sink = match format {
            ReportFormat::Jsonl => Sink::Jsonl(w),
            ReportFormat::Csv => {
                let mut c = csv::WriterBuilder::new().has_headers(false).from_writer(w);
                c.write_record(COLUMNS).map_err(|e| csv_err(&label, e))?;
                Sink::Csv(Box::new(c))
            }
        };
        Ok(ReportWriter { sink, label })
    }

    pub fn write(&mut self, r: &VerificationRecord) -> Result<()> {
        match &mut self.sink {
            Sink::Jsonl(w) => {
                serde_json::to_writer(&mut *w, r).map_err(|e| Error::io(&self.label, e.into()))?;
                w.write_all(b"\n").map_err(|e| Error::io(&self.label, e))
            }
            Sink::Csv(c) => c
                .write_record([
                    r.instance_id.as_str(),
                    r.family.as_str(),
                    &opt(r.actual_log2),
                    &opt(r.bound_log2),
                    &opt(r.margin_log2),
                    r.status.name(),
                    r.witness.as_str(),
                ])
                .map_err(|e| csv_err(&self.label, e)),
        }
    }

    /// Appends the summary (JSONL only), flushes, and returns the writer.
    pub fn finish(self, summary: &Summary) -> Result<W> {
        let label = self.label;
        match self.sink {
            Sink::Jsonl(mut w) => {
                serde_json::to_writer(&mut w, summary).map_err(|e| Error::io(&label, e.into()))?;
                w.write_all(b"\n").map_err(|e| Error::io(&label, e))?;
                w.flush().map_err(|e| Error::io(&label, e))?;
                Ok(w)
            }
            Sink::Csv(c) => c.into_inner().map_err(|e| Error::io(&label, e.into_error())),
        }
    }
}

fn csv_err(label: &str, e: csv::Error) -> Error {
    Error::io(label, std::io::Error::other(e))
}

/// Writes a complete report to `path`.
pub fn emit_report(records: &[VerificationRecord], summary: &Summary, format: ReportFormat, path: &Path) -> Result<()> {
    let mut w = ReportWriter::create(path, format)?;
    for r in records {
        w.write(r)?;
    }
    w.finish(summary)?;
    Ok(())
}

/// Drops the timestamp from the summary line, for byte comparisons.
pub fn strip_timestamp(jsonl: &str) -> String {
    jsonl
        .lines()
        .map(|l| match serde_json::from_str::<serde_json::Value>(l) {
            Ok(serde_json::Value::Object(mut m)) if m.get("summary") == Some(&serde_json::Value::Bool(true)) => {
                m.remove("timestamp");
                serde_json::Value::Object(m).to_string()
            }
            _ => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::family::{InstanceFamily, Mode, Problem};
    use crate::harness::verify::{verify_collect, Status, VerifyOptions};

    fn run() -> (Vec<VerificationRecord>, Summary) {
        let fam = InstanceFamily::new(Problem::Linsys, Mode::Exhaustive).n(2).range(1);
        verify_collect(&fam, &VerifyOptions::default()).unwrap()
    }

    #[test]
    fn jsonl_has_one_line_per_record_and_a_summary() {
        let (recs, s) = run();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        emit_report(&recs, &s, ReportFormat::Jsonl, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 82);
        let back: VerificationRecord = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(back, recs[0]);
        let sum: Summary = serde_json::from_str(lines[81]).unwrap();
        assert!(sum.summary && sum.total == 81);
        let keys: Vec<String> = serde_json::from_str::<serde_json::Map<String, serde_json::Value>>(lines[0])
            .unwrap()
            .keys()
            .cloned()
            .collect();
        let mut want: Vec<String> = COLUMNS.iter().map(|s| s.to_string()).collect();
        want.sort();
        let mut got = keys;
        got.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn csv_has_fixed_columns_and_header_when_empty() {
        let (recs, s) = run();
        let w = ReportWriter::new(Vec::new(), ReportFormat::Csv, "mem").unwrap();
        let bytes = w.finish(&s).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap().trim(), COLUMNS.join(","));
        let mut w = ReportWriter::new(Vec::new(), ReportFormat::Csv, "mem").unwrap();
        for r in &recs {
            w.write(r).unwrap();
        }
        let text = String::from_utf8(w.finish(&s).unwrap()).unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), COLUMNS);
        let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
        assert_eq!(rows.len(), 81);
        let skipped = rows
            .iter()
            .filter(|r| &r[5] == Status::DegenerateSkipped.name())
            .count();
        assert_eq!(skipped as u64, s.degenerate_skipped);
    }

    #[test]
    fn empty_jsonl_is_summary_only() {
        let (_, s) = run();
        let w = ReportWriter::new(Vec::new(), ReportFormat::Jsonl, "mem").unwrap();
        let text = String::from_utf8(w.finish(&s).unwrap()).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert!(!strip_timestamp(&text).contains("timestamp"));
    }

    #[test]
    fn unwritable_path_names_the_path() {
        let (recs, s) = run();
        let bad = Path::new("/nonexistent-dir/r.jsonl");
        let err = emit_report(&recs, &s, ReportFormat::Jsonl, bad).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/r.jsonl"));
    }
}
