//! Deterministic JSON, CSV and text rendering of reports.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use serde_json::Value;

use super::analysis::AnalysisReport;
use super::paradox::ParadoxReport;
use crate::error::{QopError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = QopError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(QopError::Config(format!("unknown format '{other}'; expected json, csv or text"))),
        }
    }
}

/// A report with a tabular and a prose rendering.
pub trait Emit: Serialize {
    /// Header and rows; reports of one kind may still differ in header.
    fn csv_table(&self) -> (Vec<String>, Vec<Vec<String>>);
    fn text(&self) -> String;
}

/// JSON arrays are pretty-printed with sorted object keys, so equal inputs give equal bytes.
pub fn emit_report<R: Emit>(reports: &[R], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(reports).map_err(|e| QopError::Structural(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
            let mut last_header: Option<Vec<String>> = None;
            for r in reports {
                let (header, rows) = r.csv_table();
                if last_header.as_ref() != Some(&header) {
                    w.write_record(&header).map_err(csv_err)?;
                    last_header = Some(header);
                }
                for row in rows {
                    w.write_record(&row).map_err(csv_err)?;
                }
            }
            w.into_inner().map_err(|e| QopError::Structural(e.to_string()))
        }
        Format::Text => {
            let parts: Vec<String> = reports.iter().map(Emit::text).collect();
            Ok((parts.join("\n") + "\n").into_bytes())
        }
    }
}

fn csv_err(e: csv::Error) -> QopError {
    QopError::Structural(format!("csv: {e}"))
}

/// Round-trip-exact float rendering shared by CSV and text.
pub fn fmt_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

impl Emit for ParadoxReport {
    fn csv_table(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let header = ["id", "title", "verdict", "check", "value", "criterion", "passed"].map(String::from).to_vec();
        let rows = self
            .checks
            .iter()
            .map(|c| {
                vec![
                    self.id.to_string(),
                    self.title.clone(),
                    format!("{:?}", self.verdict),
                    c.name.clone(),
                    c.value.map(|v| v.to_string()).unwrap_or_default(),
                    c.criterion.clone(),
                    c.passed.to_string(),
                ]
            })
            .collect();
        (header, rows)
    }

    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "Paradox {}: {}", self.id, self.title);
        let _ = writeln!(s, "  naive:      {}", self.naive_result);
        let _ = writeln!(s, "  defect:     {}", self.defect);
        let _ = writeln!(s, "  resolution: {}", self.resolution_result);
        let _ = writeln!(s, "  equations:  {}", self.equations.join("; "));
        let _ = writeln!(s, "  checks:");
        for c in &self.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            match c.value {
                Some(v) => {
                    let _ = writeln!(s, "    [{mark}] {} = {v:.6e} ({})", c.name, c.criterion);
                }
                None => {
                    let _ = writeln!(s, "    [{mark}] {} ({})", c.name, c.criterion);
                }
            }
        }
        let _ = writeln!(s, "  verdict: {:?} (seed {})", self.verdict, self.seed);
        s
    }
}

impl Emit for AnalysisReport {
    fn csv_table(&self) -> (Vec<String>, Vec<Vec<String>>) {
        let mut header = vec!["analysis".to_string(), "subject".to_string()];
        header.extend(self.columns.iter().cloned());
        let rows = if self.rows.is_empty() {
            // Scalar-only reports become key/value rows.
            let mut h = vec!["analysis".to_string(), "subject".to_string(), "key".into(), "value".into()];
            std::mem::swap(&mut header, &mut h);
            self.facts
                .iter()
                .map(|(k, v)| vec![self.analysis.clone(), self.subject.clone(), k.clone(), fmt_value(v)])
                .collect()
        } else {
            self.rows
                .iter()
                .map(|r| {
                    let mut row = vec![self.analysis.clone(), self.subject.clone()];
                    row.extend(r.iter().map(fmt_value));
                    row
                })
                .collect()
        };
        (header, rows)
    }

    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} of {}", self.analysis, self.subject);
        for (k, v) in &self.facts {
            let _ = writeln!(s, "  {k}: {}", fmt_value(v));
        }
        if !self.rows.is_empty() {
            let _ = writeln!(s, "  {}", self.columns.join("\t"));
            for r in &self.rows {
                let cells: Vec<String> = r.iter().map(fmt_value).collect();
                let _ = writeln!(s, "  {}", cells.join("\t"));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn sample() -> AnalysisReport {
        let mut facts = BTreeMap::new();
        facts.insert("z".to_string(), Value::from(1.5));
        facts.insert("a".to_string(), Value::from("x"));
        AnalysisReport {
            analysis: "spectrum".into(),
            subject: "H".into(),
            facts,
            columns: vec!["n".into(), "E_n".into()],
            rows: vec![vec![Value::from(1), Value::from(1.2337005501361697)]],
        }
    }

    #[test]
    fn formats_parse() {
        assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
        assert!(matches!("yaml".parse::<Format>(), Err(QopError::Config(_))));
    }

    #[test]
    fn renderings_are_stable() {
        let r = [sample()];
        let j1 = emit_report(&r, Format::Json).unwrap();
        assert_eq!(j1, emit_report(&r, Format::Json).unwrap());
        let text = String::from_utf8(j1).unwrap();
        assert!(text.find("\"a\"").unwrap() < text.find("\"z\"").unwrap());
        let csv = String::from_utf8(emit_report(&r, Format::Csv).unwrap()).unwrap();
        assert_eq!(csv, "analysis,subject,n,E_n\nspectrum,H,1,1.2337005501361697\n");
        let txt = String::from_utf8(emit_report(&r, Format::Text).unwrap()).unwrap();
        assert!(txt.starts_with("spectrum of H\n  a: x\n  z: 1.5\n"));
    }
}
