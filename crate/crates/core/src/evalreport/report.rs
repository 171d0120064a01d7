use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::pipeline::{EvaluationReport, EvaluationRow};
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Markdown,
    Csv,
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Markdown => "markdown",
            ReportFormat::Csv => "csv",
        })
    }
}

impl FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(Self::Markdown),
            "csv" => Ok(Self::Csv),
            other => Err(Error::InvalidConfig(format!(
                "unknown report format {other:?}"
            ))),
        }
    }
}

/// MAE cell: four decimals.
pub fn format_mae(v: f64) -> String {
    format!("{v:.4}")
}

/// Relative-change cell: two decimals. Exact binary ties round to even.
pub fn format_delta(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

const EMPTY: &str = "-";

struct Cell {
    text: String,
    improvement: bool,
}

fn cell(text: String) -> Cell {
    Cell {
        text,
        improvement: false,
    }
}

fn group(row: Option<&EvaluationRow>) -> [Cell; 4] {
    match row {
        Some(r) => [
            cell(r.chosen_regressor_kind.abbreviation().into()),
            cell(format_mae(r.baseline_mae)),
            cell(format_mae(r.model_mae)),
            Cell {
                text: format_delta(r.relative_change_pct),
                improvement: r.relative_change_pct < 0.0,
            },
        ],
        None => std::array::from_fn(|_| cell(EMPTY.into())),
    }
}

/// Renders the result table: one row per algorithm with, for every
/// statistic, the chosen regressor, baseline MAE, model MAE and Δ%, then a
/// `Mean` row. Markdown marks improvements (negative Δ%) in bold.
pub fn emit_report(report: &EvaluationReport, format: ReportFormat) -> String {
    let tags: Vec<String> = report.config.statistics.iter().map(|s| s.tag()).collect();
    let mut header = vec!["h".to_string()];
    for t in &tags {
        header.push(format!("r({t})"));
        header.push(format!("baseline-MAE({t})"));
        header.push(format!("model-MAE({t})"));
        header.push(format!("Δ%({t})"));
    }

    let mut by_alg: BTreeMap<&str, BTreeMap<&str, &EvaluationRow>> = BTreeMap::new();
    for r in &report.rows {
        by_alg
            .entry(r.algorithm.as_str())
            .or_default()
            .insert(r.statistic.as_str(), r);
    }

    let mut body: Vec<Vec<Cell>> = Vec::new();
    for (alg, rows) in &by_alg {
        let mut line = vec![cell(alg.to_string())];
        for t in &tags {
            line.extend(group(rows.get(t.as_str()).copied()));
        }
        body.push(line);
    }
    let mut mean = vec![cell("Mean".into())];
    for t in &tags {
        match report.summary.iter().find(|s| &s.statistic == t) {
            Some(s) => mean.extend([
                cell(EMPTY.into()),
                cell(format_mae(s.baseline_mae)),
                cell(format_mae(s.model_mae)),
                Cell {
                    text: format_delta(s.relative_change_pct),
                    improvement: s.relative_change_pct < 0.0,
                },
            ]),
            None => mean.extend(group(None)),
        }
    }
    body.push(mean);

    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).expect("in-memory write");
            for line in &body {
                w.write_record(line.iter().map(|c| c.text.as_str()))
                    .expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
        }
        ReportFormat::Markdown => {
            let mut out = String::new();
            out.push_str(&format!("| {} |\n", header.join(" | ")));
            let align: Vec<&str> = header
                .iter()
                .enumerate()
                .map(|(i, _)| if i == 0 { ":--" } else { "--:" })
                .collect();
            out.push_str(&format!("| {} |\n", align.join(" | ")));
            for line in &body {
                let cells: Vec<String> = line
                    .iter()
                    .map(|c| {
                        let text = c.text.replace('|', "\\|");
                        if c.improvement {
                            format!("**{text}**")
                        } else {
                            text
                        }
                    })
                    .collect();
                out.push_str(&format!("| {} |\n", cells.join(" | ")));
            }
            out
        }
    }
}
