use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use segc_core::regress::{FitInput, FitTable, Selection};
use segc_core::{ComplexityReport, DegradationRow, Measure, SegMetrics};
use serde::{Deserialize, Serialize};

use crate::args::Response;
use crate::UsageError;

/// JSON written by `segc fit --format json` and read by `segc advise`.
#[derive(Debug, Serialize, Deserialize)]
pub struct FitDocument {
    pub response: String,
    pub table: FitTable,
    pub selections: Vec<Selection>,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn complexity_report(path: &Path) -> anyhow::Result<ComplexityReport> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing complexity report {}", path.display()))
}

pub fn fit_document(path: &Path) -> anyhow::Result<FitDocument> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing fit output {}", path.display()))
}

fn cell(path: &Path, line: u64, raw: &str) -> anyhow::Result<Option<f64>> {
    if raw == "null" {
        return Ok(None);
    }
    raw.trim()
        .parse()
        .map(Some)
        .map_err(|_| UsageError(format!("{}:{line}: cannot parse {raw:?} as a number", path.display())).into())
}

/// Rows of a `segc degrade` output, CSV or JSON.
pub fn degradation_rows(path: &Path) -> anyhow::Result<Vec<DegradationRow>> {
    let text = read(path)?;
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()));
    }
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != segc_core::degrade::TABLE_HEADER {
        return Err(
            UsageError(format!("{}: expected header {:?}", path.display(), segc_core::degrade::TABLE_HEADER)).into()
        );
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.with_context(|| format!("reading {}", path.display()))?;
        let line = record.position().map_or(0, |p| p.line());
        let factor = record[1]
            .parse()
            .map_err(|_| UsageError(format!("{}:{line}: bad factor {:?}", path.display(), &record[1])))?;
        let mut values = [None; 7];
        for (slot, raw) in values.iter_mut().zip(record.iter().skip(2)) {
            *slot = cell(path, line, raw)?;
        }
        let [se, sp, a, ba, d, j, e] = values;
        rows.push(DegradationRow {
            dataset: record[0].to_string(),
            factor,
            metrics: SegMetrics { se, sp, a, ba, d, j, e },
        });
    }
    Ok(rows)
}

/// Aligns per-dataset complexity aggregates with degradation rows.
/// Datasets follow the order of `complexity`; every dataset needs one row per factor.
pub fn measured_fit_input(degrade: &[PathBuf], complexity: &[PathBuf], response: Response) -> anyhow::Result<FitInput> {
    let mut rows = Vec::new();
    for path in degrade {
        rows.extend(degradation_rows(path)?);
    }
    let reports = complexity.iter().map(|p| complexity_report(p)).collect::<anyhow::Result<Vec<_>>>()?;
    let mut input = FitInput { labels: reports.iter().map(|r| r.name.clone()).collect(), ..Default::default() };
    if let Some(dup) = input.labels.iter().enumerate().find(|(i, l)| input.labels[..*i].contains(l)) {
        return Err(UsageError(format!("dataset {:?} has two complexity reports", dup.1)).into());
    }
    for row in &rows {
        if !input.labels.contains(&row.dataset) {
            return Err(UsageError(format!("degradation rows for {:?} have no complexity report", row.dataset)).into());
        }
    }
    let factors: Vec<u32> = {
        let mut f: Vec<u32> = rows.iter().map(|r| r.factor).collect();
        f.sort_unstable();
        f.dedup();
        f
    };
    if factors.is_empty() {
        return Err(UsageError("no degradation rows".into()).into());
    }
    for m in Measure::ALL {
        let column = reports
            .iter()
            .map(|r| r.aggregate.get(m).ok_or_else(|| UsageError(format!("{m} is undefined for dataset {:?}", r.name))))
            .collect::<Result<Vec<f64>, _>>()?;
        input.measures.insert(m, column);
    }
    let mut responses = BTreeMap::new();
    for factor in factors {
        let column = input
            .labels
            .iter()
            .map(|name| {
                let matching: Vec<&DegradationRow> =
                    rows.iter().filter(|r| &r.dataset == name && r.factor == factor).collect();
                let [row] = matching.as_slice() else {
                    return Err(UsageError(format!(
                        "dataset {name:?} has {} rows for factor {factor}, expected 1",
                        matching.len()
                    )));
                };
                let value = match response {
                    Response::E => row.metrics.e,
                    Response::D => row.metrics.d,
                };
                value.ok_or_else(|| UsageError(format!("dataset {name:?} factor {factor}: metric is undefined")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        responses.insert(factor, column);
    }
    input.responses = responses;
    Ok(input)
}
