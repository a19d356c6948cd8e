//! Reference data shipped with the crate: published complexity measures and
//! mask-degradation metrics for ten public segmentation datasets, and the
//! regression grid fitted on them. Lets the regression and selection code be
//! checked end to end without downloading any images.

use std::collections::BTreeMap;

use crate::regress::{polyfit, FitInput, FitTable, Measure, PolyFit};
use crate::{Error, Result, SegMetrics};

const COMPLEXITY_CSV: &str = include_str!("../fixtures/complexity.csv");
const DOWNSAMPLING_CSV: &str = include_str!("../fixtures/downsampling.csv");
const REGRESSION_CSV: &str = include_str!("../fixtures/regression.csv");

/// Factors covered by the reference data.
pub const FACTORS: [u32; 3] = [2, 3, 4];
/// Degrees covered by the reference regression grid.
pub const DEGREES: std::ops::RangeInclusive<usize> = 1..=6;

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetComplexity {
    pub dataset: String,
    /// Whether the published regression grid used this row.
    pub in_regression: bool,
    pub de: f64,
    pub mnf: f64,
    pub mdf: f64,
    pub pc: f64,
}

impl DatasetComplexity {
    pub fn get(&self, measure: Measure) -> f64 {
        match measure {
            Measure::De => self.de,
            Measure::Mnf => self.mnf,
            Measure::Mdf => self.mdf,
            Measure::Pc => self.pc,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegradationRecord {
    pub dataset: String,
    pub factor: u32,
    pub metrics: SegMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedFit {
    pub measure: Measure,
    pub factor: u32,
    pub dof: usize,
    pub r2: f64,
    pub ar2: f64,
    pub rmse: f64,
    pub mae: f64,
    pub aic: f64,
    pub aicc: f64,
    pub best_aicc: bool,
}

/// Which reference rows feed a regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Rows {
    /// The rows the published grid was fitted on.
    #[default]
    Regression,
    All,
}

/// Which metric is regressed on complexity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Response {
    #[default]
    E,
    D,
}

fn records(text: &'static str, columns: usize) -> Result<impl Iterator<Item = (usize, Vec<&'static str>)>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::Fixture("missing header".into()))?;
    if header.split(',').count() != columns {
        return Err(Error::Fixture(format!("expected {columns} columns in header {header:?}")));
    }
    Ok(lines.map(|(i, l)| (i + 1, l.split(',').map(str::trim).collect())))
}

fn field<T: std::str::FromStr>(line: usize, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Fixture(format!("line {line}: cannot parse {raw:?}")))
}

fn check_width(line: usize, cells: &[&str], columns: usize) -> Result<()> {
    if cells.len() != columns {
        return Err(Error::Fixture(format!("line {line}: expected {columns} fields, found {}", cells.len())));
    }
    Ok(())
}

pub fn complexity() -> Result<Vec<DatasetComplexity>> {
    records(COMPLEXITY_CSV, 6)?
        .map(|(line, c)| {
            check_width(line, &c, 6)?;
            Ok(DatasetComplexity {
                dataset: c[0].to_string(),
                in_regression: field(line, c[1])?,
                de: field(line, c[2])?,
                mnf: field(line, c[3])?,
                mdf: field(line, c[4])?,
                pc: field(line, c[5])?,
            })
        })
        .collect()
}

pub fn downsampling() -> Result<Vec<DegradationRecord>> {
    records(DOWNSAMPLING_CSV, 9)?
        .map(|(line, c)| {
            check_width(line, &c, 9)?;
            let mut values = [None; 7];
            for (slot, raw) in values.iter_mut().zip(&c[2..]) {
                *slot = Some(field(line, raw)?);
            }
            Ok(DegradationRecord {
                dataset: c[0].to_string(),
                factor: field(line, c[1])?,
                metrics: SegMetrics::from_values(values),
            })
        })
        .collect()
}

pub fn expected_fits() -> Result<Vec<ExpectedFit>> {
    records(REGRESSION_CSV, 10)?
        .map(|(line, c)| {
            check_width(line, &c, 10)?;
            Ok(ExpectedFit {
                measure: c[0].parse()?,
                factor: field(line, c[1])?,
                dof: field(line, c[2])?,
                r2: field(line, c[3])?,
                ar2: field(line, c[4])?,
                rmse: field(line, c[5])?,
                mae: field(line, c[6])?,
                aic: field(line, c[7])?,
                aicc: field(line, c[8])?,
                best_aicc: field(line, c[9])?,
            })
        })
        .collect()
}

/// Regression input built from the reference data.
pub fn fit_input(rows: Rows, response: Response) -> Result<FitInput> {
    let datasets: Vec<DatasetComplexity> =
        complexity()?.into_iter().filter(|d| rows == Rows::All || d.in_regression).collect();
    let records = downsampling()?;
    let mut input = FitInput { labels: datasets.iter().map(|d| d.dataset.clone()).collect(), ..Default::default() };
    for m in Measure::ALL {
        input.measures.insert(m, datasets.iter().map(|d| d.get(m)).collect());
    }
    for factor in FACTORS {
        let column = datasets
            .iter()
            .map(|d| {
                let record = records
                    .iter()
                    .find(|r| r.dataset == d.dataset && r.factor == factor)
                    .ok_or_else(|| Error::Fixture(format!("no factor-{factor} record for {}", d.dataset)))?;
                let value = match response {
                    Response::E => record.metrics.e,
                    Response::D => record.metrics.d,
                };
                value.ok_or_else(|| Error::Fixture(format!("undefined metric for {}", d.dataset)))
            })
            .collect::<Result<Vec<f64>>>()?;
        input.responses.insert(factor, column);
    }
    Ok(input)
}

/// Per-factor fits of the response on `measure` over the reference rows.
pub fn fits(measure: Measure, degree: usize, response: Response) -> Result<BTreeMap<u32, PolyFit>> {
    let input = fit_input(Rows::Regression, response)?;
    let x = &input.measures[&measure];
    input.responses.iter().map(|(&factor, y)| Ok((factor, polyfit(x, y, degree)?))).collect()
}

/// Absolute tolerance for comparing a fitted cell with the reference grid.
/// High degrees are poorly conditioned at ten or fewer points and get a looser bound.
pub fn tolerance(dof: usize) -> f64 {
    if dof <= 4 {
        1e-3
    } else {
        1e-2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellCheck {
    pub measure: Measure,
    pub factor: u32,
    pub dof: usize,
    pub statistic: &'static str,
    pub expected: f64,
    pub actual: Option<f64>,
    pub tolerance: f64,
}

impl CellCheck {
    pub fn passed(&self) -> bool {
        self.actual.is_some_and(|a| (a - self.expected).abs() <= self.tolerance)
    }
}

/// Compares r2, ar2, rmse and mae of every reference cell against `table`.
pub fn compare_grid(table: &FitTable, expected: &[ExpectedFit]) -> Vec<CellCheck> {
    let mut checks = Vec::with_capacity(expected.len() * 4);
    for e in expected {
        let d = table.get(e.measure, e.factor, e.dof).and_then(|c| c.diagnostics.as_ref());
        let stats = [
            ("r2", e.r2, d.and_then(|d| d.r2)),
            ("ar2", e.ar2, d.and_then(|d| d.ar2)),
            ("rmse", e.rmse, d.map(|d| d.rmse)),
            ("mae", e.mae, d.map(|d| d.mae)),
        ];
        for (statistic, expected, actual) in stats {
            checks.push(CellCheck {
                measure: e.measure,
                factor: e.factor,
                dof: e.dof,
                statistic,
                expected,
                actual,
                tolerance: tolerance(e.dof),
            });
        }
    }
    checks
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectionCheck {
    pub measure: Measure,
    pub factor: u32,
    pub expected: usize,
    pub actual: Option<usize>,
}

impl SelectionCheck {
    pub fn passed(&self) -> bool {
        self.actual == Some(self.expected)
    }
}

pub fn compare_selection(table: &FitTable, expected: &[ExpectedFit]) -> Vec<SelectionCheck> {
    let chosen: BTreeMap<(Measure, u32), Option<usize>> =
        table.selections().into_iter().map(|s| ((s.measure, s.factor), s.best_dof)).collect();
    expected
        .iter()
        .filter(|e| e.best_aicc)
        .map(|e| SelectionCheck {
            measure: e.measure,
            factor: e.factor,
            expected: e.dof,
            actual: chosen.get(&(e.measure, e.factor)).copied().flatten(),
        })
        .collect()
}
