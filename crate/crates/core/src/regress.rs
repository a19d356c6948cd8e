//! Polynomial least squares of segmentation error against a complexity
//! measure, goodness-of-fit diagnostics, and AICc model selection.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::format::{extended_f64, NumberStyle};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Measure {
    De,
    Mnf,
    Mdf,
    Pc,
}

impl Measure {
    pub const ALL: [Measure; 4] = [Measure::De, Measure::Mnf, Measure::Mdf, Measure::Pc];

    pub fn name(self) -> &'static str {
        match self {
            Measure::De => "DE",
            Measure::Mnf => "MNF",
            Measure::Mdf => "MDF",
            Measure::Pc => "PC",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown measure {s:?} (expected DE, MNF, MDF or PC)")))
    }
}

/// Degree-`k` polynomial in the normalized variable `t = (x - x_center) / x_scale`.
/// `coefficients[i]` multiplies `t^i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFit {
    pub degree: usize,
    pub coefficients: Vec<f64>,
    pub x_center: f64,
    pub x_scale: f64,
}

impl PolyFit {
    pub fn eval(&self, x: f64) -> f64 {
        let t = (x - self.x_center) / self.x_scale;
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// `Σ |c_i| |t|^i`, the scale of the terms summed by [`eval`](Self::eval).
    fn magnitude(&self, x: f64) -> f64 {
        let t = ((x - self.x_center) / self.x_scale).abs();
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * t + c.abs())
    }
}

/// Least-squares polynomial of `degree` through `(x, y)`.
///
/// The Vandermonde matrix is built on the centered, max-abs scaled inputs
/// and solved through its SVD. A numerically rank-deficient system is an error.
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Result<PolyFit> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter(format!("x has {} values, y has {}", x.len(), y.len())));
    }
    if degree == 0 {
        return Err(Error::InvalidParameter("polynomial degree must be at least 1".into()));
    }
    let n = x.len();
    if n < degree + 2 {
        return Err(Error::TooFewObservations { needed: degree + 2, degree, got: n });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("observations must be finite".into()));
    }
    let x_center = x.iter().sum::<f64>() / n as f64;
    let x_scale = x.iter().map(|v| (v - x_center).abs()).fold(0.0, f64::max);
    if x_scale.is_nan() || x_scale <= 0.0 {
        return Err(Error::DegenerateRegressor);
    }
    let cols = degree + 1;
    let design = DMatrix::from_fn(n, cols, |i, j| ((x[i] - x_center) / x_scale).powi(j as i32));
    let svd = design.svd(true, true);
    let largest = svd.singular_values.max();
    let tol = n.max(cols) as f64 * f64::EPSILON * largest;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    if rank < cols {
        return Err(Error::RankDeficient { rank, columns: cols });
    }
    let rhs = DVector::from_column_slice(y);
    let solution = svd.solve(&rhs, tol).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(PolyFit { degree, coefficients: solution.iter().copied().collect(), x_center, x_scale })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionDiagnostics {
    pub n: usize,
    pub k: usize,
    pub rss: f64,
    pub tss: f64,
    /// `None` when `y` is constant.
    pub r2: Option<f64>,
    pub ar2: Option<f64>,
    pub rmse: f64,
    pub mae: f64,
    /// Negative infinity for an exact fit.
    #[serde(with = "extended_f64")]
    pub aic: f64,
    #[serde(with = "extended_f64")]
    pub aicc: f64,
}

pub fn adjusted_r2(r2: f64, n: usize, k: usize) -> Result<f64> {
    let dof = residual_dof(n, k)?;
    Ok(1.0 - (1.0 - r2) * (n as f64 - 1.0) / dof)
}

/// `n ln(RSS/n) + 2k`.
pub fn aic(rss: f64, n: usize, k: usize) -> f64 {
    if rss == 0.0 {
        return f64::NEG_INFINITY;
    }
    n as f64 * (rss / n as f64).ln() + 2.0 * k as f64
}

/// `AIC + (2k² + 2k) / (n - k - 1)`.
pub fn aicc(aic: f64, n: usize, k: usize) -> Result<f64> {
    let dof = residual_dof(n, k)?;
    let k = k as f64;
    Ok(aic + (2.0 * k * k + 2.0 * k) / dof)
}

fn residual_dof(n: usize, k: usize) -> Result<f64> {
    let dof = n as i64 - k as i64 - 1;
    if dof <= 0 {
        return Err(Error::NoResidualDof(dof));
    }
    Ok(dof as f64)
}

/// Residuals within a few ulps of the evaluated terms are rounding noise;
/// when every residual is, the fit is treated as exact.
const EXACT_FIT_ULPS: f64 = 64.0;

pub fn diagnostics(fit: &PolyFit, x: &[f64], y: &[f64]) -> Result<RegressionDiagnostics> {
    if x.len() != y.len() {
        return Err(Error::InvalidParameter(format!("x has {} values, y has {}", x.len(), y.len())));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewObservations { needed: 2, degree: fit.degree, got: n });
    }
    let k = fit.degree;
    let mut residuals: Vec<f64> = x.iter().zip(y).map(|(&xi, &yi)| yi - fit.eval(xi)).collect();
    let exact = x
        .iter()
        .zip(y)
        .zip(&residuals)
        .all(|((&xi, &yi), r)| r.abs() <= EXACT_FIT_ULPS * f64::EPSILON * (yi.abs() + fit.magnitude(xi)));
    if exact {
        residuals.iter_mut().for_each(|r| *r = 0.0);
    }
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let nf = n as f64;
    let constant_y = y.iter().all(|&v| v == y[0]);
    let tss = if constant_y {
        0.0
    } else {
        let mean = y.iter().sum::<f64>() / nf;
        y.iter().map(|v| (v - mean).powi(2)).sum()
    };
    let r2 = (tss > 0.0).then(|| 1.0 - rss / tss);
    let ar2 = match r2 {
        Some(r2) => Some(adjusted_r2(r2, n, k)?),
        None => {
            residual_dof(n, k)?;
            None
        }
    };
    let aic_value = aic(rss, n, k);
    Ok(RegressionDiagnostics {
        n,
        k,
        rss,
        tss,
        r2,
        ar2,
        rmse: (rss / nf).sqrt(),
        mae: residuals.iter().map(|r| r.abs()).sum::<f64>() / nf,
        aic: aic_value,
        aicc: aicc(aic_value, n, k)?,
    })
}

/// Outcome of fitting one degree during model selection.
#[derive(Debug)]
pub struct Candidate {
    pub degree: usize,
    pub outcome: Result<(PolyFit, RegressionDiagnostics)>,
}

#[derive(Debug)]
pub struct ModelSelection {
    pub best_degree: usize,
    pub candidates: Vec<Candidate>,
}

impl ModelSelection {
    pub fn best(&self) -> &(PolyFit, RegressionDiagnostics) {
        self.candidates
            .iter()
            .find(|c| c.degree == self.best_degree)
            .and_then(|c| c.outcome.as_ref().ok())
            .expect("best degree has a valid fit")
    }
}

fn fit_and_diagnose(x: &[f64], y: &[f64], degree: usize) -> Result<(PolyFit, RegressionDiagnostics)> {
    let fit = polyfit(x, y, degree)?;
    let diag = diagnostics(&fit, x, y)?;
    Ok((fit, diag))
}

/// Index of the smallest AICc; earlier entries win ties.
fn argmin_aicc<'a>(items: impl Iterator<Item = (usize, &'a RegressionDiagnostics)>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (degree, d) in items {
        if d.aicc.is_nan() {
            continue;
        }
        if best.is_none_or(|(_, b)| d.aicc < b) {
            best = Some((degree, d.aicc));
        }
    }
    best.map(|(k, _)| k)
}

/// Fits degrees `1..=max_degree` and picks the smallest AICc (ties to the
/// lower degree). Degrees that cannot be fitted are kept with their error.
pub fn select_model(x: &[f64], y: &[f64], max_degree: usize) -> Result<ModelSelection> {
    let candidates: Vec<Candidate> =
        (1..=max_degree).map(|degree| Candidate { degree, outcome: fit_and_diagnose(x, y, degree) }).collect();
    let best_degree =
        argmin_aicc(candidates.iter().filter_map(|c| c.outcome.as_ref().ok().map(|(_, d)| (c.degree, d))))
            .ok_or(Error::NoValidModel)?;
    Ok(ModelSelection { best_degree, candidates })
}

/// Aligned columns for a measure × factor regression grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitInput {
    pub labels: Vec<String>,
    pub measures: BTreeMap<Measure, Vec<f64>>,
    /// Response column per downsampling factor.
    pub responses: BTreeMap<u32, Vec<f64>>,
}

impl FitInput {
    fn validate(&self) -> Result<()> {
        let n = self.labels.len();
        for (m, col) in &self.measures {
            if col.len() != n {
                return Err(Error::InvalidParameter(format!("{m} column has {} rows, expected {n}", col.len())));
            }
        }
        for (f, col) in &self.responses {
            if col.len() != n {
                return Err(Error::InvalidParameter(format!("factor {f} column has {} rows, expected {n}", col.len())));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitCell {
    pub measure: Measure,
    pub factor: u32,
    pub dof: usize,
    pub fit: Option<PolyFit>,
    pub diagnostics: Option<RegressionDiagnostics>,
    /// Why the cell is empty, when it is.
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub measure: Measure,
    pub factor: u32,
    pub best_dof: Option<usize>,
}

/// Diagnostics grid ordered by measure, factor, then degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitTable {
    pub cells: Vec<FitCell>,
}

pub const FIT_TABLE_HEADER: &str = "measure,factor,dof,r2,ar2,rmse,mae,aic,aicc";

/// Fits every measure against every factor's response for each degree in
/// `degrees`. Rows are sorted by `(x, y)` before fitting, so the result does
/// not depend on input row order.
pub fn fit_table(input: &FitInput, degrees: RangeInclusive<usize>) -> Result<FitTable> {
    input.validate()?;
    let pairs: Vec<(Measure, u32)> =
        input.measures.keys().flat_map(|&m| input.responses.keys().map(move |&f| (m, f))).collect();
    let blocks: Vec<Vec<FitCell>> = pairs
        .par_iter()
        .map(|&(measure, factor)| {
            let mut rows: Vec<(f64, f64)> =
                input.measures[&measure].iter().copied().zip(input.responses[&factor].iter().copied()).collect();
            rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
            let (x, y): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
            degrees
                .clone()
                .map(|dof| match fit_and_diagnose(&x, &y, dof) {
                    Ok((fit, d)) => FitCell { measure, factor, dof, fit: Some(fit), diagnostics: Some(d), error: None },
                    Err(e) => {
                        FitCell { measure, factor, dof, fit: None, diagnostics: None, error: Some(e.to_string()) }
                    }
                })
                .collect()
        })
        .collect();
    Ok(FitTable { cells: blocks.into_iter().flatten().collect() })
}

impl FitTable {
    pub fn get(&self, measure: Measure, factor: u32, dof: usize) -> Option<&FitCell> {
        self.cells.iter().find(|c| c.measure == measure && c.factor == factor && c.dof == dof)
    }

    /// Argmin-AICc degree per (measure, factor), in table order.
    pub fn selections(&self) -> Vec<Selection> {
        let mut keys: Vec<(Measure, u32)> = Vec::new();
        for c in &self.cells {
            if !keys.contains(&(c.measure, c.factor)) {
                keys.push((c.measure, c.factor));
            }
        }
        keys.into_iter()
            .map(|(measure, factor)| {
                let best_dof = argmin_aicc(
                    self.cells
                        .iter()
                        .filter(|c| c.measure == measure && c.factor == factor)
                        .filter_map(|c| c.diagnostics.as_ref().map(|d| (c.dof, d))),
                );
                Selection { measure, factor, best_dof }
            })
            .collect()
    }

    /// One row per cell. With `with_selection`, one extra row per
    /// (measure, factor) repeats the argmin-AICc cell with `dof` written as
    /// `best:<k>`.
    pub fn to_csv(&self, style: NumberStyle, with_selection: bool) -> String {
        let mut out = format!("{FIT_TABLE_HEADER}\n");
        for c in &self.cells {
            push_row(&mut out, c, &c.dof.to_string(), style);
        }
        if with_selection {
            for s in self.selections() {
                if let Some(cell) = s.best_dof.and_then(|k| self.get(s.measure, s.factor, k)) {
                    push_row(&mut out, cell, &format!("best:{}", cell.dof), style);
                }
            }
        }
        out
    }
}

fn push_row(out: &mut String, cell: &FitCell, dof: &str, style: NumberStyle) {
    let cells = match &cell.diagnostics {
        Some(d) => [
            style.optional(d.r2),
            style.optional(d.ar2),
            style.number(d.rmse),
            style.number(d.mae),
            style.number(d.aic),
            style.number(d.aicc),
        ],
        None => std::array::from_fn(|_| "null".to_string()),
    };
    out.push_str(&format!("{},{},{}", cell.measure, cell.factor, dof));
    for c in cells {
        out.push(',');
        out.push_str(&c);
    }
    out.push('\n');
}
