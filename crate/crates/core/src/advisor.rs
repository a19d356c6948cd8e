//! Design guidance from dataset complexity: how far inputs can be
//! downsampled within an error budget, and whether a shallow or deep
//! network is the better starting point.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::regress::{Measure, PolyFit};
use crate::{Error, Result};

pub const DEFAULT_BUDGET: f64 = 0.05;
pub const DEFAULT_TAU: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Depth {
    Shallow,
    Deep,
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Depth::Shallow => "Shallow",
            Depth::Deep => "Deep",
        })
    }
}

/// Predicted segmentation error, clamped to `[0, 1]`.
pub fn predict_error(fit: &PolyFit, complexity: f64) -> f64 {
    fit.eval(complexity).clamp(0.0, 1.0)
}

fn check_complexity(complexity: f64) -> Result<()> {
    if !complexity.is_finite() {
        return Err(Error::InvalidParameter(format!("complexity value is undefined ({complexity})")));
    }
    Ok(())
}

/// Largest factor whose predicted error stays within `budget`; 1 when none does.
pub fn recommend_factor(fits: &BTreeMap<u32, PolyFit>, complexity: f64, budget: f64) -> Result<u32> {
    if fits.is_empty() {
        return Err(Error::InvalidParameter("no fits to recommend a factor from".into()));
    }
    if !(budget > 0.0 && budget.is_finite()) {
        return Err(Error::InvalidParameter(format!("error budget must be positive, got {budget}")));
    }
    check_complexity(complexity)?;
    Ok(fits
        .iter()
        .filter(|(_, fit)| predict_error(fit, complexity) <= budget)
        .map(|(&factor, _)| factor)
        .max()
        .unwrap_or(1))
}

/// Shallow above `tau`, deep at or below it.
pub fn recommend_depth(complexity: f64, tau: f64) -> Result<Depth> {
    check_complexity(complexity)?;
    if !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("tau must be finite, got {tau}")));
    }
    Ok(if complexity > tau { Depth::Shallow } else { Depth::Deep })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvisorConfig {
    pub measure: Measure,
    pub budget: f64,
    pub tau: f64,
}

impl Default for AdvisorConfig {
    fn default() -> Self {
        AdvisorConfig { measure: Measure::Mdf, budget: DEFAULT_BUDGET, tau: DEFAULT_TAU }
    }
}

const TAU_NOTE: &str =
    "tau is an extrapolation from two contrasting datasets, not a calibrated threshold; treat it as a policy setting";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rationale {
    pub measure: Measure,
    pub complexity: f64,
    pub budget: f64,
    pub tau: f64,
    /// Clamped predictions before monotonic adjustment.
    pub raw_predicted_e: BTreeMap<u32, f64>,
    /// Factors whose raw prediction fell below that of a smaller factor.
    pub monotonicity_violations: Vec<u32>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub max_factor: u32,
    pub depth_choice: Depth,
    /// Running maximum of the raw predictions, so it never decreases with the factor.
    pub predicted_e: BTreeMap<u32, f64>,
    pub rationale: Rationale,
}

impl Recommendation {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("recommendation serializes")
    }
}

pub fn advise(
    fits: &BTreeMap<u32, PolyFit>,
    complexity: Option<f64>,
    config: &AdvisorConfig,
) -> Result<Recommendation> {
    let complexity = complexity
        .ok_or_else(|| Error::InvalidParameter(format!("{} is undefined for this dataset", config.measure)))?;
    let max_factor = recommend_factor(fits, complexity, config.budget)?;
    let depth_choice = recommend_depth(complexity, config.tau)?;
    let raw: BTreeMap<u32, f64> = fits.iter().map(|(&f, fit)| (f, predict_error(fit, complexity))).collect();
    let mut predicted = BTreeMap::new();
    let mut violations = Vec::new();
    let mut running = f64::NEG_INFINITY;
    for (&factor, &e) in &raw {
        if e < running {
            violations.push(factor);
        }
        running = running.max(e);
        predicted.insert(factor, running);
    }
    Ok(Recommendation {
        max_factor,
        depth_choice,
        predicted_e: predicted,
        rationale: Rationale {
            measure: config.measure,
            complexity,
            budget: config.budget,
            tau: config.tau,
            raw_predicted_e: raw,
            monotonicity_violations: violations,
            note: TAU_NOTE.to_string(),
        },
    })
}
