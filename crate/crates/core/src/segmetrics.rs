//! Confusion counts and overlap metrics between a segmentation and its
//! ground truth.

use serde::{Deserialize, Serialize};

use crate::format::NumberStyle;
use crate::raster::BinaryMask;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

/// Counts segmentation `s` against ground truth `g`.
pub fn confusion(s: &BinaryMask, g: &BinaryMask) -> Result<ConfusionCounts> {
    s.same_dims(g)?;
    let mut c = ConfusionCounts::default();
    for (&si, &gi) in s.data().iter().zip(g.data()) {
        match (si, gi) {
            (true, true) => c.tp += 1,
            (false, false) => c.tn += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

/// Sensitivity, specificity, accuracy, balanced accuracy, Dice, Jaccard and
/// overlap error. A metric whose denominator is zero is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SegMetrics {
    pub se: Option<f64>,
    pub sp: Option<f64>,
    pub a: Option<f64>,
    pub ba: Option<f64>,
    pub d: Option<f64>,
    pub j: Option<f64>,
    pub e: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn seg_metrics(c: &ConfusionCounts) -> Result<SegMetrics> {
    if c.total() == 0 {
        return Err(Error::InvalidParameter("confusion counts are all zero".into()));
    }
    let se = ratio(c.tp, c.tp + c.fn_);
    let sp = ratio(c.tn, c.tn + c.fp);
    let a = ratio(c.tp + c.tn, c.total());
    let ba = se.zip(sp).map(|(se, sp)| (se + sp) / 2.0);
    let d = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_);
    let j = ratio(c.tp, c.tp + c.fp + c.fn_);
    let e = j.map(|j| 1.0 - j);
    Ok(SegMetrics { se, sp, a, ba, d, j, e })
}

impl SegMetrics {
    pub const COLUMNS: [&'static str; 7] = ["Se", "Sp", "A", "BA", "D", "J", "E"];

    pub fn values(&self) -> [Option<f64>; 7] {
        [self.se, self.sp, self.a, self.ba, self.d, self.j, self.e]
    }

    pub(crate) fn from_values(v: [Option<f64>; 7]) -> Self {
        Self { se: v[0], sp: v[1], a: v[2], ba: v[3], d: v[4], j: v[5], e: v[6] }
    }

    /// Per-metric mean over defined values, accumulated in slice order.
    pub fn mean(items: &[SegMetrics]) -> SegMetrics {
        let mut sums = [0.0; 7];
        let mut counts = [0usize; 7];
        for m in items {
            for (i, v) in m.values().iter().enumerate() {
                if let Some(v) = v {
                    sums[i] += v;
                    counts[i] += 1;
                }
            }
        }
        let mut out = [None; 7];
        for i in 0..7 {
            if counts[i] > 0 {
                out[i] = Some(sums[i] / counts[i] as f64);
            }
        }
        Self::from_values(out)
    }

    pub fn csv_cells(&self, style: NumberStyle) -> Vec<String> {
        self.values().iter().map(|&v| style.optional(v)).collect()
    }
}
