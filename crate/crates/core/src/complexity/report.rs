use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{delentropy, mdf, mnf, perimetric_complexity};
use crate::format::NumberStyle;
use crate::raster::{BinaryMask, DatasetManifest, GrayImage};
use crate::spectra::radial_power_spectrum;
use crate::Result;

/// The four measures for one image/mask pair; `None` marks an undefined
/// measure (constant image, empty mask).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexityMeasures {
    pub de: Option<f64>,
    pub mnf: Option<f64>,
    pub mdf: Option<f64>,
    pub pc: Option<f64>,
}

impl ComplexityMeasures {
    pub fn get(&self, measure: crate::Measure) -> Option<f64> {
        match measure {
            crate::Measure::De => self.de,
            crate::Measure::Mnf => self.mnf,
            crate::Measure::Mdf => self.mdf,
            crate::Measure::Pc => self.pc,
        }
    }

    /// Per-measure mean over the defined values, in slice order.
    pub fn mean(items: &[ComplexityMeasures]) -> ComplexityMeasures {
        let avg = |f: fn(&ComplexityMeasures) -> Option<f64>| {
            let (sum, n) = items.iter().filter_map(f).fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
            (n > 0).then(|| sum / n as f64)
        };
        ComplexityMeasures { de: avg(|m| m.de), mnf: avg(|m| m.mnf), mdf: avg(|m| m.mdf), pc: avg(|m| m.pc) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageComplexity {
    pub path: String,
    #[serde(flatten)]
    pub measures: ComplexityMeasures,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub name: String,
    pub per_image: Vec<ImageComplexity>,
    pub aggregate: ComplexityMeasures,
}

impl ComplexityReport {
    pub fn from_items(name: impl Into<String>, per_image: Vec<ImageComplexity>) -> Self {
        let measures: Vec<_> = per_image.iter().map(|i| i.measures).collect();
        let aggregate = ComplexityMeasures::mean(&measures);
        Self { name: name.into(), per_image, aggregate }
    }

    /// `path,de,mnf,mdf,pc` rows, one per image, then an `aggregate` row.
    pub fn to_csv(&self, style: NumberStyle) -> String {
        let mut out = String::from("path,de,mnf,mdf,pc\n");
        let rows = self.per_image.iter().map(|i| (i.path.as_str(), &i.measures));
        for (path, m) in rows.chain(std::iter::once(("aggregate", &self.aggregate))) {
            let cells = [m.de, m.mnf, m.mdf, m.pc].map(|v| style.optional(v));
            out.push_str(&csv_field(path));
            for c in cells {
                out.push(',');
                out.push_str(&c);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Delentropy and spectral measures of `image`, perimetric complexity of `mask`.
pub fn measure_pair(image: &GrayImage, mask: &BinaryMask, bins: usize) -> Result<ComplexityMeasures> {
    let de = delentropy(image)?;
    let spectrum = radial_power_spectrum(image, bins)?;
    Ok(ComplexityMeasures {
        de: Some(de),
        mnf: mnf(&spectrum),
        mdf: mdf(&spectrum),
        pc: perimetric_complexity(mask).ok(),
    })
}

/// Measures every manifest item. Items are processed in parallel on the
/// current rayon pool; results and the aggregate follow manifest order.
pub fn complexity_report(manifest: &DatasetManifest, bins: usize) -> Result<ComplexityReport> {
    let results: Vec<Result<ImageComplexity>> = (0..manifest.items.len())
        .into_par_iter()
        .map(|i| {
            let (image, mask) = manifest.load_item(i)?;
            let measures = measure_pair(&image, &mask, bins).map_err(|e| crate::Error::Item {
                index: i,
                label: manifest.items[i].label.clone(),
                source: Box::new(e),
            })?;
            Ok(ImageComplexity { path: manifest.items[i].label.clone(), measures })
        })
        .collect();
    let per_image = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ComplexityReport::from_items(manifest.name.clone(), per_image))
}
