//! Statistical image-complexity measures and the tooling around them.
//!
//! The crate computes delentropy, mean and median spatial frequency and
//! perimetric complexity of images and masks, simulates the information
//! loss of downsampling a segmentation mask, fits polynomial regressions of
//! segmentation error against complexity, and turns those fits into
//! downsampling and depth recommendations.

pub mod advisor;
pub mod complexity;
pub mod degrade;
mod error;
pub mod fixture;
pub mod format;
pub mod raster;
pub mod regress;
pub mod segmetrics;
pub mod spectra;

pub use advisor::{Depth, Recommendation};
pub use complexity::{ComplexityMeasures, ComplexityReport, Deldensity};
pub use degrade::{DegradationRow, DegradeConfig};
pub use error::{Error, ErrorKind, Result};
pub use raster::{BinaryMask, DatasetManifest, GrayImage};
pub use regress::{Measure, PolyFit, RegressionDiagnostics};
pub use segmetrics::{ConfusionCounts, SegMetrics};
pub use spectra::PowerSpectrum;
