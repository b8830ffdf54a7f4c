//! Test-stand data ingestion, kink detection and the interpolated
//! surrogate model.

mod kink;
mod measurements;
mod surrogate;

pub use kink::{detect_kink, KinkReport, KINK_SLOPE_CHANGE, KINK_SSE_RATIO};
pub use measurements::{
    dataset_to_curve, load_measurements, DatasetMeta, MeasurementDataset, MetadataFile, Sample,
    Stroke, NEGATIVE_FORCE_FLOOR,
};
pub use surrogate::{build_surrogate, Surrogate, SURROGATE_GRID_POINTS};
