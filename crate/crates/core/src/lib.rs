//! Modeling, design-space exploration and control simulation for folded
//! pneumatic artificial muscles (foldPAM).
//!
//! All quantities are SI internally: meters, pascals, newtons, seconds.

pub mod control;
pub mod curve;
pub mod design_space;
pub mod empirical;
pub mod error;
pub mod model;
pub mod numeric;

pub use curve::{CurvePoint, ForceStrainCurve};
pub use error::{Error, Result};
