//! Actuator geometry and the analytic force-strain models.

mod geometry;
mod pouch;
mod ppam;
mod sampling;

use serde::{Deserialize, Serialize};

pub use geometry::{default_thickness, wf_circ, Geometry, MAX_FOLD_RATIO};
pub use pouch::{
    pouch_force_at_strain, pouch_point, pouch_volume, strain_at_angle, Pouch, WidthPolicy,
    DEFAULT_THETA_MIN, POUCH_MAX_STRAIN,
};
pub use ppam::{
    ppam_force, ppam_force_at_strain, ppam_max_strain, ppam_residuals, ppam_solve, PpamSolution,
    DEFAULT_M_MIN,
};
pub use sampling::{sample_curve, ForceProvider, Model, ModelPlant};

/// One (strain, force, pressure) triple on an actuator characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub strain: f64,
    pub force: f64,
    pub pressure: f64,
}
