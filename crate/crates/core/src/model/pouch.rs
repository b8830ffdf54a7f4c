//! Ideal pouch-motor model.
//!
//! The inflated cross-section is two circular arcs of film length `l0`
//! subtending half-angle `θ ∈ (0, π/2]`:
//!
//! ```text
//! ε(θ) = 1 − sin θ / θ
//! F(θ) = W_eff · l0 · P · cos θ / θ
//! V(θ) = W_eff · l0² · (θ − sin θ cos θ) / (2 θ²)
//! ```

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::geometry::{wf_circ, Geometry};
use super::OperatingPoint;
use crate::error::{Error, Result};
use crate::numeric::Brent;

/// Smallest arc angle used when sampling or inverting the model. The force
/// is unbounded as θ → 0.
pub const DEFAULT_THETA_MIN: f64 = 1e-3;

/// Largest strain the ideal pouch can reach, `1 − 2/π`.
pub const POUCH_MAX_STRAIN: f64 = 1.0 - 2.0 / std::f64::consts::PI;

/// Which width enters the force law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WidthPolicy {
    /// `W0 − 2 l0 / π`, the ideal pouch-motor state, independent of the
    /// unit's actual fold.
    #[default]
    Ideal,
    /// `W0 − wf`. Exploratory only: there is no validated model for the
    /// non-ideal state.
    ActualFold,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pouch {
    pub width: WidthPolicy,
    pub theta_min: f64,
}

impl Default for Pouch {
    fn default() -> Self {
        Self::ideal()
    }
}

/// `1 − sin θ / θ`, with a series near zero to avoid cancellation.
pub fn strain_at_angle(theta: f64) -> f64 {
    if theta.abs() < 1e-2 {
        let t2 = theta * theta;
        t2 / 6.0 * (1.0 - t2 / 20.0 * (1.0 - t2 / 42.0 * (1.0 - t2 / 72.0)))
    } else {
        1.0 - theta.sin() / theta
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::domain(format!("theta = {theta} outside (0, pi/2]")))
    }
}

fn check_pressure(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("pressure must be positive, got {p}")))
    }
}

impl Pouch {
    pub fn ideal() -> Self {
        Self {
            width: WidthPolicy::Ideal,
            theta_min: DEFAULT_THETA_MIN,
        }
    }

    pub fn non_ideal() -> Self {
        Self {
            width: WidthPolicy::ActualFold,
            theta_min: DEFAULT_THETA_MIN,
        }
    }

    pub fn effective_width(&self, geom: &Geometry) -> Result<f64> {
        let w = match self.width {
            WidthPolicy::Ideal => geom.w0() - wf_circ(geom.l0())?,
            WidthPolicy::ActualFold => geom.width(),
        };
        if w > 0.0 {
            Ok(w)
        } else {
            Err(Error::domain(format!(
                "effective width {w} m is not positive (W0 = {}, l0 = {})",
                geom.w0(),
                geom.l0()
            )))
        }
    }

    /// Smallest strain this model will be evaluated at.
    pub fn min_strain(&self) -> f64 {
        strain_at_angle(self.theta_min)
    }

    pub fn max_strain(&self) -> f64 {
        POUCH_MAX_STRAIN
    }

    pub fn point(&self, geom: &Geometry, pressure: f64, theta: f64) -> Result<OperatingPoint> {
        check_angle(theta)?;
        check_pressure(pressure)?;
        let w = self.effective_width(geom)?;
        // cos rounds to 6e-17 at the fully inflated end
        let c = if theta == FRAC_PI_2 { 0.0 } else { theta.cos() };
        Ok(OperatingPoint {
            strain: strain_at_angle(theta),
            force: w * geom.l0() * pressure * c / theta,
            pressure,
        })
    }

    /// Arc angle producing the given strain.
    pub fn angle_at_strain(&self, eps: f64) -> Result<f64> {
        let (lo, hi) = (self.min_strain(), POUCH_MAX_STRAIN);
        if !(eps >= lo && eps <= hi) {
            return Err(Error::StrainOutOfRange {
                eps,
                min: lo,
                max: hi,
            });
        }
        let brent = Brent {
            xtol: 1e-15,
            ..Brent::default()
        };
        brent.solve(|t| strain_at_angle(t) - eps, self.theta_min, FRAC_PI_2)
    }

    pub fn force_at_strain(&self, geom: &Geometry, pressure: f64, eps: f64) -> Result<f64> {
        let theta = self.angle_at_strain(eps)?;
        Ok(self.point(geom, pressure, theta)?.force)
    }

    /// Inflated volume: lens cross-section area times effective width.
    pub fn volume(&self, geom: &Geometry, theta: f64) -> Result<f64> {
        check_angle(theta)?;
        let w = self.effective_width(geom)?;
        let l0 = geom.l0();
        Ok(w * l0 * l0 * lens_factor(theta) / (2.0 * theta * theta))
    }
}

/// theta - sin(theta)cos(theta), by series near zero.
fn lens_factor(theta: f64) -> f64 {
    if theta < 0.05 {
        // (x - sin x)/2 with x = 2 theta
        let x = 2.0 * theta;
        let x2 = x * x;
        x * x2 / 12.0
            * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0))))
    } else {
        theta - theta.sin() * theta.cos()
    }
}

/// Ideal-width shorthand for [`Pouch::point`].
pub fn pouch_point(geom: &Geometry, pressure: f64, theta: f64) -> Result<OperatingPoint> {
    Pouch::ideal().point(geom, pressure, theta)
}

/// Ideal-width shorthand for [`Pouch::force_at_strain`].
pub fn pouch_force_at_strain(geom: &Geometry, pressure: f64, eps: f64) -> Result<f64> {
    Pouch::ideal().force_at_strain(geom, pressure, eps)
}

/// Ideal-width shorthand for [`Pouch::volume`].
pub fn pouch_volume(geom: &Geometry, theta: f64) -> Result<f64> {
    Pouch::ideal().volume(geom, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn geom() -> Geometry {
        Geometry::new(0.05, 0.05, 0.0, 0.002).unwrap()
    }

    #[test]
    fn fully_inflated_endpoint() {
        let p = pouch_point(&geom(), 5000.0, FRAC_PI_2).unwrap();
        assert_relative_eq!(p.strain, 0.363_380_227_632_418_6, max_relative = 1e-15);
        assert!(p.force.abs() < 1e-12);
    }

    #[test]
    fn quarter_turn_point() {
        // hand evaluation with W_eff = W0 - 2 l0 / pi
        let p = pouch_point(&geom(), 12_400.0, FRAC_PI_4).unwrap();
        assert_relative_eq!(p.strain, 0.099_683_683_842_893_94, max_relative = 1e-14);
        assert_relative_eq!(p.force, 10.141_871_585_096_847, max_relative = 1e-14);
    }

    #[test]
    fn zero_angle_is_a_domain_error() {
        assert!(matches!(
            pouch_point(&geom(), 1e4, 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            pouch_point(&geom(), 1e4, 1.6),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            pouch_point(&geom(), 0.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn force_at_maximum_strain_is_zero() {
        let f = pouch_force_at_strain(&geom(), 12_400.0, POUCH_MAX_STRAIN).unwrap();
        assert!(f.abs() < 1e-12);
    }

    #[test]
    fn inversion_round_trips_the_quarter_turn() {
        let eps = strain_at_angle(FRAC_PI_4);
        let f = pouch_force_at_strain(&geom(), 12_400.0, eps).unwrap();
        assert_relative_eq!(f, 10.141_871_585_096_847, max_relative = 1e-10);
        let f = pouch_force_at_strain(&geom(), 12_400.0, 0.0997).unwrap();
        assert_relative_eq!(f, 10.14, max_relative = 1e-3);
    }

    #[test]
    fn strain_out_of_range() {
        let err = pouch_force_at_strain(&geom(), 12_400.0, 0.5).unwrap_err();
        assert!(matches!(err, Error::StrainOutOfRange { .. }));
        let err = pouch_force_at_strain(&geom(), 12_400.0, 1e-9).unwrap_err();
        assert!(matches!(err, Error::StrainOutOfRange { .. }));
    }

    #[test]
    fn wide_aspect_ratio_has_no_ideal_width() {
        // l0 / W0 above pi/2 leaves nothing after the circular fold
        let g = Geometry::new(0.05, 0.1, 0.0, 0.002).unwrap();
        assert!(matches!(pouch_point(&g, 1e4, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn volume_endpoints() {
        let g = geom();
        let w = g.w0() - wf_circ(g.l0()).unwrap();
        assert_relative_eq!(
            pouch_volume(&g, FRAC_PI_2).unwrap(),
            w * g.l0() * g.l0() / std::f64::consts::PI,
            max_relative = 1e-14
        );
        // small-angle limit W l0^2 theta / 3
        assert_relative_eq!(
            pouch_volume(&g, 1e-6).unwrap(),
            w * g.l0() * g.l0() * 1e-6 / 3.0,
            max_relative = 1e-10
        );
        let (a, b) = (0.05 - 1e-12, 0.05 + 1e-12);
        assert_relative_eq!(
            pouch_volume(&g, a).unwrap(),
            pouch_volume(&g, b).unwrap(),
            max_relative = 1e-9
        );
        assert!(pouch_volume(&g, 0.0).is_err());
    }

    #[test]
    fn non_ideal_width_uses_actual_fold() {
        let g = Geometry::new(0.05, 0.05, 0.01, 0.002).unwrap();
        assert_relative_eq!(
            Pouch::non_ideal().effective_width(&g).unwrap(),
            0.04,
            max_relative = 1e-15
        );
    }

    #[test]
    fn monotone_in_angle() {
        let g = geom();
        let mut prev = pouch_point(&g, 1e4, 1e-3).unwrap();
        for i in 1..=200 {
            let t = 1e-3 + (FRAC_PI_2 - 1e-3) * i as f64 / 200.0;
            let p = pouch_point(&g, 1e4, t).unwrap();
            assert!(p.strain > prev.strain && p.force < prev.force);
            prev = p;
        }
    }

    proptest! {
        #[test]
        fn force_is_linear_in_pressure(theta in 0.01f64..FRAC_PI_2, p in 1e3f64..1e5, k in 0.1f64..10.0) {
            let g = geom();
            let a = pouch_point(&g, p, theta).unwrap().force;
            let b = pouch_point(&g, k * p, theta).unwrap().force;
            prop_assert!((b - k * a).abs() <= 1e-12 * b.abs().max(1e-12));
        }

        #[test]
        fn inversion_round_trip(theta in 0.002f64..FRAC_PI_2) {
            let eps = strain_at_angle(theta);
            let back = Pouch::ideal().angle_at_strain(eps).unwrap();
            prop_assert!((strain_at_angle(back) - eps).abs() <= 1e-10);
        }
    }
}
