use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest fold ratio `w_f / W0`. Physically the two folds overlap fully at
/// 2/3; the quoted test matrix rounds this to 0.67, which is accepted.
pub const MAX_FOLD_RATIO: f64 = 0.67;

const FOLD_SLACK: f64 = 1e-9;

/// Physical parameterization of a foldPAM unit, in meters.
///
/// `w0` is the unfolded flat width, `l0` the uninflated length, `wf` the
/// total folded width and `h` the overall flattened thickness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGeometry", into = "RawGeometry")]
pub struct Geometry {
    w0: f64,
    l0: f64,
    wf: f64,
    h: f64,
}

#[derive(Serialize, Deserialize)]
struct RawGeometry {
    w0: f64,
    l0: f64,
    wf: f64,
    h: f64,
}

impl TryFrom<RawGeometry> for Geometry {
    type Error = Error;

    fn try_from(r: RawGeometry) -> Result<Self> {
        Geometry::new(r.w0, r.l0, r.wf, r.h)
    }
}

impl From<Geometry> for RawGeometry {
    fn from(g: Geometry) -> Self {
        RawGeometry {
            w0: g.w0,
            l0: g.l0,
            wf: g.wf,
            h: g.h,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be finite and positive, got {v}"
        )))
    }
}

impl Geometry {
    pub fn new(w0: f64, l0: f64, wf: f64, h: f64) -> Result<Self> {
        positive("W0", w0)?;
        positive("l0", l0)?;
        positive("h", h)?;
        if !wf.is_finite() || wf < 0.0 {
            return Err(Error::domain(format!(
                "wf must be finite and non-negative, got {wf}"
            )));
        }
        let fr = wf / w0;
        if fr > MAX_FOLD_RATIO + FOLD_SLACK {
            return Err(Error::FoldRatioOutOfRange {
                fr,
                lo: 0.0,
                hi: MAX_FOLD_RATIO,
            });
        }
        Ok(Self { w0, l0, wf, h })
    }

    /// Same unit with the folded width set from a fold ratio.
    pub fn with_fold_ratio(&self, fr: f64) -> Result<Self> {
        if !(0.0..=MAX_FOLD_RATIO + FOLD_SLACK).contains(&fr) {
            return Err(Error::FoldRatioOutOfRange {
                fr,
                lo: 0.0,
                hi: MAX_FOLD_RATIO,
            });
        }
        Self::new(self.w0, self.l0, fr * self.w0, self.h)
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn l0(&self) -> f64 {
        self.l0
    }

    pub fn wf(&self) -> f64 {
        self.wf
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Uninflated width after folding, `W0 - wf`.
    pub fn width(&self) -> f64 {
        self.w0 - self.wf
    }

    pub fn fold_ratio(&self) -> f64 {
        self.wf / self.w0
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.l0 / self.w0
    }

    /// Inflated tube diameter, from `W0 = π D0 / 2`.
    pub fn tube_diameter(&self) -> f64 {
        2.0 * self.w0 / PI
    }
}

/// Thickness used by demos when none is given (`0.1·W0`). Not a measured
/// value; real units should supply their own.
pub fn default_thickness(w0: f64) -> f64 {
    0.1 * w0
}

/// Folded width at which the inflated section becomes circular, `2 l0 / π`.
pub fn wf_circ(l0: f64) -> Result<f64> {
    positive("l0", l0)?;
    Ok(2.0 * l0 / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unfolded_unit() {
        let g = Geometry::new(0.05, 0.05, 0.0, 0.002).unwrap();
        assert_eq!(g.fold_ratio(), 0.0);
        assert_eq!(g.aspect_ratio(), 1.0);
    }

    #[test]
    fn maximum_fold_from_test_matrix() {
        let g = Geometry::new(0.05, 0.02, 0.0335, 0.002).unwrap();
        assert_relative_eq!(g.fold_ratio(), 0.67, max_relative = 1e-12);
        assert_relative_eq!(g.aspect_ratio(), 0.4, max_relative = 1e-12);
    }

    #[test]
    fn over_folded_is_rejected() {
        let err = Geometry::new(0.05, 0.05, 0.04, 0.002).unwrap_err();
        assert!(matches!(err, Error::FoldRatioOutOfRange { .. }));
    }

    #[test]
    fn nonpositive_dimensions_are_rejected() {
        assert!(Geometry::new(0.0, 0.05, 0.0, 0.002).is_err());
        assert!(Geometry::new(0.05, -1.0, 0.0, 0.002).is_err());
        assert!(Geometry::new(0.05, 0.05, 0.0, 0.0).is_err());
        assert!(Geometry::new(0.05, 0.05, -0.001, 0.002).is_err());
        assert!(Geometry::new(0.05, f64::NAN, 0.0, 0.002).is_err());
    }

    #[test]
    fn circular_fold_width() {
        assert_relative_eq!(
            wf_circ(0.05).unwrap(),
            0.031_830_988_618_379_07,
            max_relative = 1e-15
        );
        assert_relative_eq!(wf_circ(PI / 2.0).unwrap(), 1.0, max_relative = 1e-15);
        assert!(wf_circ(0.0).is_err());
    }

    #[test]
    fn serde_validates() {
        let ok: Geometry =
            serde_json::from_str(r#"{"w0":0.05,"l0":0.05,"wf":0.0,"h":0.002}"#).unwrap();
        assert_eq!(ok.w0(), 0.05);
        let bad = serde_json::from_str::<Geometry>(r#"{"w0":0.05,"l0":0.05,"wf":0.04,"h":0.002}"#);
        assert!(bad.is_err());
    }
}
