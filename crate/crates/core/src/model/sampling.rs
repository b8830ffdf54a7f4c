use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use super::geometry::Geometry;
use super::pouch::Pouch;
use super::ppam::{self, ppam_force, PpamSolution, DEFAULT_M_MIN};
use crate::curve::{CurvePoint, ForceStrainCurve};
use crate::empirical::Surrogate;
use crate::error::{Error, Result};

/// Anything that can report actuator force as a function of fold ratio,
/// strain and pressure.
pub trait ForceProvider {
    fn force(&self, fr: f64, eps: f64, pressure: f64) -> Result<f64>;

    /// `(lowest strain evaluated, strain at which force first reaches zero)`.
    fn strain_domain(&self, fr: f64, pressure: f64) -> Result<(f64, f64)>;
}

/// Model selector for curve generation.
#[derive(Debug, Clone)]
pub enum Model {
    Pouch(Pouch),
    /// sPAM/PPAM; curves are sampled from `m_min` up to `m = 1/2`.
    Ppam {
        m_min: f64,
    },
    Surrogate(Arc<Surrogate>),
}

impl Model {
    pub fn ppam() -> Self {
        Model::Ppam {
            m_min: DEFAULT_M_MIN,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Model::Pouch(p) if p.width == super::WidthPolicy::ActualFold => "pouch-non-ideal",
            Model::Pouch(_) => "pouch",
            Model::Ppam { .. } => "ppam",
            Model::Surrogate(_) => "surrogate",
        }
    }

    pub fn force(&self, geom: &Geometry, pressure: f64, eps: f64) -> Result<f64> {
        match self {
            Model::Pouch(p) => p.force_at_strain(geom, pressure, eps),
            Model::Ppam { .. } => ppam::ppam_force_at_strain(geom, pressure, eps),
            Model::Surrogate(s) => s.force(geom.fold_ratio(), eps, pressure),
        }
    }

    pub fn strain_domain(&self, geom: &Geometry, pressure: f64) -> Result<(f64, f64)> {
        match self {
            Model::Pouch(p) => {
                p.effective_width(geom)?;
                Ok((p.min_strain(), p.max_strain()))
            }
            Model::Ppam { m_min } => {
                let r = geom.l0() / geom.h();
                let lo = ppam::strain_for(*m_min, r)?.1;
                Ok((lo, ppam::ppam_max_strain(r)?))
            }
            Model::Surrogate(s) => s.strain_domain(geom.fold_ratio(), pressure),
        }
    }
}

/// Samples `n` points of a model characteristic, from the model's lowest
/// strain up to its zero-force strain.
///
/// The analytic models are sampled uniformly in their internal parameter
/// (arc angle for the pouch, m for sPAM/PPAM), which concentrates points at
/// small strain where the force changes fastest. The surrogate is sampled
/// uniformly in strain.
pub fn sample_curve(
    model: &Model,
    geom: &Geometry,
    pressure: f64,
    n: usize,
) -> Result<ForceStrainCurve> {
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 samples, got {n}")));
    }
    let lerp = |a: f64, b: f64, i: usize| {
        if i == n - 1 {
            b
        } else {
            a + (b - a) * i as f64 / (n - 1) as f64
        }
    };
    let points: Vec<CurvePoint> = match model {
        Model::Pouch(p) => (0..n)
            .map(|i| {
                let op = p.point(geom, pressure, lerp(p.theta_min, FRAC_PI_2, i))?;
                Ok(CurvePoint {
                    strain: op.strain,
                    force: op.force.max(0.0),
                })
            })
            .collect::<Result<_>>()?,
        Model::Ppam { m_min } => {
            if !(pressure.is_finite() && pressure > 0.0) {
                return Err(Error::domain(format!(
                    "pressure must be positive, got {pressure}"
                )));
            }
            if !(*m_min > 0.0 && *m_min < 0.5) {
                return Err(Error::domain(format!("m_min = {m_min} outside (0, 1/2)")));
            }
            let r = geom.l0() / geom.h();
            ppam::ppam_max_strain(r)?;
            (0..n)
                .map(|i| {
                    let m = lerp(*m_min, 0.5, i);
                    let (phi, strain) = ppam::strain_for(m, r)?;
                    Ok(CurvePoint {
                        strain,
                        force: ppam_force(geom.h(), pressure, PpamSolution { m, phi }),
                    })
                })
                .collect::<Result<_>>()?
        }
        Model::Surrogate(s) => {
            let fr = geom.fold_ratio();
            let (lo, hi) = s.strain_domain(fr, pressure)?;
            (0..n)
                .map(|i| {
                    let strain = lerp(lo, hi, i);
                    Ok(CurvePoint {
                        strain,
                        force: s.force(fr, strain, pressure)?,
                    })
                })
                .collect::<Result<_>>()?
        }
    };
    ForceStrainCurve::new(points, pressure, model.name())
}

/// A model evaluated on a base geometry whose fold ratio is varied.
#[derive(Debug, Clone)]
pub struct ModelPlant {
    pub model: Model,
    pub base: Geometry,
}

impl ForceProvider for ModelPlant {
    fn force(&self, fr: f64, eps: f64, pressure: f64) -> Result<f64> {
        let g = self.base.with_fold_ratio(fr)?;
        let (_, hi) = self.model.strain_domain(&g, pressure)?;
        if eps >= hi {
            return Ok(0.0);
        }
        self.model.force(&g, pressure, eps)
    }

    fn strain_domain(&self, fr: f64, pressure: f64) -> Result<(f64, f64)> {
        let g = self.base.with_fold_ratio(fr)?;
        self.model.strain_domain(&g, pressure)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ppam_force_at_strain, POUCH_MAX_STRAIN};
    use approx::assert_relative_eq;

    fn geom() -> Geometry {
        Geometry::new(0.05, 0.05, 0.0, 0.005).unwrap()
    }

    #[test]
    fn two_point_pouch_curve_is_its_endpoints() {
        let p = Pouch::ideal();
        let c = sample_curve(&Model::Pouch(p), &geom(), 12_400.0, 2).unwrap();
        let first = p.point(&geom(), 12_400.0, p.theta_min).unwrap();
        assert_eq!(c.points()[0].strain, first.strain);
        assert_eq!(c.points()[0].force, first.force);
        assert_eq!(c.last_strain(), POUCH_MAX_STRAIN);
        assert!(c.points()[1].force < 1e-12);
    }

    #[test]
    fn pouch_curve_ends_at_analytic_maximum() {
        let c = sample_curve(&Model::Pouch(Pouch::ideal()), &geom(), 12_400.0, 101).unwrap();
        assert_eq!(c.len(), 101);
        assert!((c.last_strain() - 0.363_38).abs() < 1e-5);
    }

    #[test]
    fn ppam_curve_matches_pointwise_solves() {
        let c = sample_curve(&Model::ppam(), &geom(), 12_400.0, 101).unwrap();
        assert!(c.points().windows(2).all(|w| w[1].force < w[0].force));
        assert_eq!(c.points()[100].force, 0.0);
        for p in c.points().iter().step_by(10).skip(1) {
            let f = ppam_force_at_strain(&geom(), 12_400.0, p.strain).unwrap();
            assert_relative_eq!(f, p.force, max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    #[test]
    fn too_few_samples() {
        assert!(sample_curve(&Model::ppam(), &geom(), 12_400.0, 1).is_err());
    }

    #[test]
    fn plant_is_slack_past_zero_force() {
        let plant = ModelPlant {
            model: Model::Pouch(Pouch::ideal()),
            base: geom(),
        };
        assert_eq!(plant.force(0.2, 0.4, 1e4).unwrap(), 0.0);
        assert!(plant.force(0.2, 0.2, 1e4).unwrap() > 0.0);
    }
}
