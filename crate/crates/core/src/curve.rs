//! Sampled force-strain characteristics.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub strain: f64,
    #[serde(rename = "force_n")]
    pub force: f64,
}

/// A strain-ordered force-strain curve at fixed pressure.
///
/// Strains are strictly increasing and forces non-negative. Below the first
/// sample the curve holds its first force; beyond the last sample it is
/// zero (the actuator is slack past its zero-force contraction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceStrainCurve {
    points: Vec<CurvePoint>,
    pressure: f64,
    label: String,
}

impl ForceStrainCurve {
    pub fn new(points: Vec<CurvePoint>, pressure: f64, label: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidCurve("no points".into()));
        }
        if !(pressure.is_finite() && pressure > 0.0) {
            return Err(Error::InvalidCurve(format!(
                "pressure must be positive, got {pressure}"
            )));
        }
        for (i, p) in points.iter().enumerate() {
            if !p.strain.is_finite() || !p.force.is_finite() {
                return Err(Error::InvalidCurve(format!(
                    "non-finite sample at index {i}"
                )));
            }
            if p.force < 0.0 {
                return Err(Error::InvalidCurve(format!(
                    "negative force {} at index {i}",
                    p.force
                )));
            }
        }
        if let Some(i) = points.windows(2).position(|w| w[1].strain <= w[0].strain) {
            return Err(Error::InvalidCurve(format!(
                "strain not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Self {
            points,
            pressure,
            label: label.into(),
        })
    }

    pub fn from_pairs(
        pairs: &[(f64, f64)],
        pressure: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        let pts = pairs
            .iter()
            .map(|&(strain, force)| CurvePoint { strain, force })
            .collect();
        Self::new(pts, pressure, label)
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn pressure(&self) -> f64 {
        self.pressure
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn first_strain(&self) -> f64 {
        self.points[0].strain
    }

    pub fn last_strain(&self) -> f64 {
        self.points[self.points.len() - 1].strain
    }

    pub fn max_force(&self) -> f64 {
        self.points.iter().map(|p| p.force).fold(0.0, f64::max)
    }

    /// Piecewise-linear force, held below the first sample and zero past
    /// the last.
    pub fn force_at(&self, eps: f64) -> f64 {
        let pts = &self.points;
        if eps <= pts[0].strain {
            return pts[0].force;
        }
        let last = pts[pts.len() - 1];
        if eps > last.strain {
            return 0.0;
        }
        if eps == last.strain {
            return last.force;
        }
        let i = pts.partition_point(|p| p.strain <= eps);
        let (a, b) = (pts[i - 1], pts[i]);
        let t = (eps - a.strain) / (b.strain - a.strain);
        a.force + t * (b.force - a.force)
    }

    /// Smallest strain beyond which the force stays at or below
    /// `tol_frac · max_force`.
    pub fn zero_force_strain(&self, tol_frac: f64) -> f64 {
        let thresh = tol_frac * self.max_force();
        let mut out = self.last_strain();
        for p in self.points.iter().rev() {
            if p.force <= thresh {
                out = p.strain;
            } else {
                break;
            }
        }
        out
    }

    /// True when the last sample is within `tol_frac` of zero relative to
    /// the first.
    pub fn terminates_at_zero(&self, tol_frac: f64) -> bool {
        self.points[self.points.len() - 1].force <= tol_frac * self.points[0].force
    }

    /// All forces multiplied by `k`, pressure unchanged.
    pub fn scale_force(&self, k: f64) -> Result<Self> {
        let pts = self
            .points
            .iter()
            .map(|p| CurvePoint {
                strain: p.strain,
                force: k * p.force,
            })
            .collect();
        Self::new(pts, self.pressure, self.label.clone())
    }

    /// Same forces relabelled to another pressure.
    pub fn with_pressure(&self, pressure: f64) -> Result<Self> {
        Self::new(self.points.clone(), pressure, self.label.clone())
    }

    /// Linear resample at the given strains (see [`Self::force_at`]).
    pub fn resample(&self, strains: &[f64]) -> Result<Self> {
        let pts = strains
            .iter()
            .map(|&s| CurvePoint {
                strain: s,
                force: self.force_at(s),
            })
            .collect();
        Self::new(pts, self.pressure, self.label.clone())
    }

    /// Writes `strain,force_n` CSV.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for p in &self.points {
            wtr.serialize(p).map_err(std::io::Error::other)?;
        }
        wtr.flush()
    }

    /// Reads `strain,force_n` CSV.
    pub fn read_csv<R: Read>(r: R, pressure: f64, label: impl Into<String>) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Data {
                line: 1,
                msg: e.to_string(),
            })?
            .clone();
        if headers.iter().map(str::trim).collect::<Vec<_>>() != ["strain", "force_n"] {
            return Err(Error::Data {
                line: 1,
                msg: format!(
                    "expected header `strain,force_n`, found `{}`",
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            });
        }
        let mut pts = Vec::new();
        for (i, rec) in rdr.deserialize::<CurvePoint>().enumerate() {
            let p = rec.map_err(|e| Error::Data {
                line: i + 2,
                msg: e.to_string(),
            })?;
            pts.push(p);
        }
        Self::new(pts, pressure, label)
    }
}
