use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::curve::{CurvePoint, ForceStrainCurve};
use crate::error::{Error, Result};

/// Force readings down to this value are treated as gauge noise.
pub const NEGATIVE_FORCE_FLOOR: f64 = -0.05;

/// Metadata sidecar as stored on disk (test-stand units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetadataFile {
    pub pressure_kpa: f64,
    pub l0_mm: f64,
    pub w0_mm: f64,
    pub fold_ratio: f64,
    pub travel_rate_mm_per_min: f64,
    pub sample_rate_hz: f64,
}

/// Dataset metadata in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub pressure: f64,
    pub l0: f64,
    pub w0: f64,
    pub fold_ratio: f64,
    /// m/s
    pub travel_rate: f64,
    /// Hz
    pub sample_rate: f64,
}

impl TryFrom<MetadataFile> for DatasetMeta {
    type Error = Error;

    fn try_from(m: MetadataFile) -> Result<Self> {
        let meta = DatasetMeta {
            pressure: m.pressure_kpa * 1e3,
            l0: m.l0_mm * 1e-3,
            w0: m.w0_mm * 1e-3,
            fold_ratio: m.fold_ratio,
            travel_rate: m.travel_rate_mm_per_min * 1e-3 / 60.0,
            sample_rate: m.sample_rate_hz,
        };
        meta.validate()?;
        Ok(meta)
    }
}

impl DatasetMeta {
    pub fn from_json<R: Read>(r: R) -> Result<Self> {
        let file: MetadataFile = serde_json::from_reader(r).map_err(|e| Error::Data {
            line: e.line(),
            msg: e.to_string(),
        })?;
        file.try_into()
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("pressure", self.pressure),
            ("l0", self.l0),
            ("W0", self.w0),
            ("travel rate", self.travel_rate),
            ("sample rate", self.sample_rate),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.fold_ratio.is_finite() && self.fold_ratio >= 0.0) {
            return Err(Error::domain(format!(
                "fold ratio must be non-negative, got {}",
                self.fold_ratio
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    #[serde(rename = "time_s")]
    pub time: f64,
    #[serde(rename = "force_n")]
    pub force: f64,
}

/// A constant-rate compression/return record from a force gauge.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementDataset {
    pub samples: Vec<Sample>,
    pub meta: DatasetMeta,
}

/// Reads a `time_s,force_n` CSV record.
pub fn load_measurements<R: Read>(source: R, meta: DatasetMeta) -> Result<MeasurementDataset> {
    meta.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Data {
            line: 1,
            msg: e.to_string(),
        })?
        .clone();
    if headers.iter().collect::<Vec<_>>() != ["time_s", "force_n"] {
        return Err(Error::Data {
            line: 1,
            msg: format!(
                "expected header `time_s,force_n`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut samples: Vec<Sample> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Data {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let s: Sample = rec.deserialize(Some(&headers)).map_err(|e| Error::Data {
            line,
            msg: e.to_string(),
        })?;
        if !s.time.is_finite() || !s.force.is_finite() {
            return Err(Error::Data {
                line,
                msg: "non-finite value".into(),
            });
        }
        if let Some(prev) = samples.last() {
            if s.time <= prev.time {
                return Err(Error::Data {
                    line,
                    msg: format!("time {} does not increase (previous {})", s.time, prev.time),
                });
            }
        }
        if s.force < NEGATIVE_FORCE_FLOOR {
            return Err(Error::Data {
                line,
                msg: format!(
                    "force {} N below the {} N noise floor",
                    s.force, NEGATIVE_FORCE_FLOOR
                ),
            });
        }
        samples.push(s);
    }
    if samples.is_empty() {
        return Err(Error::Data {
            line: 2,
            msg: "no samples".into(),
        });
    }
    Ok(MeasurementDataset { samples, meta })
}

/// Which half of the test-stand cycle to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stroke {
    /// Contracting from l0 to the zero-force state (force falls).
    #[default]
    Compression,
    /// Extending back to l0 (force rises).
    Return,
    Both,
}

/// Index of the middle of the plateau around the extreme sample, where
/// `near(i)` marks samples close to the extreme.
fn plateau_middle(n: usize, at: usize, near: impl Fn(usize) -> bool) -> usize {
    let mut a = at;
    while a > 0 && near(a - 1) {
        a -= 1;
    }
    let mut b = at;
    while b + 1 < n && near(b + 1) {
        b += 1;
    }
    (a + b) / 2
}

/// Converts a record to a force-strain curve using the constant travel
/// rate. Strain is zero where the actuator length equals l0.
pub fn dataset_to_curve(ds: &MeasurementDataset, stroke: Stroke) -> Result<ForceStrainCurve> {
    let s = &ds.samples;
    let n = s.len();
    let stroke_err = || Error::Data {
        line: 0,
        msg: "could not locate a compression/return turnaround; force is monotone over the record"
            .into(),
    };
    if n < 3 {
        return Err(stroke_err());
    }
    let f: Vec<f64> = s.iter().map(|x| x.force).collect();
    let (mut imin, mut imax) = (0, 0);
    for i in 0..n {
        if f[i] < f[imin] {
            imin = i;
        }
        if f[i] > f[imax] {
            imax = i;
        }
    }
    let range = f[imax] - f[imin];
    if range <= 0.0 {
        return Err(stroke_err());
    }
    let band = 0.01 * range;
    let swing = 0.1 * range;

    // compression first: force falls to the zero-force state, then recovers
    let turn = plateau_middle(n, imin, |i| f[i] <= f[imin] + band);
    let compress_first = f[..=turn].iter().cloned().fold(f64::MIN, f64::max) >= f[imin] + swing
        && f[turn..].iter().cloned().fold(f64::MIN, f64::max) >= f[imin] + swing;
    let (turn, compress_first) = if compress_first {
        (turn, true)
    } else {
        let top = plateau_middle(n, imax, |i| f[i] >= f[imax] - band);
        let ok = f[..=top].iter().cloned().fold(f64::MAX, f64::min) <= f[imax] - swing
            && f[top..].iter().cloned().fold(f64::MAX, f64::min) <= f[imax] - swing;
        if !ok {
            return Err(stroke_err());
        }
        (top, false)
    };

    let rate = ds.meta.travel_rate / ds.meta.l0;
    let (t0, tt) = (s[0].time, s[turn].time);
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let first = &s[..=turn];
    let second = &s[turn..];
    // (samples, is_compression, strain law)
    let first_is_compression = compress_first;
    let mut push = |part: &[Sample], compression: bool| {
        for x in part {
            let strain = if compress_first {
                if compression {
                    rate * (x.time - t0)
                } else {
                    rate * (2.0 * tt - x.time - t0)
                }
            } else if compression {
                rate * (x.time - tt)
            } else {
                rate * (tt - x.time)
            };
            if strain >= -1e-12 {
                pts.push((strain.max(0.0), x.force.max(0.0)));
            }
        }
    };
    match stroke {
        Stroke::Compression => {
            if first_is_compression {
                push(first, true)
            } else {
                push(second, true)
            }
        }
        Stroke::Return => {
            if first_is_compression {
                push(second, false)
            } else {
                push(first, false)
            }
        }
        Stroke::Both => {
            push(first, first_is_compression);
            push(&second[1..], !first_is_compression);
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));

    // average samples that share a strain
    let mut merged: Vec<CurvePoint> = Vec::with_capacity(pts.len());
    let mut i = 0;
    while i < pts.len() {
        let mut j = i + 1;
        while j < pts.len() && (pts[j].0 - pts[i].0).abs() <= 1e-12 * pts[i].0.abs().max(1.0) {
            j += 1;
        }
        let k = (j - i) as f64;
        merged.push(CurvePoint {
            strain: pts[i..j].iter().map(|p| p.0).sum::<f64>() / k,
            force: pts[i..j].iter().map(|p| p.1).sum::<f64>() / k,
        });
        i = j;
    }
    ForceStrainCurve::new(
        merged,
        ds.meta.pressure,
        format!("fr={}", ds.meta.fold_ratio),
    )
}
