use serde::{Deserialize, Serialize};

use crate::curve::ForceStrainCurve;
use crate::error::{Error, Result};
use crate::model::ForceProvider;

/// Uniform points in the common strain grid (member endpoints are added).
pub const SURROGATE_GRID_POINTS: usize = 512;

/// Bilinear (fold ratio, strain) interpolant over a family of measured or
/// modeled curves at one reference pressure. Other pressures are reached
/// by linear scaling, which is exact for the analytic models and an
/// approximation for measured data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surrogate {
    grid: Vec<f64>,
    strains: Vec<f64>,
    /// `forces[j][k]`: member j at `strains[k]`.
    forces: Vec<Vec<f64>>,
    zero_strain: Vec<f64>,
    p_ref: f64,
}

pub fn build_surrogate(members: &[(f64, ForceStrainCurve)], p_ref: f64) -> Result<Surrogate> {
    if !(p_ref.is_finite() && p_ref > 0.0) {
        return Err(Error::domain(format!(
            "reference pressure must be positive, got {p_ref}"
        )));
    }
    if members.len() < 2 {
        return Err(Error::domain("a surrogate needs at least two fold ratios"));
    }
    for (fr, c) in members {
        if !fr.is_finite() {
            return Err(Error::domain("non-finite fold ratio"));
        }
        if (c.pressure() - p_ref).abs() > 1e-9 * p_ref {
            return Err(Error::domain(format!(
                "curve at f_r = {fr} has pressure {} Pa, expected {p_ref} Pa",
                c.pressure()
            )));
        }
    }
    let mut order: Vec<usize> = (0..members.len()).collect();
    order.sort_by(|&a, &b| members[a].0.total_cmp(&members[b].0));
    if let Some(w) = order
        .windows(2)
        .find(|w| members[w[0]].0 == members[w[1]].0)
    {
        return Err(Error::domain(format!(
            "duplicate fold ratio {}",
            members[w[0]].0
        )));
    }

    let lo = members
        .iter()
        .map(|(_, c)| c.first_strain())
        .fold(f64::INFINITY, f64::min);
    let hi = members
        .iter()
        .map(|(_, c)| c.last_strain())
        .fold(f64::NEG_INFINITY, f64::max);
    let mut strains: Vec<f64> = (0..SURROGATE_GRID_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (SURROGATE_GRID_POINTS - 1) as f64)
        .collect();
    *strains.last_mut().unwrap() = hi;
    for (_, c) in members {
        strains.push(c.first_strain());
        strains.push(c.last_strain());
    }
    strains.sort_by(f64::total_cmp);
    strains.dedup();

    let mut grid = Vec::with_capacity(members.len());
    let mut forces = Vec::with_capacity(members.len());
    let mut zero_strain = Vec::with_capacity(members.len());
    for &j in &order {
        let (fr, c) = &members[j];
        grid.push(*fr);
        forces.push(strains.iter().map(|&s| c.force_at(s)).collect::<Vec<_>>());
        zero_strain.push(c.last_strain());
    }
    Ok(Surrogate {
        grid,
        strains,
        forces,
        zero_strain,
        p_ref,
    })
}

impl Surrogate {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn strains(&self) -> &[f64] {
        &self.strains
    }

    pub fn p_ref(&self) -> f64 {
        self.p_ref
    }

    /// Stored member curve `j` on the common strain grid.
    pub fn member(&self, j: usize) -> Result<ForceStrainCurve> {
        let pairs: Vec<(f64, f64)> = self
            .strains
            .iter()
            .zip(&self.forces[j])
            .map(|(&s, &f)| (s, f))
            .collect();
        ForceStrainCurve::from_pairs(&pairs, self.p_ref, format!("fr={}", self.grid[j]))
    }

    /// Cell index and weight of `fr` in the fold-ratio grid.
    fn locate(&self, fr: f64) -> Result<(usize, f64)> {
        let g = &self.grid;
        let (lo, hi) = (g[0], g[g.len() - 1]);
        if !(fr >= lo && fr <= hi) {
            return Err(Error::FoldRatioOutOfRange { fr, lo, hi });
        }
        let j = g.partition_point(|&x| x <= fr).clamp(1, g.len() - 1) - 1;
        Ok((j, (fr - g[j]) / (g[j + 1] - g[j])))
    }

    fn member_at(&self, j: usize, eps: f64) -> f64 {
        let s = &self.strains;
        let f = &self.forces[j];
        let k = s.partition_point(|&x| x <= eps).clamp(1, s.len() - 1) - 1;
        if eps == s[k + 1] {
            return f[k + 1];
        }
        let t = (eps - s[k]) / (s[k + 1] - s[k]);
        f[k] + t * (f[k + 1] - f[k])
    }

    fn check_pressure(pressure: f64) -> Result<()> {
        if pressure.is_finite() && pressure > 0.0 {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "pressure must be positive, got {pressure}"
            )))
        }
    }

    /// Force at (fr, eps) and pressure `pressure`.
    pub fn force(&self, fr: f64, eps: f64, pressure: f64) -> Result<f64> {
        Self::check_pressure(pressure)?;
        let (j, t) = self.locate(fr)?;
        let (s0, s1) = (self.strains[0], self.strains[self.strains.len() - 1]);
        if !(eps >= s0 && eps <= s1) {
            return Err(Error::StrainOutOfRange {
                eps,
                min: s0,
                max: s1,
            });
        }
        let a = self.member_at(j, eps);
        let b = self.member_at(j + 1, eps);
        let f = if t == 0.0 {
            a
        } else if t == 1.0 {
            b
        } else {
            (1.0 - t) * a + t * b
        };
        Ok(f.max(0.0) * (pressure / self.p_ref))
    }

    pub fn strain_domain(&self, fr: f64, pressure: f64) -> Result<(f64, f64)> {
        Self::check_pressure(pressure)?;
        let (j, t) = self.locate(fr)?;
        let zero = if t == 0.0 {
            self.zero_strain[j]
        } else if t == 1.0 {
            self.zero_strain[j + 1]
        } else {
            self.zero_strain[j].max(self.zero_strain[j + 1])
        };
        Ok((self.strains[0], zero))
    }
}

impl ForceProvider for Surrogate {
    fn force(&self, fr: f64, eps: f64, pressure: f64) -> Result<f64> {
        let hi = self.strains[self.strains.len() - 1];
        if eps > hi {
            return Ok(0.0);
        }
        Surrogate::force(self, fr, eps, pressure)
    }

    fn strain_domain(&self, fr: f64, pressure: f64) -> Result<(f64, f64)> {
        Surrogate::strain_domain(self, fr, pressure)
    }
}
