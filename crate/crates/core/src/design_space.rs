//! Curve families and the force-strain area they sweep.

use serde::{Deserialize, Serialize};

use crate::curve::ForceStrainCurve;
use crate::error::{Error, Result};
use crate::model::{sample_curve, Geometry, Model};

/// Uniform points in the area grid; every curve vertex is added on top.
pub const AREA_GRID_POINTS: usize = 512;
/// Zero-force tolerance as a fraction of a curve's maximum force.
pub const ZERO_FORCE_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionArea {
    /// Force times strain, in newtons.
    pub area: f64,
    /// `area / (a_r W0^2 P)`.
    pub normalized: f64,
}

/// Serialized region report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub area_n: f64,
    pub a_d_prime: f64,
    pub curve_labels: Vec<String>,
}

/// One curve of `n` samples per fold ratio, ordered by fold ratio and
/// labelled `fr=<value>`.
pub fn curve_family(
    base: &Geometry,
    pressure: f64,
    fr_values: &[f64],
    model: &Model,
    n: usize,
) -> Result<Vec<ForceStrainCurve>> {
    if fr_values.is_empty() {
        return Err(Error::domain("empty fold-ratio list"));
    }
    let mut frs = fr_values.to_vec();
    frs.sort_by(f64::total_cmp);
    frs.iter()
        .map(|&fr| {
            base.with_fold_ratio(fr)
                .and_then(|g| sample_curve(model, &g, pressure, n))
                .map(|c| c.with_label(format!("fr={fr}")))
                .map_err(|e| Error::FamilyMember {
                    fr,
                    source: Box::new(e),
                })
        })
        .collect()
}

fn check_family(curves: &[ForceStrainCurve]) -> Result<f64> {
    if curves.len() < 2 {
        return Err(Error::domain(format!(
            "need at least 2 curves, got {}",
            curves.len()
        )));
    }
    let p = curves[0].pressure();
    if let Some(c) = curves.iter().find(|c| (c.pressure() - p).abs() > 1e-9 * p) {
        return Err(Error::domain(format!(
            "mixed pressures in family: {} Pa and {} Pa",
            p,
            c.pressure()
        )));
    }
    Ok(p)
}

/// Common strain range `[lo, hi]` of a family.
pub fn family_strain_range(curves: &[ForceStrainCurve]) -> (f64, f64) {
    let lo = curves
        .iter()
        .map(|c| c.first_strain())
        .fold(f64::INFINITY, f64::min);
    let hi = curves
        .iter()
        .map(|c| c.last_strain())
        .fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Left and right limits of a curve's force inside the cell `[a, b]`.
/// Curves drop to zero right after their last sample.
fn cell_values(c: &ForceStrainCurve, a: f64, b: f64) -> (f64, f64) {
    let last = c.last_strain();
    let fa = if a >= last { 0.0 } else { c.force_at(a) };
    let fb = if b > last { 0.0 } else { c.force_at(b) };
    (fa, fb)
}

/// Area swept by the family: the union of the strips between consecutive
/// curves. Each strip covers, at every strain, the force interval between
/// its two curves, and consecutive intervals chain, so the union is the
/// band between the lower and upper envelope. That band is integrated
/// exactly: every curve vertex is a grid point, and cells are split where
/// any two curves cross, leaving the envelope linear on each piece.
pub fn design_space_area(curves: &[ForceStrainCurve]) -> Result<f64> {
    check_family(curves)?;
    let (lo, hi) = family_strain_range(curves);
    let mut grid: Vec<f64> = (0..AREA_GRID_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (AREA_GRID_POINTS - 1) as f64)
        .collect();
    grid.extend(
        curves
            .iter()
            .flat_map(|c| c.points().iter().map(|p| p.strain)),
    );
    grid.push(hi);
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut area = 0.0;
    let mut cuts: Vec<f64> = Vec::new();
    let mut vals: Vec<(f64, f64)> = Vec::with_capacity(curves.len());
    for w in grid.windows(2) {
        let (a, b) = (w[0], w[1]);
        vals.clear();
        vals.extend(curves.iter().map(|c| cell_values(c, a, b)));
        cuts.clear();
        cuts.push(0.0);
        for i in 0..vals.len() {
            for j in i + 1..vals.len() {
                let da = vals[i].0 - vals[j].0;
                let db = vals[i].1 - vals[j].1;
                if da * db < 0.0 {
                    cuts.push(da / (da - db));
                }
            }
        }
        cuts.push(1.0);
        cuts.sort_by(f64::total_cmp);
        let spread = |t: f64| {
            let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
            for &(fa, fb) in &vals {
                let f = fa + t * (fb - fa);
                mn = mn.min(f);
                mx = mx.max(f);
            }
            mx - mn
        };
        let mut cell = 0.0;
        for s in cuts.windows(2) {
            cell += 0.5 * (s[1] - s[0]) * (spread(s[0]) + spread(s[1]));
        }
        area += cell * (b - a);
    }
    Ok(area)
}

/// `area / (a_r W0^2 P)`.
pub fn normalized_area(area: f64, geom: &Geometry, pressure: f64) -> Result<f64> {
    if !(pressure.is_finite() && pressure > 0.0) {
        return Err(Error::domain(format!(
            "pressure must be positive, got {pressure}"
        )));
    }
    if !(area.is_finite() && area >= 0.0) {
        return Err(Error::domain(format!(
            "area must be non-negative, got {area}"
        )));
    }
    Ok(area / (geom.aspect_ratio() * geom.w0() * geom.w0() * pressure))
}

/// Area and normalized area of a family built on `geom`.
pub fn region_area(curves: &[ForceStrainCurve], geom: &Geometry) -> Result<RegionArea> {
    let p = check_family(curves)?;
    let area = design_space_area(curves)?;
    Ok(RegionArea {
        area,
        normalized: normalized_area(area, geom, p)?,
    })
}

impl RegionReport {
    /// Report with labels in canonical (sorted) order.
    pub fn new(region: RegionArea, curves: &[ForceStrainCurve]) -> Self {
        let mut curve_labels: Vec<String> = curves.iter().map(|c| c.label().to_owned()).collect();
        curve_labels.sort();
        RegionReport {
            area_n: region.area,
            a_d_prime: region.normalized,
            curve_labels,
        }
    }
}

/// `(eps_max, F_max)`: the largest strain whose force is within the
/// zero-force tolerance, and the largest sampled force. A curve that never
/// reaches the tolerance reports its last strain.
pub fn curve_extrema(curve: &ForceStrainCurve) -> Result<(f64, f64)> {
    if curve.len() < 2 {
        return Err(Error::InvalidCurve(format!(
            "extrema need at least 2 points, got {}",
            curve.len()
        )));
    }
    let f_max = curve.max_force();
    let tol = ZERO_FORCE_TOL * f_max;
    let eps_max = curve
        .points()
        .iter()
        .rev()
        .find(|p| p.force <= tol)
        .map_or(curve.last_strain(), |p| p.strain);
    Ok((eps_max, f_max))
}

/// Polygon of the strip between two curves, each extended over
/// `[lo, hi]` (first force held on the left, zero past the last sample).
pub fn strip_polygon(
    a: &ForceStrainCurve,
    b: &ForceStrainCurve,
    lo: f64,
    hi: f64,
) -> Vec<(f64, f64)> {
    let mut poly = extended_path(a, lo, hi);
    let mut back = extended_path(b, lo, hi);
    back.reverse();
    poly.extend(back);
    poly
}

fn extended_path(c: &ForceStrainCurve, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let pts = c.points();
    let mut path = Vec::with_capacity(pts.len() + 3);
    if c.first_strain() > lo {
        path.push((lo, pts[0].force));
    }
    path.extend(pts.iter().map(|p| (p.strain, p.force)));
    if c.last_strain() < hi {
        path.push((c.last_strain(), 0.0));
        path.push((hi, 0.0));
    }
    path
}

/// Strip polygons between consecutive curves after sorting by label.
pub fn strip_polygons(curves: &[ForceStrainCurve]) -> Vec<Vec<(f64, f64)>> {
    let mut sorted: Vec<&ForceStrainCurve> = curves.iter().collect();
    sorted.sort_by(|a, b| a.label().cmp(b.label()));
    let (lo, hi) = family_strain_range(curves);
    sorted
        .windows(2)
        .map(|w| strip_polygon(w[0], w[1], lo, hi))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Pouch, POUCH_MAX_STRAIN};
    use approx::assert_relative_eq;

    fn seg(f0: f64, e1: f64, label: &str) -> ForceStrainCurve {
        ForceStrainCurve::from_pairs(&[(0.0, f0), (e1, 0.0)], 1000.0, label).unwrap()
    }

    #[test]
    fn two_segments() {
        let a = design_space_area(&[seg(1.0, 0.5, "a"), seg(2.0, 1.0, "b")]).unwrap();
        assert_relative_eq!(a, 0.75, max_relative = 1e-12);
    }

    #[test]
    fn duplicate_curve_has_no_area() {
        assert_eq!(
            design_space_area(&[seg(1.0, 0.5, "a"), seg(1.0, 0.5, "b")]).unwrap(),
            0.0
        );
    }

    #[test]
    fn crossing_segments() {
        // an X: two triangles of 1/4
        let a = ForceStrainCurve::from_pairs(&[(0.0, 1.0), (1.0, 0.0)], 1.0, "a").unwrap();
        let b = ForceStrainCurve::from_pairs(&[(0.0, 0.0), (1.0, 1.0)], 1.0, "b").unwrap();
        assert_relative_eq!(
            design_space_area(&[a, b]).unwrap(),
            0.5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn family_errors() {
        let g = Geometry::new(0.05, 0.05, 0.0, 0.005).unwrap();
        let m = Model::Pouch(Pouch::ideal());
        assert!(curve_family(&g, 12_400.0, &[], &m, 50).is_err());
        match curve_family(&g, 12_400.0, &[0.2, 0.9], &m, 50) {
            Err(Error::FamilyMember { fr, .. }) => assert_eq!(fr, 0.9),
            other => panic!("{other:?}"),
        }
        let c = seg(1.0, 0.5, "a");
        assert!(design_space_area(std::slice::from_ref(&c)).is_err());
        let d = c.with_pressure(2000.0).unwrap();
        assert!(design_space_area(&[c, d]).is_err());
    }

    #[test]
    fn family_is_sorted_and_labelled() {
        let g = Geometry::new(0.05, 0.05, 0.0, 0.005).unwrap();
        let fam = curve_family(&g, 12_400.0, &[0.4, 0.0, 0.2], &Model::ppam(), 20).unwrap();
        let labels: Vec<_> = fam.iter().map(|c| c.label()).collect();
        assert_eq!(labels, ["fr=0", "fr=0.2", "fr=0.4"]);
    }

    #[test]
    fn normalized_example() {
        let g = Geometry::new(0.05, 0.05, 0.0, 0.005).unwrap();
        assert_relative_eq!(
            normalized_area(0.75, &g, 1000.0).unwrap(),
            0.3,
            max_relative = 1e-12
        );
        assert!(normalized_area(0.75, &g, 0.0).is_err());
    }

    #[test]
    fn extrema() {
        let g = Geometry::new(0.05, 0.05, 0.0, 0.005).unwrap();
        let c = sample_curve(&Model::Pouch(Pouch::ideal()), &g, 12_400.0, 200).unwrap();
        let (e, f) = curve_extrema(&c).unwrap();
        assert!((e - POUCH_MAX_STRAIN).abs() < 1e-6);
        assert_eq!(f, c.points()[0].force);
        let one = ForceStrainCurve::from_pairs(&[(0.0, 1.0)], 1.0, "").unwrap();
        assert!(curve_extrema(&one).is_err());
    }

    #[test]
    fn strip_polygon_of_two_segments_matches_shoelace() {
        let polys = strip_polygons(&[seg(2.0, 1.0, "b"), seg(1.0, 0.5, "a")]);
        assert_eq!(polys.len(), 1);
        let p = &polys[0];
        let s: f64 = (0..p.len())
            .map(|i| {
                let (x0, y0) = p[i];
                let (x1, y1) = p[(i + 1) % p.len()];
                x0 * y1 - x1 * y0
            })
            .sum();
        assert_relative_eq!(s.abs() / 2.0, 0.75, max_relative = 1e-12);
    }
}
