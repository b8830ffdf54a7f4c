use approx::assert_relative_eq;
use foldpam::design_space::*;
use foldpam::model::{Geometry, Model, Pouch};
use foldpam::ForceStrainCurve;
use foldpam_oracles as oracle;
use proptest::prelude::*;

fn seg(f0: f64, e1: f64, label: &str) -> ForceStrainCurve {
    ForceStrainCurve::from_pairs(&[(0.0, f0), (e1, 0.0)], 1000.0, label).unwrap()
}

fn family() -> impl Strategy<Value = Vec<ForceStrainCurve>> {
    prop::collection::vec((0.5f64..20.0, 0.05f64..0.5), 2..6).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (f, e))| seg(f, e, &format!("c{i}")))
            .collect()
    })
}

/// Pointwise blend of two curves on the union of their vertices.
fn blend(a: &ForceStrainCurve, b: &ForceStrainCurve, t: f64) -> ForceStrainCurve {
    let mut xs: Vec<f64> = a.points().iter().chain(b.points()).map(|p| p.strain).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .map(|&x| {
            let fa = if x > a.last_strain() { 0.0 } else { a.force_at(x) };
            let fb = if x > b.last_strain() { 0.0 } else { b.force_at(x) };
            (x, (1.0 - t) * fa + t * fb)
        })
        .collect();
    ForceStrainCurve::from_pairs(&pts, a.pressure(), "inner").unwrap()
}

#[test]
fn fold_ratio_matrix_family() {
    let g = Geometry::new(0.05, 0.05, 0.0, 0.005).unwrap();
    let fam = curve_family(&g, 12_400.0, &[0.0, 0.2, 0.4, 0.52, 0.67], &Model::Pouch(Pouch::ideal()), 100).unwrap();
    assert_eq!(fam.len(), 5);
    assert_eq!(fam[4].label(), "fr=0.67");
    // the ideal pouch ignores the fold, so the family collapses
    assert_eq!(design_space_area(&fam).unwrap(), 0.0);
    let single = curve_family(&g, 12_400.0, &[0.67], &Model::ppam(), 50).unwrap();
    assert_eq!(single.len(), 1);
}

#[test]
fn monte_carlo_on_crossing_segments() {
    let a = ForceStrainCurve::from_pairs(&[(0.0, 1.0), (1.0, 0.0)], 1.0, "a").unwrap();
    let b = ForceStrainCurve::from_pairs(&[(0.0, 0.2), (0.4, 0.9), (1.0, 0.5)], 1.0, "b").unwrap();
    let exact = design_space_area(&[a.clone(), b.clone()]).unwrap();
    let mc = oracle::monte_carlo_union_area(&strip_polygons(&[a, b]), 200_000, 3);
    assert_relative_eq!(exact, mc, max_relative = 0.02);
}

#[test]
fn non_ideal_family_report() {
    let g = Geometry::new(0.05, 0.05, 0.0, 0.005).unwrap();
    let model = Model::Pouch(Pouch {
        theta_min: 0.2,
        ..Pouch::non_ideal()
    });
    let fam = curve_family(&g, 12_400.0, &[0.0, 0.2, 0.4, 0.52, 0.67], &model, 200).unwrap();
    let region = region_area(&fam, &g).unwrap();
    let report = RegionReport::new(region, &fam);
    let json = serde_json::to_value(&report).unwrap();
    assert!(json["a_d_prime"].as_f64().unwrap() > 0.0);
    assert_eq!(json["curve_labels"].as_array().unwrap().len(), 5);
    // forces scale with W0 - wf, so the band is exactly the f_r = 0 curve
    // times the largest fold ratio
    let top = &fam[0];
    let band: f64 = top
        .points()
        .windows(2)
        .map(|w| 0.5 * (w[1].strain - w[0].strain) * (w[0].force + w[1].force))
        .sum::<f64>()
        * 0.67;
    assert_relative_eq!(region.area, band, max_relative = 1e-9);
    let (eps_max, f_max) = curve_extrema(top).unwrap();
    assert!((eps_max - (1.0 - 2.0 / std::f64::consts::PI)).abs() < 1e-9);
    assert_eq!(f_max, top.points()[0].force);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn area_ignores_order(fam in family(), seed in any::<u64>()) {
        let a = design_space_area(&fam).unwrap();
        let mut shuffled = fam.clone();
        let n = shuffled.len();
        shuffled.rotate_left((seed as usize) % n);
        shuffled.reverse();
        let b = design_space_area(&shuffled).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn area_scales_with_force(fam in family(), k in 0.1f64..50.0) {
        let g = Geometry::new(0.05, 0.05, 0.0, 0.005).unwrap();
        let a = design_space_area(&fam).unwrap();
        let scaled: Vec<_> = fam.iter().map(|c| c.scale_force(k).unwrap().with_pressure(k * 1000.0).unwrap()).collect();
        let b = design_space_area(&scaled).unwrap();
        prop_assert!((b - k * a).abs() <= 1e-10 * (k * a).max(1e-12));
        let na = normalized_area(a, &g, 1000.0).unwrap();
        let nb = normalized_area(b, &g, k * 1000.0).unwrap();
        prop_assert!((na - nb).abs() <= 1e-12 * na.max(1e-300));
    }

    #[test]
    fn interior_curve_adds_nothing(fam in family(), t in 0.0f64..1.0) {
        let a = design_space_area(&fam).unwrap();
        let mut more = fam.clone();
        more.push(blend(&fam[0], &fam[1], t));
        let b = design_space_area(&more).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0), "{} vs {}", a, b);
    }
}
