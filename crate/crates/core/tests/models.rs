use approx::assert_relative_eq;
use foldpam::model::*;
use foldpam::numeric::{ellip_e, ellip_f, find_root_bracketed, EllipticArgs};
use foldpam::Error;
use foldpam_oracles as oracle;
use proptest::prelude::*;

fn geom() -> Geometry {
    Geometry::new(0.05, 0.05, 0.0, 0.005).unwrap()
}

#[test]
fn complete_integrals_match_quadrature() {
    let a = EllipticArgs::new(std::f64::consts::FRAC_PI_2, 0.5).unwrap();
    assert_relative_eq!(ellip_f(a).unwrap(), oracle::ellip_f_quad(a.phi(), 0.5), max_relative = 1e-13);
    assert_relative_eq!(ellip_e(a).unwrap(), oracle::ellip_e_quad(a.phi(), 0.5), max_relative = 1e-13);
}

#[test]
fn cube_root_against_bisection() {
    let x = find_root_bracketed(|x| x * x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
    let y = oracle::bisect(|x| x * x * x - 2.0, 1.0, 2.0, 1e-15);
    assert!((x - y).abs() < 1e-12);
}

#[test]
fn pouch_matches_independent_inversion() {
    let g = geom();
    let w = g.w0() - wf_circ(g.l0()).unwrap();
    for eps in [0.01, 0.05, 0.1, 0.2, 0.3, 0.36] {
        let f = pouch_force_at_strain(&g, 12_400.0, eps).unwrap();
        let o = oracle::pouch_force_by_bisection(w, g.l0(), 12_400.0, eps);
        assert_relative_eq!(f, o, max_relative = 1e-9);
    }
}

#[test]
fn pouch_rejects_strain_outside_model() {
    assert!(matches!(
        pouch_force_at_strain(&geom(), 12_400.0, 0.5),
        Err(Error::StrainOutOfRange { .. })
    ));
    assert!(pouch_force_at_strain(&geom(), 12_400.0, 1e-9).is_err());
    assert_eq!(pouch_force_at_strain(&geom(), 12_400.0, POUCH_MAX_STRAIN).unwrap(), 0.0);
}

#[test]
fn ppam_force_against_oracle_pipeline() {
    let g = geom();
    let (m, phi) = oracle::ppam_grid_search(10.0, 0.1).unwrap();
    let c = phi.cos();
    let want = std::f64::consts::PI * 12_400.0 * 0.005f64.powi(2) * (1.0 - 2.0 * m) / (2.0 * m * c * c);
    assert_relative_eq!(ppam_force_at_strain(&g, 12_400.0, 0.1).unwrap(), want, max_relative = 1e-9);
}

#[test]
fn ppam_force_vanishes_at_maximum_strain() {
    let g = geom();
    let e_max = ppam_max_strain(10.0).unwrap();
    let f_ref = ppam_force_at_strain(&g, 12_400.0, 0.01).unwrap();
    // locate the zero by bisection on the solved force curve
    let near = oracle::bisect(
        |e| ppam_force_at_strain(&g, 12_400.0, e).unwrap() - 1e-7 * f_ref,
        0.01,
        e_max - 1e-12,
        1e-14,
    );
    assert!((near - e_max).abs() < 1e-4);
    let f = ppam_force_at_strain(&g, 12_400.0, e_max - 1e-11).unwrap();
    assert!(f <= 1e-6 * f_ref, "{f}");
    assert!(matches!(ppam_solve(10.0, 0.99), Err(Error::NoSolution(_))));
    assert!(oracle::ppam_grid_search(10.0, 0.99).is_none());
}

#[test]
fn sampled_curves_round_trip() {
    let g = geom();
    let p = 12_400.0;
    let pouch = sample_curve(&Model::Pouch(Pouch::ideal()), &g, p, 60).unwrap();
    for pt in &pouch.points()[1..pouch.len() - 1] {
        let f = pouch_force_at_strain(&g, p, pt.strain).unwrap();
        assert_relative_eq!(f, pt.force, max_relative = 1e-9);
    }
    let ppam = sample_curve(&Model::ppam(), &g, p, 60).unwrap();
    for pt in &ppam.points()[1..ppam.len() - 1] {
        let f = ppam_force_at_strain(&g, p, pt.strain).unwrap();
        assert_relative_eq!(f, pt.force, max_relative = 1e-9);
    }
}

#[test]
fn geometry_examples() {
    let g = Geometry::new(0.05, 0.02, 0.0335, 0.002).unwrap();
    assert_relative_eq!(g.fold_ratio(), 0.67, max_relative = 1e-12);
    assert_relative_eq!(g.aspect_ratio(), 0.4, max_relative = 1e-12);
    assert!(matches!(
        Geometry::new(0.05, 0.05, 0.04, 0.002),
        Err(Error::FoldRatioOutOfRange { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn models_are_linear_in_pressure(eps in 0.01f64..0.36, k in 0.1f64..10.0) {
        let g = geom();
        let f1 = pouch_force_at_strain(&g, 1e4, eps).unwrap();
        let f2 = pouch_force_at_strain(&g, k * 1e4, eps).unwrap();
        prop_assert!((f2 - k * f1).abs() <= 1e-12 * f2.abs().max(1e-12));
        let e = eps.min(0.4);
        let p1 = ppam_force_at_strain(&g, 1e4, e).unwrap();
        let p2 = ppam_force_at_strain(&g, k * 1e4, e).unwrap();
        prop_assert!((p2 - k * p1).abs() <= 1e-12 * p2.abs().max(1e-12));
    }

    #[test]
    fn pouch_is_monotone_in_angle(a in 0.01f64..1.5, d in 1e-4f64..0.07) {
        let g = geom();
        let p = pouch_point(&g, 1e4, a).unwrap();
        let q = pouch_point(&g, 1e4, a + d).unwrap();
        prop_assert!(q.strain > p.strain);
        prop_assert!(q.force < p.force);
    }

    #[test]
    fn ppam_m_in_range_and_force_nonincreasing(r in 3.0f64..30.0, u in 0.02f64..0.97, du in 0.001f64..0.02) {
        let e_max = ppam_max_strain(r).unwrap();
        let (e1, e2) = (u * e_max, ((u + du).min(0.99)) * e_max);
        let s1 = ppam_solve(r, e1).unwrap();
        let s2 = ppam_solve(r, e2).unwrap();
        prop_assert!(s1.m > 0.0 && s1.m < 0.5);
        let (a, b) = ppam_residuals(r, e1, s1).unwrap();
        prop_assert!(a.abs() <= 1e-8 && b.abs() <= 1e-8);
        prop_assert!(ppam_force(0.005, 1e4, s2) <= ppam_force(0.005, 1e4, s1));
    }
}
