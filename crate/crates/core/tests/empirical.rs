use approx::assert_relative_eq;
use foldpam::empirical::*;
use foldpam::model::{pouch_force_at_strain, Geometry};
use foldpam::ForceStrainCurve;
use foldpam_oracles as oracle;

fn meta(fr: f64) -> DatasetMeta {
    MetadataFile {
        pressure_kpa: 12.4,
        l0_mm: 50.0,
        w0_mm: 50.0,
        fold_ratio: fr,
        travel_rate_mm_per_min: 15.0,
        sample_rate_hz: 5.0,
    }
    .try_into()
    .unwrap()
}

fn to_csv(rec: &oracle::SyntheticRecord) -> String {
    let mut s = String::from("time_s,force_n\n");
    for (t, f) in rec.time.iter().zip(&rec.force) {
        s.push_str(&format!("{t},{f}\n"));
    }
    s
}

/// Pouch force with the zero-strain spike clipped at 1% strain.
fn pouch(eps: f64) -> f64 {
    let g = Geometry::new(0.05, 0.05, 0.0, 0.005).unwrap();
    pouch_force_at_strain(&g, 12_400.0, eps.max(0.01)).unwrap()
}

#[test]
fn synthetic_record_round_trips() {
    let m = meta(0.0);
    let noise = 0.02;
    let rec = oracle::synthetic_stand_record(pouch, m.l0, m.travel_rate, m.sample_rate, 0.3, noise, 11);
    let ds = load_measurements(to_csv(&rec).as_bytes(), m).unwrap();
    let c = dataset_to_curve(&ds, Stroke::Compression).unwrap();
    assert_eq!(c.label(), "fr=0");
    assert!(c.first_strain() >= 0.0 && c.last_strain() <= 0.3 + 1e-12);
    for p in c.points() {
        assert!(
            (p.force - pouch(p.strain)).abs() <= 5.0 * noise,
            "strain {}: {} vs {}",
            p.strain,
            p.force,
            pouch(p.strain)
        );
    }
    // commanded strains reappear on the compression half
    let n = c.len();
    for (k, p) in c.points().iter().enumerate() {
        assert_relative_eq!(p.strain, rec.strain[k], epsilon = 1e-9);
    }
    assert_eq!(n, rec.strain.iter().filter(|&&s| s >= 0.0).count() / 2 + 1);

    // both strokes average the noise down
    let both = dataset_to_curve(&ds, Stroke::Both).unwrap();
    assert!(both.len() <= n + 1);
}

#[test]
fn kink_in_measured_polyline() {
    let m = meta(0.4);
    let f = |e: f64| if e <= 0.08 { 6.0 - 40.0 * e } else { 2.8 - 8.0 * (e - 0.08) };
    let rec = oracle::synthetic_stand_record(f, m.l0, m.travel_rate, m.sample_rate, 0.2, 0.01, 5);
    let ds = load_measurements(to_csv(&rec).as_bytes(), m).unwrap();
    let c = dataset_to_curve(&ds, Stroke::Compression).unwrap();
    let k = detect_kink(&c).unwrap();
    assert!(k.has_kink);
    assert!((k.eps_break - 0.08).abs() <= 0.002, "{k:?}");
    assert!(k.eps_break > c.first_strain() && k.eps_break < c.last_strain());
}

#[test]
fn noise_alone_is_not_a_kink() {
    for seed in 0..100 {
        let noise = oracle::gaussian_samples(100, 0.1, seed);
        let pts: Vec<(f64, f64)> = (0..100).map(|i| (i as f64 * 0.003, 4.0 + noise[i])).collect();
        let c = ForceStrainCurve::from_pairs(&pts, 1e4, "").unwrap();
        assert!(!detect_kink(&c).unwrap().has_kink, "seed {seed}");
    }
}

#[test]
fn surrogate_from_measured_family() {
    let frs = [0.0, 0.2, 0.4];
    let members: Vec<(f64, ForceStrainCurve)> = frs
        .iter()
        .enumerate()
        .map(|(i, &fr)| {
            let m = meta(fr);
            let f = move |e: f64| (5.0 - fr * 4.0) * (1.0 - e / (0.2 + 0.1 * fr)).max(0.0);
            let rec = oracle::synthetic_stand_record(f, m.l0, m.travel_rate, m.sample_rate, 0.28, 0.0, i as u64);
            let ds = load_measurements(to_csv(&rec).as_bytes(), m).unwrap();
            (fr, dataset_to_curve(&ds, Stroke::Compression).unwrap())
        })
        .collect();
    let s = build_surrogate(&members, 12_400.0).unwrap();
    assert_eq!(s.grid(), &frs);
    assert_relative_eq!(s.force(0.2, 0.1, 12_400.0).unwrap(), 4.2 * (1.0 - 0.1 / 0.22), max_relative = 1e-9);
    assert_eq!(s.force(0.0, 0.25, 12_400.0).unwrap(), 0.0);
    assert!(matches!(
        s.force(0.5, 0.1, 12_400.0),
        Err(foldpam::Error::FoldRatioOutOfRange { .. })
    ));
    let dup = vec![members[0].clone(), members[0].clone()];
    assert!(build_surrogate(&dup, 12_400.0).is_err());
    let mixed = vec![members[0].clone(), (0.2, members[1].1.with_pressure(8000.0).unwrap())];
    assert!(build_surrogate(&mixed, 12_400.0).is_err());
}
