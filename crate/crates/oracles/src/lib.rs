//! Slow, brute-force reference computations for the foldpam test suites.
//!
//! Nothing here calls into `foldpam`. Every routine is the simplest thing
//! that could possibly give the right answer (bisection, adaptive Simpson,
//! grid search, rejection sampling), so it can be used to cross-check the
//! fast paths in the library.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let c = 0.5 * (a + b);
    let fc = f(c);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    simpson_rec(f, a, b, fa, fb, fc, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let c = 0.5 * (a + b);
    let d = 0.5 * (a + c);
    let e = 0.5 * (c + b);
    let fd = f(d);
    let fe = f(e);
    let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, c, fa, fc, fd, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, c, b, fc, fb, fe, right, 0.5 * tol, depth - 1)
}

/// F(phi | m) by direct quadrature of its defining integral.
pub fn ellip_f_quad(phi: f64, m: f64) -> f64 {
    if phi == 0.0 {
        return 0.0;
    }
    let g = |t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt();
    adaptive_simpson(&g, 0.0, phi, 1e-15)
}

/// E(phi | m) by direct quadrature of its defining integral.
pub fn ellip_e_quad(phi: f64, m: f64) -> f64 {
    if phi == 0.0 {
        return 0.0;
    }
    let g = |t: f64| (1.0 - m * t.sin().powi(2)).sqrt();
    adaptive_simpson(&g, 0.0, phi, 1e-15)
}

/// Plain bisection. Panics if the bracket has no sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    let fhi = f(hi);
    assert!(flo * fhi <= 0.0, "bisect: no sign change on [{lo}, {hi}]");
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Central finite difference.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Both residuals of the sPAM/PPAM constraint pair, using quadrature.
///
/// Returns `(second-kind residual, first-kind residual)`.
pub fn ppam_residuals(l0_over_h: f64, eps: f64, m: f64, phi: f64) -> (f64, f64) {
    let denom = m.sqrt() * phi.cos();
    let r_e = ellip_e_quad(phi, m) / denom - l0_over_h * (1.0 - 0.5 * eps);
    let r_f = ellip_f_quad(phi, m) / denom - l0_over_h;
    (r_e, r_f)
}

const GRID_STEP: f64 = 1e-3;

/// Cumulative first- and second-kind integrals along the phi grid for one m.
fn cumulative_row(m: f64, n_phi: usize) -> (Vec<f64>, Vec<f64>) {
    let mut f = vec![0.0; n_phi];
    let mut e = vec![0.0; n_phi];
    let gi = |t: f64| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt();
    let ge = |t: f64| (1.0 - m * t.sin().powi(2)).sqrt();
    for j in 1..n_phi {
        let a = (j - 1) as f64 * GRID_STEP;
        let b = j as f64 * GRID_STEP;
        let c = 0.5 * (a + b);
        f[j] = f[j - 1] + GRID_STEP / 6.0 * (gi(a) + 4.0 * gi(c) + gi(b));
        e[j] = e[j - 1] + GRID_STEP / 6.0 * (ge(a) + 4.0 * ge(c) + ge(b));
    }
    (f, e)
}

/// On one m row, the strain implied by the first-kind constraint, or None.
fn row_strain(m: f64, l0_over_h: f64, n_phi: usize) -> Option<f64> {
    let (fcum, ecum) = cumulative_row(m, n_phi);
    let s = m.sqrt();
    let g = |j: usize| fcum[j] / (s * (j as f64 * GRID_STEP).cos()) - l0_over_h;
    let j = (1..n_phi).find(|&j| g(j) >= 0.0)?;
    // linear interpolation inside the phi cell
    let (g0, g1) = (g(j - 1), g(j));
    let t = -g0 / (g1 - g0);
    let fv = fcum[j - 1] + t * (fcum[j] - fcum[j - 1]);
    let ev = ecum[j - 1] + t * (ecum[j] - ecum[j - 1]);
    Some(2.0 * (1.0 - ev / fv))
}

/// Grid search over (m, phi) at step 1e-3, then nested bisection.
///
/// Returns `None` when no grid cell brackets a solution with m in (0, 0.5).
pub fn ppam_grid_search(l0_over_h: f64, eps: f64) -> Option<(f64, f64)> {
    let n_phi = (std::f64::consts::FRAC_PI_2 / GRID_STEP).floor() as usize;
    let n_m = (0.5 / GRID_STEP).round() as usize;
    let mut prev: Option<(f64, f64)> = None;
    let mut cell = None;
    for i in 1..=n_m {
        let m = i as f64 * GRID_STEP;
        let m = if i == n_m { 0.5 - 1e-12 } else { m };
        let Some(strain) = row_strain(m, l0_over_h, n_phi) else {
            prev = None;
            continue;
        };
        let resid = strain - eps;
        if let Some((pm, pr)) = prev {
            if pr <= 0.0 && resid >= 0.0 {
                cell = Some((pm, m));
                break;
            }
        }
        prev = Some((m, resid));
    }
    let (m_lo, m_hi) = cell?;

    let phi_of = |m: f64| {
        let s = m.sqrt();
        bisect(
            |p| ellip_f_quad(p, m) / (s * p.cos()) - l0_over_h,
            0.0,
            std::f64::consts::FRAC_PI_2 - 1e-12,
            1e-15,
        )
    };
    let strain_of = |m: f64| {
        let p = phi_of(m);
        2.0 * (1.0 - ellip_e_quad(p, m) / ellip_f_quad(p, m))
    };
    // widen slightly in case the coarse row interpolation put the root at the edge
    let lo = (m_lo - GRID_STEP).max(1e-9);
    let hi = (m_hi + GRID_STEP).min(0.5 - 1e-12);
    let m = bisect(|m| strain_of(m) - eps, lo, hi, 1e-15);
    Some((m, phi_of(m)))
}

/// Signed shoelace area.
pub fn shoelace(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % n];
        acc += x0 * y1 - x1 * y0;
    }
    0.5 * acc
}

/// Even-odd ray-crossing point-in-polygon test.
pub fn inside_even_odd(pt: (f64, f64), poly: &[(f64, f64)]) -> bool {
    let (px, py) = pt;
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = poly[i];
        let (xj, yj) = poly[j];
        if (yi > py) != (yj > py) {
            let x_cross = xi + (py - yi) * (xj - xi) / (yj - yi);
            if px < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Rejection-sampling estimate of the area of the union of polygons.
///
/// Each polygon is tested with the even-odd rule; a point counts once if it
/// falls inside any polygon.
pub fn monte_carlo_union_area(polys: &[Vec<(f64, f64)>], samples: usize, seed: u64) -> f64 {
    let boxes: Vec<[f64; 4]> = polys.iter().map(|p| bbox(p)).collect();
    let (x0, x1, y0, y1) = boxes.iter().fold(
        (f64::MAX, f64::MIN, f64::MAX, f64::MIN),
        |(a, b, c, d), bx| (a.min(bx[0]), b.max(bx[1]), c.min(bx[2]), d.max(bx[3])),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let pt = (rng.gen_range(x0..x1), rng.gen_range(y0..y1));
        let hit = polys.iter().zip(&boxes).any(|(p, bx)| {
            pt.0 >= bx[0] && pt.0 <= bx[1] && pt.1 >= bx[2] && pt.1 <= bx[3] && inside_even_odd(pt, p)
        });
        if hit {
            hits += 1;
        }
    }
    (x1 - x0) * (y1 - y0) * hits as f64 / samples as f64
}

/// Area of the common bounding box.
pub fn bounding_box_area(polys: &[Vec<(f64, f64)>]) -> f64 {
    let b = polys.iter().map(|p| bbox(p)).fold([f64::MAX, f64::MIN, f64::MAX, f64::MIN], |a, b| {
        [a[0].min(b[0]), a[1].max(b[1]), a[2].min(b[2]), a[3].max(b[3])]
    });
    (b[1] - b[0]) * (b[3] - b[2])
}

fn bbox(p: &[(f64, f64)]) -> [f64; 4] {
    p.iter().fold([f64::MAX, f64::MIN, f64::MAX, f64::MIN], |b, &(x, y)| {
        [b[0].min(x), b[1].max(x), b[2].min(y), b[3].max(y)]
    })
}

/// Standard normal draw by Box-Muller (keeps this crate free of rand_distr).
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// `n` seeded Gaussian draws with standard deviation `std`.
pub fn gaussian_samples(n: usize, std: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| std * normal(&mut rng)).collect()
}

/// Ideal pouch-motor point from the angle parameter, written out longhand.
pub fn pouch_by_angle(w_eff: f64, l0: f64, pressure: f64, theta: f64) -> (f64, f64) {
    let strain = 1.0 - theta.sin() / theta;
    let force = w_eff * l0 * pressure * theta.cos() / theta;
    (strain, force)
}

/// Ideal pouch-motor force at a strain, by bisection on the angle.
pub fn pouch_force_by_bisection(w_eff: f64, l0: f64, pressure: f64, strain: f64) -> f64 {
    let theta = bisect(
        |t| 1.0 - t.sin() / t - strain,
        1e-9,
        std::f64::consts::FRAC_PI_2,
        1e-15,
    );
    pouch_by_angle(w_eff, l0, pressure, theta).1
}

pub struct SyntheticRecord {
    pub time: Vec<f64>,
    pub force: Vec<f64>,
    pub strain: Vec<f64>,
}

/// A synthetic test-stand record: constant-rate compression from l0 to
/// `max_strain`, then return, sampled at `sample_rate` with Gaussian noise.
///
/// `force_at` gives the noiseless force at a strain. The commanded strain
/// of every sample is returned alongside the (time, force) pairs.
pub fn synthetic_stand_record<F: Fn(f64) -> f64>(
    force_at: F,
    l0: f64,
    travel_rate: f64,
    sample_rate: f64,
    max_strain: f64,
    noise_std: f64,
    seed: u64,
) -> SyntheticRecord {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dt = 1.0 / sample_rate;
    let t_turn = max_strain * l0 / travel_rate;
    let n = (2.0 * t_turn / dt).floor() as usize + 1;
    let mut rec = SyntheticRecord {
        time: Vec::with_capacity(n),
        force: Vec::with_capacity(n),
        strain: Vec::with_capacity(n),
    };
    for k in 0..n {
        let t = k as f64 * dt;
        let travel = if t <= t_turn { travel_rate * t } else { travel_rate * (2.0 * t_turn - t) };
        let strain = (travel / l0).max(0.0);
        let f = (force_at(strain) + noise_std * normal(&mut rng)).max(0.0);
        rec.time.push(t);
        rec.force.push(f);
        rec.strain.push(strain);
    }
    rec
}
