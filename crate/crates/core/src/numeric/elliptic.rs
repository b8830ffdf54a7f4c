//! Incomplete elliptic integrals of the first and second kind.
//!
//! Parameter convention throughout: `m = k²`, so
//!
//! ```text
//! F(φ|m) = ∫₀^φ dt / √(1 − m sin²t)
//! E(φ|m) = ∫₀^φ √(1 − m sin²t) dt
//! ```
//!
//! Both are evaluated through Carlson's symmetric forms:
//! `F = s·R_F(c², Δ², 1)` and `E = F − (m/3)·s³·R_D(c², Δ², 1)` with
//! `s = sin φ`, `c = cos φ`, `Δ² = 1 − m s²`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Truncation threshold for the duplication loops. The series remainder is
/// O(r) relative, so this sits just above machine epsilon.
const CARLSON_R: f64 = 1e-16;

/// Validated amplitude/parameter pair, `0 ≤ φ ≤ π/2`, `0 ≤ m ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticArgs {
    phi: f64,
    m: f64,
}

impl EllipticArgs {
    pub fn new(phi: f64, m: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&phi) {
            return Err(Error::domain(format!("phi = {phi} outside [0, pi/2]")));
        }
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::domain(format!("m = {m} outside [0, 1]")));
        }
        Ok(Self { phi, m })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// The one combination where F(φ|m) is infinite.
    pub fn is_singular(&self) -> bool {
        self.m == 1.0 && self.phi == FRAC_PI_2
    }
}

/// Carlson's R_F(x, y, z). At most one argument may be zero.
pub fn carlson_rf(x0: f64, y0: f64, z0: f64) -> f64 {
    let (mut x, mut y, mut z) = (x0, y0, z0);
    let a0 = (x0 + y0 + z0) / 3.0;
    let mut a = a0;
    let q = (3.0 * CARLSON_R).powf(-1.0 / 6.0)
        * (a0 - x0).abs().max((a0 - y0).abs()).max((a0 - z0).abs());
    let mut pow4 = 1.0;
    while pow4 * q >= a.abs() {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sy * sz + sz * sx;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        a = 0.25 * (a + lam);
        pow4 *= 0.25;
    }
    let xx = pow4 * (a0 - x0) / a;
    let yy = pow4 * (a0 - y0) / a;
    let zz = -(xx + yy);
    let e2 = xx * yy - zz * zz;
    let e3 = xx * yy * zz;
    (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / a.sqrt()
}

/// Carlson's R_D(x, y, z). At most one of x, y may be zero; z > 0.
pub fn carlson_rd(x0: f64, y0: f64, z0: f64) -> f64 {
    let (mut x, mut y, mut z) = (x0, y0, z0);
    let a0 = (x0 + y0 + 3.0 * z0) / 5.0;
    let mut a = a0;
    let q = (0.25 * CARLSON_R).powf(-1.0 / 6.0)
        * (a0 - x0).abs().max((a0 - y0).abs()).max((a0 - z0).abs());
    let mut pow4 = 1.0;
    let mut sum = 0.0;
    while pow4 * q >= a.abs() {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * sy + sy * sz + sz * sx;
        sum += pow4 / (sz * (z + lam));
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        a = 0.25 * (a + lam);
        pow4 *= 0.25;
    }
    let xx = pow4 * (a0 - x0) / a;
    let yy = pow4 * (a0 - y0) / a;
    let zz = -(xx + yy) / 3.0;
    let xy = xx * yy;
    let z2 = zz * zz;
    let e2 = xy - 6.0 * z2;
    let e3 = (3.0 * xy - 8.0 * z2) * zz;
    let e4 = 3.0 * (xy - z2) * z2;
    let e5 = xy * z2 * zz;
    let series = 1.0 - 3.0 * e2 / 14.0 + e3 / 6.0 + 9.0 * e2 * e2 / 88.0
        - 3.0 * e4 / 22.0
        - 9.0 * e2 * e3 / 52.0
        + 3.0 * e5 / 26.0;
    pow4 * series / (a * a.sqrt()) + 3.0 * sum
}

/// Incomplete elliptic integral of the first kind, F(φ|m).
pub fn ellip_f(args: EllipticArgs) -> Result<f64> {
    let EllipticArgs { phi, m } = args;
    if args.is_singular() {
        return Err(Error::Singular);
    }
    if phi == 0.0 {
        return Ok(0.0);
    }
    if m == 0.0 {
        return Ok(phi);
    }
    let (s, c) = phi.sin_cos();
    if m == 1.0 {
        return Ok(s.atanh());
    }
    Ok(s * carlson_rf(c * c, 1.0 - m * s * s, 1.0))
}

/// Incomplete elliptic integral of the second kind, E(φ|m).
pub fn ellip_e(args: EllipticArgs) -> Result<f64> {
    let EllipticArgs { phi, m } = args;
    if phi == 0.0 {
        return Ok(0.0);
    }
    if m == 0.0 {
        return Ok(phi);
    }
    let (s, c) = phi.sin_cos();
    if m == 1.0 {
        return Ok(s);
    }
    let (x, y) = (c * c, 1.0 - m * s * s);
    Ok(s * carlson_rf(x, y, 1.0) - m / 3.0 * s * s * s * carlson_rd(x, y, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn args(phi: f64, m: f64) -> EllipticArgs {
        EllipticArgs::new(phi, m).unwrap()
    }

    #[test]
    fn zero_parameter_reduces_to_amplitude() {
        assert_eq!(ellip_f(args(0.5, 0.0)).unwrap(), 0.5);
        assert_eq!(ellip_e(args(0.7, 0.0)).unwrap(), 0.7);
    }

    #[test]
    fn unit_parameter() {
        assert_eq!(ellip_f(args(FRAC_PI_2, 1.0)), Err(Error::Singular));
        assert_eq!(ellip_e(args(FRAC_PI_2, 1.0)).unwrap(), 1.0);
        assert_relative_eq!(
            ellip_f(args(1.0, 1.0)).unwrap(),
            1f64.sin().atanh(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn complete_values_at_half() {
        // K(1/2), E(1/2) computed by adaptive quadrature of the defining integrals
        assert_relative_eq!(
            ellip_f(args(FRAC_PI_2, 0.5)).unwrap(),
            1.854_074_677_301_372,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            ellip_e(args(FRAC_PI_2, 0.5)).unwrap(),
            1.350_643_881_047_675_5,
            max_relative = 1e-13
        );
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            EllipticArgs::new(-0.1, 0.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(EllipticArgs::new(1.6, 0.5), Err(Error::Domain(_))));
        assert!(matches!(EllipticArgs::new(1.0, 1.2), Err(Error::Domain(_))));
        assert!(matches!(
            EllipticArgs::new(f64::NAN, 0.2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn carlson_special_values() {
        // R_F(0, 1, 1) = pi/2, R_D(0, 2, 1) = 1.797...
        assert_relative_eq!(carlson_rf(0.0, 1.0, 1.0), FRAC_PI_2, max_relative = 1e-15);
        assert_relative_eq!(carlson_rf(1.0, 1.0, 1.0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(carlson_rd(1.0, 1.0, 1.0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            carlson_rd(0.0, 2.0, 1.0),
            1.797_210_352_103_388_3,
            max_relative = 1e-14
        );
    }

    #[test]
    fn agrees_with_quadrature_on_coarse_grid() {
        for i in 1..=6 {
            let phi = i as f64 / 6.0 * FRAC_PI_2;
            for j in 0..6 {
                let m = j as f64 * 0.18;
                let a = args(phi, m);
                let f_ref = foldpam_oracles::ellip_f_quad(phi, m);
                let e_ref = foldpam_oracles::ellip_e_quad(phi, m);
                assert_relative_eq!(ellip_f(a).unwrap(), f_ref, max_relative = 1e-12);
                assert_relative_eq!(ellip_e(a).unwrap(), e_ref, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn strictly_increasing_in_amplitude() {
        for j in 0..10 {
            let m = j as f64 * 0.1;
            let mut prev = (-1.0, -1.0);
            for i in 0..=40 {
                let a = args(i as f64 / 40.0 * 1.5, m);
                let cur = (ellip_f(a).unwrap(), ellip_e(a).unwrap());
                assert!(cur.0 > prev.0 && cur.1 > prev.1);
                prev = cur;
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn second_kind_below_amplitude_below_first_kind(phi in 0.0..FRAC_PI_2, m in 0.0f64..0.999) {
            let a = args(phi, m);
            let f = ellip_f(a).unwrap();
            let e = ellip_e(a).unwrap();
            proptest::prop_assert!(e <= phi * (1.0 + 1e-15) && phi <= f * (1.0 + 1e-15));
        }
    }
}
