//! sPAM/PPAM model for the maximally folded state.
//!
//! For a contraction ε the pair (m, φ) satisfies
//!
//! ```text
//! E(φ|m) / (√m cos φ) = (l0/h)(1 − ε/2)
//! F(φ|m) / (√m cos φ) = l0/h
//! ```
//!
//! and the force is `π P h² (1 − 2m) / (2m cos²φ)`.
//!
//! The second constraint does not involve ε, so for each m it fixes φ(m)
//! by a bracketed solve. Dividing the two constraints gives the strain
//! along that curve, `ε(m) = 2(1 − E/F)`, which increases monotonically
//! from 0 at m → 0 to its maximum at m = 1/2 where the force vanishes. A
//! second bracketed solve on m then matches the requested strain.

use std::f64::consts::{FRAC_PI_2, PI};

use super::geometry::Geometry;
use crate::error::{Error, Result};
use crate::numeric::{ellip_e, ellip_f, Brent, EllipticArgs};

/// Lower end of the m bracket.
const M_FLOOR: f64 = 1e-12;

/// Smallest m used when sampling a curve; sets the zero-strain clipping.
pub const DEFAULT_M_MIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpamSolution {
    pub m: f64,
    pub phi: f64,
}

fn check_ratio(l0_over_h: f64) -> Result<()> {
    if l0_over_h.is_finite() && l0_over_h > 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "l0/h must exceed 1, got {l0_over_h}"
        )))
    }
}

fn brent() -> Brent {
    Brent {
        xtol: 1e-17,
        ..Brent::default()
    }
}

/// φ solving the first-kind constraint at parameter m.
pub(crate) fn amplitude_for(m: f64, l0_over_h: f64) -> Result<f64> {
    let root_m = m.sqrt();
    // multiplied through by cos φ so the bracket end at π/2 is finite
    brent().solve(
        |phi| {
            let f = ellip_f(EllipticArgs::new(phi, m).expect("bracket inside domain"))
                .expect("m < 1 is never singular");
            f - l0_over_h * root_m * phi.cos()
        },
        0.0,
        FRAC_PI_2,
    )
}

/// Strain reached on the first-kind constraint curve at parameter m.
pub(crate) fn strain_for(m: f64, l0_over_h: f64) -> Result<(f64, f64)> {
    let phi = amplitude_for(m, l0_over_h)?;
    let args = EllipticArgs::new(phi, m)?;
    let f = ellip_f(args)?;
    let e = ellip_e(args)?;
    Ok((phi, 2.0 * (1.0 - e / f)))
}

/// Strain at which the force reaches zero (m = 1/2).
pub fn ppam_max_strain(l0_over_h: f64) -> Result<f64> {
    check_ratio(l0_over_h)?;
    Ok(strain_for(0.5, l0_over_h)?.1)
}

/// Solves the constraint pair for (m, φ) at strain `eps`.
pub fn ppam_solve(l0_over_h: f64, eps: f64) -> Result<PpamSolution> {
    check_ratio(l0_over_h)?;
    let eps_max = ppam_max_strain(l0_over_h)?;
    if !(eps > 0.0) {
        return Err(Error::NoSolution(format!(
            "strain {eps} is at or below zero, where the force is unbounded"
        )));
    }
    if eps >= eps_max {
        return Err(Error::NoSolution(format!(
            "strain {eps} is at or beyond the zero-force strain {eps_max} for l0/h = {l0_over_h}"
        )));
    }
    let (_, eps_floor) = strain_for(M_FLOOR, l0_over_h)?;
    if eps <= eps_floor {
        return Err(Error::NoSolution(format!(
            "strain {eps} too small to bracket"
        )));
    }
    let m = brent()
        .solve(
            |m| {
                strain_for(m, l0_over_h)
                    .map(|(_, e)| e - eps)
                    .unwrap_or(f64::NAN)
            },
            M_FLOOR,
            0.5,
        )
        .map_err(|e| Error::NoSolution(format!("m solve failed: {e}")))?;
    let phi = amplitude_for(m, l0_over_h)?;
    Ok(PpamSolution { m, phi })
}

/// Both constraint residuals at (m, φ): (second kind, first kind).
pub fn ppam_residuals(l0_over_h: f64, eps: f64, sol: PpamSolution) -> Result<(f64, f64)> {
    let args = EllipticArgs::new(sol.phi, sol.m)?;
    let denom = sol.m.sqrt() * sol.phi.cos();
    Ok((
        ellip_e(args)? / denom - l0_over_h * (1.0 - 0.5 * eps),
        ellip_f(args)? / denom - l0_over_h,
    ))
}

pub fn ppam_force(h: f64, pressure: f64, sol: PpamSolution) -> f64 {
    let c = sol.phi.cos();
    PI * pressure * h * h * (1.0 - 2.0 * sol.m) / (2.0 * sol.m * c * c)
}

/// Force of the maximally folded unit at strain `eps`. Returns exactly zero
/// at the zero-force strain itself.
pub fn ppam_force_at_strain(geom: &Geometry, pressure: f64, eps: f64) -> Result<f64> {
    if !(pressure.is_finite() && pressure > 0.0) {
        return Err(Error::domain(format!(
            "pressure must be positive, got {pressure}"
        )));
    }
    let ratio = geom.l0() / geom.h();
    let eps_max = ppam_max_strain(ratio)?;
    if (eps - eps_max).abs() <= 1e-12 {
        return Ok(0.0);
    }
    let sol = ppam_solve(ratio, eps)?;
    Ok(ppam_force(geom.h(), pressure, sol))
}
