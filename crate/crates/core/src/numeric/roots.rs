//! Bracketing scalar root finding (Brent's method).

use crate::error::{Error, Result};

/// Brent root finder configuration.
///
/// Iteration stops when `|f(x)| <= ftol` or the bracket is narrower than
/// `xtol + rtol·|x|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Brent {
    pub xtol: f64,
    pub rtol: f64,
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for Brent {
    fn default() -> Self {
        Self {
            xtol: 1e-14,
            rtol: 4.0 * f64::EPSILON,
            ftol: 0.0,
            max_iter: 200,
        }
    }
}

impl Brent {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            xtol: tol,
            ftol: tol,
            ..Self::default()
        }
    }

    /// Finds a root of `f` in `[lo, hi]`. The result always lies inside the
    /// initial bracket.
    pub fn solve<F: FnMut(f64) -> f64>(&self, mut f: F, lo: f64, hi: f64) -> Result<f64> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::domain(format!("invalid bracket [{lo}, {hi}]")));
        }
        let (mut xpre, mut xcur) = (lo, hi);
        let (mut fpre, mut fcur) = (f(xpre), f(xcur));
        if fpre.is_nan() || fcur.is_nan() {
            return Err(Error::domain("function is NaN at a bracket end"));
        }
        if fpre == 0.0 {
            return Ok(xpre);
        }
        if fcur == 0.0 {
            return Ok(xcur);
        }
        if fpre.signum() == fcur.signum() {
            return Err(Error::NoSignChange {
                lo,
                hi,
                flo: fpre,
                fhi: fcur,
            });
        }

        let (mut xblk, mut fblk) = (0.0, 0.0);
        let (mut spre, mut scur) = (0.0f64, 0.0f64);
        for _ in 0..self.max_iter {
            if fpre != 0.0 && fcur != 0.0 && fpre.signum() != fcur.signum() {
                xblk = xpre;
                fblk = fpre;
                spre = xcur - xpre;
                scur = spre;
            }
            if fblk.abs() < fcur.abs() {
                xpre = xcur;
                xcur = xblk;
                xblk = xpre;
                fpre = fcur;
                fcur = fblk;
                fblk = fpre;
            }

            let delta = 0.5 * (self.xtol + self.rtol * xcur.abs());
            let sbis = 0.5 * (xblk - xcur);
            if fcur == 0.0 || fcur.abs() <= self.ftol || sbis.abs() < delta {
                return Ok(xcur.clamp(lo, hi));
            }

            if spre.abs() > delta && fcur.abs() < fpre.abs() {
                let stry = if xpre == xblk {
                    // secant
                    -fcur * (xcur - xpre) / (fcur - fpre)
                } else {
                    // inverse quadratic
                    let dpre = (fpre - fcur) / (xpre - xcur);
                    let dblk = (fblk - fcur) / (xblk - xcur);
                    -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
                };
                if 2.0 * stry.abs() < spre.abs().min(3.0 * sbis.abs() - delta) {
                    spre = scur;
                    scur = stry;
                } else {
                    spre = sbis;
                    scur = sbis;
                }
            } else {
                spre = sbis;
                scur = sbis;
            }

            xpre = xcur;
            fpre = fcur;
            if scur.abs() > delta {
                xcur += scur;
            } else {
                xcur += if sbis > 0.0 { delta } else { -delta };
            }
            fcur = f(xcur);
            if fcur.is_nan() {
                return Err(Error::domain(format!("function is NaN at {xcur}")));
            }
        }
        Err(Error::NoConvergence(self.max_iter))
    }
}

/// Root of `f` on `[lo, hi]` to tolerance `tol` (on either `|f|` or the
/// bracket width), with the default iteration cap.
pub fn find_root_bracketed<F: FnMut(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Brent::with_tol(tol).solve(f, lo, hi)
}
