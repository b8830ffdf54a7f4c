use serde::{Deserialize, Serialize};

use crate::curve::ForceStrainCurve;
use crate::error::{Error, Result};

/// A kink needs the two-segment fit to at most this fraction of the
/// one-segment residual.
pub const KINK_SSE_RATIO: f64 = 0.5;
/// Minimum relative slope change between the two segments.
pub const KINK_SLOPE_CHANGE: f64 = 0.25;

const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkReport {
    pub has_kink: bool,
    /// Best breakpoint strain (reported even when `has_kink` is false).
    pub eps_break: f64,
    /// N per unit strain below the breakpoint.
    pub slope_low: f64,
    pub slope_high: f64,
    /// Two-segment SSE over one-segment SSE.
    pub sse_ratio: f64,
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let p = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..3 {
            let k = a[r][col] / a[col][col];
            for c in col..3 {
                a[r][c] -= k * a[col][c];
            }
            b[r] -= k * b[col];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Ordinary line fit; returns (intercept, slope, sse).
fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let c = my - slope * mx;
    let sse = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - c - slope * a).powi(2))
        .sum();
    (c, slope, sse)
}

/// Continuous two-segment fit hinged at `xk`; returns (slope_low, slope_high, sse).
fn fit_hinge(x: &[f64], y: &[f64], xk: f64) -> Option<(f64, f64, f64)> {
    let mut g = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    for (&xi, &yi) in x.iter().zip(y) {
        let u = xi - xk;
        let row = [1.0, u, u.max(0.0)];
        for i in 0..3 {
            for j in 0..3 {
                g[i][j] += row[i] * row[j];
            }
            r[i] += row[i] * yi;
        }
    }
    let [a, b, c] = solve3(g, r)?;
    let sse = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let u = xi - xk;
            (yi - a - b * u - c * u.max(0.0)).powi(2)
        })
        .sum();
    Some((b, b + c, sse))
}

/// Searches every interior sample as a breakpoint for a continuous
/// two-segment least-squares fit.
pub fn detect_kink(curve: &ForceStrainCurve) -> Result<KinkReport> {
    let n = curve.len();
    if n < MIN_POINTS {
        return Err(Error::InvalidCurve(format!(
            "kink detection needs at least {MIN_POINTS} points, got {n}"
        )));
    }
    let x: Vec<f64> = curve.points().iter().map(|p| p.strain).collect();
    let y: Vec<f64> = curve.points().iter().map(|p| p.force).collect();
    let (_, slope1, sse1) = fit_line(&x, &y);

    let mut best: Option<(f64, f64, f64, f64)> = None;
    for &xk in &x[1..n - 1] {
        if let Some((lo, hi, sse)) = fit_hinge(&x, &y, xk) {
            if best.is_none_or(|b| sse < b.3) {
                best = Some((xk, lo, hi, sse));
            }
        }
    }
    let (eps_break, slope_low, slope_high, sse2) =
        best.ok_or_else(|| Error::InvalidCurve("degenerate strain samples".into()))?;

    let scale: f64 = y.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
    if sse1 <= 1e-24 * scale {
        return Ok(KinkReport {
            has_kink: false,
            eps_break,
            slope_low: slope1,
            slope_high: slope1,
            sse_ratio: 1.0,
        });
    }
    let sse_ratio = sse2 / sse1;
    let denom = slope_low.abs().max(slope_high.abs());
    let rel_change = if denom > 0.0 {
        (slope_high - slope_low).abs() / denom
    } else {
        0.0
    };
    Ok(KinkReport {
        has_kink: sse_ratio <= KINK_SSE_RATIO && rel_change >= KINK_SLOPE_CHANGE,
        eps_break,
        slope_low,
        slope_high,
        sse_ratio,
    })
}
