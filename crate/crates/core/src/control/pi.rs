use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position-form PI controller with output clamping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiController {
    pub kp: f64,
    pub ki: f64,
    pub integral: f64,
    pub out_lo: f64,
    pub out_hi: f64,
    /// Stop integrating once the output reaches a bound.
    pub anti_windup: bool,
}

impl PiController {
    pub fn new(kp: f64, ki: f64, out_lo: f64, out_hi: f64) -> Result<Self> {
        if !(kp.is_finite() && ki.is_finite()) {
            return Err(Error::domain("controller gains must be finite"));
        }
        if !(out_lo < out_hi) {
            return Err(Error::domain(format!(
                "bad output range [{out_lo}, {out_hi}]"
            )));
        }
        Ok(PiController {
            kp,
            ki,
            integral: 0.0,
            out_lo,
            out_hi,
            anti_windup: true,
        })
    }

    /// Preloads the integral so that zero error yields `output`.
    pub fn with_output(mut self, output: f64) -> Self {
        self.integral = if self.ki == 0.0 {
            0.0
        } else {
            output / self.ki
        };
        self
    }

    /// Returns the clamped command for this step.
    pub fn update(&mut self, setpoint: f64, measurement: f64, dt: f64) -> Result<f64> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let e = setpoint - measurement;
        let integral = self.integral + e * dt;
        let raw = self.kp * e + self.ki * integral;
        if self.anti_windup && !(self.out_lo..=self.out_hi).contains(&raw) {
            let held = self.kp * e + self.ki * self.integral;
            let bound = raw.clamp(self.out_lo, self.out_hi);
            // integrate only as far as the bound, never past it
            if (self.out_lo..=self.out_hi).contains(&held) && held != bound && self.ki != 0.0 {
                self.integral = (bound - self.kp * e) / self.ki;
            }
            return Ok(bound);
        }
        self.integral = integral;
        Ok(raw.clamp(self.out_lo, self.out_hi))
    }
}

/// Functional form of [`PiController::update`].
pub fn pi_update(
    c: &PiController,
    setpoint: f64,
    measurement: f64,
    dt: f64,
) -> Result<(f64, PiController)> {
    let mut next = *c;
    let u = next.update(setpoint, measurement, dt)?;
    Ok((u, next))
}
