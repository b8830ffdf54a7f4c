use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper end of the servo travel, in degrees.
pub const SERVO_MAX_ANGLE: f64 = 160.0;

fn check_dt(dt: f64) -> Result<()> {
    if dt.is_finite() && dt > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "time step must be positive, got {dt}"
        )))
    }
}

/// Fold servo with a rate limit and a one-time backlash dead time.
///
/// `angle` is the horn angle. `fold_angle` is the angle the folds actually
/// follow: it stays put until the servo has been moving for
/// `backlash_dead_time` in total, then chases `angle` at the rate limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServoModel {
    pub angle: f64,
    pub fold_angle: f64,
    /// deg/s
    pub rate_limit: f64,
    /// s
    pub backlash_dead_time: f64,
    /// Polynomial in degrees giving wf in meters, lowest order first.
    pub angle_to_wf: Vec<f64>,
    /// Accumulated time spent moving, s.
    pub moving_time: f64,
}

impl ServoModel {
    pub fn new(
        angle: f64,
        rate_limit: f64,
        backlash_dead_time: f64,
        angle_to_wf: Vec<f64>,
    ) -> Result<Self> {
        if !(rate_limit.is_finite() && rate_limit > 0.0) {
            return Err(Error::domain(format!(
                "rate limit must be positive, got {rate_limit}"
            )));
        }
        if !(backlash_dead_time.is_finite() && backlash_dead_time >= 0.0) {
            return Err(Error::domain(format!(
                "dead time must be non-negative, got {backlash_dead_time}"
            )));
        }
        if !(0.0..=SERVO_MAX_ANGLE).contains(&angle) {
            return Err(Error::domain(format!(
                "angle {angle} outside [0, {SERVO_MAX_ANGLE}]"
            )));
        }
        if angle_to_wf.is_empty() || angle_to_wf.iter().any(|c| !c.is_finite()) {
            return Err(Error::domain(
                "angle-to-wf polynomial needs finite coefficients",
            ));
        }
        let s = ServoModel {
            angle,
            fold_angle: angle,
            rate_limit,
            backlash_dead_time,
            angle_to_wf,
            moving_time: 0.0,
        };
        // monotone on the travel, checked on a fine grid
        let mut prev = s.wf_of(0.0);
        for i in 1..=1600 {
            let w = s.wf_of(SERVO_MAX_ANGLE * i as f64 / 1600.0);
            if w < prev {
                return Err(Error::domain(
                    "angle-to-wf polynomial decreases on [0, 160]",
                ));
            }
            prev = w;
        }
        Ok(s)
    }

    /// Affine map reaching `wf_max` at full travel.
    pub fn affine(
        angle: f64,
        rate_limit: f64,
        backlash_dead_time: f64,
        wf_max: f64,
    ) -> Result<Self> {
        Self::new(
            angle,
            rate_limit,
            backlash_dead_time,
            vec![0.0, wf_max / SERVO_MAX_ANGLE],
        )
    }

    pub fn wf_of(&self, angle: f64) -> f64 {
        self.angle_to_wf
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * angle + c)
    }

    /// Current folded width, m.
    pub fn wf(&self) -> f64 {
        self.wf_of(self.fold_angle)
    }

    /// Advances by `dt` toward `cmd`; returns true when `cmd` was clamped.
    pub fn step(&mut self, cmd: f64, dt: f64) -> Result<bool> {
        check_dt(dt)?;
        if cmd.is_nan() {
            return Err(Error::domain("servo command is NaN"));
        }
        let target = cmd.clamp(0.0, SERVO_MAX_ANGLE);
        let clamped = target != cmd;

        let max_move = self.rate_limit * dt;
        let delta = (target - self.angle).clamp(-max_move, max_move);
        self.angle = if delta.abs() == (target - self.angle).abs() {
            target
        } else {
            self.angle + delta
        };
        let move_time = delta.abs() / self.rate_limit;
        let remaining_dead = (self.backlash_dead_time - self.moving_time).max(0.0);
        self.moving_time += move_time;

        if self.moving_time >= self.backlash_dead_time {
            let free = (dt - remaining_dead.min(move_time)).max(0.0);
            let allow = self.rate_limit * free;
            let gap = self.angle - self.fold_angle;
            self.fold_angle = if gap.abs() <= allow {
                self.angle
            } else {
                self.fold_angle + allow.copysign(gap)
            };
        }
        Ok(clamped)
    }
}

/// Functional form of [`ServoModel::step`].
pub fn servo_step(s: &ServoModel, cmd: f64, dt: f64) -> Result<(ServoModel, bool)> {
    let mut next = s.clone();
    let clamped = next.step(cmd, dt)?;
    Ok((next, clamped))
}

/// Proportional valve with a leaky affine pressure map and first-order lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValveModel {
    /// Pa, after clamping.
    pub commanded: f64,
    /// Pa.
    pub actual: f64,
    pub leak_gain: f64,
    /// Pa.
    pub leak_offset: f64,
    pub sat_lo: f64,
    pub sat_hi: f64,
    /// s; zero means the pressure follows instantly.
    pub time_constant: f64,
}

impl ValveModel {
    pub fn new(
        leak_gain: f64,
        leak_offset: f64,
        sat_lo: f64,
        sat_hi: f64,
        time_constant: f64,
    ) -> Result<Self> {
        if !(leak_gain > 0.0 && leak_gain <= 1.0) {
            return Err(Error::domain(format!(
                "leak gain {leak_gain} outside (0, 1]"
            )));
        }
        if !(sat_lo.is_finite() && sat_hi.is_finite() && sat_lo < sat_hi) {
            return Err(Error::domain(format!(
                "bad saturation range [{sat_lo}, {sat_hi}]"
            )));
        }
        if !(time_constant.is_finite() && time_constant >= 0.0) {
            return Err(Error::domain(format!(
                "time constant must be non-negative, got {time_constant}"
            )));
        }
        if !leak_offset.is_finite() {
            return Err(Error::domain("leak offset must be finite"));
        }
        let mut v = ValveModel {
            commanded: sat_lo,
            actual: 0.0,
            leak_gain,
            leak_offset,
            sat_lo,
            sat_hi,
            time_constant,
        };
        v.actual = v.steady_state(sat_lo);
        Ok(v)
    }

    /// Affine leak map through two (commanded, actual) pairs, saturating
    /// at the commanded endpoints.
    pub fn from_endpoints(lo: (f64, f64), hi: (f64, f64), time_constant: f64) -> Result<Self> {
        let a = (hi.1 - lo.1) / (hi.0 - lo.0);
        let b = lo.1 - a * lo.0;
        Self::new(a, b, lo.0, hi.0, time_constant)
    }

    /// Actual pressure eventually reached for command `cmd`.
    pub fn steady_state(&self, cmd: f64) -> f64 {
        self.leak_gain * cmd.clamp(self.sat_lo, self.sat_hi) + self.leak_offset
    }

    /// Starts at rest on command `cmd`.
    pub fn settled_at(mut self, cmd: f64) -> Self {
        self.commanded = cmd.clamp(self.sat_lo, self.sat_hi);
        self.actual = self.steady_state(cmd);
        self
    }

    pub fn step(&mut self, cmd: f64, dt: f64) -> Result<()> {
        check_dt(dt)?;
        if cmd.is_nan() {
            return Err(Error::domain("valve command is NaN"));
        }
        self.commanded = cmd.clamp(self.sat_lo, self.sat_hi);
        let target = self.steady_state(cmd);
        let k = if self.time_constant == 0.0 {
            1.0
        } else {
            1.0 - (-dt / self.time_constant).exp()
        };
        self.actual += k * (target - self.actual);
        Ok(())
    }
}

/// Functional form of [`ValveModel::step`].
pub fn valve_step(v: &ValveModel, cmd: f64, dt: f64) -> Result<ValveModel> {
    let mut next = *v;
    next.step(cmd, dt)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn servo() -> ServoModel {
        ServoModel::affine(0.0, 160.0, 0.2, 0.067).unwrap()
    }

    #[test]
    fn hold_when_commanded_to_current_angle() {
        let mut s = servo();
        s.angle = 40.0;
        s.fold_angle = 40.0;
        let (n, clamped) = servo_step(&s, 40.0, 0.1).unwrap();
        assert_eq!(n, s);
        assert!(!clamped);
    }

    #[test]
    fn rate_limit_arithmetic() {
        let (n, _) = servo_step(&servo(), 160.0, 0.5).unwrap();
        assert_eq!(n.angle, 80.0);
    }

    #[test]
    fn dead_time_delays_the_folds() {
        let mut s = servo();
        let dt = 0.01;
        let mut first_motion = None;
        for k in 1..=100 {
            s.step(160.0, dt).unwrap();
            if first_motion.is_none() && s.wf() > 1e-12 {
                first_motion = Some(k as f64 * dt);
            }
        }
        let t = first_motion.unwrap();
        assert!(t > 0.2 && t <= 0.2 + dt + 1e-12, "{t}");
        // the fold angle trails by the dead time at the rate limit
        s.step(160.0, 0.25).unwrap();
        assert_eq!(s.fold_angle, 160.0);
    }

    #[test]
    fn clamps_and_flags() {
        let (n, clamped) = servo_step(&servo(), 200.0, 10.0).unwrap();
        assert!(clamped);
        assert_eq!(n.angle, 160.0);
        assert!(servo_step(&servo(), 10.0, 0.0).is_err());
        assert!(ServoModel::new(0.0, 160.0, 0.2, vec![0.0, -1e-4]).is_err());
    }

    fn valve() -> ValveModel {
        ValveModel::from_endpoints((6900.0, 3900.0), (27_600.0, 16_700.0), 0.1).unwrap()
    }

    #[test]
    fn leak_map_coefficients() {
        let v = valve();
        assert_relative_eq!(v.leak_gain, 0.618_357_487_922_705, max_relative = 1e-12);
        assert_relative_eq!(v.leak_offset, -366.666_666_666_666_7, max_relative = 1e-9);
    }

    #[test]
    fn valve_steady_states() {
        for (cmd, want) in [(6900.0, 3900.0), (27_600.0, 16_700.0)] {
            let mut v = valve();
            for _ in 0..200 {
                v.step(cmd, 0.05).unwrap();
            }
            assert_relative_eq!(v.actual, want, max_relative = 1e-9);
        }
        let v = valve_step(&valve(), 50_000.0, 0.1).unwrap();
        assert_eq!(v.commanded, 27_600.0);
    }

    #[test]
    fn valve_lag_is_first_order() {
        let v0 = valve();
        let v1 = valve_step(&v0, 27_600.0, 0.1).unwrap();
        let frac = (v1.actual - v0.actual) / (16_700.0 - v0.actual);
        assert_relative_eq!(frac, 1.0 - (-1.0f64).exp(), max_relative = 1e-12);
    }
}
