use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::actuators::{ServoModel, ValveModel, SERVO_MAX_ANGLE};
use super::pi::PiController;
use super::plant::plant_equilibrium;
use crate::curve::ForceStrainCurve;
use crate::empirical::{build_surrogate, Surrogate};
use crate::error::{Error, Result};
use crate::model::{ForceProvider, Geometry, Model, ModelPlant, Pouch, MAX_FOLD_RATIO};

/// Names accepted by [`builtin_scenario`].
pub const BUILTIN_SCENARIOS: [&str; 3] =
    ["open-loop-ramp", "geometry-step-load", "pressure-step-load"];

/// One member of a device whose curves are straight lines
/// `F = f_max (1 - eps / eps_max)` at the reference pressure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearMember {
    pub fold_ratio: f64,
    pub f_max_n: f64,
    pub eps_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PlantConfig {
    /// Surrogate built from straight-line member curves.
    LinearDevice {
        w0_mm: f64,
        l0_mm: f64,
        p_ref_kpa: f64,
        members: Vec<LinearMember>,
    },
    /// Analytic model (`pouch`, `pouch-non-ideal` or `ppam`).
    Model {
        model: String,
        w0_mm: f64,
        l0_mm: f64,
        h_mm: f64,
    },
}

/// What the loop drives. Gains are in degrees or kPa per millimeter of
/// position error (and per second for the integral term).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Channel {
    /// Servo commanded straight to `end_deg` at constant pressure.
    OpenLoopRamp {
        pressure_kpa: f64,
        start_deg: f64,
        end_deg: f64,
    },
    /// PI on the servo angle at constant pressure.
    Geometry {
        pressure_kpa: f64,
        initial_deg: f64,
        kp_deg_per_mm: f64,
        ki_deg_per_mm_s: f64,
    },
    /// PI on the valve command at fixed fold ratio.
    Pressure {
        fold_ratio: f64,
        initial_command_kpa: f64,
        kp_kpa_per_mm: f64,
        ki_kpa_per_mm_s: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServoConfig {
    pub rate_limit_deg_s: f64,
    pub backlash_dead_time_s: f64,
    /// Polynomial in degrees giving wf in mm, lowest order first.
    pub angle_to_wf_mm: Vec<f64>,
}

impl Default for ServoConfig {
    fn default() -> Self {
        ServoConfig {
            rate_limit_deg_s: 160.0,
            backlash_dead_time_s: 0.2,
            angle_to_wf_mm: vec![0.0, 67.0 / SERVO_MAX_ANGLE],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValveConfig {
    pub leak_gain: f64,
    pub leak_offset_kpa: f64,
    pub sat_lo_kpa: f64,
    pub sat_hi_kpa: f64,
    pub time_constant_s: f64,
}

impl Default for ValveConfig {
    fn default() -> Self {
        // commanded 6.9 -> 3.9 kPa and 27.6 -> 16.7 kPa
        let a = (16.7 - 3.9) / (27.6 - 6.9);
        ValveConfig {
            leak_gain: a,
            leak_offset_kpa: 3.9 - a * 6.9,
            sat_lo_kpa: 6.9,
            sat_hi_kpa: 27.6,
            time_constant_s: 0.1,
        }
    }
}

/// Load from `time_s` on, until the next step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadStep {
    pub time_s: f64,
    pub load_n: f64,
}

/// Gaussian position-measurement noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub position_std_mm: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub plant: PlantConfig,
    pub channel: Channel,
    #[serde(default)]
    pub servo: ServoConfig,
    #[serde(default)]
    pub valve: ValveConfig,
    /// Load schedule; zero before the first step.
    pub loads: Vec<LoadStep>,
    pub duration_s: f64,
    pub loop_rate_hz: f64,
    /// Defaults to the initial equilibrium position.
    #[serde(default)]
    pub setpoint_mm: Option<f64>,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
}

/// One loop tick. SI units; `command` is in degrees for the servo
/// channels and pascals for the pressure channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub time: f64,
    pub command: f64,
    pub fold_ratio: f64,
    pub pressure: f64,
    /// Actuator length `l0 (1 - eps)`.
    pub position: f64,
    pub load: f64,
    /// Setpoint minus position.
    pub error: f64,
    pub strain: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub name: String,
    pub channel: String,
    pub dt: f64,
    pub setpoint: f64,
    /// Span of equilibrium positions over the full command range at the
    /// final load, m.
    pub actuation_range: f64,
    pub records: Vec<SimRecord>,
}

impl SimTrace {
    /// Largest |error| over records at or after `t`.
    pub fn max_abs_error_after(&self, t: f64) -> f64 {
        self.records
            .iter()
            .filter(|r| r.time >= t - 1e-9)
            .map(|r| r.error.abs())
            .fold(0.0, f64::max)
    }

    /// Time after which |error| stays within `tol`, or None if the last
    /// record is outside.
    pub fn settle_time(&self, tol: f64) -> Option<f64> {
        let last_out = self.records.iter().rposition(|r| r.error.abs() > tol);
        match last_out {
            None => Some(self.records.first()?.time),
            Some(i) if i + 1 < self.records.len() => Some(self.records[i + 1].time),
            Some(_) => None,
        }
    }

    /// Factor from stored command units (deg or Pa) to reported units
    /// (deg or kPa).
    pub fn command_scale(&self) -> f64 {
        if self.channel == "pressure" {
            1e-3
        } else {
            1.0
        }
    }

    pub fn command_unit(&self) -> &'static str {
        if self.channel == "pressure" {
            "kPa"
        } else {
            "deg"
        }
    }

    /// CSV with header `time_s,command,fold_ratio,pressure_kpa,position_mm,load_n,error_mm`.
    /// The command column is in degrees, or kPa for the pressure channel.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "time_s",
            "command",
            "fold_ratio",
            "pressure_kpa",
            "position_mm",
            "load_n",
            "error_mm",
        ])?;
        let k = self.command_scale();
        for r in &self.records {
            wtr.write_record(
                [
                    r.time,
                    r.command * k,
                    r.fold_ratio,
                    r.pressure * 1e-3,
                    r.position * 1e3,
                    r.load,
                    r.error * 1e3,
                ]
                .iter()
                .map(|v| v.to_string()),
            )?;
        }
        wtr.flush()
    }
}

/// Straight-line device family used by the built-in scenarios. Not a
/// measured device: forces and strains are picked to give about 14 mm of
/// open-loop travel on a 100 mm unit at 8 kPa under a 0.98 N weight.
/// Members sit every 0.01 in fold ratio so that blending between
/// neighbours stays close to the member lines.
pub fn default_linear_device() -> PlantConfig {
    let members = (0..=67)
        .map(|i| {
            let fr = i as f64 / 100.0;
            LinearMember {
                fold_ratio: fr,
                f_max_n: 20.0 * (1.0 - 0.5 * fr),
                eps_max: 0.15 + 0.23 * fr,
            }
        })
        .collect();
    PlantConfig::LinearDevice {
        w0_mm: 100.0,
        l0_mm: 100.0,
        p_ref_kpa: 8.0,
        members,
    }
}

/// Surrogate over straight-line members.
pub fn linear_device_surrogate(members: &[LinearMember], p_ref: f64) -> Result<Surrogate> {
    let curves = members
        .iter()
        .map(|m| {
            if !(m.f_max_n > 0.0 && m.eps_max > 0.0) {
                return Err(Error::domain(format!(
                    "member f_r = {}: force and strain extents must be positive",
                    m.fold_ratio
                )));
            }
            let c = ForceStrainCurve::from_pairs(
                &[(0.0, m.f_max_n), (m.eps_max, 0.0)],
                p_ref,
                format!("fr={}", m.fold_ratio),
            )?;
            Ok((m.fold_ratio, c))
        })
        .collect::<Result<Vec<_>>>()?;
    build_surrogate(&curves, p_ref)
}

pub fn builtin_scenario(name: &str) -> Option<ScenarioConfig> {
    // 0.98 N carried throughout, 1.47 N added at t = 1 s
    let step = vec![
        LoadStep {
            time_s: 0.0,
            load_n: 0.98,
        },
        LoadStep {
            time_s: 1.0,
            load_n: 0.98 + 1.47,
        },
    ];
    let base = |name: &str, channel, loads, duration_s, loop_rate_hz| ScenarioConfig {
        name: name.to_owned(),
        plant: default_linear_device(),
        channel,
        servo: ServoConfig::default(),
        valve: ValveConfig::default(),
        loads,
        duration_s,
        loop_rate_hz,
        setpoint_mm: None,
        noise: None,
    };
    match name {
        "open-loop-ramp" => Some(base(
            name,
            Channel::OpenLoopRamp {
                pressure_kpa: 8.0,
                start_deg: 0.0,
                end_deg: SERVO_MAX_ANGLE,
            },
            vec![LoadStep {
                time_s: 0.0,
                load_n: 0.98,
            }],
            1.5,
            30.0,
        )),
        "geometry-step-load" => Some(base(
            name,
            Channel::Geometry {
                pressure_kpa: 3.9,
                initial_deg: 24.0,
                kp_deg_per_mm: -5.0,
                ki_deg_per_mm_s: -30.0,
            },
            step,
            10.0,
            6.0,
        )),
        "pressure-step-load" => Some(base(
            name,
            Channel::Pressure {
                fold_ratio: 0.0,
                initial_command_kpa: 20.0,
                kp_kpa_per_mm: -5.0,
                ki_kpa_per_mm_s: -20.0,
            },
            step,
            10.0,
            6.0,
        )),
        _ => None,
    }
}

struct Plant {
    provider: Box<dyn ForceProvider>,
    w0: f64,
    l0: f64,
    fr_max: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::domain(format!("{name} must be positive, got {v}")))
    }
}

fn build_plant(cfg: &PlantConfig) -> Result<Plant> {
    match cfg {
        PlantConfig::LinearDevice {
            w0_mm,
            l0_mm,
            p_ref_kpa,
            members,
        } => {
            let s = linear_device_surrogate(members, positive("p_ref_kpa", *p_ref_kpa)? * 1e3)?;
            let fr_max = *s.grid().last().unwrap();
            Ok(Plant {
                provider: Box::new(s),
                w0: positive("w0_mm", *w0_mm)? * 1e-3,
                l0: positive("l0_mm", *l0_mm)? * 1e-3,
                fr_max,
            })
        }
        PlantConfig::Model {
            model,
            w0_mm,
            l0_mm,
            h_mm,
        } => {
            let model = match model.as_str() {
                "pouch" => Model::Pouch(Pouch::ideal()),
                "pouch-non-ideal" => Model::Pouch(Pouch::non_ideal()),
                "ppam" => Model::ppam(),
                other => return Err(Error::domain(format!("unknown plant model `{other}`"))),
            };
            let base = Geometry::new(*w0_mm * 1e-3, *l0_mm * 1e-3, 0.0, *h_mm * 1e-3)?;
            Ok(Plant {
                provider: Box::new(ModelPlant { model, base }),
                w0: base.w0(),
                l0: base.l0(),
                fr_max: MAX_FOLD_RATIO,
            })
        }
    }
}

impl Plant {
    fn fold_ratio(&self, wf: f64) -> f64 {
        (wf / self.w0).clamp(0.0, self.fr_max)
    }

    fn max_force(&self, fr: f64, pressure: f64) -> Result<f64> {
        let (lo, _) = self.provider.strain_domain(fr, pressure)?;
        self.provider.force(fr, lo, pressure)
    }
}

fn load_at(loads: &[LoadStep], t: f64) -> f64 {
    loads
        .iter()
        .take_while(|s| s.time_s <= t + 1e-9)
        .last()
        .map_or(0.0, |s| s.load_n)
}

/// Command values spanning a channel's authority: fold ratios for the
/// servo channels, actual pressures for the pressure channel.
fn authority(
    plant: &Plant,
    servo: &ServoModel,
    valve: &ValveModel,
    channel: &Channel,
) -> Vec<(f64, f64)> {
    const N: usize = 65;
    (0..N)
        .map(|i| {
            let s = i as f64 / (N - 1) as f64;
            match channel {
                Channel::OpenLoopRamp { pressure_kpa, .. }
                | Channel::Geometry { pressure_kpa, .. } => (
                    plant.fold_ratio(servo.wf_of(s * SERVO_MAX_ANGLE)),
                    pressure_kpa * 1e3,
                ),
                Channel::Pressure { fold_ratio, .. } => (
                    *fold_ratio,
                    valve.steady_state(valve.sat_lo + s * (valve.sat_hi - valve.sat_lo)),
                ),
            }
        })
        .collect()
}

fn validate(cfg: &ScenarioConfig) -> Result<()> {
    positive("duration_s", cfg.duration_s)?;
    positive("loop_rate_hz", cfg.loop_rate_hz)?;
    if cfg
        .loads
        .iter()
        .any(|s| !(s.load_n.is_finite() && s.load_n >= 0.0 && s.time_s.is_finite()))
    {
        return Err(Error::domain("loads must be finite and non-negative"));
    }
    if cfg.loads.windows(2).any(|w| w[1].time_s <= w[0].time_s) {
        return Err(Error::domain("load schedule times must increase"));
    }
    if let Some(n) = cfg.noise {
        if !(n.position_std_mm.is_finite() && n.position_std_mm >= 0.0) {
            return Err(Error::domain("noise level must be non-negative"));
        }
    }
    Ok(())
}

/// Runs a scenario tick by tick. At each tick the plant settles to its
/// quasi-static equilibrium under the current load, the controller reads
/// the position and issues a command, and the actuators advance one step.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SimTrace> {
    validate(cfg)?;
    let plant = build_plant(&cfg.plant)?;
    let sc = &cfg.servo;
    let wf_coeffs: Vec<f64> = sc.angle_to_wf_mm.iter().map(|c| c * 1e-3).collect();
    let initial_deg = match cfg.channel {
        Channel::OpenLoopRamp { start_deg, .. } => start_deg,
        Channel::Geometry { initial_deg, .. } => initial_deg,
        Channel::Pressure { .. } => 0.0,
    };
    let mut servo = ServoModel::new(
        initial_deg,
        sc.rate_limit_deg_s,
        sc.backlash_dead_time_s,
        wf_coeffs,
    )?;
    let wf_top = servo.wf_of(SERVO_MAX_ANGLE);
    if wf_top / plant.w0 > plant.fr_max + 1e-9 {
        return Err(Error::FoldRatioOutOfRange {
            fr: wf_top / plant.w0,
            lo: 0.0,
            hi: plant.fr_max,
        });
    }
    let vc = &cfg.valve;
    let mut valve = ValveModel::new(
        vc.leak_gain,
        vc.leak_offset_kpa * 1e3,
        vc.sat_lo_kpa * 1e3,
        vc.sat_hi_kpa * 1e3,
        vc.time_constant_s,
    )?;

    let (mut ctrl, channel_name) = match cfg.channel {
        Channel::OpenLoopRamp {
            pressure_kpa,
            end_deg,
            ..
        } => {
            positive("pressure_kpa", pressure_kpa)?;
            if !(0.0..=SERVO_MAX_ANGLE).contains(&end_deg) {
                return Err(Error::domain(format!(
                    "end angle {end_deg} outside [0, {SERVO_MAX_ANGLE}]"
                )));
            }
            (None, "open-loop")
        }
        Channel::Geometry {
            pressure_kpa,
            kp_deg_per_mm,
            ki_deg_per_mm_s,
            ..
        } => {
            positive("pressure_kpa", pressure_kpa)?;
            let c = PiController::new(
                kp_deg_per_mm * 1e3,
                ki_deg_per_mm_s * 1e3,
                0.0,
                SERVO_MAX_ANGLE,
            )?
            .with_output(initial_deg);
            (Some(c), "geometry")
        }
        Channel::Pressure {
            fold_ratio,
            initial_command_kpa,
            kp_kpa_per_mm,
            ki_kpa_per_mm_s,
        } => {
            if !(0.0..=plant.fr_max).contains(&fold_ratio) {
                return Err(Error::FoldRatioOutOfRange {
                    fr: fold_ratio,
                    lo: 0.0,
                    hi: plant.fr_max,
                });
            }
            valve = valve.settled_at(initial_command_kpa * 1e3);
            let c = PiController::new(
                kp_kpa_per_mm * 1e6,
                ki_kpa_per_mm_s * 1e6,
                valve.sat_lo,
                valve.sat_hi,
            )?
            .with_output(valve.commanded);
            (Some(c), "pressure")
        }
    };

    // every scheduled load must be carried somewhere in the command range
    let auth = authority(&plant, &servo, &valve, &cfg.channel);
    let mut caps = Vec::with_capacity(auth.len());
    for &(fr, p) in &auth {
        caps.push(plant.max_force(fr, p)?);
    }
    let cap = caps.iter().cloned().fold(0.0, f64::max);
    for s in &cfg.loads {
        if s.load_n > cap {
            let boundary = match cfg.channel {
                Channel::Pressure { .. } => format!(
                    "{:.3} kPa actual pressure",
                    valve.steady_state(valve.sat_hi) * 1e-3
                ),
                _ => format!("{SERVO_MAX_ANGLE} deg servo travel"),
            };
            return Err(Error::Infeasible(format!(
                "load {} N at t = {} s exceeds the {:.4} N available within {boundary}",
                s.load_n, s.time_s, cap
            )));
        }
    }

    let final_load = cfg.loads.last().map_or(0.0, |s| s.load_n);
    let mut zs = Vec::with_capacity(auth.len());
    for &(fr, p) in &auth {
        zs.push(
            plant.l0
                * (1.0 - plant_equilibrium(plant.provider.as_ref(), fr, p, final_load)?.strain),
        );
    }
    let actuation_range = zs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - zs.iter().cloned().fold(f64::INFINITY, f64::min);

    let mut noise = match cfg.noise {
        Some(n) if n.position_std_mm > 0.0 => Some((
            ChaCha8Rng::seed_from_u64(n.seed),
            Normal::new(0.0, n.position_std_mm * 1e-3).map_err(|e| Error::domain(e.to_string()))?,
        )),
        _ => None,
    };

    let dt = 1.0 / cfg.loop_rate_hz;
    let n = (cfg.duration_s * cfg.loop_rate_hz).round() as usize;
    let mut records = Vec::with_capacity(n + 1);
    let mut setpoint = cfg.setpoint_mm.map(|z| z * 1e-3);
    for k in 0..=n {
        let t = k as f64 / cfg.loop_rate_hz;
        let load = load_at(&cfg.loads, t);
        let (fr, pressure) = match cfg.channel {
            Channel::OpenLoopRamp { pressure_kpa, .. } | Channel::Geometry { pressure_kpa, .. } => {
                (plant.fold_ratio(servo.wf()), pressure_kpa * 1e3)
            }
            Channel::Pressure { fold_ratio, .. } => (fold_ratio, valve.actual),
        };
        let eq = plant_equilibrium(plant.provider.as_ref(), fr, pressure, load)?;
        let z = plant.l0 * (1.0 - eq.strain);
        let sp = *setpoint.get_or_insert(z);
        let z_meas = match noise.as_mut() {
            Some((rng, dist)) => z + dist.sample(rng),
            None => z,
        };
        let command = match (&cfg.channel, ctrl.as_mut()) {
            (Channel::OpenLoopRamp { end_deg, .. }, _) => *end_deg,
            (_, Some(c)) => c.update(sp, z_meas, dt)?,
            (_, None) => unreachable!("closed-loop channel without controller"),
        };
        records.push(SimRecord {
            time: t,
            command,
            fold_ratio: fr,
            pressure,
            position: z,
            load,
            error: sp - z,
            strain: eq.strain,
            saturated: eq.saturated,
        });
        if k < n {
            match cfg.channel {
                Channel::Pressure { .. } => valve.step(command, dt)?,
                _ => {
                    servo.step(command, dt)?;
                }
            }
        }
    }

    Ok(SimTrace {
        name: cfg.name.clone(),
        channel: channel_name.to_owned(),
        dt,
        setpoint: setpoint.unwrap_or(0.0),
        actuation_range,
        records,
    })
}
