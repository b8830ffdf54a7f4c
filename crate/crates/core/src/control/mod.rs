//! Quasi-static closed-loop simulation of a reconfigurable actuator.

mod actuators;
mod pi;
mod plant;
mod scenario;

pub use actuators::{servo_step, valve_step, ServoModel, ValveModel, SERVO_MAX_ANGLE};
pub use pi::{pi_update, PiController};
pub use plant::{plant_equilibrium, Equilibrium};
pub use scenario::{
    builtin_scenario, default_linear_device, linear_device_surrogate, run_scenario, Channel,
    LinearMember, LoadStep, NoiseConfig, PlantConfig, ScenarioConfig, ServoConfig, SimRecord,
    SimTrace, ValveConfig, BUILTIN_SCENARIOS,
};
