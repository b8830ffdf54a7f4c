use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ForceProvider;
use crate::numeric::Brent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub strain: f64,
    /// The load exceeds the force available at the lowest strain; `strain`
    /// is then that lowest strain.
    pub saturated: bool,
}

/// Strain at which the actuator force balances `load`. The force is
/// assumed non-increasing in strain.
pub fn plant_equilibrium(
    model: &dyn ForceProvider,
    fr: f64,
    pressure: f64,
    load: f64,
) -> Result<Equilibrium> {
    if !(load.is_finite() && load >= 0.0) {
        return Err(Error::domain(format!(
            "load must be non-negative, got {load}"
        )));
    }
    let (lo, hi) = model.strain_domain(fr, pressure)?;
    if load == 0.0 {
        return Ok(Equilibrium {
            strain: hi,
            saturated: false,
        });
    }
    let f_lo = model.force(fr, lo, pressure)?;
    if load >= f_lo {
        return Ok(Equilibrium {
            strain: lo,
            saturated: load > f_lo,
        });
    }
    let mut err = None;
    let strain = Brent::default().solve(
        |e| match model.force(fr, e, pressure) {
            Ok(f) => f - load,
            Err(x) => {
                err.get_or_insert(x);
                f64::NAN
            }
        },
        lo,
        hi,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok(Equilibrium {
        strain: strain?,
        saturated: false,
    })
}
