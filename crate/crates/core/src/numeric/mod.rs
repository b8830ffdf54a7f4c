//! Special functions and root finding used by the actuator models.

mod elliptic;
mod roots;

pub use elliptic::{carlson_rd, carlson_rf, ellip_e, ellip_f, EllipticArgs};
pub use roots::{find_root_bracketed, Brent};
