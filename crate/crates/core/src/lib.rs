pub mod constants;
pub mod error;
pub mod dsubh;
pub mod gauge;
pub mod hausdorff;
pub mod measures;
pub mod geom;
pub mod quad;
pub mod verify;

pub use constants::{c_p, constant_a, hat_d, kernel_k, Dimension, ExtendedReal};
pub use error::{Error, Result};
pub use gauge::{dini_integral, gauge_inverse, slope_s, Gauge, GaugeKind, SlopeConstant};
