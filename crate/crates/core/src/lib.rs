pub mod basin;
pub mod classify;
pub mod cubic;
pub mod error;
pub mod grid;
pub mod orbit;
pub mod periodic;
pub mod petal;
pub mod poly;
pub mod rays;
pub mod slice;
pub mod tile;

pub use cubic::{CriticalPair, CubicMap, FixedPoint};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use orbit::{iterate_orbit, Fate, OrbitConfig, OrbitRecord};
