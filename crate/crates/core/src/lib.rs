pub mod calibration;
pub mod config;
pub mod cop;
pub mod error;
pub mod gait;
pub mod numeric;
pub mod plot;
pub mod plate;
pub mod sensing;
pub mod series;
pub mod signal;
pub mod simulator;

pub use error::{Category, Error, Result};
