//! Simulation and analysis toolkit for vision-based crop-row switching.

pub mod batch;
pub mod error;
pub mod field;
pub mod fsm;
pub mod geometry;
pub mod metrics;
pub mod profile;
pub mod reentry;
pub mod robot;
pub mod sensor;

pub use error::{Error, Result};
