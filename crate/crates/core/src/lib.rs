//! Lorentzian Frenet apparatus and direction-curve partners in Minkowski 3-space.

pub mod catalog;
pub mod characterize;
pub mod config;
pub mod curve;
pub mod direction;
pub mod error;
pub mod export;
pub mod frenet;
pub mod lorentz;
pub mod numerics;
pub mod pipeline;
pub mod report;
pub mod par;

pub use config::Tolerances;
pub use error::{GeometryError, Result};
pub use lorentz::{CausalCharacter, MinkVec3};
