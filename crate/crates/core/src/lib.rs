//! Numerical workbench for a one-resonant germ of the plane fixing an axis,
//! its lift through the blow-up of the origin, the local basins of the
//! resulting parabolic cylinder, and its Fatou-type coordinates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accel;
pub mod analysis;
pub mod config;
pub mod coords;
pub mod dd;
pub mod error;
pub mod germ;
pub mod par;
pub mod regions;
pub mod render;
pub mod rotation;
pub mod suite;

pub use error::{Error, Result};
pub use germ::{Chart, ChartPoint, MapFamily, PerturbationPoly};
pub use regions::BasinParams;
pub use rotation::RotationNumber;
