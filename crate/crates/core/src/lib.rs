//! Exact symbolic direct-stiffness analysis of plane trusses.

pub mod engine;
pub mod fixtures;
pub mod kernel;
pub mod model;
pub mod parser;
pub mod sensitivity;
