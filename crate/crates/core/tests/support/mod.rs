//! Shared by the property suites and the acceptance target.
#![allow(dead_code)]

pub mod exprs;
pub mod trusses;
