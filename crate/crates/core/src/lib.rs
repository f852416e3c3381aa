//! Exact star products on complex projective space by phase-space reduction.

pub mod equiv;
pub mod error;
pub mod formal;
pub mod moreno;
pub mod parse;
pub mod poly;
pub mod random;
pub mod reduce;
pub mod scalar;
pub mod series;
pub mod verify;
pub mod wick;
