//! File emitters.

pub mod svg;
pub mod table;
