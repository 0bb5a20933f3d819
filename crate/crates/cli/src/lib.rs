//! Drivers behind the `vicert` binary: problem resolution, run reports and
//! report merging.

pub mod run;
pub mod table;
