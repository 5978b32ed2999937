//! Library side of the `csg` command line tool: CSV schemas for traces and
//! benchmark runs, the trace validator, and the sweep runner.

pub mod records;
pub mod sweep;
pub mod trace;
