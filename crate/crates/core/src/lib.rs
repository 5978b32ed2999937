//! Coalition structure generation for characteristic function games.
//!
//! Given a value for every nonempty coalition of `n` agents, the problem is
//! to partition the agents into disjoint coalitions maximizing the summed
//! value. This crate provides:
//!
//! - an anytime branch-and-bound solver that groups structures by the
//!   multiset of their coalition sizes, bounds each group from one pass
//!   over the input, prunes groups that cannot win, and searches the rest
//!   without ever generating a duplicate or invalid structure
//!   ([`search::solve`]);
//! - exact baselines for cross-checking: exhaustive enumeration and an
//!   `O(3^n)` dynamic program over subsets ([`baselines`]);
//! - benchmark instance generators with reproducible, portable streams
//!   ([`values`]).
//!
//! The solver can be interrupted at any point and still returns its best
//! structure together with a proven worst-case bound on how far from the
//! optimum it can be.

pub mod baselines;
pub mod combinatorics;
mod error;
mod kahan;
pub mod rng;
pub mod scan;
pub mod search;
pub mod values;

pub use combinatorics::{Coalition, IntegerPartition, MAX_AGENTS};
pub use error::{Error, Result};
pub use scan::{scan_and_search, ScanResult, SubspaceState, SubspaceStats};
pub use search::{
    solve, AnytimeSnapshot, Constraints, ProgressSink, SearchConfig, SearchPolicy, Solution,
    SolveStatus,
};
pub use values::{DistributionKind, DistributionSpec, SizeStats, ValueTable};
