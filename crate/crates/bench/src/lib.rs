//! Shared fixtures for the benchmark targets.

use csg_core::values::{DistributionKind, DistributionSpec, ValueTable};

pub fn instance(n: u32, kind: DistributionKind, seed: u64) -> ValueTable {
    ValueTable::generate(n, DistributionSpec { kind, seed }).expect("n within supported range")
}
