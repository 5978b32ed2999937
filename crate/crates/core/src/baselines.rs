//! Exact baselines: exhaustive set-partition enumeration and the dynamic
//! programming solver over subsets. Both serve as oracles in tests and as
//! benchmark comparators.

use crate::combinatorics::Coalition;
use crate::error::{Error, Result};
use crate::values::ValueTable;

/// Exhaustive enumeration stays below Bell(13), about 2.7e7 structures.
pub const MAX_BRUTE_AGENTS: u32 = 13;
/// The subset DP walks ~3^n splits and holds two 2^n tables.
pub const MAX_DP_AGENTS: u32 = 22;

/// Restricted growth string stepper. Position `i` may use block ids
/// `0..=bound[i]`, where `bound[i]` is one more than the prefix maximum.
struct RgsState {
    assignment: Vec<u32>,
    bound: Vec<u32>,
    exhausted: bool,
}

impl RgsState {
    fn new(n: u32) -> Self {
        Self {
            assignment: vec![0; n as usize],
            bound: vec![1; n as usize],
            exhausted: false,
        }
    }

    /// Write the current partition's blocks, ordered by smallest member.
    fn blocks_into(&self, blocks: &mut Vec<Coalition>) {
        blocks.clear();
        let count = self.assignment.iter().copied().max().unwrap_or(0) as usize + 1;
        blocks.resize(count, Coalition::EMPTY);
        for (i, &b) in self.assignment.iter().enumerate() {
            blocks[b as usize] = blocks[b as usize].union(Coalition::singleton(i as u32 + 1));
        }
    }

    fn advance(&mut self) {
        let n = self.assignment.len();
        let mut i = n;
        loop {
            if i <= 1 {
                self.exhausted = true;
                return;
            }
            i -= 1;
            if self.assignment[i] < self.bound[i] {
                self.assignment[i] += 1;
                break;
            }
        }
        let grown = self.bound[i].max(self.assignment[i] + 1);
        for j in i + 1..n {
            self.assignment[j] = 0;
            self.bound[j] = grown;
        }
    }
}

fn check_brute_range(n: u32) -> Result<()> {
    if n == 0 || n > MAX_BRUTE_AGENTS {
        return Err(Error::BaselineLimitExceeded {
            n,
            max: MAX_BRUTE_AGENTS,
        });
    }
    Ok(())
}

/// Visit every set partition of `{1..n}` exactly once via restricted
/// growth strings. Blocks are passed in order of their smallest member;
/// the slice is reused between calls.
pub fn for_each_cs<F: FnMut(&[Coalition])>(n: u32, mut visit: F) -> Result<()> {
    check_brute_range(n)?;
    let mut state = RgsState::new(n);
    let mut blocks = Vec::with_capacity(n as usize);
    while !state.exhausted {
        state.blocks_into(&mut blocks);
        visit(&blocks);
        state.advance();
    }
    Ok(())
}

/// Lazy stream over all set partitions of `{1..n}`.
pub struct SetPartitions {
    state: RgsState,
}

impl Iterator for SetPartitions {
    type Item = Vec<Coalition>;

    fn next(&mut self) -> Option<Vec<Coalition>> {
        if self.state.exhausted {
            return None;
        }
        let mut blocks = Vec::new();
        self.state.blocks_into(&mut blocks);
        self.state.advance();
        Some(blocks)
    }
}

pub fn enumerate_all_cs(n: u32) -> Result<SetPartitions> {
    check_brute_range(n)?;
    Ok(SetPartitions {
        state: RgsState::new(n),
    })
}

/// Exhaustive optimum. Ties break to the first structure in enumeration
/// order.
pub fn brute_force_solve(table: &ValueTable) -> Result<(Vec<Coalition>, f64)> {
    let n = table.n();
    if n > MAX_BRUTE_AGENTS {
        return Err(Error::BaselineLimitExceeded {
            n,
            max: MAX_BRUTE_AGENTS,
        });
    }
    let values = table.mask_values();
    let mut best: Option<(Vec<Coalition>, f64)> = None;
    for_each_cs(n, |cs| {
        let v: f64 = cs.iter().map(|c| values[c.mask() as usize]).sum();
        match &best {
            Some((_, bv)) if v <= *bv => {}
            _ => best = Some((cs.to_vec(), v)),
        }
    })?;
    Ok(best.expect("at least one structure"))
}

/// Dynamic programming tables over all nonempty subsets.
#[derive(Debug)]
pub struct DpTables {
    /// Optimal partition value of each subset (indexed by mask).
    pub best_value: Vec<f64>,
    /// One block of an optimal first split, or the subset itself when it is
    /// best left whole.
    pub best_split: Vec<u32>,
    /// Number of candidate splits evaluated; grows as Theta(3^n).
    pub splits_evaluated: u64,
}

/// Fill the DP tables bottom-up in subset-size order. Each unordered split
/// is evaluated once by forcing the subset's lowest agent into one half.
pub fn dp_tables(table: &ValueTable) -> Result<DpTables> {
    let n = table.n();
    if n > MAX_DP_AGENTS {
        return Err(Error::BaselineLimitExceeded {
            n,
            max: MAX_DP_AGENTS,
        });
    }
    let full = (1u64 << n) as usize;
    let values = table.mask_values();
    let mut best_value = vec![0.0f64; full];
    let mut best_split = vec![0u32; full];
    let mut splits: u64 = 0;

    for size in 1..=n {
        // Gosper's hack walks all masks of a given popcount ascending.
        let mut mask: u64 = (1 << size) - 1;
        while mask < full as u64 {
            let m = mask as u32;
            let mut best = values[m as usize];
            let mut split = m;
            let low = m & m.wrapping_neg();
            let rest = m ^ low;
            let mut sub = rest;
            loop {
                if sub != rest {
                    let half = sub | low;
                    let other = m ^ half;
                    let candidate = best_value[half as usize] + best_value[other as usize];
                    splits += 1;
                    if candidate > best {
                        best = candidate;
                        split = half;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            best_value[m as usize] = best;
            best_split[m as usize] = split;

            // Next mask of the same popcount.
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            if r >= full as u64 || c == 0 {
                break;
            }
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }

    Ok(DpTables {
        best_value,
        best_split,
        splits_evaluated: splits,
    })
}

#[derive(Debug)]
pub struct DpSolution {
    pub cs: Vec<Coalition>,
    pub value: f64,
    pub splits_evaluated: u64,
}

/// Solve exactly by dynamic programming and reconstruct the structure by
/// following the stored splits from the full agent set.
pub fn dp_solve(table: &ValueTable) -> Result<DpSolution> {
    let n = table.n();
    let tables = dp_tables(table)?;
    let full = Coalition::grand(n).mask();
    let mut cs = Vec::new();
    let mut stack = vec![full];
    while let Some(mask) = stack.pop() {
        let split = tables.best_split[mask as usize];
        if split == mask {
            cs.push(Coalition::from_mask(mask));
        } else {
            stack.push(split);
            stack.push(mask ^ split);
        }
    }
    cs.sort_by_key(|c| (c.size(), c.mask()));
    Ok(DpSolution {
        cs,
        value: tables.best_value[full as usize],
        splits_evaluated: tables.splits_evaluated,
    })
}
