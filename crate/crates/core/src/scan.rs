//! One pass over the input that searches the one-, two-, and n-coalition
//! levels, gathers per-size statistics, computes subspace bounds, prunes,
//! and establishes the first worst-case bound.
//!
//! The two-coalition level comes almost for free: complementary coalitions
//! sit at mirrored indices of the size-`s` and size-`(n-s)` lists, so both
//! lists are walked together from opposite ends while the statistics
//! accumulate.

use crate::combinatorics::{
    complement_index, enumerate_partitions, index_to_coalition, subspace_size, Coalition,
    IntegerPartition,
};
use crate::kahan::KahanSum;
use crate::values::{SizeStats, ValueTable};

/// Per-subspace bounds and bookkeeping state.
#[derive(Debug, Clone)]
pub struct SubspaceStats {
    pub partition: IntegerPartition,
    /// Upper bound on the best structure value in the subspace.
    pub max_bound: f64,
    /// Average structure value over the subspace; a valid lower bound on
    /// its best value.
    pub avg_bound: f64,
    /// Minimum over the size-list product space. Kept for reporting; the
    /// average dominates it as a lower bound so pruning never uses it.
    pub min_bound: f64,
    /// Exact number of coalition structures in the subspace.
    pub size: u128,
    pub state: SubspaceState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceState {
    Unsearched,
    Searched,
    Pruned,
}

/// Everything the scan establishes.
#[derive(Debug, Clone)]
pub struct ScanResult {
    /// Best structure over the one-, two-, and n-coalition levels.
    pub best_cs: Vec<Coalition>,
    pub best_value: f64,
    /// `min(n/2, ub_star / best_value)`; infinity when the best value is
    /// not positive, in which case no ratio bound is available.
    pub beta: f64,
    pub stats_by_size: Vec<SizeStats>,
    /// Subspaces with 3..=n-1 parts, marked pruned where the scan could
    /// already rule them out.
    pub subspaces: Vec<SubspaceStats>,
    pub ub_star: f64,
    pub lb_star: f64,
    /// Partitions with one, two, or n parts, covered by the scan itself.
    pub searched_at_scan: usize,
    /// Value-table entries read; the scan is a single pass.
    pub reads: u64,
    /// Coalition structures whose value the scan fully evaluated.
    pub cs_evaluated: u64,
}

impl ScanResult {
    pub fn remaining(&self) -> impl Iterator<Item = &SubspaceStats> {
        self.subspaces
            .iter()
            .filter(|s| s.state == SubspaceState::Unsearched)
    }

    pub fn pruned_at_scan(&self) -> usize {
        self.subspaces
            .iter()
            .filter(|s| s.state == SubspaceState::Pruned)
            .count()
    }

    pub fn bound_available(&self) -> bool {
        self.beta.is_finite()
    }
}

/// Subspace bounds from per-size statistics: each part contributes its
/// size's max, average, or min once per occurrence.
pub fn compute_bounds(g: &IntegerPartition, stats: &[SizeStats]) -> (f64, f64, f64) {
    let mut max = 0.0;
    let mut avg = 0.0;
    let mut min = 0.0;
    for &part in g.parts() {
        let st = &stats[(part - 1) as usize];
        debug_assert_eq!(st.s, part);
        max += st.max;
        avg += st.avg;
        min += st.min;
    }
    (max, avg, min)
}

/// Worst-case bound after the scan: the scanned levels are within `n/2` of
/// the optimum, and `ub_star / best` is a bound whenever the best value is
/// positive. Infinity marks "no bound available".
pub fn initial_beta(ub_star: f64, best_value: f64, n: u32) -> f64 {
    if best_value <= 0.0 {
        return f64::INFINITY;
    }
    if ub_star <= best_value {
        return 1.0;
    }
    (f64::from(n) / 2.0).min(ub_star / best_value).max(1.0)
}

/// Best two-coalition structure with one part of size `s`, found by walking
/// the size-`s` and size-`(n-s)` value lists from opposite ends. When the
/// two sizes coincide the walk stops at the midpoint so each unordered pair
/// is considered once.
pub fn two_part_best(table: &ValueTable, s: u32) -> ((Coalition, Coalition), f64) {
    let n = table.n();
    assert!(s >= 1 && 2 * s <= n, "two-part search needs 1 <= s <= n/2");
    let sh = n - s;
    let list_lo = table.list(s);
    let list_hi = table.list(sh);
    let len = list_lo.len();
    let end = if s == sh { len / 2 } else { len };
    let mut v_max = f64::NEG_INFINITY;
    let mut x_max = 1usize;
    for x in 1..=end {
        let xh = len - x + 1;
        let sum = list_lo[x - 1] + list_hi[xh - 1];
        if v_max < sum {
            v_max = sum;
            x_max = x;
        }
    }
    let xh_max = len - x_max + 1;
    let c = index_to_coalition(x_max as u64, s, n).expect("scan index in range");
    let ch = index_to_coalition(xh_max as u64, sh, n).expect("mirror index in range");
    debug_assert_eq!(
        complement_index(x_max as u64, s, n).expect("in range"),
        xh_max as u64
    );
    ((c, ch), v_max)
}

/// Scan the whole input once: solve the one-, two-, and n-coalition levels,
/// record per-size statistics, bound every remaining subspace, prune
/// against the lower bound, and compute the initial worst-case bound.
pub fn scan_and_search(table: &ValueTable) -> ScanResult {
    let n = table.n();
    let mut reads: u64 = 0;
    let mut cs_evaluated: u64 = 0;

    // Level with one coalition: the grand coalition.
    let grand_value = table.list(n)[0];
    reads += 1;
    cs_evaluated += 1;
    let mut best_cs = vec![Coalition::grand(n)];
    let mut best_value = grand_value;

    // Level with n coalitions: all singletons.
    if n > 1 {
        let mut sum = KahanSum::new();
        for &v in table.list(1) {
            sum.add(v);
            reads += 1;
        }
        cs_evaluated += 1;
        let singleton_value = sum.value();
        if singleton_value > best_value {
            best_value = singleton_value;
            best_cs = (1..=n).map(Coalition::singleton).collect();
        }
    }

    // Two-coalition level, folded into the statistics pass.
    let mut stats: Vec<Option<SizeStats>> = vec![None; n as usize + 1];
    stats[n as usize] = Some(SizeStats {
        s: n,
        max: grand_value,
        min: grand_value,
        avg: grand_value,
    });

    for s in 1..=n / 2 {
        let sh = n - s;
        let list_lo = table.list(s);
        let list_hi = table.list(sh);
        let len = list_lo.len();
        let end = if s == sh { len / 2 } else { len };

        let mut lo = StatsAcc::new();
        let mut hi = StatsAcc::new();
        let mut v_max = f64::NEG_INFINITY;
        let mut x_max = 0usize;
        for x in 1..=end {
            let xh = len - x + 1;
            let v = list_lo[x - 1];
            let vh = list_hi[xh - 1];
            reads += 2;
            if v_max < v + vh {
                v_max = v + vh;
                x_max = x;
            }
            lo.add(v);
            hi.add(vh);
        }
        cs_evaluated += end as u64;

        if s == sh {
            // Same list walked from both ends: merge the halves.
            debug_assert_eq!(len % 2, 0);
            lo.merge(&hi);
            stats[s as usize] = Some(lo.finish(s, len));
        } else {
            stats[s as usize] = Some(lo.finish(s, len));
            stats[sh as usize] = Some(hi.finish(sh, len));
        }

        if end > 0 && v_max > best_value {
            let xh_max = len - x_max + 1;
            let c = index_to_coalition(x_max as u64, s, n).expect("scan index in range");
            let ch = index_to_coalition(xh_max as u64, sh, n).expect("mirror index in range");
            best_value = v_max;
            best_cs = vec![c, ch];
        }
    }

    let stats_by_size: Vec<SizeStats> = (1..=n as usize)
        .map(|s| stats[s].expect("every size covered by the scan"))
        .collect();

    // Bounds for every subspace with 3..=n-1 parts; the scanned levels are
    // complete already.
    let mut subspaces = Vec::new();
    let mut searched_at_scan = 0usize;
    for g in enumerate_partitions(n) {
        let parts = g.part_count() as u32;
        if parts <= 2 || parts == n {
            searched_at_scan += 1;
            continue;
        }
        let (max_bound, avg_bound, min_bound) = compute_bounds(&g, &stats_by_size);
        let size = subspace_size(&g).expect("within u128 range for supported n");
        subspaces.push(SubspaceStats {
            partition: g,
            max_bound,
            avg_bound,
            min_bound,
            size,
            state: SubspaceState::Unsearched,
        });
    }

    let max_remaining = subspaces
        .iter()
        .map(|s| s.max_bound)
        .fold(f64::NEG_INFINITY, f64::max);
    let avg_remaining = subspaces
        .iter()
        .map(|s| s.avg_bound)
        .fold(f64::NEG_INFINITY, f64::max);
    let ub_star = best_value.max(max_remaining);
    let lb_star = best_value.max(avg_remaining);

    for sub in &mut subspaces {
        if sub.max_bound <= lb_star {
            sub.state = SubspaceState::Pruned;
        }
    }

    let beta = initial_beta(ub_star, best_value, n);

    ScanResult {
        best_cs,
        best_value,
        beta,
        stats_by_size,
        subspaces,
        ub_star,
        lb_star,
        searched_at_scan,
        reads,
        cs_evaluated,
    }
}

struct StatsAcc {
    max: f64,
    min: f64,
    sum: KahanSum,
}

impl StatsAcc {
    fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            min: f64::INFINITY,
            sum: KahanSum::new(),
        }
    }

    fn add(&mut self, v: f64) {
        self.max = self.max.max(v);
        self.min = self.min.min(v);
        self.sum.add(v);
    }

    fn merge(&mut self, other: &StatsAcc) {
        self.max = self.max.max(other.max);
        self.min = self.min.min(other.min);
        self.sum.add(other.sum.value());
    }

    fn finish(self, s: u32, len: usize) -> SizeStats {
        let avg = (self.sum.value() / len as f64).clamp(self.min, self.max);
        SizeStats {
            s,
            max: self.max,
            min: self.min,
            avg,
        }
    }
}
