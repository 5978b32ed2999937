//! The anytime solver: select a subspace, search it with a duplicate-free
//! enumeration plus branch-and-bound, prune what the new incumbent rules
//! out, and repeat until the bound target is met or nothing remains.
//!
//! Subspace enumeration works through nested combination cursors. Depth `k`
//! draws a size-`g_k` combination of positions into the still-free agent
//! list, so overlapping coalitions are never generated. When consecutive
//! parts have equal size, the next cursor's first position may not drop
//! below the current one, which makes every structure appear exactly once.

use crate::combinatorics::{enumerate_partitions, Coalition, CombinationCursor, IntegerPartition};
use crate::scan::{scan_and_search, SubspaceState, SubspaceStats};
use crate::values::{SizeStats, ValueTable};
use std::time::{Duration, Instant};

/// Rule for choosing the next subspace to search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchPolicy {
    /// Highest upper bound first; guarantees the bound shrinks every step.
    MaxUpperBound,
    /// Smallest subspace that could still beat `ub_star / beta_star`;
    /// falls back to the highest upper bound when none qualifies.
    SmallestPromising,
}

impl std::str::FromStr for SearchPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "max-upper-bound" => Ok(SearchPolicy::MaxUpperBound),
            "smallest-promising" => Ok(SearchPolicy::SmallestPromising),
            other => Err(format!("unknown policy '{other}'")),
        }
    }
}

/// Restriction of the searched space by structure shape.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Constraints {
    /// Exact number of coalitions.
    pub part_count: Option<u32>,
    /// Maximum coalition size.
    pub max_part_size: Option<u32>,
}

impl Constraints {
    pub fn is_active(&self) -> bool {
        self.part_count.is_some() || self.max_part_size.is_some()
    }

    pub fn admits(&self, g: &IntegerPartition) -> bool {
        if let Some(m) = self.part_count {
            if g.part_count() as u32 != m {
                return false;
            }
        }
        if let Some(z) = self.max_part_size {
            if g.parts().iter().any(|&p| p > z) {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Acceptable worst-case bound; 1 demands a proven optimum.
    pub beta_star: f64,
    pub policy: SearchPolicy,
    pub constraints: Option<Constraints>,
    pub time_limit: Option<Duration>,
    /// Minimum spacing of progress snapshots inside long subspace searches.
    pub snapshot_cadence: Duration,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            beta_star: 1.0,
            policy: SearchPolicy::MaxUpperBound,
            constraints: None,
            time_limit: None,
            snapshot_cadence: Duration::from_millis(100),
        }
    }
}

/// One timestamped point of the anytime trace.
#[derive(Debug, Clone)]
pub struct AnytimeSnapshot {
    pub elapsed: Duration,
    pub best_value: f64,
    pub ub_star: f64,
    pub lb_star: f64,
    /// Worst-case bound; infinity while the best value is not positive.
    pub beta: f64,
    pub subspaces_searched: usize,
    pub subspaces_pruned: usize,
    pub subspaces_remaining: usize,
    /// Coalition structures fully evaluated so far, scan included.
    pub cs_examined: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    WithinBetaStar,
    TimeLimited,
}

#[derive(Debug)]
pub struct Solution {
    pub cs: Vec<Coalition>,
    pub value: f64,
    pub beta_final: f64,
    pub status: SolveStatus,
    pub trace: Vec<AnytimeSnapshot>,
    pub cs_examined: u64,
    pub subspaces_searched: usize,
    pub subspaces_pruned: usize,
    /// Final per-subspace states of the searched space.
    pub subspaces: Vec<SubspaceStats>,
}

impl Solution {
    pub fn bound_available(&self) -> bool {
        self.beta_final.is_finite()
    }
}

/// Receives every snapshot as it is produced.
pub trait ProgressSink {
    fn on_snapshot(&mut self, _snap: &AnytimeSnapshot) {}
}

/// Discards snapshots.
impl ProgressSink for () {}

impl<F: FnMut(&AnytimeSnapshot)> ProgressSink for F {
    fn on_snapshot(&mut self, snap: &AnytimeSnapshot) {
        self(snap)
    }
}

/// Remove (mark pruned) every unsearched subspace whose upper bound cannot
/// beat `threshold`. Returns how many were removed.
pub fn prune(subspaces: &mut [SubspaceStats], threshold: f64) -> usize {
    let mut removed = 0;
    for sub in subspaces.iter_mut() {
        if sub.state == SubspaceState::Unsearched && sub.max_bound <= threshold {
            sub.state = SubspaceState::Pruned;
            removed += 1;
        }
    }
    removed
}

/// Pick the next subspace to search among the unsearched ones, or `None`
/// when nothing remains. Ties break toward smaller subspaces, then the
/// canonical partition order, so runs are deterministic.
pub fn select_next(
    subspaces: &[SubspaceStats],
    policy: SearchPolicy,
    ub_star: f64,
    beta_star: f64,
) -> Option<usize> {
    let unsearched = || {
        subspaces
            .iter()
            .enumerate()
            .filter(|(_, s)| s.state == SubspaceState::Unsearched)
    };
    let by_max_bound = |a: &SubspaceStats, b: &SubspaceStats| {
        a.max_bound
            .total_cmp(&b.max_bound)
            .then_with(|| b.size.cmp(&a.size))
            .then_with(|| b.partition.cmp(&a.partition))
    };
    match policy {
        SearchPolicy::MaxUpperBound => unsearched()
            .max_by(|(_, a), (_, b)| by_max_bound(a, b))
            .map(|(i, _)| i),
        SearchPolicy::SmallestPromising => {
            let threshold = ub_star / beta_star;
            let candidate = unsearched()
                .filter(|(_, s)| s.max_bound >= threshold)
                .min_by(|(_, a), (_, b)| {
                    a.size
                        .cmp(&b.size)
                        .then_with(|| a.partition.cmp(&b.partition))
                })
                .map(|(i, _)| i);
            candidate
                .or_else(|| select_next(subspaces, SearchPolicy::MaxUpperBound, ub_star, beta_star))
        }
    }
}

/// Why a subspace search returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceStop {
    /// Every structure was either evaluated or excluded by branch bounds.
    Exhausted,
    /// The incumbent reached the subspace's own upper bound.
    BoundReached,
    /// The global bound target was met mid-search.
    BetaSatisfied,
    TimedOut,
}

/// Ambient bounds and controls for one subspace search.
pub struct SubspaceContext {
    /// Current global upper bound (may be stale-high; that is safe).
    pub ub_star: f64,
    pub beta_star: f64,
    /// Upper bound of the subspace being searched.
    pub subspace_max: f64,
    pub deadline: Option<Instant>,
    /// Step-8 branch bound. Disabling it visits every structure.
    pub branch_and_bound: bool,
    /// Step-11 stops (bound reached, target met). Disabled by enumeration
    /// tests that must see the full subspace.
    pub early_exit: bool,
}

impl SubspaceContext {
    /// Exhaustive enumeration settings: no pruning, no early stops.
    pub fn exhaustive() -> Self {
        Self {
            ub_star: f64::INFINITY,
            beta_star: 1.0,
            subspace_max: f64::INFINITY,
            deadline: None,
            branch_and_bound: false,
            early_exit: false,
        }
    }
}

/// Periodic progress callback: incumbent value and structures examined so
/// far within the current subspace.
pub type ProgressFn<'a> = &'a mut dyn FnMut(f64, u64);
/// Per-structure callback, invoked with each fully evaluated structure.
pub type LeafFn<'a> = &'a mut dyn FnMut(&[Coalition]);

/// Optional observation hooks for one subspace search.
#[derive(Default)]
pub struct SubspaceHooks<'a> {
    /// Called at most once per `cadence`.
    pub on_progress: Option<ProgressFn<'a>>,
    pub cadence: Duration,
    pub on_leaf: Option<LeafFn<'a>>,
}

#[derive(Debug)]
pub struct SubspaceOutcome {
    pub incumbent: Option<(Vec<Coalition>, f64)>,
    pub improved: bool,
    /// Structures fully evaluated in this subspace.
    pub examined: u64,
    pub stop: SubspaceStop,
}

struct Frame {
    cursor: CombinationCursor,
    coalition: Coalition,
    partial: f64,
}

/// Search one subspace: enumerate its structures without duplicates or
/// overlaps, skip prefixes that cannot beat the incumbent, and return the
/// updated incumbent. Works for any part count; the solver only calls it
/// for subspaces the scan does not already cover.
pub fn search_subspace(
    table: &ValueTable,
    stats: &[SizeStats],
    g: &IntegerPartition,
    incumbent: Option<(Vec<Coalition>, f64)>,
    ctx: &SubspaceContext,
    hooks: &mut SubspaceHooks<'_>,
) -> SubspaceOutcome {
    let n = table.n();
    let parts = g.parts();
    let depth_count = parts.len();
    debug_assert_eq!(g.n(), n);

    let mut incumbent = incumbent;
    let mut improved = false;
    let mut examined: u64 = 0;

    let incumbent_value = |inc: &Option<(Vec<Coalition>, f64)>| {
        inc.as_ref().map(|(_, v)| *v).unwrap_or(f64::NEG_INFINITY)
    };

    if ctx.early_exit && incumbent_value(&incumbent) >= ctx.subspace_max {
        return SubspaceOutcome {
            incumbent,
            improved: false,
            examined: 0,
            stop: SubspaceStop::BoundReached,
        };
    }

    // Static per-depth data. first_max[d] is the largest admissible first
    // cursor position: with r same-size blocks still to place out of m free
    // agents, anything above m - r*g + 1 leaves no room for the rest.
    let mut first_max = vec![0u32; depth_count];
    let mut suffix_max = vec![0.0f64; depth_count + 1];
    {
        let mut m = n;
        for d in 0..depth_count {
            let g_d = parts[d];
            let run = parts[d..].iter().take_while(|&&p| p == g_d).count() as u32;
            first_max[d] = m + 1 - run * g_d;
            m -= g_d;
        }
        for d in (0..depth_count).rev() {
            suffix_max[d] = suffix_max[d + 1] + stats[(parts[d] - 1) as usize].max;
        }
    }

    // The free-agent list of every depth lives in one flat buffer at a
    // fixed offset (its length per depth is static), and the frames with
    // their cursors are allocated once, so the walk itself is
    // allocation-free.
    let mut avail_len = vec![0usize; depth_count];
    let mut avail_offset = vec![0usize; depth_count];
    {
        let mut m = n as usize;
        let mut offset = 0usize;
        for d in 0..depth_count {
            avail_offset[d] = offset;
            avail_len[d] = m;
            offset += m;
            m -= parts[d] as usize;
        }
    }
    let mut avail_buf = vec![0u32; avail_offset[depth_count - 1] + avail_len[depth_count - 1]];
    for (i, slot) in avail_buf[..n as usize].iter_mut().enumerate() {
        *slot = i as u32 + 1;
    }
    let mut frames: Vec<Frame> = parts
        .iter()
        .map(|&p| Frame {
            cursor: CombinationCursor::first(n, p).expect("every part fits the agent count"),
            coalition: Coalition::EMPTY,
            partial: 0.0,
        })
        .collect();

    // Rebuild frames[d]'s coalition and running value from its cursor.
    macro_rules! extract {
        ($d:expr) => {{
            let d: usize = $d;
            let base = avail_offset[d];
            let mut mask = 0u32;
            for &p in frames[d].cursor.current() {
                mask |= 1 << (avail_buf[base + p as usize - 1] - 1);
            }
            let coalition = Coalition::from_mask(mask);
            let parent_partial = if d == 0 { 0.0 } else { frames[d - 1].partial };
            let value = table
                .value(coalition)
                .expect("cursor yields nonempty in-range coalitions");
            frames[d].coalition = coalition;
            frames[d].partial = parent_partial + value;
        }};
    }

    if !frames[0].cursor.reset_starting_at(n, parts[0], 1) {
        return SubspaceOutcome {
            incumbent,
            improved,
            examined,
            stop: SubspaceStop::Exhausted,
        };
    }
    extract!(0);

    let mut depth = 0usize;
    let mut steps: u64 = 0;
    let mut last_progress = Instant::now();
    let mut stop = SubspaceStop::Exhausted;

    'outer: loop {
        steps += 1;
        if steps.is_multiple_of(4096) {
            if let Some(deadline) = ctx.deadline {
                if Instant::now() >= deadline {
                    stop = SubspaceStop::TimedOut;
                    break 'outer;
                }
            }
            if let Some(on_progress) = hooks.on_progress.as_deref_mut() {
                if last_progress.elapsed() >= hooks.cadence {
                    last_progress = Instant::now();
                    on_progress(incumbent_value(&incumbent), examined);
                }
            }
        }

        if depth + 1 == depth_count {
            // Leaf: a complete structure.
            examined += 1;
            let value = frames[depth].partial;
            if let Some(on_leaf) = hooks.on_leaf.as_deref_mut() {
                let cs: Vec<Coalition> = frames.iter().map(|f| f.coalition).collect();
                on_leaf(&cs);
            }
            if value > incumbent_value(&incumbent) {
                let cs: Vec<Coalition> = frames.iter().map(|f| f.coalition).collect();
                incumbent = Some((cs, value));
                improved = true;
            }
            if ctx.early_exit {
                let inc = incumbent_value(&incumbent);
                if inc >= ctx.subspace_max {
                    stop = SubspaceStop::BoundReached;
                    break 'outer;
                }
                if inc > 0.0 && ctx.ub_star / inc <= ctx.beta_star {
                    stop = SubspaceStop::BetaSatisfied;
                    break 'outer;
                }
            }
        } else {
            // Inner node: branch only if the remaining sizes could still
            // beat the incumbent.
            let potential = frames[depth].partial + suffix_max[depth + 1];
            if !ctx.branch_and_bound || incumbent_value(&incumbent) < potential {
                let alpha = if parts[depth + 1] == parts[depth] {
                    frames[depth].cursor.first_element()
                } else {
                    1
                };
                if alpha <= first_max[depth + 1] {
                    // Write the child's free-agent list: the parent's list
                    // minus the coalition just placed.
                    let coalition = frames[depth].coalition;
                    let (parent_buf, child_buf) = avail_buf.split_at_mut(avail_offset[depth + 1]);
                    let parent = &parent_buf[avail_offset[depth]..][..avail_len[depth]];
                    let mut w = 0usize;
                    for &a in parent {
                        if !coalition.contains(a) {
                            child_buf[w] = a;
                            w += 1;
                        }
                    }
                    debug_assert_eq!(w, avail_len[depth + 1]);
                    if frames[depth + 1].cursor.reset_starting_at(
                        avail_len[depth + 1] as u32,
                        parts[depth + 1],
                        alpha,
                    ) {
                        depth += 1;
                        extract!(depth);
                        continue 'outer;
                    }
                }
            }
        }

        // Advance the deepest cursor, unwinding exhausted frames.
        loop {
            let frame = &mut frames[depth];
            if frame.cursor.advance() && frame.cursor.first_element() <= first_max[depth] {
                extract!(depth);
                continue 'outer;
            }
            if depth == 0 {
                break 'outer;
            }
            depth -= 1;
        }
    }

    SubspaceOutcome {
        incumbent,
        improved,
        examined,
        stop,
    }
}

/// Solve to the requested bound. Runs the input scan, then repeatedly
/// selects, searches, and prunes subspaces, maintaining the incumbent, the
/// global upper bound, and the worst-case bound. A snapshot goes to `sink`
/// after the scan, after every subspace, and at the configured cadence
/// inside long searches.
pub fn solve(table: &ValueTable, config: &SearchConfig, sink: &mut dyn ProgressSink) -> Solution {
    assert!(
        config.beta_star >= 1.0 && config.beta_star.is_finite(),
        "beta_star must be finite and at least 1"
    );
    let t0 = Instant::now();
    let deadline = config.time_limit.map(|limit| t0 + limit);
    let n = table.n();

    let scan = scan_and_search(table);
    let stats = scan.stats_by_size.clone();
    let constraints = config.constraints.filter(Constraints::is_active);

    // Working set of subspaces and the initial incumbent.
    let mut incumbent: Option<(Vec<Coalition>, f64)>;
    let mut subspaces: Vec<SubspaceStats>;
    let searched_base: usize;
    let lb_scan: f64;
    let mut beta: f64;
    let half_n_bound_applies: bool;

    match constraints {
        None => {
            incumbent = Some((scan.best_cs.clone(), scan.best_value));
            subspaces = scan.subspaces.clone();
            searched_base = scan.searched_at_scan;
            lb_scan = scan.lb_star;
            beta = scan.beta;
            half_n_bound_applies = true;
        }
        Some(cons) => {
            // The scan's incumbent only counts if it fits the constraints;
            // bounds must come from admissible subspaces alone.
            let scan_partition = crate::combinatorics::partition_of(&scan.best_cs, n)
                .expect("scan produces valid structures");
            incumbent = cons
                .admits(&scan_partition)
                .then(|| (scan.best_cs.clone(), scan.best_value));
            subspaces = enumerate_partitions(n)
                .into_iter()
                .filter(|g| cons.admits(g))
                .map(|g| {
                    let (max_bound, avg_bound, min_bound) = crate::scan::compute_bounds(&g, &stats);
                    let size = crate::combinatorics::subspace_size(&g)
                        .expect("within u128 range for supported n");
                    SubspaceStats {
                        partition: g,
                        max_bound,
                        avg_bound,
                        min_bound,
                        size,
                        state: SubspaceState::Unsearched,
                    }
                })
                .collect();
            searched_base = 0;
            let best = incumbent.as_ref().map(|(_, v)| *v);
            let max_avg = subspaces
                .iter()
                .map(|s| s.avg_bound)
                .fold(f64::NEG_INFINITY, f64::max);
            lb_scan = best.unwrap_or(f64::NEG_INFINITY).max(max_avg);
            // Without an incumbent nothing may be pruned yet: the best
            // subspace could be exactly average.
            if best.is_some() {
                prune(&mut subspaces, lb_scan);
            }
            beta = f64::INFINITY;
            half_n_bound_applies = false;
        }
    }

    // Selection order: highest upper bound first; ties toward smaller
    // subspaces, then canonical partition order. The head of this order is
    // also the maximum remaining bound for ub_star updates.
    let mut order: Vec<usize> = (0..subspaces.len()).collect();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (&subspaces[a], &subspaces[b]);
        sb.max_bound
            .total_cmp(&sa.max_bound)
            .then_with(|| sa.size.cmp(&sb.size))
            .then_with(|| sa.partition.cmp(&sb.partition))
    });
    let mut head = 0usize;
    let max_remaining = |subspaces: &[SubspaceStats], head: &mut usize| -> f64 {
        while *head < order.len() && subspaces[order[*head]].state != SubspaceState::Unsearched {
            *head += 1;
        }
        if *head < order.len() {
            subspaces[order[*head]].max_bound
        } else {
            f64::NEG_INFINITY
        }
    };

    let best_of = |inc: &Option<(Vec<Coalition>, f64)>| {
        inc.as_ref().map(|(_, v)| *v).unwrap_or(f64::NEG_INFINITY)
    };

    let mut ub_star = best_of(&incumbent).max(max_remaining(&subspaces, &mut head));
    if !half_n_bound_applies {
        let best = best_of(&incumbent);
        if best > 0.0 {
            beta = (ub_star / best).max(1.0);
        }
    }

    let mut trace: Vec<AnytimeSnapshot> = Vec::new();
    let mut examined_total: u64 = scan.cs_evaluated;
    let mut searched_in_loop = 0usize;

    macro_rules! emit {
        ($best:expr, $ub:expr, $examined:expr, $searched:expr, $pruned:expr, $remaining:expr) => {{
            let best = $best;
            if best > 0.0 {
                beta = beta.min($ub / best).max(1.0);
            }
            let snap = AnytimeSnapshot {
                elapsed: t0.elapsed(),
                best_value: best,
                ub_star: $ub,
                lb_star: lb_scan.max(best),
                beta,
                subspaces_searched: $searched,
                subspaces_pruned: $pruned,
                subspaces_remaining: $remaining,
                cs_examined: $examined,
            };
            trace.push(snap.clone());
            sink.on_snapshot(&snap);
        }};
    }

    let count_state = |subspaces: &[SubspaceStats], state: SubspaceState| {
        subspaces.iter().filter(|s| s.state == state).count()
    };

    let mut remaining_count = count_state(&subspaces, SubspaceState::Unsearched);
    let mut pruned_count = count_state(&subspaces, SubspaceState::Pruned);
    emit!(
        best_of(&incumbent),
        ub_star,
        examined_total,
        searched_base,
        pruned_count,
        remaining_count
    );

    let mut status = SolveStatus::Optimal;

    if beta > config.beta_star {
        while let Some(idx) = select_next(&subspaces, config.policy, ub_star, config.beta_star) {
            if let Some(d) = deadline {
                if Instant::now() >= d {
                    status = SolveStatus::TimeLimited;
                    break;
                }
            }
            if config.policy == SearchPolicy::MaxUpperBound {
                debug_assert_eq!(order[head], idx, "sorted head agrees with selection");
            }

            let g = subspaces[idx].partition.clone();
            let subspace_max = subspaces[idx].max_bound;
            let ctx = SubspaceContext {
                ub_star,
                beta_star: config.beta_star,
                subspace_max,
                deadline,
                branch_and_bound: true,
                early_exit: true,
            };
            let searched_now = searched_base + searched_in_loop;
            let mut on_progress = |best: f64, examined_here: u64| {
                if best > f64::NEG_INFINITY {
                    let snap_best = best;
                    if snap_best > 0.0 {
                        beta = beta.min(ub_star / snap_best).max(1.0);
                    }
                    let snap = AnytimeSnapshot {
                        elapsed: t0.elapsed(),
                        best_value: snap_best,
                        ub_star,
                        lb_star: lb_scan.max(snap_best),
                        beta,
                        subspaces_searched: searched_now,
                        subspaces_pruned: pruned_count,
                        subspaces_remaining: remaining_count,
                        cs_examined: examined_total + examined_here,
                    };
                    trace.push(snap.clone());
                    sink.on_snapshot(&snap);
                }
            };
            let mut hooks = SubspaceHooks {
                on_progress: Some(&mut on_progress),
                cadence: config.snapshot_cadence,
                on_leaf: None,
            };
            let outcome = search_subspace(table, &stats, &g, incumbent.take(), &ctx, &mut hooks);
            incumbent = outcome.incumbent;
            examined_total += outcome.examined;
            subspaces[idx].state = SubspaceState::Searched;
            searched_in_loop += 1;

            if outcome.improved {
                prune(&mut subspaces, best_of(&incumbent));
            }
            remaining_count = count_state(&subspaces, SubspaceState::Unsearched);
            pruned_count = count_state(&subspaces, SubspaceState::Pruned);

            ub_star = best_of(&incumbent).max(max_remaining(&subspaces, &mut head));
            emit!(
                best_of(&incumbent),
                ub_star,
                examined_total,
                searched_base + searched_in_loop,
                pruned_count,
                remaining_count
            );

            if outcome.stop == SubspaceStop::TimedOut {
                status = SolveStatus::TimeLimited;
                break;
            }
            if beta <= config.beta_star {
                break;
            }
        }
    }

    if status != SolveStatus::TimeLimited && remaining_count == 0 {
        // Every subspace was searched or soundly pruned: the incumbent is
        // exactly optimal, whatever its sign.
        beta = 1.0;
        ub_star = best_of(&incumbent);
    }
    if status != SolveStatus::TimeLimited {
        status = if beta <= 1.0 + 1e-9 {
            SolveStatus::Optimal
        } else {
            SolveStatus::WithinBetaStar
        };
    }

    emit!(
        best_of(&incumbent),
        ub_star,
        examined_total,
        searched_base + searched_in_loop,
        pruned_count,
        remaining_count
    );

    let (cs, value) = incumbent.unwrap_or((Vec::new(), f64::NEG_INFINITY));
    Solution {
        cs,
        value,
        beta_final: beta,
        status,
        trace,
        cs_examined: examined_total,
        subspaces_searched: searched_base + searched_in_loop,
        subspaces_pruned: pruned_count,
        subspaces,
    }
}
