//! Coalitions as bitsets, integer partitions, and the deterministic
//! bijections between list indices and coalitions.
//!
//! Coalition lists are ordered ascending lexicographically on the sorted
//! agent-index tuple: the size-3 list over six agents starts `{a1,a2,a3}`,
//! `{a1,a2,a4}` and ends `{a4,a5,a6}`. Complementary coalitions sit at
//! mirrored positions of the size-`s` and size-`(n-s)` lists, which the scan
//! relies on to search two-coalition structures in one pass.

use crate::error::{Error, Result};
use std::fmt;

/// Maximum supported number of agents. The value table stores `2^n - 1`
/// entries, so this is a memory bound rather than an algorithmic one.
pub const MAX_AGENTS: u32 = 30;

/// A coalition: a set of agents `a_1..a_n` stored as a bitset, with agent
/// `i` occupying bit `i - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn from_mask(mask: u32) -> Self {
        Coalition(mask)
    }

    /// Coalition of every agent in `1..=n`.
    pub fn grand(n: u32) -> Self {
        debug_assert!((1..=MAX_AGENTS).contains(&n));
        Coalition((1 << n) - 1)
    }

    pub fn singleton(agent: u32) -> Self {
        debug_assert!(agent >= 1);
        Coalition(1 << (agent - 1))
    }

    pub fn from_agents<I: IntoIterator<Item = u32>>(agents: I) -> Self {
        let mut mask = 0;
        for a in agents {
            debug_assert!(a >= 1);
            mask |= 1 << (a - 1);
        }
        Coalition(mask)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn size(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, agent: u32) -> bool {
        debug_assert!(agent >= 1);
        self.0 & (1 << (agent - 1)) != 0
    }

    pub fn is_disjoint(self, other: Coalition) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Coalition) -> Coalition {
        Coalition(self.0 | other.0)
    }

    pub fn complement(self, n: u32) -> Coalition {
        Coalition(Self::grand(n).0 & !self.0)
    }

    /// Member agents in ascending order.
    pub fn agents(self) -> impl Iterator<Item = u32> {
        let mut mask = self.0;
        std::iter::from_fn(move || {
            if mask == 0 {
                None
            } else {
                let bit = mask.trailing_zeros();
                mask &= mask - 1;
                Some(bit + 1)
            }
        })
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.agents().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "a{a}")?;
        }
        write!(f, "}}")
    }
}

/// An integer partition of `n`: a multiset of positive parts stored in
/// non-decreasing order. Identifies the subspace of coalition structures
/// whose coalition sizes match the parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerPartition {
    parts: Vec<u32>,
}

impl IntegerPartition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidPartition("zero part".into()));
        }
        parts.sort_unstable();
        Ok(Self { parts })
    }

    pub(crate) fn from_sorted(parts: Vec<u32>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(!parts.is_empty() && parts[0] >= 1);
        Self { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Sum of the parts.
    pub fn n(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Number of parts, i.e. the number of coalitions in any structure of
    /// this subspace.
    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    /// Multiplicity of part size `s`.
    pub fn multiplicity(&self, s: u32) -> u32 {
        self.parts.iter().filter(|&&p| p == s).count() as u32
    }

    /// The distinct part sizes, ascending (the underlying set).
    pub fn distinct_parts(&self) -> impl Iterator<Item = u32> + '_ {
        self.parts
            .iter()
            .enumerate()
            .filter(|(i, p)| *i == 0 || self.parts[i - 1] != **p)
            .map(|(_, &p)| p)
    }
}

// Canonical order: by part count, then lexicographically on the parts.
// This is the enumeration order and the deterministic tie-break everywhere.
impl PartialOrd for IntegerPartition {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IntegerPartition {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.parts
            .len()
            .cmp(&other.parts.len())
            .then_with(|| self.parts.cmp(&other.parts))
    }
}

impl fmt::Display for IntegerPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// Exact binomial coefficient `C(m, s)`; zero when `s > m`.
pub fn binomial(m: u32, s: u32) -> Result<u128> {
    if s > m {
        return Ok(0);
    }
    let s = s.min(m - s);
    let mut result: u128 = 1;
    for i in 1..=u128::from(s) {
        // result * (m - s + i) is always divisible by i here.
        result = result
            .checked_mul(u128::from(m) - u128::from(s) + i)
            .ok_or(Error::Overflow)?
            / i;
    }
    Ok(result)
}

/// Pascal-triangle table of `C(m, s)` for `m <= limit`, for hot-path index
/// arithmetic. Values fit u64 comfortably for the supported agent range.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    rows: Vec<Vec<u64>>,
}

impl BinomialTable {
    pub fn new(limit: u32) -> Self {
        assert!(limit <= 62, "table limited to u64-safe range");
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(limit as usize + 1);
        for m in 0..=limit as usize {
            let mut row = vec![1u64; m + 1];
            for s in 1..m {
                row[s] = rows[m - 1][s - 1] + rows[m - 1][s];
            }
            rows.push(row);
        }
        Self { rows }
    }

    pub fn choose(&self, m: u32, s: u32) -> u64 {
        if s > m {
            0
        } else {
            self.rows[m as usize][s as usize]
        }
    }
}

/// All integer partitions of `n`, grouped by part count ascending and
/// lexicographic within each part count. Deterministic order; the canonical
/// `Ord` on `IntegerPartition` agrees with it.
pub fn enumerate_partitions(n: u32) -> Vec<IntegerPartition> {
    assert!(n >= 1);
    let mut out = Vec::new();
    for k in 1..=n {
        emit_with_k_parts(n, k, 1, &mut Vec::with_capacity(k as usize), &mut out);
    }
    out
}

fn emit_with_k_parts(
    remaining: u32,
    k: u32,
    min_part: u32,
    prefix: &mut Vec<u32>,
    out: &mut Vec<IntegerPartition>,
) {
    if k == 1 {
        if remaining >= min_part {
            let mut parts = prefix.clone();
            parts.push(remaining);
            out.push(IntegerPartition::from_sorted(parts));
        }
        return;
    }
    // Non-decreasing parts: the first of k parts is at most remaining / k.
    let mut first = min_part;
    while first * k <= remaining {
        prefix.push(first);
        emit_with_k_parts(remaining - first, k - 1, first, prefix, out);
        prefix.pop();
        first += 1;
    }
}

/// Coalition at 1-based position `x` of the size-`s` list over `n` agents.
pub fn index_to_coalition(x: u64, s: u32, n: u32) -> Result<Coalition> {
    let total = binomial(n, s)?;
    if x == 0 || u128::from(x) > total {
        return Err(Error::IndexOutOfRange {
            index: x,
            max: total.min(u128::from(u64::MAX)) as u64,
        });
    }
    let mut rank = x - 1;
    let mut mask = 0u32;
    let mut candidate = 1u32;
    for i in 1..=s {
        loop {
            let count = binomial(n - candidate, s - i)? as u64;
            if rank < count {
                mask |= 1 << (candidate - 1);
                candidate += 1;
                break;
            }
            rank -= count;
            candidate += 1;
        }
    }
    Ok(Coalition::from_mask(mask))
}

/// 1-based position of `c` in the size-`|c|` list over `n` agents.
/// Inverse of [`index_to_coalition`].
pub fn coalition_to_index(c: Coalition, n: u32) -> Result<u64> {
    if c.is_empty() {
        return Err(Error::EmptyCoalition);
    }
    let s = c.size();
    let mut rank = 0u64;
    let mut prev = 0u32;
    for (i, agent) in c.agents().enumerate() {
        let i = i as u32 + 1;
        for skipped in prev + 1..agent {
            rank += binomial(n - skipped, s - i)? as u64;
        }
        prev = agent;
    }
    Ok(rank + 1)
}

/// Position in the size-`(n-s)` list of the complement of the coalition at
/// position `x` in the size-`s` list. Complementary coalitions are mirrored:
/// `x_hat = |L_s| - x + 1`.
pub fn complement_index(x: u64, s: u32, n: u32) -> Result<u64> {
    let total = binomial(n, s)? as u64;
    if x == 0 || x > total {
        return Err(Error::IndexOutOfRange {
            index: x,
            max: total,
        });
    }
    Ok(total - x + 1)
}

/// Number of coalition structures whose coalition sizes match `g`, computed
/// exactly: the product of binomials over the remaining agents divided by
/// the factorials of the part multiplicities.
pub fn subspace_size(g: &IntegerPartition) -> Result<u128> {
    let n = g.n();
    let mut remaining = n;
    let mut numerator: u128 = 1;
    for &part in g.parts() {
        numerator = numerator
            .checked_mul(binomial(remaining, part)?)
            .ok_or(Error::Overflow)?;
        remaining -= part;
    }
    let mut denominator: u128 = 1;
    for s in g.distinct_parts() {
        denominator = denominator
            .checked_mul(factorial_u128(g.multiplicity(s))?)
            .ok_or(Error::Overflow)?;
    }
    Ok(numerator / denominator)
}

fn factorial_u128(k: u32) -> Result<u128> {
    let mut f: u128 = 1;
    for i in 2..=u128::from(k) {
        f = f.checked_mul(i).ok_or(Error::Overflow)?;
    }
    Ok(f)
}

/// Size multiset of a coalition structure. Rejects overlapping or
/// non-exhaustive inputs.
pub fn partition_of(cs: &[Coalition], n: u32) -> Result<IntegerPartition> {
    let mut union = 0u32;
    let mut total_size = 0u32;
    let mut parts = Vec::with_capacity(cs.len());
    for c in cs {
        if c.is_empty() {
            return Err(Error::EmptyCoalition);
        }
        union |= c.mask();
        total_size += c.size();
        parts.push(c.size());
    }
    if total_size != union.count_ones() {
        return Err(Error::OverlappingCoalitions);
    }
    if union != Coalition::grand(n).mask() {
        return Err(Error::NonExhaustiveCoalitions);
    }
    parts.sort_unstable();
    Ok(IntegerPartition::from_sorted(parts))
}

/// Bell number via the Bell triangle: the total number of set partitions of
/// `n` elements. Independent of the subspace-size formula, so the two can
/// cross-check each other.
pub fn bell(n: u32) -> Result<u128> {
    if n == 0 {
        return Ok(1);
    }
    let mut row = vec![1u128];
    for _ in 1..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(*row.last().expect("non-empty row"));
        for &x in &row {
            let prev = *next.last().expect("non-empty");
            next.push(prev.checked_add(x).ok_or(Error::Overflow)?);
        }
        row = next;
    }
    Ok(*row.last().expect("non-empty row"))
}

/// Cursor over the size-`s` combinations of `{1..m}` in ascending
/// lexicographic order. The first element of the current combination is
/// non-decreasing as the cursor advances, which the subspace search uses to
/// stop a frame early.
#[derive(Debug, Clone)]
pub struct CombinationCursor {
    m: u32,
    current: Vec<u32>,
}

impl CombinationCursor {
    /// Cursor positioned at the first combination whose smallest element is
    /// `first`, i.e. `[first, first+1, ..., first+s-1]`. `None` when that
    /// combination does not fit in `{1..m}`.
    pub fn starting_at(m: u32, s: u32, first: u32) -> Option<Self> {
        debug_assert!(s >= 1 && first >= 1);
        if first + s - 1 > m {
            return None;
        }
        Some(Self {
            m,
            current: (first..first + s).collect(),
        })
    }

    pub fn first(m: u32, s: u32) -> Option<Self> {
        Self::starting_at(m, s, 1)
    }

    /// Reposition this cursor in place (same semantics as
    /// [`CombinationCursor::starting_at`], without reallocating).
    pub fn reset_starting_at(&mut self, m: u32, s: u32, first: u32) -> bool {
        debug_assert!(s >= 1 && first >= 1);
        if first + s - 1 > m {
            return false;
        }
        self.m = m;
        self.current.clear();
        self.current.extend(first..first + s);
        true
    }

    pub fn current(&self) -> &[u32] {
        &self.current
    }

    pub fn first_element(&self) -> u32 {
        self.current[0]
    }

    /// Step to the next combination. Returns false once exhausted.
    pub fn advance(&mut self) -> bool {
        let s = self.current.len();
        let mut i = s;
        while i > 0 {
            i -= 1;
            if self.current[i] < self.m - (s - 1 - i) as u32 {
                self.current[i] += 1;
                for j in i + 1..s {
                    self.current[j] = self.current[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn binomial_hand_cases() {
        assert_eq!(binomial(4, 2).unwrap(), 6);
        assert_eq!(binomial(10, 0).unwrap(), 1);
        assert_eq!(binomial(0, 0).unwrap(), 1);
        assert_eq!(binomial(5, 6).unwrap(), 0);
        assert_eq!(binomial(30, 15).unwrap(), 155_117_520);
    }

    #[test]
    fn binomial_coalition_total_for_24_agents() {
        let total: u128 = (1..=24).map(|s| binomial(24, s).unwrap()).sum();
        assert_eq!(total, 16_777_215);
    }

    #[test]
    fn binomial_overflow_is_reported() {
        assert!(matches!(binomial(300, 150), Err(Error::Overflow)));
    }

    #[test]
    fn binomial_table_matches_formula() {
        let table = BinomialTable::new(30);
        for m in 0..=30 {
            for s in 0..=m + 1 {
                assert_eq!(u128::from(table.choose(m, s)), binomial(m, s).unwrap());
            }
        }
    }

    #[test]
    fn partitions_of_four() {
        let got = enumerate_partitions(4);
        let want = [
            vec![4],
            vec![1, 3],
            vec![2, 2],
            vec![1, 1, 2],
            vec![1, 1, 1, 1],
        ];
        assert_eq!(got.len(), 5);
        for (g, w) in got.iter().zip(want.iter()) {
            assert_eq!(g.parts(), w.as_slice());
        }
    }

    #[test]
    fn partitions_of_one() {
        let got = enumerate_partitions(1);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].parts(), &[1]);
    }

    #[test]
    fn partition_count_for_24() {
        assert_eq!(enumerate_partitions(24).len(), 1575);
    }

    #[test]
    fn partitions_are_unique_grouped_and_sorted() {
        for n in 1..=15 {
            let all = enumerate_partitions(n);
            let mut seen = HashSet::new();
            for g in &all {
                assert_eq!(g.parts().iter().sum::<u32>(), n);
                assert!(g.parts().windows(2).all(|w| w[0] <= w[1]));
                assert!(seen.insert(g.parts().to_vec()));
            }
            // Enumeration order agrees with the canonical Ord.
            for pair in all.windows(2) {
                assert!(pair[0] < pair[1]);
            }
        }
    }

    #[test]
    fn unrank_matches_figure_rows() {
        // First row of the size-3 list over 6 agents.
        assert_eq!(
            index_to_coalition(1, 3, 6).unwrap(),
            Coalition::from_agents([1, 2, 3])
        );
        // Second row of the size-2 list.
        assert_eq!(
            index_to_coalition(2, 2, 6).unwrap(),
            Coalition::from_agents([1, 3])
        );
        // Last row of the size-3 list.
        assert_eq!(
            index_to_coalition(20, 3, 6).unwrap(),
            Coalition::from_agents([4, 5, 6])
        );
    }

    #[test]
    fn unrank_rejects_out_of_range() {
        assert!(index_to_coalition(0, 3, 6).is_err());
        assert!(index_to_coalition(21, 3, 6).is_err());
    }

    #[test]
    fn rank_unrank_bijection_exhaustive() {
        for n in 1..=12u32 {
            for s in 1..=n {
                let total = binomial(n, s).unwrap() as u64;
                let mut seen = HashSet::new();
                for x in 1..=total {
                    let c = index_to_coalition(x, s, n).unwrap();
                    assert_eq!(c.size(), s);
                    assert!(seen.insert(c.mask()));
                    assert_eq!(coalition_to_index(c, n).unwrap(), x);
                }
                assert_eq!(seen.len() as u64, total);
            }
        }
    }

    #[test]
    fn complement_index_pairs_partition_the_agents() {
        assert_eq!(complement_index(1, 1, 6).unwrap(), 6);
        assert_eq!(complement_index(1, 3, 6).unwrap(), 20);
        assert_eq!(complement_index(2, 2, 6).unwrap(), 14);
        // Row 14 of the size-4 list over 6 agents, derived by enumeration.
        assert_eq!(
            index_to_coalition(14, 4, 6).unwrap(),
            Coalition::from_agents([2, 4, 5, 6])
        );
        for n in 2..=12u32 {
            for s in 1..n {
                let total = binomial(n, s).unwrap() as u64;
                for x in 1..=total {
                    let c = index_to_coalition(x, s, n).unwrap();
                    let xh = complement_index(x, s, n).unwrap();
                    let ch = index_to_coalition(xh, n - s, n).unwrap();
                    assert!(c.is_disjoint(ch));
                    assert_eq!(c.union(ch), Coalition::grand(n));
                }
            }
        }
    }

    #[test]
    fn subspace_size_trivial_cases() {
        let grand = IntegerPartition::new(vec![9]).unwrap();
        assert_eq!(subspace_size(&grand).unwrap(), 1);
        let singletons = IntegerPartition::new(vec![1; 9]).unwrap();
        assert_eq!(subspace_size(&singletons).unwrap(), 1);
        let g = IntegerPartition::new(vec![1, 1, 2]).unwrap();
        assert_eq!(subspace_size(&g).unwrap(), 6);
    }

    #[test]
    fn subspace_sizes_sum_to_bell() {
        for n in 1..=20u32 {
            let sum: u128 = enumerate_partitions(n)
                .iter()
                .map(|g| subspace_size(g).unwrap())
                .sum();
            assert_eq!(sum, bell(n).unwrap(), "n={n}");
        }
        assert_eq!(bell(20).unwrap(), 51_724_158_235_372);
    }

    #[test]
    fn bell_known_values() {
        let want = [
            1u128, 1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975, 678570,
        ];
        for (n, &w) in want.iter().enumerate() {
            assert_eq!(bell(n as u32).unwrap(), w, "bell({n})");
        }
    }

    #[test]
    fn partition_of_examples() {
        let cs = [
            Coalition::from_agents([1, 2]),
            Coalition::from_agents([3]),
            Coalition::from_agents([4]),
        ];
        assert_eq!(partition_of(&cs, 4).unwrap().parts(), &[1, 1, 2]);

        let grand = [Coalition::grand(5)];
        assert_eq!(partition_of(&grand, 5).unwrap().parts(), &[5]);

        let singles: Vec<_> = (1..=5).map(Coalition::singleton).collect();
        assert_eq!(partition_of(&singles, 5).unwrap().parts(), &[1; 5]);
    }

    #[test]
    fn partition_of_rejects_invalid() {
        let overlapping = [
            Coalition::from_agents([1, 2]),
            Coalition::from_agents([2, 3, 4]),
        ];
        assert!(partition_of(&overlapping, 4).is_err());
        let short = [Coalition::from_agents([1, 2])];
        assert!(matches!(
            partition_of(&short, 4),
            Err(Error::NonExhaustiveCoalitions)
        ));
    }

    #[test]
    fn cursor_visits_each_combination_once_in_order() {
        let mut cursor = CombinationCursor::first(6, 3).unwrap();
        let mut seen = Vec::new();
        loop {
            assert!(cursor.current().windows(2).all(|w| w[0] < w[1]));
            seen.push(cursor.current().to_vec());
            if !cursor.advance() {
                break;
            }
        }
        assert_eq!(seen.len() as u128, binomial(6, 3).unwrap());
        let mut sorted = seen.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, seen, "ascending lexicographic, no repeats");
        // First elements never decrease.
        for pair in seen.windows(2) {
            assert!(pair[0][0] <= pair[1][0]);
        }
        assert_eq!(seen[0], vec![1, 2, 3]);
        assert_eq!(seen[seen.len() - 1], vec![4, 5, 6]);
    }

    #[test]
    fn cursor_starting_at_skips_smaller_first_elements() {
        let cursor = CombinationCursor::starting_at(7, 2, 3).unwrap();
        assert_eq!(cursor.current(), &[3, 4]);
        assert!(CombinationCursor::starting_at(7, 3, 6).is_none());
    }

    #[test]
    fn coalition_display_and_accessors() {
        let c = Coalition::from_agents([1, 3, 4]);
        assert_eq!(c.to_string(), "{a1,a3,a4}");
        assert_eq!(c.size(), 3);
        assert!(c.contains(3));
        assert!(!c.contains(2));
        assert_eq!(c.complement(5), Coalition::from_agents([2, 5]));
    }
}
