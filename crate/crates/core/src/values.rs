//! Characteristic-function storage and benchmark instance generation.
//!
//! A [`ValueTable`] holds one value per nonempty coalition, laid out as one
//! contiguous list per coalition size in the canonical lexicographic order,
//! which is exactly the shape the input scan walks. Instances can be drawn
//! from three distributions and serialized to a binary or CSV format.

use crate::combinatorics::{
    bell, binomial, enumerate_partitions, index_to_coalition, subspace_size, BinomialTable,
    Coalition, IntegerPartition, MAX_AGENTS,
};
use crate::error::{Error, Result};
use crate::kahan::KahanSum;
use crate::rng::Xoshiro256PlusPlus;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"CSGV";
const FORMAT_VERSION: u16 = 1;
const CUSTOM_TAG: u8 = 255;

/// Value distribution for generated instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionKind {
    /// `v(C) = |C| * U(0, 1)`.
    Uniform,
    /// `v(C) = |C| * N(1, 0.1^2)`.
    Normal,
    /// `v(C) = N(|C|, |C|)`: every coalition structure value is then
    /// `N(n, n)`, making the benchmark unbiased across structures. Values
    /// can be negative; they are deliberately not clamped.
    Ndcs,
}

impl DistributionKind {
    pub fn tag(self) -> u8 {
        match self {
            DistributionKind::Uniform => 0,
            DistributionKind::Normal => 1,
            DistributionKind::Ndcs => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Option<Self>> {
        match tag {
            0 => Ok(Some(DistributionKind::Uniform)),
            1 => Ok(Some(DistributionKind::Normal)),
            2 => Ok(Some(DistributionKind::Ndcs)),
            CUSTOM_TAG => Ok(None),
            other => Err(Error::UnknownDistributionTag(other)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DistributionKind::Uniform => "uniform",
            DistributionKind::Normal => "normal",
            DistributionKind::Ndcs => "ndcs",
        }
    }
}

impl std::str::FromStr for DistributionKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform" => Ok(DistributionKind::Uniform),
            "normal" => Ok(DistributionKind::Normal),
            "ndcs" => Ok(DistributionKind::Ndcs),
            other => Err(format!("unknown distribution '{other}'")),
        }
    }
}

/// Distribution plus seed; fully determines a generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistributionSpec {
    pub kind: DistributionKind,
    pub seed: u64,
}

/// Per-size value statistics gathered from one pass over a size list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeStats {
    pub s: u32,
    pub max: f64,
    pub min: f64,
    pub avg: f64,
}

/// The characteristic function: for each size `s` a list of `C(n, s)`
/// values aligned with the canonical coalition order.
#[derive(Debug, Clone)]
pub struct ValueTable {
    n: u32,
    lists: Vec<Vec<f64>>,
    choose: BinomialTable,
    provenance: Option<DistributionSpec>,
}

impl PartialEq for ValueTable {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.lists == other.lists && self.provenance == other.provenance
    }
}

fn check_agent_count(n: u32) -> Result<()> {
    if n == 0 || n > MAX_AGENTS {
        return Err(Error::AgentCountOutOfRange { n, max: MAX_AGENTS });
    }
    Ok(())
}

/// One draw from `kind` for a coalition of `size` agents. Shared by table
/// generation and the sampling-based distribution tests.
pub fn sample_value(kind: DistributionKind, size: u32, rng: &mut Xoshiro256PlusPlus) -> f64 {
    let s = f64::from(size);
    match kind {
        DistributionKind::Uniform => s * rng.next_f64(),
        DistributionKind::Normal => s * (1.0 + 0.1 * rng.next_normal()),
        DistributionKind::Ndcs => s + s.sqrt() * rng.next_normal(),
    }
}

impl ValueTable {
    /// All-zero table, mainly for constructing instances by hand.
    pub fn zeros(n: u32) -> Result<Self> {
        check_agent_count(n)?;
        let lists = (1..=n)
            .map(|s| Ok(vec![0.0; binomial(n, s)? as usize]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            lists,
            choose: BinomialTable::new(n),
            provenance: None,
        })
    }

    /// Deterministically generate an instance. Sampling order is fixed:
    /// sizes ascending, indices ascending within a size.
    pub fn generate(n: u32, spec: DistributionSpec) -> Result<Self> {
        check_agent_count(n)?;
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(spec.seed);
        let mut lists = Vec::with_capacity(n as usize);
        for s in 1..=n {
            let len = binomial(n, s)? as usize;
            let mut list = Vec::with_capacity(len);
            for _ in 0..len {
                list.push(sample_value(spec.kind, s, &mut rng));
            }
            lists.push(list);
        }
        Ok(Self {
            n,
            lists,
            choose: BinomialTable::new(n),
            provenance: Some(spec),
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn provenance(&self) -> Option<DistributionSpec> {
        self.provenance
    }

    /// The value list for size `s` in canonical order.
    pub fn list(&self, s: u32) -> &[f64] {
        &self.lists[(s - 1) as usize]
    }

    pub fn total_entries(&self) -> u64 {
        (1u64 << self.n) - 1
    }

    /// Canonical 1-based index of a coalition within its size list.
    pub fn index_of(&self, c: Coalition) -> u64 {
        let s = c.size();
        let mut rank = 0u64;
        let mut prev = 0u32;
        for (i, agent) in c.agents().enumerate() {
            let taken = i as u32 + 1;
            for skipped in prev + 1..agent {
                rank += self.choose.choose(self.n - skipped, s - taken);
            }
            prev = agent;
        }
        rank + 1
    }

    pub fn value(&self, c: Coalition) -> Result<f64> {
        if c.is_empty() {
            return Err(Error::EmptyCoalition);
        }
        let idx = self.index_of(c) as usize - 1;
        Ok(self.lists[(c.size() - 1) as usize][idx])
    }

    pub fn set_value(&mut self, c: Coalition, v: f64) -> Result<()> {
        if c.is_empty() {
            return Err(Error::EmptyCoalition);
        }
        let idx = self.index_of(c) as usize - 1;
        self.lists[(c.size() - 1) as usize][idx] = v;
        self.provenance = None;
        Ok(())
    }

    /// Value of a coalition structure: the sum of its members' values.
    /// The structure is validated (disjoint, exhaustive).
    pub fn value_of_cs(&self, cs: &[Coalition]) -> Result<f64> {
        crate::combinatorics::partition_of(cs, self.n)?;
        let mut sum = KahanSum::new();
        for &c in cs {
            sum.add(self.value(c)?);
        }
        Ok(sum.value())
    }

    /// Exact max/min and compensated average for every size.
    pub fn size_stats(&self) -> Vec<SizeStats> {
        (1..=self.n)
            .map(|s| {
                let list = self.list(s);
                let mut max = f64::NEG_INFINITY;
                let mut min = f64::INFINITY;
                let mut sum = KahanSum::new();
                for &v in list {
                    max = max.max(v);
                    min = min.min(v);
                    sum.add(v);
                }
                let avg = (sum.value() / list.len() as f64).clamp(min, max);
                SizeStats { s, max, min, avg }
            })
            .collect()
    }

    /// Mask-indexed copy of all values (`out[c.mask()] = v(c)`), for the
    /// dynamic-programming and brute-force baselines. Entry 0 is unused.
    pub fn mask_values(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1usize << self.n];
        for s in 1..=self.n {
            for (i, &v) in self.list(s).iter().enumerate() {
                let c =
                    index_to_coalition(i as u64 + 1, s, self.n).expect("index within list bounds");
                out[c.mask() as usize] = v;
            }
        }
        out
    }

    fn check_finite(&self) -> Result<()> {
        for s in 1..=self.n {
            for (i, &v) in self.list(s).iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        size: s,
                        index: i as u64 + 1,
                    });
                }
            }
        }
        Ok(())
    }

    /// Binary serialization: magic "CSGV", version u16, n u16, distribution
    /// tag u8, seed u64, then every value as little-endian f64 in canonical
    /// order (sizes ascending, indices ascending).
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        self.check_finite()?;
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&(self.n as u16).to_le_bytes())?;
        let (tag, seed) = match self.provenance {
            Some(spec) => (spec.kind.tag(), spec.seed),
            None => (CUSTOM_TAG, 0),
        };
        w.write_all(&[tag])?;
        w.write_all(&seed.to_le_bytes())?;
        for s in 1..=self.n {
            for &v in self.list(s) {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; 17];
        r.read_exact(&mut header).map_err(|e| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                Error::LengthMismatch {
                    expected: 17,
                    actual: 0,
                }
            } else {
                Error::Io(e)
            }
        })?;
        if &header[0..4] != MAGIC {
            return Err(Error::BadMagic);
        }
        let version = u16::from_le_bytes([header[4], header[5]]);
        if version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let n = u32::from(u16::from_le_bytes([header[6], header[7]]));
        check_agent_count(n)?;
        let tag = header[8];
        let seed = u64::from_le_bytes(header[9..17].try_into().expect("8 bytes"));
        let kind = DistributionKind::from_tag(tag)?;

        let expected = ((1u64 << n) - 1) * 8;
        let mut payload = Vec::new();
        r.read_to_end(&mut payload)?;
        if payload.len() as u64 != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: payload.len() as u64,
            });
        }
        let mut lists = Vec::with_capacity(n as usize);
        let mut offset = 0usize;
        for s in 1..=n {
            let len = binomial(n, s)? as usize;
            let mut list = Vec::with_capacity(len);
            for i in 0..len {
                let bytes: [u8; 8] = payload[offset..offset + 8].try_into().expect("8 bytes");
                let v = f64::from_le_bytes(bytes);
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        size: s,
                        index: i as u64 + 1,
                    });
                }
                list.push(v);
                offset += 8;
            }
            lists.push(list);
        }
        Ok(Self {
            n,
            lists,
            choose: BinomialTable::new(n),
            provenance: kind.map(|kind| DistributionSpec { kind, seed }),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::with_capacity(17 + self.total_entries() as usize * 8);
        self.write_to(&mut bytes)?;
        std::fs::write(path, bytes)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::read_from(bytes.as_slice())
    }

    /// CSV text form: a first line `n,<agents>`, a column header, then one
    /// `size,index,value` row per coalition in canonical order.
    pub fn to_csv(&self) -> Result<String> {
        self.check_finite()?;
        let mut out = String::new();
        out.push_str(&format!("n,{}\n", self.n));
        out.push_str("size,index,value\n");
        for s in 1..=self.n {
            for (i, &v) in self.list(s).iter().enumerate() {
                out.push_str(&format!("{s},{},{v}\n", i + 1));
            }
        }
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let first = lines
            .next()
            .ok_or_else(|| Error::MalformedText("empty input".into()))?;
        let n: u32 = first
            .strip_prefix("n,")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::MalformedText(format!("expected 'n,<count>', got '{first}'")))?;
        check_agent_count(n)?;
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedText("missing column header".into()))?;
        if header != "size,index,value" {
            return Err(Error::MalformedText(format!("bad header '{header}'")));
        }
        let mut table = Self::zeros(n)?;
        let mut expected = Vec::new();
        for s in 1..=n {
            for i in 1..=binomial(n, s)? as u64 {
                expected.push((s, i));
            }
        }
        let mut count = 0usize;
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let mut cols = line.splitn(3, ',');
            let (Some(s_col), Some(i_col), Some(v_col)) = (cols.next(), cols.next(), cols.next())
            else {
                return Err(Error::MalformedText(format!("short row '{line}'")));
            };
            let s: u32 = s_col
                .parse()
                .map_err(|_| Error::MalformedText(format!("bad size in '{line}'")))?;
            let i: u64 = i_col
                .parse()
                .map_err(|_| Error::MalformedText(format!("bad index in '{line}'")))?;
            let v: f64 = v_col
                .parse()
                .map_err(|_| Error::MalformedText(format!("bad value in '{line}'")))?;
            if count >= expected.len() || expected[count] != (s, i) {
                return Err(Error::MalformedText(format!(
                    "row '{line}' out of canonical order"
                )));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite { size: s, index: i });
            }
            table.lists[(s - 1) as usize][(i - 1) as usize] = v;
            count += 1;
        }
        if count != expected.len() {
            return Err(Error::LengthMismatch {
                expected: expected.len() as u64,
                actual: count as u64,
            });
        }
        table.provenance = None;
        Ok(table)
    }
}

/// Uniform sampling of coalition structures, without enumerating them.
///
/// A structure is drawn in two stages: first an integer partition with
/// probability `|P_G| / Bell(n)` using exact counts, then a uniform member
/// of that subspace by assigning the block of the smallest unplaced agent,
/// size-weighted by exact completion counts, and unranking a random
/// combination for the rest of the block.
pub struct StructureSampler {
    n: u32,
    partitions: Vec<IntegerPartition>,
    cumulative: Vec<u128>,
    total: u128,
}

impl StructureSampler {
    pub fn new(n: u32) -> Result<Self> {
        check_agent_count(n)?;
        let partitions = enumerate_partitions(n);
        let mut cumulative = Vec::with_capacity(partitions.len());
        let mut total: u128 = 0;
        for g in &partitions {
            total += subspace_size(g)?;
            cumulative.push(total);
        }
        debug_assert_eq!(total, bell(n)?);
        Ok(Self {
            n,
            partitions,
            cumulative,
            total,
        })
    }

    /// Number of structures with the given remaining part multiset over
    /// matching agent count; same formula as `subspace_size`.
    fn count(parts: &[u32]) -> u128 {
        if parts.is_empty() {
            return 1;
        }
        let g = IntegerPartition::from_sorted(parts.to_vec());
        subspace_size(&g).expect("within u128 range for supported n")
    }

    pub fn sample(&self, rng: &mut Xoshiro256PlusPlus) -> Vec<Coalition> {
        let t = rng.next_u128_below(self.total);
        let which = self.cumulative.partition_point(|&c| c <= t);
        let g = &self.partitions[which];

        let mut remaining_parts = g.parts().to_vec();
        let mut free: Vec<u32> = (1..=self.n).collect();
        let mut out = Vec::with_capacity(g.part_count());
        while !remaining_parts.is_empty() {
            let m = free.len() as u32;
            // The smallest free agent anchors the next block; pick the
            // block size with weight C(m-1, s-1) * count(rest).
            let anchor = free[0];
            let mut weights = Vec::new();
            let mut total: u128 = 0;
            let mut prev = 0;
            for (i, &s) in remaining_parts.iter().enumerate() {
                if s == prev {
                    continue;
                }
                prev = s;
                let mut rest = remaining_parts.clone();
                rest.remove(i);
                let w = binomial(m - 1, s - 1).expect("in range") * Self::count(&rest);
                total += w;
                weights.push((i, s, total));
            }
            debug_assert_eq!(total, Self::count(&remaining_parts));
            let draw = rng.next_u128_below(total);
            let (idx, size, _) = *weights
                .iter()
                .find(|&&(_, _, cum)| draw < cum)
                .expect("cumulative covers range");

            let mut block = vec![anchor];
            if size > 1 {
                let combos = binomial(m - 1, size - 1).expect("in range");
                let x = rng.next_u128_below(combos) as u64 + 1;
                let positions = index_to_coalition(x, size - 1, m - 1).expect("index within range");
                for p in positions.agents() {
                    // Position p indexes the free list after the anchor.
                    block.push(free[p as usize]);
                }
            }
            let coalition = Coalition::from_agents(block.iter().copied());
            free.retain(|a| !coalition.contains(*a));
            remaining_parts.remove(idx);
            out.push(coalition);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::partition_of;
    use proptest::prelude::*;

    fn spec(kind: DistributionKind, seed: u64) -> DistributionSpec {
        DistributionSpec { kind, seed }
    }

    #[test]
    fn generation_is_deterministic() {
        for kind in [
            DistributionKind::Uniform,
            DistributionKind::Normal,
            DistributionKind::Ndcs,
        ] {
            let a = ValueTable::generate(3, spec(kind, 99)).unwrap();
            let b = ValueTable::generate(3, spec(kind, 99)).unwrap();
            let mut bytes_a = Vec::new();
            let mut bytes_b = Vec::new();
            a.write_to(&mut bytes_a).unwrap();
            b.write_to(&mut bytes_b).unwrap();
            assert_eq!(bytes_a, bytes_b);
        }
    }

    #[test]
    fn uniform_values_within_size_bounds() {
        let t = ValueTable::generate(10, spec(DistributionKind::Uniform, 5)).unwrap();
        for s in 1..=10 {
            for &v in t.list(s) {
                assert!(v >= 0.0 && v <= f64::from(s));
            }
        }
    }

    #[test]
    fn normal_per_size_mean_close_to_size() {
        // C(16, 8) = 12870 samples of size 8; mean should be 8 within five
        // standard errors of 0.8 / sqrt(12870).
        let t = ValueTable::generate(16, spec(DistributionKind::Normal, 11)).unwrap();
        let list = t.list(8);
        let mean: f64 = list.iter().sum::<f64>() / list.len() as f64;
        let tol = 5.0 * 0.8 / (list.len() as f64).sqrt();
        assert!((mean - 8.0).abs() < tol, "mean {mean}");
    }

    #[test]
    fn value_set_and_get_round_trip() {
        let mut t = ValueTable::zeros(5).unwrap();
        let c = Coalition::from_agents([2, 4]);
        t.set_value(c, 7.5).unwrap();
        assert_eq!(t.value(c).unwrap(), 7.5);
        assert!(t.value(Coalition::EMPTY).is_err());
    }

    #[test]
    fn grand_coalition_is_single_entry_of_last_list() {
        let t = ValueTable::generate(6, spec(DistributionKind::Uniform, 3)).unwrap();
        assert_eq!(t.list(6).len(), 1);
        assert_eq!(t.value(Coalition::grand(6)).unwrap(), t.list(6)[0]);
        // First row of the size-3 list is {a1,a2,a3}.
        assert_eq!(
            t.value(Coalition::from_agents([1, 2, 3])).unwrap(),
            t.list(3)[0]
        );
    }

    #[test]
    fn value_of_cs_matches_manual_sums() {
        let t = ValueTable::generate(7, spec(DistributionKind::Normal, 21)).unwrap();
        let singles: Vec<_> = (1..=7).map(Coalition::singleton).collect();
        let manual: f64 = singles.iter().map(|&c| t.value(c).unwrap()).sum();
        assert!((t.value_of_cs(&singles).unwrap() - manual).abs() < 1e-12);
        let grand = [Coalition::grand(7)];
        assert_eq!(
            t.value_of_cs(&grand).unwrap(),
            t.value(Coalition::grand(7)).unwrap()
        );
    }

    #[test]
    fn value_of_cs_with_fixed_partition_matches_oracle() {
        // 100 random tables, structures of shape [1,1,2] over 4 agents.
        for seed in 0..100 {
            let t = ValueTable::generate(4, spec(DistributionKind::Uniform, seed)).unwrap();
            let cs = [
                Coalition::from_agents([3]),
                Coalition::from_agents([1]),
                Coalition::from_agents([2, 4]),
            ];
            let direct =
                t.value(cs[0]).unwrap() + t.value(cs[1]).unwrap() + t.value(cs[2]).unwrap();
            assert!((t.value_of_cs(&cs).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn value_of_cs_rejects_invalid_structures() {
        let t = ValueTable::zeros(4).unwrap();
        let overlapping = [
            Coalition::from_agents([1, 2]),
            Coalition::from_agents([2, 3, 4]),
        ];
        assert!(t.value_of_cs(&overlapping).is_err());
        let partial = [Coalition::from_agents([1, 2])];
        assert!(t.value_of_cs(&partial).is_err());
    }

    #[test]
    fn size_stats_constant_table() {
        let mut t = ValueTable::zeros(6).unwrap();
        for s in 1..=6u32 {
            let len = t.list(s).len();
            for i in 0..len {
                t.lists[(s - 1) as usize][i] = 2.5;
            }
        }
        for st in t.size_stats() {
            assert_eq!(st.max, 2.5);
            assert_eq!(st.min, 2.5);
            assert_eq!(st.avg, 2.5);
        }
    }

    #[test]
    fn size_stats_match_naive_second_pass() {
        let t = ValueTable::generate(8, spec(DistributionKind::Uniform, 17)).unwrap();
        for st in t.size_stats() {
            let list = t.list(st.s);
            let naive_max = list.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let naive_min = list.iter().cloned().fold(f64::INFINITY, f64::min);
            let naive_avg = list.iter().sum::<f64>() / list.len() as f64;
            assert_eq!(st.max, naive_max);
            assert_eq!(st.min, naive_min);
            assert!((st.avg - naive_avg).abs() < 1e-12);
            assert!(st.min <= st.avg && st.avg <= st.max);
        }
    }

    #[test]
    fn binary_round_trip() {
        let t = ValueTable::generate(6, spec(DistributionKind::Ndcs, 42)).unwrap();
        let mut bytes = Vec::new();
        t.write_to(&mut bytes).unwrap();
        let back = ValueTable::read_from(bytes.as_slice()).unwrap();
        assert_eq!(t, back);
        assert_eq!(back.provenance(), Some(spec(DistributionKind::Ndcs, 42)));
    }

    #[test]
    fn truncated_file_is_length_mismatch() {
        let t = ValueTable::generate(5, spec(DistributionKind::Uniform, 1)).unwrap();
        let mut bytes = Vec::new();
        t.write_to(&mut bytes).unwrap();
        bytes.truncate(bytes.len() - 8);
        assert!(matches!(
            ValueTable::read_from(bytes.as_slice()),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn wrong_magic_is_format_error() {
        let t = ValueTable::generate(4, spec(DistributionKind::Uniform, 1)).unwrap();
        let mut bytes = Vec::new();
        t.write_to(&mut bytes).unwrap();
        bytes[0] = b'X';
        assert!(matches!(
            ValueTable::read_from(bytes.as_slice()),
            Err(Error::BadMagic)
        ));
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let mut t = ValueTable::zeros(3).unwrap();
        t.set_value(Coalition::singleton(1), f64::NAN).unwrap();
        let mut bytes = Vec::new();
        assert!(matches!(
            t.write_to(&mut bytes),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let t = ValueTable::generate(5, spec(DistributionKind::Normal, 8)).unwrap();
        let text = t.to_csv().unwrap();
        let back = ValueTable::from_csv(&text).unwrap();
        assert_eq!(t.n(), back.n());
        for s in 1..=5 {
            assert_eq!(t.list(s), back.list(s));
        }
        assert!(ValueTable::from_csv("garbage").is_err());
        let short: String = text.lines().take(5).collect::<Vec<_>>().join("\n");
        assert!(ValueTable::from_csv(&short).is_err());
    }

    #[test]
    fn mask_values_agree_with_lookup() {
        let t = ValueTable::generate(6, spec(DistributionKind::Ndcs, 77)).unwrap();
        let by_mask = t.mask_values();
        for mask in 1u32..(1 << 6) {
            let c = Coalition::from_mask(mask);
            assert_eq!(by_mask[mask as usize], t.value(c).unwrap());
        }
    }

    #[test]
    fn sampler_produces_valid_structures_with_expected_level_frequencies() {
        let n = 4;
        let sampler = StructureSampler::new(n).unwrap();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1234);
        // Counts per number of blocks; Stirling numbers for n=4 are
        // 1, 7, 6, 1 out of Bell(4) = 15.
        let mut by_blocks = [0u64; 5];
        let draws = 60_000;
        for _ in 0..draws {
            let cs = sampler.sample(&mut rng);
            partition_of(&cs, n).expect("valid structure");
            by_blocks[cs.len()] += 1;
        }
        let expected = [0.0, 1.0 / 15.0, 7.0 / 15.0, 6.0 / 15.0, 1.0 / 15.0];
        for k in 1..=4 {
            let freq = by_blocks[k] as f64 / draws as f64;
            let se = (expected[k] * (1.0 - expected[k]) / draws as f64).sqrt();
            assert!(
                (freq - expected[k]).abs() < 5.0 * se,
                "blocks={k}: freq {freq} vs {}",
                expected[k]
            );
        }
    }

    proptest! {
        #[test]
        fn prop_binary_round_trip(n in 1u32..=7, seed in any::<u64>(), kind in 0u8..3) {
            let kind = DistributionKind::from_tag(kind).unwrap().unwrap();
            let t = ValueTable::generate(n, spec(kind, seed)).unwrap();
            let mut bytes = Vec::new();
            t.write_to(&mut bytes).unwrap();
            let back = ValueTable::read_from(bytes.as_slice()).unwrap();
            prop_assert_eq!(t, back);
        }

        #[test]
        fn prop_csv_round_trip(n in 1u32..=6, seed in any::<u64>()) {
            let t = ValueTable::generate(n, spec(DistributionKind::Ndcs, seed)).unwrap();
            let back = ValueTable::from_csv(&t.to_csv().unwrap()).unwrap();
            for s in 1..=n {
                prop_assert_eq!(t.list(s), back.list(s));
            }
        }
    }
}
