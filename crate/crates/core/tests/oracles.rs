//! Cross-module oracle checks: every bound, count, and solver output is
//! validated against an independent route (exhaustive enumeration, direct
//! formulas, or a second solver).

use csg_core::baselines::{brute_force_solve, dp_solve, enumerate_all_cs, for_each_cs};
use csg_core::combinatorics::{bell, enumerate_partitions, partition_of, subspace_size};
use csg_core::scan::{compute_bounds, scan_and_search};
use csg_core::values::{DistributionKind, DistributionSpec, ValueTable};
use std::collections::HashMap;

fn table(n: u32, kind: DistributionKind, seed: u64) -> ValueTable {
    ValueTable::generate(n, DistributionSpec { kind, seed }).unwrap()
}

const ALL_KINDS: [DistributionKind; 3] = [
    DistributionKind::Uniform,
    DistributionKind::Normal,
    DistributionKind::Ndcs,
];

#[test]
fn enumeration_count_matches_bell_up_to_thirteen() {
    for n in [12u32, 13] {
        let mut count: u128 = 0;
        for_each_cs(n, |_| count += 1).unwrap();
        assert_eq!(count, bell(n).unwrap(), "n={n}");
    }
    assert!(enumerate_all_cs(14).is_err());
}

#[test]
fn subspace_size_matches_enumerated_counts() {
    for n in 1..=9u32 {
        let mut counts: HashMap<Vec<u32>, u128> = HashMap::new();
        for_each_cs(n, |cs| {
            let g = partition_of(cs, n).unwrap();
            *counts.entry(g.parts().to_vec()).or_insert(0) += 1;
        })
        .unwrap();
        for g in enumerate_partitions(n) {
            let want = counts.get(g.parts()).copied().unwrap_or(0);
            assert_eq!(subspace_size(&g).unwrap(), want, "n={n} {g}");
        }
    }
}

#[test]
fn partition_of_is_constant_on_each_subspace() {
    for n in 2..=8u32 {
        for_each_cs(n, |cs| {
            let g = partition_of(cs, n).unwrap();
            let sizes: Vec<u32> = {
                let mut v: Vec<u32> = cs.iter().map(|c| c.size()).collect();
                v.sort_unstable();
                v
            };
            assert_eq!(g.parts(), sizes.as_slice());
        })
        .unwrap();
    }
}

/// Average bound equals the enumerated subspace mean, and the max/min
/// bounds really do bracket every structure value.
#[test]
fn subspace_bounds_against_enumeration() {
    for kind in ALL_KINDS {
        for seed in 0..20u64 {
            for n in [6u32, 8] {
                let t = table(n, kind, seed);
                let stats = t.size_stats();
                let mut sums: HashMap<Vec<u32>, (f64, u64, f64, f64)> = HashMap::new();
                for_each_cs(n, |cs| {
                    let v: f64 = cs.iter().map(|c| t.value(*c).unwrap()).sum();
                    let g = partition_of(cs, n).unwrap();
                    let entry = sums.entry(g.parts().to_vec()).or_insert((
                        0.0,
                        0,
                        f64::NEG_INFINITY,
                        f64::INFINITY,
                    ));
                    entry.0 += v;
                    entry.1 += 1;
                    entry.2 = entry.2.max(v);
                    entry.3 = entry.3.min(v);
                })
                .unwrap();
                for g in enumerate_partitions(n) {
                    let (sum, count, vmax, vmin) = sums[g.parts()];
                    let mean = sum / count as f64;
                    let (max_bound, avg_bound, min_bound) = compute_bounds(&g, &stats);
                    assert!(
                        (avg_bound - mean).abs() <= 1e-9 * mean.abs().max(1.0),
                        "avg bound vs mean for {g}, n={n}, seed={seed}, {kind:?}"
                    );
                    assert!(vmax <= max_bound + 1e-9);
                    assert!(vmin >= min_bound - 1e-9);
                }
            }
        }
    }
}

#[test]
fn scan_prunes_only_subspaces_below_the_optimum() {
    for kind in ALL_KINDS {
        for seed in 0..10u64 {
            let t = table(8, kind, seed);
            let scan = scan_and_search(&t);
            let (_, optimum) = brute_force_solve(&t).unwrap();
            for sub in &scan.subspaces {
                if sub.state == csg_core::SubspaceState::Pruned {
                    assert!(
                        sub.max_bound <= scan.lb_star && scan.lb_star <= optimum + 1e-9,
                        "{} pruned unsafely (seed {seed}, {kind:?})",
                        sub.partition
                    );
                }
            }
        }
    }
}

#[test]
fn scan_is_optimal_on_its_levels() {
    for seed in 0..100u64 {
        let t = table(4, DistributionKind::Uniform, seed);
        let scan = scan_and_search(&t);
        let mut want = f64::NEG_INFINITY;
        for_each_cs(4, |cs| {
            let k = cs.len();
            if k == 1 || k == 2 || k == 4 {
                let v: f64 = cs.iter().map(|c| t.value(*c).unwrap()).sum();
                want = want.max(v);
            }
        })
        .unwrap();
        assert!(
            (scan.best_value - want).abs() <= 1e-9 * want.abs().max(1.0),
            "seed {seed}"
        );
    }
    // Larger case across distributions.
    for kind in ALL_KINDS {
        for seed in 0..10u64 {
            let t = table(9, kind, seed);
            let scan = scan_and_search(&t);
            let mut want = f64::NEG_INFINITY;
            for_each_cs(9, |cs| {
                let k = cs.len();
                if k == 1 || k == 2 || k == 9 {
                    let v: f64 = cs.iter().map(|c| t.value(*c).unwrap()).sum();
                    want = want.max(v);
                }
            })
            .unwrap();
            assert!((scan.best_value - want).abs() <= 1e-9 * want.abs().max(1.0));
        }
    }
}

#[test]
fn dp_split_work_grows_like_three_to_the_n() {
    let t14 = table(14, DistributionKind::Uniform, 1);
    let t16 = table(16, DistributionKind::Uniform, 1);
    let d14 = dp_solve(&t14).unwrap();
    let d16 = dp_solve(&t16).unwrap();
    for (n, d) in [(14u32, &d14), (16, &d16)] {
        let expected = (3u64.pow(n) - 1) / 2 - ((1u64 << n) - 1);
        assert_eq!(d.splits_evaluated, expected);
    }
    let ratio = d16.splits_evaluated as f64 / d14.splits_evaluated as f64;
    assert!((8.0..=10.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn three_solvers_agree_on_random_instances() {
    for kind in ALL_KINDS {
        for seed in 0..5u64 {
            for n in [7u32, 10] {
                let t = table(n, kind, seed);
                let brute = brute_force_solve(&t).unwrap().1;
                let dp = dp_solve(&t).unwrap().value;
                let ip = csg_core::solve(&t, &csg_core::SearchConfig::default(), &mut ()).value;
                let tol = 1e-9 * brute.abs().max(1.0);
                assert!((dp - brute).abs() <= tol, "dp vs brute, n={n}, seed={seed}");
                assert!((ip - brute).abs() <= tol, "ip vs brute, n={n}, seed={seed}");
            }
        }
    }
}
