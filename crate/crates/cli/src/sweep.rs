//! Benchmark sweeps: run a grid of (n, distribution, seed, algo) jobs in
//! parallel worker threads and collect per-run rows.

use crate::records::RunRow;
use csg_core::baselines::{brute_force_solve, dp_solve, MAX_DP_AGENTS};
use csg_core::values::{DistributionKind, DistributionSpec, ValueTable};
use csg_core::{solve, SearchConfig, SolveStatus};
use std::collections::HashMap;
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

/// Largest n for which the sweep computes a dp oracle on demand to fill
/// the quality column when no exact run is part of the sweep itself.
const ORACLE_ON_DEMAND_MAX_N: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algo {
    Ip,
    Dp,
    Brute,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Ip => "ip",
            Algo::Dp => "dp",
            Algo::Brute => "brute",
        }
    }
}

impl std::str::FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ip" => Ok(Algo::Ip),
            "dp" => Ok(Algo::Dp),
            "brute" => Ok(Algo::Brute),
            other => Err(format!("unknown algorithm '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub n_values: Vec<u32>,
    pub distributions: Vec<DistributionKind>,
    pub seeds: Vec<u64>,
    pub algos: Vec<Algo>,
    pub beta_star: f64,
    pub time_limit: Option<Duration>,
}

pub fn instance_id(n: u32, kind: DistributionKind, seed: u64) -> String {
    format!("n{n}-{}-s{seed}", kind.name())
}

pub fn status_name(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::WithinBetaStar => "within_beta_star",
        SolveStatus::TimeLimited => "time_limited",
    }
}

fn run_one(n: u32, kind: DistributionKind, seed: u64, algo: Algo, spec: &SweepSpec) -> RunRow {
    let mut row = RunRow {
        instance: instance_id(n, kind, seed),
        n,
        distribution: kind.name().to_string(),
        seed,
        algo: algo.name().to_string(),
        status: "error".to_string(),
        wall_ms: 0.0,
        value: None,
        beta_final: None,
        cs_examined: None,
        r_opt: None,
        error: None,
    };
    let table = match ValueTable::generate(n, DistributionSpec { kind, seed }) {
        Ok(t) => t,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let t0 = Instant::now();
    match algo {
        Algo::Ip => {
            let config = SearchConfig {
                beta_star: spec.beta_star,
                time_limit: spec.time_limit,
                ..SearchConfig::default()
            };
            let sol = solve(&table, &config, &mut ());
            row.wall_ms = t0.elapsed().as_secs_f64() * 1e3;
            row.status = status_name(sol.status).to_string();
            row.value = Some(sol.value);
            row.beta_final = Some(sol.beta_final);
            row.cs_examined = Some(sol.cs_examined);
        }
        Algo::Dp => match dp_solve(&table) {
            Ok(sol) => {
                row.wall_ms = t0.elapsed().as_secs_f64() * 1e3;
                row.status = "optimal".to_string();
                row.value = Some(sol.value);
                row.beta_final = Some(1.0);
                row.cs_examined = Some(sol.splits_evaluated);
            }
            Err(e) => row.error = Some(e.to_string()),
        },
        Algo::Brute => match brute_force_solve(&table) {
            Ok((_, value)) => {
                row.wall_ms = t0.elapsed().as_secs_f64() * 1e3;
                row.status = "optimal".to_string();
                row.value = Some(value);
                row.beta_final = Some(1.0);
                row.cs_examined = csg_core::combinatorics::bell(n).ok().map(|b| b as u64);
            }
            Err(e) => row.error = Some(e.to_string()),
        },
    }
    row
}

/// Fill the quality column: the oracle per instance is the value from an
/// exact run in this sweep, or a dp solve on demand while n stays in the
/// exact desk range. Ratios are only meaningful for positive oracles.
fn fill_r_opt(rows: &mut [RunRow]) {
    let mut oracle: HashMap<String, f64> = HashMap::new();
    for row in rows.iter() {
        if (row.algo == "dp" || row.algo == "brute") && row.status == "optimal" {
            if let Some(v) = row.value {
                oracle.insert(row.instance.clone(), v);
            }
        }
    }
    let mut on_demand: HashMap<String, Option<f64>> = HashMap::new();
    for row in rows.iter_mut() {
        let Some(value) = row.value else { continue };
        let key = row.instance.clone();
        let oracle_value = oracle.get(&key).copied().or_else(|| {
            if row.n > ORACLE_ON_DEMAND_MAX_N.min(MAX_DP_AGENTS) {
                return None;
            }
            *on_demand.entry(key).or_insert_with(|| {
                let kind: DistributionKind = row.distribution.parse().ok()?;
                let table = ValueTable::generate(
                    row.n,
                    DistributionSpec {
                        kind,
                        seed: row.seed,
                    },
                )
                .ok()?;
                dp_solve(&table).ok().map(|s| s.value)
            })
        });
        if let Some(opt) = oracle_value {
            if opt > 0.0 {
                row.r_opt = Some((value / opt).min(1.0));
            }
        }
    }
}

/// Run every job in the grid, `threads` at a time, and return rows sorted
/// by (n, distribution, seed, algo). Individual failures become error rows
/// and the sweep continues.
pub fn run_sweep(spec: &SweepSpec, threads: usize) -> Vec<RunRow> {
    let mut jobs = Vec::new();
    for &n in &spec.n_values {
        for &kind in &spec.distributions {
            for &seed in &spec.seeds {
                for &algo in &spec.algos {
                    jobs.push((n, kind, seed, algo));
                }
            }
        }
    }
    let threads = threads.clamp(1, jobs.len().max(1));
    let queue = Arc::new(Mutex::new(jobs));
    let (tx, rx) = mpsc::channel::<RunRow>();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            let queue = Arc::clone(&queue);
            let tx = tx.clone();
            let spec = spec.clone();
            scope.spawn(move || loop {
                let job = queue.lock().expect("queue lock").pop();
                match job {
                    Some((n, kind, seed, algo)) => {
                        let row = run_one(n, kind, seed, algo, &spec);
                        if tx.send(row).is_err() {
                            return;
                        }
                    }
                    None => return,
                }
            });
        }
        drop(tx);
    });
    let mut rows: Vec<RunRow> = rx.into_iter().collect();
    rows.sort_by(|a, b| {
        (a.n, &a.distribution, a.seed, &a.algo).cmp(&(b.n, &b.distribution, b.seed, &b.algo))
    });
    fill_r_opt(&mut rows);
    rows
}

/// Worker-thread cap: the CSG_THREADS variable, else available parallelism.
pub fn thread_cap() -> usize {
    std::env::var("CSG_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|p| p.get())
                .unwrap_or(1)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use csg_core::baselines::MAX_BRUTE_AGENTS;

    #[test]
    fn mini_sweep_cross_checks() {
        let spec = SweepSpec {
            n_values: vec![6, 7],
            distributions: vec![DistributionKind::Uniform, DistributionKind::Ndcs],
            seeds: vec![0, 1, 2],
            algos: vec![Algo::Ip, Algo::Dp],
            beta_star: 1.0,
            time_limit: None,
        };
        let rows = run_sweep(&spec, 2);
        assert_eq!(rows.len(), 2 * 2 * 3 * 2);
        // Sorted and deterministic.
        let keys: Vec<_> = rows
            .iter()
            .map(|r| (r.n, r.distribution.clone(), r.seed, r.algo.clone()))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        // Every instance agrees across solvers.
        for pair in rows.chunks(2) {
            let (dp, ip) = (&pair[0], &pair[1]);
            assert_eq!(dp.instance, ip.instance);
            let (a, b) = (dp.value.unwrap(), ip.value.unwrap());
            assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
        // Exact runs get r_opt 1 for positive optima.
        for row in &rows {
            if row.distribution == "uniform" {
                assert_eq!(row.r_opt, Some(1.0));
            }
        }
    }

    #[test]
    fn failures_become_error_rows() {
        let spec = SweepSpec {
            n_values: vec![MAX_BRUTE_AGENTS + 1],
            distributions: vec![DistributionKind::Uniform],
            seeds: vec![0],
            algos: vec![Algo::Brute, Algo::Ip],
            beta_star: 1.0,
            time_limit: None,
        };
        let rows = run_sweep(&spec, 1);
        assert_eq!(rows.len(), 2);
        let brute = rows.iter().find(|r| r.algo == "brute").unwrap();
        assert_eq!(brute.status, "error");
        assert!(brute.error.is_some());
        let ip = rows.iter().find(|r| r.algo == "ip").unwrap();
        assert_eq!(ip.status, "optimal", "sweep continues past failures");
    }
}
