//! Benchmark run rows and their aggregation, both as frozen CSV schemas.

pub const RUNS_SCHEMA: &str = "# csg-bench-runs v1";
pub const RUNS_COLUMNS: &str =
    "instance,n,distribution,seed,algo,status,wall_ms,value,beta_final,cs_examined,r_opt,error";

pub const SUMMARY_SCHEMA: &str = "# csg-bench-summary v1";
pub const SUMMARY_COLUMNS: &str = "n,distribution,algo,runs,ok,median_wall_ms,mean_wall_ms,ci95_lo_ms,ci95_hi_ms,median_cs_examined,oracle_mismatches";

#[derive(Debug, Clone)]
pub struct RunRow {
    pub instance: String,
    pub n: u32,
    pub distribution: String,
    pub seed: u64,
    pub algo: String,
    /// optimal / within_beta_star / time_limited / error
    pub status: String,
    pub wall_ms: f64,
    pub value: Option<f64>,
    pub beta_final: Option<f64>,
    pub cs_examined: Option<u64>,
    pub r_opt: Option<f64>,
    pub error: Option<String>,
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_infinite() && x > 0.0 => "inf".to_string(),
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

pub fn write_runs(rows: &[RunRow]) -> String {
    let mut out = String::new();
    out.push_str(RUNS_SCHEMA);
    out.push('\n');
    out.push_str(RUNS_COLUMNS);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.3},{},{},{},{},{}\n",
            r.instance,
            r.n,
            r.distribution,
            r.seed,
            r.algo,
            r.status,
            r.wall_ms,
            fmt_opt_f64(r.value),
            fmt_opt_f64(r.beta_final),
            r.cs_examined.map(|c| c.to_string()).unwrap_or_default(),
            fmt_opt_f64(r.r_opt),
            r.error.clone().unwrap_or_default(),
        ));
    }
    out
}

pub fn parse_runs(text: &str) -> Result<Vec<RunRow>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(RUNS_SCHEMA) {
        return Err("missing runs schema line".into());
    }
    if lines.next() != Some(RUNS_COLUMNS) {
        return Err("missing runs column header".into());
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.splitn(12, ',').collect();
        if cols.len() != 12 {
            return Err(format!("run row has {} columns: '{line}'", cols.len()));
        }
        let opt_f64 = |s: &str| -> Result<Option<f64>, String> {
            if s.is_empty() {
                Ok(None)
            } else if s == "inf" {
                Ok(Some(f64::INFINITY))
            } else {
                s.parse().map(Some).map_err(|_| format!("bad float '{s}'"))
            }
        };
        rows.push(RunRow {
            instance: cols[0].to_string(),
            n: cols[1].parse().map_err(|_| format!("bad n '{line}'"))?,
            distribution: cols[2].to_string(),
            seed: cols[3].parse().map_err(|_| format!("bad seed '{line}'"))?,
            algo: cols[4].to_string(),
            status: cols[5].to_string(),
            wall_ms: cols[6].parse().map_err(|_| format!("bad wall '{line}'"))?,
            value: opt_f64(cols[7])?,
            beta_final: opt_f64(cols[8])?,
            cs_examined: if cols[9].is_empty() {
                None
            } else {
                Some(cols[9].parse().map_err(|_| format!("bad count '{line}'"))?)
            },
            r_opt: opt_f64(cols[10])?,
            error: if cols[11].is_empty() {
                None
            } else {
                Some(cols[11].to_string())
            },
        });
    }
    Ok(rows)
}

fn median_f64(sorted: &[f64]) -> f64 {
    let k = sorted.len();
    if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    }
}

/// Aggregate run rows into the summary CSV: medians, the mean with a 95%
/// normal-approximation confidence interval of the wall time, and a count
/// of runs whose value disagrees with the instance oracle. A pure function
/// of the rows, so re-aggregating a parsed runs file reproduces the
/// summary byte for byte.
pub fn aggregate(rows: &[RunRow]) -> String {
    let mut groups: Vec<(u32, String, String)> = rows
        .iter()
        .map(|r| (r.n, r.distribution.clone(), r.algo.clone()))
        .collect();
    groups.sort();
    groups.dedup();

    let mut out = String::new();
    out.push_str(SUMMARY_SCHEMA);
    out.push('\n');
    out.push_str(SUMMARY_COLUMNS);
    out.push('\n');
    for (n, dist, algo) in groups {
        let group: Vec<&RunRow> = rows
            .iter()
            .filter(|r| r.n == n && r.distribution == dist && r.algo == algo)
            .collect();
        let ok: Vec<&&RunRow> = group.iter().filter(|r| r.status != "error").collect();
        let runs = group.len();
        let ok_count = ok.len();

        let (median_wall, mean_wall, ci_lo, ci_hi, median_examined) = if ok.is_empty() {
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN)
        } else {
            let mut walls: Vec<f64> = ok.iter().map(|r| r.wall_ms).collect();
            walls.sort_by(f64::total_cmp);
            let mean = walls.iter().sum::<f64>() / walls.len() as f64;
            let half = if walls.len() > 1 {
                let var = walls.iter().map(|w| (w - mean).powi(2)).sum::<f64>()
                    / (walls.len() - 1) as f64;
                1.96 * (var / walls.len() as f64).sqrt()
            } else {
                0.0
            };
            let mut examined: Vec<f64> = ok
                .iter()
                .filter_map(|r| r.cs_examined.map(|c| c as f64))
                .collect();
            examined.sort_by(f64::total_cmp);
            let med_ex = if examined.is_empty() {
                f64::NAN
            } else {
                median_f64(&examined)
            };
            (median_f64(&walls), mean, mean - half, mean + half, med_ex)
        };

        // r_opt is value/oracle, so any exact-range disagreement shows up
        // as a ratio away from 1.
        let mismatches = ok
            .iter()
            .filter(|r| r.r_opt.is_some_and(|q| (q - 1.0).abs() > 1e-9))
            .count();

        out.push_str(&format!(
            "{n},{dist},{algo},{runs},{ok_count},{median_wall:.3},{mean_wall:.3},{ci_lo:.3},{ci_hi:.3},{median_examined:.1},{mismatches}\n"
        ));
    }
    out
}
