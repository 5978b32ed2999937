//! Anytime trace CSV: frozen schema, writer, and validator.

use csg_core::AnytimeSnapshot;

pub const TRACE_SCHEMA: &str = "# csg-trace v1";
pub const TRACE_COLUMNS: &str = "elapsed_ms,best_value,ub_star,beta,r_bound,cs_examined";

fn fmt_beta(beta: f64) -> String {
    if beta.is_infinite() {
        "inf".to_string()
    } else {
        format!("{beta}")
    }
}

pub fn write_trace(snapshots: &[AnytimeSnapshot]) -> String {
    let mut out = String::new();
    out.push_str(TRACE_SCHEMA);
    out.push('\n');
    out.push_str(TRACE_COLUMNS);
    out.push('\n');
    for s in snapshots {
        let r_bound = if s.best_value > 0.0 && s.ub_star > 0.0 {
            format!("{}", s.best_value / s.ub_star)
        } else {
            String::new()
        };
        out.push_str(&format!(
            "{:.3},{},{},{},{},{}\n",
            s.elapsed.as_secs_f64() * 1e3,
            s.best_value,
            s.ub_star,
            fmt_beta(s.beta),
            r_bound,
            s.cs_examined,
        ));
    }
    out
}

#[derive(Debug)]
pub struct TraceSummary {
    pub rows: usize,
    pub final_best: f64,
    pub final_beta: f64,
}

/// Check a trace CSV: schema line, column header, parseable rows, monotone
/// best/ub/beta columns, r_bound in (0, 1]. With `expect_complete`, the
/// final beta must be 1 up to float tolerance.
pub fn validate_trace(text: &str, expect_complete: bool) -> Result<TraceSummary, String> {
    let mut lines = text.lines();
    if lines.next() != Some(TRACE_SCHEMA) {
        return Err("missing schema line".into());
    }
    if lines.next() != Some(TRACE_COLUMNS) {
        return Err("missing column header".into());
    }
    let mut rows = 0usize;
    let mut prev_best = f64::NEG_INFINITY;
    let mut prev_ub = f64::INFINITY;
    let mut prev_beta = f64::INFINITY;
    let mut prev_elapsed = -1.0f64;
    let mut prev_examined = 0u64;
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(format!("row has {} columns: '{line}'", cols.len()));
        }
        let elapsed: f64 = cols[0]
            .parse()
            .map_err(|_| format!("bad elapsed '{line}'"))?;
        let best: f64 = cols[1].parse().map_err(|_| format!("bad best '{line}'"))?;
        let ub: f64 = cols[2].parse().map_err(|_| format!("bad ub '{line}'"))?;
        let beta: f64 = if cols[3] == "inf" {
            f64::INFINITY
        } else {
            cols[3].parse().map_err(|_| format!("bad beta '{line}'"))?
        };
        if best.is_nan() || ub.is_nan() || beta.is_nan() {
            return Err(format!("NaN column at row {rows}"));
        }
        if elapsed < prev_elapsed {
            return Err(format!("elapsed decreases at row {rows}"));
        }
        if best < prev_best {
            return Err(format!("best_value decreases at row {rows}"));
        }
        if ub > prev_ub {
            return Err(format!("ub_star increases at row {rows}"));
        }
        if beta > prev_beta {
            return Err(format!("beta increases at row {rows}"));
        }
        if best > ub + 1e-9 {
            return Err(format!("best above upper bound at row {rows}"));
        }
        if !cols[4].is_empty() {
            let r_bound: f64 = cols[4]
                .parse()
                .map_err(|_| format!("bad r_bound '{line}'"))?;
            if !(r_bound > 0.0 && r_bound <= 1.0 + 1e-12) {
                return Err(format!("r_bound {r_bound} outside (0,1] at row {rows}"));
            }
        }
        let examined: u64 = cols[5].parse().map_err(|_| format!("bad count '{line}'"))?;
        if examined < prev_examined {
            return Err(format!("cs_examined decreases at row {rows}"));
        }
        prev_elapsed = elapsed;
        prev_best = best;
        prev_ub = ub;
        prev_beta = beta;
        prev_examined = examined;
        rows += 1;
    }
    if rows == 0 {
        return Err("trace has no rows".into());
    }
    if expect_complete && prev_beta > 1.0 + 1e-9 {
        return Err(format!("completed run ends with beta {prev_beta}"));
    }
    Ok(TraceSummary {
        rows,
        final_best: prev_best,
        final_beta: prev_beta,
    })
}
