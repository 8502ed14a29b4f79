//! Batch experiment driver: N-sweeps over a benchmark, summary tables,
//! and per-iteration trace files.
//!
//! Summary tables are emitted as CSV (header row, shortest round-trip
//! decimals) or JSON mirroring the same schema. A trace file holds one
//! record per iteration; in CSV form the final mesh goes to a sibling
//! `*.mesh.csv` file, in JSON form it is embedded in the same object.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adapt::{self, AdaptOptions, AdaptiveResult};
use crate::error::{Error, Result};
use crate::problems::{make_problem, BenchmarkSpec};

/// Output encoding for summary and trace files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Full sweep configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub benchmark: BenchmarkSpec,
    /// Strictly increasing element counts, one run per entry.
    pub n_list: Vec<usize>,
    pub options: AdaptOptions,
    /// Summary file; None writes to stdout.
    pub summary_out: Option<PathBuf>,
    /// Directory for per-N trace files (only used when tracing is on).
    pub trace_dir: Option<PathBuf>,
    pub format: OutputFormat,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::InvalidArgument("n_list must not be empty".into()));
        }
        for w in self.n_list.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::InvalidArgument(format!(
                    "n_list must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }
}

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub iterations: usize,
    /// "quality", "mesh_diff", "max_iter", or "failed".
    pub converged_by: String,
    pub h1_error: f64,
    pub eta_tilde: f64,
    pub alpha_sqrt: f64,
    pub max_quality: f64,
    pub sigma: f64,
}

/// Sweep output: rows in N order plus pairwise convergence orders for the
/// error and the estimator (computed over rows where both are positive).
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SummaryRow>,
    pub orders_h1: Vec<f64>,
    pub orders_eta: Vec<f64>,
}

fn row_from_result(n: usize, result: &AdaptiveResult) -> SummaryRow {
    let (h1, eta_tilde, alpha_sqrt) = match &result.final_report {
        Some(report) => (report.h1_semi, report.eta_tilde, report.alpha_sqrt),
        None => (f64::NAN, f64::NAN, result.final_state.alpha.sqrt()),
    };
    SummaryRow {
        n,
        iterations: result.iterations,
        converged_by: result.converged_by.to_string(),
        h1_error: h1,
        eta_tilde,
        alpha_sqrt,
        max_quality: result.final_state.max_quality(),
        sigma: result.final_state.sigma,
    }
}

fn failed_row(n: usize) -> SummaryRow {
    SummaryRow {
        n,
        iterations: 0,
        converged_by: "failed".into(),
        h1_error: f64::NAN,
        eta_tilde: f64::NAN,
        alpha_sqrt: f64::NAN,
        max_quality: f64::NAN,
        sigma: f64::NAN,
    }
}

fn orders_of(rows: &[SummaryRow], pick: impl Fn(&SummaryRow) -> f64) -> Vec<f64> {
    let series: Vec<(usize, f64)> = rows
        .iter()
        .map(|r| (r.n, pick(r)))
        .filter(|(_, v)| v.is_finite() && *v > 0.0)
        .collect();
    adapt::convergence_order(&series).unwrap_or_default()
}

/// Run one adaptive solve per element count. A failing run produces a
/// "failed" row (reason on stderr) instead of aborting the sweep.
pub fn run_sweep(config: &RunConfig) -> Result<Sweep> {
    config.validate()?;
    let problem = make_problem(&config.benchmark)?;
    let mut rows = Vec::with_capacity(config.n_list.len());
    let mut results = Vec::with_capacity(config.n_list.len());
    for &n in &config.n_list {
        match adapt::solve_adaptive(&problem, n, &config.options) {
            Ok(result) => {
                rows.push(row_from_result(n, &result));
                results.push(Some(result));
            }
            Err(e) => {
                eprintln!("run n = {n} failed: {e}");
                rows.push(failed_row(n));
                results.push(None);
            }
        }
    }

    if config.options.record_trace {
        if let Some(dir) = &config.trace_dir {
            fs::create_dir_all(dir)?;
            for (row, result) in rows.iter().zip(&results) {
                if let Some(result) = result {
                    let path = dir.join(format!(
                        "trace_{}_n{}.{}",
                        config.benchmark.label(),
                        row.n,
                        config.format.extension()
                    ));
                    emit_trace(result, &path, config.format)?;
                }
            }
        }
    }

    Ok(Sweep {
        orders_h1: orders_of(&rows, |r| r.h1_error),
        orders_eta: orders_of(&rows, |r| r.eta_tilde),
        rows,
    })
}

pub const SUMMARY_HEADER: &str =
    "n,iterations,converged_by,h1_error,eta_tilde,alpha_sqrt,max_quality,sigma,order_h1";

/// Pairwise order against the previous row, blank for the first row and
/// whenever either value is unusable.
fn order_column(rows: &[SummaryRow]) -> Vec<Option<f64>> {
    let mut out = vec![None; rows.len()];
    for i in 1..rows.len() {
        let (prev, cur) = (&rows[i - 1], &rows[i]);
        if prev.h1_error.is_finite()
            && cur.h1_error.is_finite()
            && prev.h1_error > 0.0
            && cur.h1_error > 0.0
        {
            out[i] =
                Some((prev.h1_error / cur.h1_error).ln() / (cur.n as f64 / prev.n as f64).ln());
        }
    }
    out
}

/// Render the summary as CSV. Rust's default float formatting is the
/// shortest representation that round-trips, so parsing reproduces the
/// rows bit for bit.
pub fn summary_to_csv(sweep: &Sweep) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    let orders = order_column(&sweep.rows);
    for (row, order) in sweep.rows.iter().zip(orders) {
        let order = order.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.n,
            row.iterations,
            row.converged_by,
            row.h1_error,
            row.eta_tilde,
            row.alpha_sqrt,
            row.max_quality,
            row.sigma,
            order
        )
        .expect("writing to String cannot fail");
    }
    out
}

/// Render the summary as JSON: an array of objects mirroring the CSV
/// columns (order_h1 is null on the first row, NaN maps to null).
pub fn summary_to_json(sweep: &Sweep) -> String {
    let orders = order_column(&sweep.rows);
    let rows: Vec<serde_json::Value> = sweep
        .rows
        .iter()
        .zip(orders)
        .map(|(row, order)| {
            serde_json::json!({
                "n": row.n,
                "iterations": row.iterations,
                "converged_by": row.converged_by,
                "h1_error": finite_or_null(row.h1_error),
                "eta_tilde": finite_or_null(row.eta_tilde),
                "alpha_sqrt": finite_or_null(row.alpha_sqrt),
                "max_quality": finite_or_null(row.max_quality),
                "sigma": finite_or_null(row.sigma),
                "order_h1": order,
            })
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&rows).expect("summary rows serialize");
    text.push('\n');
    text
}

fn finite_or_null(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::Value::Null
    }
}

fn value_to_f64(v: &serde_json::Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn parse_field<T: std::str::FromStr>(field: &str, name: &str) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad {name} field: {field:?}")))
}

fn parse_float(field: &str, name: &str) -> Result<f64> {
    if field.is_empty() {
        return Ok(f64::NAN);
    }
    parse_field(field, name)
}

/// Parse a summary CSV back into rows (order column is dropped; it is
/// derived data).
pub fn parse_summary_csv(text: &str) -> Result<Vec<SummaryRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == SUMMARY_HEADER => {}
        other => {
            return Err(Error::InvalidArgument(format!(
                "bad summary header: {other:?}"
            )));
        }
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::InvalidArgument(format!(
                "expected 9 fields, got {} in {line:?}",
                fields.len()
            )));
        }
        rows.push(SummaryRow {
            n: parse_field(fields[0], "n")?,
            iterations: parse_field(fields[1], "iterations")?,
            converged_by: fields[2].to_string(),
            h1_error: parse_float(fields[3], "h1_error")?,
            eta_tilde: parse_float(fields[4], "eta_tilde")?,
            alpha_sqrt: parse_float(fields[5], "alpha_sqrt")?,
            max_quality: parse_float(fields[6], "max_quality")?,
            sigma: parse_float(fields[7], "sigma")?,
        });
    }
    Ok(rows)
}

/// Parse a summary JSON array back into rows.
pub fn parse_summary_json(text: &str) -> Result<Vec<SummaryRow>> {
    let values: Vec<serde_json::Value> = serde_json::from_str(text)
        .map_err(|e| Error::InvalidArgument(format!("bad summary json: {e}")))?;
    values
        .iter()
        .map(|v| {
            Ok(SummaryRow {
                n: v["n"]
                    .as_u64()
                    .ok_or_else(|| Error::InvalidArgument("bad n".into()))?
                    as usize,
                iterations: v["iterations"]
                    .as_u64()
                    .ok_or_else(|| Error::InvalidArgument("bad iterations".into()))?
                    as usize,
                converged_by: v["converged_by"]
                    .as_str()
                    .ok_or_else(|| Error::InvalidArgument("bad converged_by".into()))?
                    .to_string(),
                h1_error: value_to_f64(&v["h1_error"]),
                eta_tilde: value_to_f64(&v["eta_tilde"]),
                alpha_sqrt: value_to_f64(&v["alpha_sqrt"]),
                max_quality: value_to_f64(&v["max_quality"]),
                sigma: value_to_f64(&v["sigma"]),
            })
        })
        .collect()
}

pub const TRACE_HEADER: &str = "k,mesh_diff,qmax_minus_1,h1_error";

/// Write the iteration trace of one run: a record per iteration with
/// (k, mesh_diff, max quality - 1, h1 error), plus the final mesh nodes.
///
/// CSV puts the node list in a sibling `<stem>.mesh.csv` file; JSON embeds
/// it under "final_mesh".
pub fn emit_trace(result: &AdaptiveResult, path: &Path, format: OutputFormat) -> Result<()> {
    let trace = result
        .trace
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("result has no recorded trace".into()))?;
    match format {
        OutputFormat::Csv => {
            let mut out = String::new();
            out.push_str(TRACE_HEADER);
            out.push('\n');
            for entry in trace {
                writeln!(
                    out,
                    "{},{},{},{}",
                    entry.k,
                    entry.mesh_diff,
                    entry.max_quality - 1.0,
                    entry.h1_error.unwrap_or(f64::NAN)
                )
                .expect("writing to String cannot fail");
            }
            fs::write(path, out)?;

            let mut mesh_out = String::from("x\n");
            for x in result.final_mesh.nodes() {
                writeln!(mesh_out, "{x}").expect("writing to String cannot fail");
            }
            fs::write(path.with_extension("mesh.csv"), mesh_out)?;
        }
        OutputFormat::Json => {
            let records: Vec<serde_json::Value> = trace
                .iter()
                .map(|entry| {
                    serde_json::json!({
                        "k": entry.k,
                        "mesh_diff": entry.mesh_diff,
                        "qmax_minus_1": entry.max_quality - 1.0,
                        "h1_error": entry.h1_error,
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "records": records,
                "final_mesh": result.final_mesh.nodes(),
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("trace serializes");
            text.push('\n');
            fs::write(path, text)?;
        }
    }
    Ok(())
}

/// Render and write (or print) the summary per the config.
pub fn write_summary(config: &RunConfig, sweep: &Sweep) -> Result<()> {
    let text = match config.format {
        OutputFormat::Csv => summary_to_csv(sweep),
        OutputFormat::Json => summary_to_json(sweep),
    };
    match &config.summary_out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
