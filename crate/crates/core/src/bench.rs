//! Instance sweeps: every enumerated instance through every method, results
//! appended to a CSV file so an interrupted sweep can resume.

use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apcp::Status;
use crate::kpi::{gap_table, kpis, GapRow, KpiError, KpiReport, Profile, ProfileSeries};
use crate::network::{enumerate_instances, Instance, Network};
use crate::solve::{solve, Method, SolveError, SolveOptions};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// One line of the results file. Empty KPI cells mean the method produced
/// no path set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance_id: String,
    pub method: String,
    /// A solver status, or `refused` / `error`.
    pub status: String,
    pub time_s: f64,
    pub cost: Option<i64>,
    pub min_surviving_paths: Option<usize>,
    pub min_max_flow: Option<i64>,
    pub path_disjointness: Option<usize>,
    pub z: Option<i64>,
    pub obj_a: Option<usize>,
    pub obj_b: Option<i64>,
}

pub const STATUS_REFUSED: &str = "refused";
pub const STATUS_ERROR: &str = "error";

impl ResultRow {
    fn empty(id: &str, method: Method, status: &str) -> Self {
        ResultRow {
            instance_id: id.to_string(),
            method: method.name().to_string(),
            status: status.to_string(),
            time_s: 0.0,
            cost: None,
            min_surviving_paths: None,
            min_max_flow: None,
            path_disjointness: None,
            z: None,
            obj_a: None,
            obj_b: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal.to_string()
    }

    /// The KPI report, for rows that carry a path set.
    pub fn report(&self) -> Option<KpiReport> {
        let status = match self.status.as_str() {
            "optimal" => Status::Optimal,
            "time-limit-incumbent" => Status::TimeLimitIncumbent,
            _ => return None,
        };
        Some(KpiReport {
            cost: self.cost?,
            min_surviving_paths: self.min_surviving_paths?,
            min_max_flow: self.min_max_flow?,
            path_disjointness: self.path_disjointness?,
            solve_time_s: self.time_s,
            status,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepJob {
    pub id: String,
    pub instance: Instance,
}

/// All instances of `network` for budget `k`, ids prefixed with `label`.
pub fn jobs_for(label: &str, network: &Network, k: usize) -> Vec<SweepJob> {
    enumerate_instances(network, k)
        .into_iter()
        .map(|e| SweepJob {
            id: format!("{label}/k{k}/{}", e.id),
            instance: e.instance,
        })
        .collect()
}

/// At most `max` items spread evenly over `items`, keeping their order.
pub fn sample_evenly<T>(items: Vec<T>, max: usize) -> Vec<T> {
    let n = items.len();
    if n <= max {
        return items;
    }
    let picks: HashSet<usize> = (0..max).map(|i| i * n / max).collect();
    items
        .into_iter()
        .enumerate()
        .filter(|(i, _)| picks.contains(i))
        .map(|(_, x)| x)
        .collect()
}

/// Runs one method on one instance. Failures, including panics, become a
/// row with status `refused` or `error` rather than aborting the sweep.
pub fn run_one(job: &SweepJob, method: Method, options: &SolveOptions) -> ResultRow {
    let result = catch_unwind(AssertUnwindSafe(|| {
        let outcome = match solve(&job.instance, method, options) {
            Ok(o) => o,
            Err(SolveError::Refused(_)) => return ResultRow::empty(&job.id, method, STATUS_REFUSED),
        };
        let mut row = ResultRow::empty(&job.id, method, &outcome.status.to_string());
        row.time_s = outcome.stats.time_s;
        row.z = outcome.z;
        row.obj_a = outcome.obj_a;
        row.obj_b = outcome.obj_b;
        if outcome.status != Status::Infeasible {
            let r = kpis(&job.instance, &outcome.pathset, outcome.stats.time_s, outcome.status)
                .expect("solvers return valid path sets");
            row.cost = Some(r.cost);
            row.min_surviving_paths = Some(r.min_surviving_paths);
            row.min_max_flow = Some(r.min_max_flow);
            row.path_disjointness = Some(r.path_disjointness);
        }
        row
    }));
    result.unwrap_or_else(|_| ResultRow::empty(&job.id, method, STATUS_ERROR))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub methods: Vec<Method>,
    pub options: SolveOptions,
    /// Worker threads; 1 keeps timings comparable.
    pub jobs: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepSummary {
    /// Rows already present in the results file and skipped.
    pub resumed: usize,
    pub written: usize,
    pub errors: usize,
}

/// Reads a results file. A damaged trailing record (from an interrupted
/// write) ends the read; `Ok((rows, true))` reports that it happened.
fn read_valid_rows(path: &Path) -> Result<(Vec<ResultRow>, bool), BenchError> {
    let mut reader = csv::Reader::from_path(path).map_err(|source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        match record {
            Ok(row) => rows.push(row),
            Err(_) => return Ok((rows, true)),
        }
    }
    Ok((rows, false))
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>, BenchError> {
    Ok(read_valid_rows(path)?.0)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> BenchError + '_ {
    move |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Runs every `(job, method)` pair not yet in `results`, in job order then
/// method order. Work is split into batches solved in parallel; each batch
/// is appended in order and flushed before the next starts.
pub fn run_sweep(
    jobs: &[SweepJob],
    config: &SweepConfig,
    results: &Path,
    mut on_row: impl FnMut(&ResultRow),
) -> Result<SweepSummary, BenchError> {
    let mut summary = SweepSummary::default();
    let existing = if results.exists() && std::fs::metadata(results).map_err(io_err(results))?.len() > 0 {
        let (rows, damaged) = read_valid_rows(results)?;
        if damaged {
            let mut w = csv::Writer::from_path(results).map_err(csv_err(results))?;
            for row in &rows {
                w.serialize(row).map_err(csv_err(results))?;
            }
            w.flush().map_err(io_err(results))?;
        }
        rows
    } else {
        File::create(results).map_err(io_err(results))?;
        Vec::new()
    };
    let done: HashSet<(String, String)> = existing
        .iter()
        .map(|r| (r.instance_id.clone(), r.method.clone()))
        .collect();

    let pending: Vec<(&SweepJob, Method)> = jobs
        .iter()
        .flat_map(|j| config.methods.iter().map(move |&m| (j, m)))
        .filter(|(j, m)| {
            let seen = done.contains(&(j.id.clone(), m.name().to_string()));
            if seen {
                summary.resumed += 1;
            }
            !seen
        })
        .collect();

    let file = OpenOptions::new().append(true).open(results).map_err(io_err(results))?;
    let mut writer = csv::WriterBuilder::new()
        .has_headers(existing.is_empty())
        .from_writer(file);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| BenchError::Pool(e.to_string()))?;
    let batch = config.jobs.max(1) * 4;
    for chunk in pending.chunks(batch) {
        let rows: Vec<ResultRow> = if config.jobs <= 1 {
            chunk.iter().map(|&(j, m)| run_one(j, m, &config.options)).collect()
        } else {
            pool.install(|| chunk.par_iter().map(|&(j, m)| run_one(j, m, &config.options)).collect())
        };
        for row in &rows {
            writer.serialize(row).map_err(csv_err(results))?;
            summary.written += 1;
            if row.status == STATUS_ERROR {
                summary.errors += 1;
            }
            on_row(row);
        }
        writer.flush().map_err(io_err(results))?;
    }
    Ok(summary)
}

/// Instances where both the exact solver and the relaxation finished
/// optimally, checked against `z >= obj_a * obj_b` and the weaker
/// `z >= (obj_a - 1) * obj_b`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BoundAudit {
    pub compared: usize,
    /// Instance ids with `z < obj_a * obj_b`.
    pub product_violations: Vec<String>,
    /// Instance ids with `z < (obj_a - 1) * obj_b`.
    pub weak_violations: Vec<String>,
}

pub fn bound_audit(rows: &[ResultRow]) -> BoundAudit {
    let mut audit = BoundAudit::default();
    for (id, (benders, relaxed)) in pair_rows(rows, Method::Benders, Method::Rapcp) {
        if !(benders.is_optimal() && relaxed.is_optimal()) {
            continue;
        }
        let (Some(z), Some(a), Some(b)) = (benders.z, relaxed.obj_a, relaxed.obj_b) else {
            continue;
        };
        audit.compared += 1;
        if z < a as i64 * b {
            audit.product_violations.push(id.clone());
        }
        if z < (a as i64 - 1) * b {
            audit.weak_violations.push(id);
        }
    }
    audit
}

/// Rows of two methods on the same instance, ordered by instance id.
pub fn pair_rows(rows: &[ResultRow], left: Method, right: Method) -> Vec<(String, (ResultRow, ResultRow))> {
    let mut by_id: BTreeMap<&str, (Option<&ResultRow>, Option<&ResultRow>)> = BTreeMap::new();
    for r in rows {
        let slot = by_id.entry(r.instance_id.as_str()).or_default();
        if r.method == left.name() {
            slot.0 = Some(r);
        } else if r.method == right.name() {
            slot.1 = Some(r);
        }
    }
    by_id
        .into_iter()
        .filter_map(|(id, pair)| match pair {
            (Some(l), Some(r)) => Some((id.to_string(), (l.clone(), r.clone()))),
            _ => None,
        })
        .collect()
}

/// Gap table over instances solved optimally by both `benders` and `rapcp`.
pub fn gap_from_results(rows: &[ResultRow]) -> Result<Vec<GapRow>, KpiError> {
    let (b, r): (Vec<KpiReport>, Vec<KpiReport>) = pair_rows(rows, Method::Benders, Method::Rapcp)
        .into_iter()
        .filter(|(_, (b, r))| b.is_optimal() && r.is_optimal())
        .filter_map(|(_, (b, r))| Some((b.report()?, r.report()?)))
        .unzip();
    gap_table(&r, &b)
}

/// Per-method solve-time series. Instances found infeasible by a method are
/// left out of its series; refusals, errors and limit hits count as
/// unsolved.
pub fn profile_series(rows: &[ResultRow], methods: &[Method]) -> Vec<ProfileSeries> {
    methods
        .iter()
        .map(|m| ProfileSeries {
            method: m.name().to_string(),
            runs: rows
                .iter()
                .filter(|r| r.method == m.name() && r.status != Status::Infeasible.to_string())
                .map(|r| (r.time_s, r.is_optimal()))
                .collect(),
        })
        .collect()
}

pub fn profile_from_results(rows: &[ResultRow], methods: &[Method], horizon_s: u64) -> Result<Profile, KpiError> {
    crate::kpi::performance_profile(&profile_series(rows, methods), horizon_s)
}
