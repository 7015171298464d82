//! Quality indicators of a path set, method-vs-method gap tables and
//! performance profiles.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::apcp::{evaluate_solution, PathError, Status};
use crate::network::{Instance, PathSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpiReport {
    pub cost: i64,
    pub min_surviving_paths: usize,
    pub min_max_flow: i64,
    pub path_disjointness: usize,
    pub solve_time_s: f64,
    pub status: Status,
}

#[derive(Debug, Error)]
pub enum KpiError {
    #[error("no instance was solved by both methods")]
    EmptyIntersection,
    #[error("report lists are not aligned ({left} vs {right} entries)")]
    Misaligned { left: usize, right: usize },
    #[error("profile horizon must be positive")]
    ZeroHorizon,
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub fn kpis(instance: &Instance, pathset: &PathSet, solve_time_s: f64, status: Status) -> Result<KpiReport, PathError> {
    let eval = evaluate_solution(instance, pathset)?;
    Ok(KpiReport {
        cost: eval.cost,
        min_surviving_paths: min_surviving_paths(pathset),
        min_max_flow: eval.z,
        path_disjointness: path_disjointness(pathset),
        solve_time_s,
        status,
    })
}

/// Fewest paths left intact by a single arc failure. Only arcs on some path
/// can lower the count, so the minimum is taken over the union.
pub fn min_surviving_paths(pathset: &PathSet) -> usize {
    let k = pathset.len();
    pathset
        .used_arcs()
        .iter()
        .map(|&a| k - pathset.paths.iter().filter(|p| p.contains(&a)).count())
        .min()
        .unwrap_or(k)
}

/// Size of the largest subset of pairwise arc-disjoint paths (exact search).
pub fn path_disjointness(pathset: &PathSet) -> usize {
    let paths = &pathset.paths;
    let k = paths.len();
    let clash: Vec<Vec<bool>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| i != j && paths[i].iter().any(|a| paths[j].contains(a)))
                .collect()
        })
        .collect();

    fn grow(clash: &[Vec<bool>], next: usize, chosen: &mut Vec<usize>, best: &mut usize) {
        *best = (*best).max(chosen.len());
        if chosen.len() + (clash.len() - next) <= *best {
            return;
        }
        for i in next..clash.len() {
            if chosen.iter().all(|&j| !clash[i][j]) {
                chosen.push(i);
                grow(clash, i + 1, chosen, best);
                chosen.pop();
            }
        }
    }
    let mut best = 0;
    grow(&clash, 0, &mut Vec::new(), &mut best);
    best
}

pub const KPI_NAMES: [&str; 4] = ["Cost", "Min Surviving Paths", "Min Max-Flow", "Paths disjointness"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub kpi: &'static str,
    pub avg_rapcp: f64,
    pub avg_benders: f64,
    /// `(avg_rapcp - avg_benders) / avg_rapcp * 100`; `None` when the
    /// relaxation average is zero.
    pub gap_pct: Option<f64>,
}

/// Percentage gaps between the two methods' KPI averages over
/// instance-aligned report lists.
pub fn gap_table(rapcp: &[KpiReport], benders: &[KpiReport]) -> Result<Vec<GapRow>, KpiError> {
    if rapcp.len() != benders.len() {
        return Err(KpiError::Misaligned {
            left: rapcp.len(),
            right: benders.len(),
        });
    }
    if rapcp.is_empty() {
        return Err(KpiError::EmptyIntersection);
    }
    let fields: [fn(&KpiReport) -> f64; 4] = [
        |r| r.cost as f64,
        |r| r.min_surviving_paths as f64,
        |r| r.min_max_flow as f64,
        |r| r.path_disjointness as f64,
    ];
    let avg =
        |reports: &[KpiReport], f: fn(&KpiReport) -> f64| reports.iter().map(f).sum::<f64>() / reports.len() as f64;
    Ok(KPI_NAMES
        .iter()
        .zip(fields)
        .map(|(&kpi, f)| {
            let (r, b) = (avg(rapcp, f), avg(benders, f));
            GapRow {
                kpi,
                avg_rapcp: r,
                avg_benders: b,
                gap_pct: (r != 0.0).then(|| (r - b) / r * 100.0),
            }
        })
        .collect())
}

pub fn write_gap_csv<W: Write>(rows: &[GapRow], out: W) -> Result<(), KpiError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// One method's attempts: solve time and whether it finished with a proven
/// result.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSeries {
    pub method: String,
    pub runs: Vec<(f64, bool)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub methods: Vec<String>,
    /// `(t, fraction solved within t per method)` for `t = 0, 1, .., horizon`.
    pub rows: Vec<(u64, Vec<f64>)>,
}

/// Cumulative fraction of runs solved within `t` seconds, sampled every
/// second up to `horizon_s`.
pub fn performance_profile(series: &[ProfileSeries], horizon_s: u64) -> Result<Profile, KpiError> {
    if horizon_s == 0 {
        return Err(KpiError::ZeroHorizon);
    }
    let rows = (0..=horizon_s)
        .map(|t| {
            let fracs = series
                .iter()
                .map(|s| {
                    if s.runs.is_empty() {
                        return 0.0;
                    }
                    let solved = s.runs.iter().filter(|&&(time, ok)| ok && time <= t as f64).count();
                    solved as f64 / s.runs.len() as f64
                })
                .collect();
            (t, fracs)
        })
        .collect();
    Ok(Profile {
        methods: series.iter().map(|s| s.method.clone()).collect(),
        rows,
    })
}

pub fn write_profile_csv<W: Write>(profile: &Profile, out: W) -> Result<(), KpiError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t_s".to_string()];
    header.extend(profile.methods.iter().map(|m| format!("frac_{m}")));
    w.write_record(&header)?;
    for (t, fracs) in &profile.rows {
        let mut record = vec![t.to_string()];
        record.extend(fracs.iter().map(|f| format!("{f:.6}")));
        w.write_record(&record)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
