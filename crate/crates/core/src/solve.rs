//! One entry point for every solution method, with a uniform outcome.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::apcp::{
    benders_solve, evaluate_solution, exhaustive_oracle, BendersParams, OracleError, OracleLimits, SolveStats, Status,
};
use crate::io::SolutionFile;
use crate::network::{mincap, Instance, PathSet};
use crate::rapcp::{complete_to_k, rapcp, rapcpa2, FilterMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Benders,
    Rapcp,
    Rapcpa2,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Benders, Method::Rapcp, Method::Rapcpa2, Method::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Method::Benders => "benders",
            Method::Rapcp => "rapcp",
            Method::Rapcpa2 => "rapcpa2",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}` (expected benders, rapcp, rapcpa2 or oracle)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub time_limit: Duration,
    pub node_limit: Option<u64>,
    pub warm_start: bool,
    pub oracle_cap: usize,
    pub filter: FilterMode,
}

impl Default for SolveOptions {
    fn default() -> Self {
        let benders = BendersParams::default();
        SolveOptions {
            time_limit: benders.time_limit,
            node_limit: benders.node_limit,
            warm_start: benders.warm_start,
            oracle_cap: OracleLimits::default().max_paths,
            filter: FilterMode::default(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Refused(#[from] OracleError),
}

/// Result of any method. `z` is the worst-case flow of the returned paths,
/// recomputed from scratch; `obj_a`/`obj_b` are set by the relaxations only.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub method: Method,
    pub pathset: PathSet,
    pub z: Option<i64>,
    pub cost: Option<i64>,
    pub status: Status,
    pub stats: SolveStats,
    pub obj_a: Option<usize>,
    pub obj_b: Option<i64>,
}

impl Outcome {
    pub fn obj_ab(&self) -> Option<i64> {
        Some(self.obj_a? as i64 * self.obj_b?)
    }

    pub fn to_file(&self, instance: &Instance) -> SolutionFile {
        SolutionFile {
            paths: self.pathset.to_arc_ids(&instance.network),
            z: self.z,
            cost: self.cost,
            status: self.status,
            stats: self.stats.clone(),
            obj_a: self.obj_a,
            obj_b: self.obj_b,
        }
    }
}

pub fn solve(instance: &Instance, method: Method, options: &SolveOptions) -> Result<Outcome, SolveError> {
    let started = Instant::now();
    let (net, s, t, k) = (&instance.network, instance.source, instance.dest, instance.k);
    let mut outcome = match method {
        Method::Benders => {
            let params = BendersParams {
                time_limit: options.time_limit,
                warm_start: options.warm_start,
                node_limit: options.node_limit,
            };
            from_apcp(method, benders_solve(instance, &params))
        }
        Method::Oracle => {
            let limits = OracleLimits {
                max_paths: options.oracle_cap,
            };
            from_apcp(method, exhaustive_oracle(instance, limits)?)
        }
        Method::Rapcp => {
            let sol = rapcp(net, s, t, k, options.filter);
            relaxed(method, sol.completed, sol.obj_a, sol.obj_b, sol.rounds)
        }
        Method::Rapcpa2 => {
            let disjoint = rapcpa2(net, s, t, k);
            let obj_b = disjoint.iter().map(|p| mincap(net, p)).min().unwrap_or(0);
            let completed = complete_to_k(net, &disjoint, k).unwrap_or_default();
            relaxed(method, completed, disjoint.len(), obj_b, 1)
        }
    };
    if outcome.status != Status::Infeasible {
        let eval = evaluate_solution(instance, &outcome.pathset).expect("solvers return valid path sets");
        debug_assert!(outcome.z.is_none_or(|z| z == eval.z));
        outcome.z = Some(eval.z);
        outcome.cost = Some(eval.cost);
    }
    outcome.stats.time_s = started.elapsed().as_secs_f64();
    Ok(outcome)
}

fn from_apcp(method: Method, sol: crate::apcp::ApcpSolution) -> Outcome {
    Outcome {
        method,
        pathset: sol.pathset,
        z: sol.z,
        cost: sol.cost,
        status: sol.status,
        stats: sol.stats,
        obj_a: None,
        obj_b: None,
    }
}

fn relaxed(method: Method, completed: PathSet, obj_a: usize, obj_b: i64, rounds: usize) -> Outcome {
    Outcome {
        method,
        status: if completed.is_empty() {
            Status::Infeasible
        } else {
            Status::Optimal
        },
        pathset: completed,
        z: None,
        cost: None,
        stats: SolveStats {
            nodes: rounds as u64,
            ..SolveStats::default()
        },
        obj_a: Some(obj_a),
        obj_b: Some(obj_b),
    }
}
