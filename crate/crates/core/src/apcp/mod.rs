//! Exact alternative-path computation: solution evaluation, the compact-model
//! feasibility check, Benders cuts, the branch-and-Benders-cut solver and an
//! exhaustive oracle.
//!
//! The objective is lexicographic: first maximize `z`, the worst max-flow
//! over single-arc failures routable on the union of the chosen paths, then
//! minimize the summed path cost. Tuples are compared directly instead of
//! being folded into one scalar with a big-M weight.

mod benders;
mod oracle;
mod split_flow;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use benders::{benders_solve, BendersParams, BendersSolver};
pub use oracle::{enumerate_simple_paths, exhaustive_oracle, OracleError, OracleLimits};

use crate::flow::{max_flow_over, FlowResult};
use crate::network::{Instance, Network, PathSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Optimal,
    TimeLimitIncumbent,
    Infeasible,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::TimeLimitIncumbent => "time-limit-incumbent",
            Status::Infeasible => "infeasible",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Search nodes explored (oracle: multisets evaluated).
    pub nodes: u64,
    pub cuts: usize,
    pub time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApcpSolution {
    pub pathset: PathSet,
    /// `None` only when no feasible path set was found.
    pub z: Option<i64>,
    pub cost: Option<i64>,
    pub status: Status,
    pub stats: SolveStats,
}

impl ApcpSolution {
    pub fn infeasible(stats: SolveStats) -> Self {
        ApcpSolution {
            pathset: PathSet::default(),
            z: None,
            cost: None,
            status: Status::Infeasible,
            stats,
        }
    }

    /// `(z, -cost)`, the quantity maximized lexicographically.
    pub fn objective(&self) -> Option<(i64, i64)> {
        Some((self.z?, -self.cost?))
    }
}

/// A constraint of the compact path model broken by a path set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    PathCount {
        expected: usize,
        found: usize,
    },
    EmptyPath {
        path: usize,
    },
    UnknownArc {
        path: usize,
        arc: usize,
    },
    RepeatedArc {
        path: usize,
        arc: usize,
    },
    /// Out-flow minus in-flow at `node` differs from its required value.
    FlowBalance {
        path: usize,
        node: usize,
        surplus: i64,
    },
    OutDegree {
        path: usize,
        node: usize,
    },
    InDegree {
        path: usize,
        node: usize,
    },
    /// Arcs not reachable from the source within the path's own arc set.
    SubTour {
        path: usize,
        arcs: Vec<usize>,
    },
    /// The arc sequence does not chain head-to-tail from source to dest.
    NotContiguous {
        path: usize,
        position: usize,
    },
}

impl Violation {
    pub fn path(&self) -> Option<usize> {
        match *self {
            Violation::PathCount { .. } => None,
            Violation::EmptyPath { path }
            | Violation::UnknownArc { path, .. }
            | Violation::RepeatedArc { path, .. }
            | Violation::FlowBalance { path, .. }
            | Violation::OutDegree { path, .. }
            | Violation::InDegree { path, .. }
            | Violation::SubTour { path, .. }
            | Violation::NotContiguous { path, .. } => Some(path),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PathCount { expected, found } => {
                write!(f, "expected {expected} paths, found {found}")
            }
            Violation::EmptyPath { path } => write!(f, "path {path}: empty"),
            Violation::UnknownArc { path, arc } => write!(f, "path {path}: unknown arc index {arc}"),
            Violation::RepeatedArc { path, arc } => write!(f, "path {path}: arc index {arc} used twice"),
            Violation::FlowBalance { path, node, surplus } => {
                write!(
                    f,
                    "path {path}: flow balance broken at node index {node} (surplus {surplus})"
                )
            }
            Violation::OutDegree { path, node } => {
                write!(f, "path {path}: out-degree bound exceeded at node index {node}")
            }
            Violation::InDegree { path, node } => {
                write!(f, "path {path}: in-degree bound exceeded at node index {node}")
            }
            Violation::SubTour { path, arcs } => {
                write!(f, "path {path}: sub-tour on arc indices {arcs:?}")
            }
            Violation::NotContiguous { path, position } => {
                write!(f, "path {path}: arc sequence breaks at position {position}")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("invalid path set: {}", .0.first().map(ToString::to_string).unwrap_or_default())]
    Invalid(Vec<Violation>),
}

/// Checks a path set against every constraint class of the compact model:
/// per-path flow balance, per-node in/out degree bounds, and absence of
/// sub-tours (found by a depth-first search from the source over the path's
/// arc set). Returns all violations; empty means feasible.
pub fn compact_check(instance: &Instance, pathset: &PathSet) -> Vec<Violation> {
    let network = &instance.network;
    let (s, t) = (instance.source, instance.dest);
    let n = network.node_count();
    let mut violations = Vec::new();
    if pathset.len() != instance.k {
        violations.push(Violation::PathCount {
            expected: instance.k,
            found: pathset.len(),
        });
    }
    for (pi, path) in pathset.paths.iter().enumerate() {
        if path.is_empty() {
            violations.push(Violation::EmptyPath { path: pi });
            continue;
        }
        if let Some(&arc) = path.iter().find(|&&a| a >= network.arc_count()) {
            violations.push(Violation::UnknownArc { path: pi, arc });
            continue;
        }
        let mut arcs = path.clone();
        arcs.sort_unstable();
        if let Some(w) = arcs.windows(2).find(|w| w[0] == w[1]) {
            violations.push(Violation::RepeatedArc { path: pi, arc: w[0] });
        }
        arcs.dedup();

        let mut out_deg = vec![0i64; n];
        let mut in_deg = vec![0i64; n];
        for &a in &arcs {
            out_deg[network.arc(a).tail] += 1;
            in_deg[network.arc(a).head] += 1;
        }
        for v in 0..n {
            let required = if v == s {
                1
            } else if v == t {
                -1
            } else {
                0
            };
            let surplus = out_deg[v] - in_deg[v] - required;
            if surplus != 0 {
                violations.push(Violation::FlowBalance {
                    path: pi,
                    node: v,
                    surplus,
                });
            }
            if out_deg[v] > if v == t { 0 } else { 1 } {
                violations.push(Violation::OutDegree { path: pi, node: v });
            }
            if in_deg[v] > if v == s { 0 } else { 1 } {
                violations.push(Violation::InDegree { path: pi, node: v });
            }
        }

        // Depth-first search from s over this path's arcs; whatever it cannot
        // reach forms a sub-tour detached from the s-t path.
        let mut reached_node = vec![false; n];
        let mut reached_arc = vec![false; arcs.len()];
        let mut stack = vec![s];
        reached_node[s] = true;
        while let Some(u) = stack.pop() {
            for (i, &a) in arcs.iter().enumerate() {
                let arc = network.arc(a);
                if arc.tail == u && !reached_arc[i] {
                    reached_arc[i] = true;
                    if !reached_node[arc.head] {
                        reached_node[arc.head] = true;
                        stack.push(arc.head);
                    }
                }
            }
        }
        let detached: Vec<usize> = arcs
            .iter()
            .zip(&reached_arc)
            .filter(|(_, &r)| !r)
            .map(|(&a, _)| a)
            .collect();
        if !detached.is_empty() {
            violations.push(Violation::SubTour {
                path: pi,
                arcs: detached,
            });
        }

        let mut at = s;
        for (pos, &a) in path.iter().enumerate() {
            if network.arc(a).tail != at {
                violations.push(Violation::NotContiguous {
                    path: pi,
                    position: pos,
                });
                break;
            }
            at = network.arc(a).head;
        }
        if at != t
            && !violations
                .iter()
                .any(|v| matches!(v, Violation::NotContiguous { path, .. } if *path == pi))
        {
            violations.push(Violation::NotContiguous {
                path: pi,
                position: path.len(),
            });
        }
    }
    violations
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evaluation {
    pub z: i64,
    pub cost: i64,
}

/// Worst-case max-flow over single-arc failures and total cost of a path set.
///
/// Only failures of used arcs are scanned. Failing an arc outside the union
/// leaves the restricted max-flow at its no-failure value, which no failure
/// can exceed, so the minimum over all arcs is attained on a used arc. The
/// failed arc carries no flow because it is removed from the arc set.
pub fn evaluate_solution(instance: &Instance, pathset: &PathSet) -> Result<Evaluation, PathError> {
    validate(instance, pathset)?;
    let used = pathset.used_arcs();
    Ok(Evaluation {
        z: worst_case_flow(&instance.network, &used, instance.source, instance.dest),
        cost: pathset.total_cost(&instance.network),
    })
}

fn validate(instance: &Instance, pathset: &PathSet) -> Result<(), PathError> {
    let violations = compact_check(instance, pathset);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(PathError::Invalid(violations))
    }
}

/// `min` over `a` in `used` of the max-flow on `used \ {a}`, by a full scan.
pub(crate) fn worst_case_flow(network: &Network, used: &[usize], s: usize, t: usize) -> i64 {
    used.iter()
        .map(|&failed| max_flow_over(network, used.iter().copied().filter(|&a| a != failed), s, t).value)
        .min()
        .unwrap_or(0)
}

/// The failure scenario that attains `z`, with its min-cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorstFailure {
    /// Index of the failed arc; ties go to the smallest index.
    pub arc: usize,
    pub z: i64,
    pub flow: FlowResult,
}

impl WorstFailure {
    /// The Benders cut generated by this scenario, which dominates the cuts
    /// of every other failure at the same path set.
    pub fn cut(&self, network: &Network) -> BendersCut {
        BendersCut::new(network, self.arc, self.flow.source_side.clone())
    }
}

pub fn worst_failure(instance: &Instance, pathset: &PathSet) -> Result<WorstFailure, PathError> {
    validate(instance, pathset)?;
    Ok(scan_failures(
        &instance.network,
        &pathset.used_arcs(),
        instance.source,
        instance.dest,
    ))
}

/// Failure scan over a non-empty sorted arc set. An arc carrying no flow in
/// a no-failure max-flow can be failed without changing the flow value, so
/// only flow-carrying arcs need their own max-flow computation.
pub(crate) fn scan_failures(network: &Network, used: &[usize], s: usize, t: usize) -> WorstFailure {
    assert!(!used.is_empty(), "failure scan over an empty arc set");
    let without = |failed: usize| max_flow_over(network, used.iter().copied().filter(|&a| a != failed), s, t);
    let base = max_flow_over(network, used.iter().copied(), s, t);
    let mut best: Option<(usize, i64, Option<FlowResult>)> = None;
    for &a in used {
        let (value, result) = if base.flow[a] == 0 {
            (base.value, None)
        } else {
            let r = without(a);
            (r.value, Some(r))
        };
        if best.as_ref().is_none_or(|(_, v, _)| value < *v) {
            best = Some((a, value, result));
            if value == 0 {
                break;
            }
        }
    }
    let (arc, z, flow) = best.expect("non-empty arc set");
    WorstFailure {
        arc,
        z,
        flow: flow.unwrap_or_else(|| without(arc)),
    }
}

/// Optimality cut `z <= sum over cut arcs of cap(a) * y(a)`, read off the
/// min-cut of one failure scenario. `arcs` are all network arcs leaving
/// `source_side` except the failed arc; arcs not yet in the union enter with
/// `y = 0`, so the inequality stays valid for every path set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BendersCut {
    pub failed_arc: usize,
    pub source_side: Vec<bool>,
    pub arcs: Vec<usize>,
}

impl BendersCut {
    pub fn new(network: &Network, failed_arc: usize, source_side: Vec<bool>) -> Self {
        let arcs = network
            .arcs()
            .iter()
            .enumerate()
            .filter(|&(i, a)| i != failed_arc && source_side[a.tail] && !source_side[a.head])
            .map(|(i, _)| i)
            .collect();
        BendersCut {
            failed_arc,
            source_side,
            arcs,
        }
    }

    /// Right-hand side for the arc union given by `used`.
    pub fn rhs(&self, network: &Network, used: &[bool]) -> i64 {
        self.arcs
            .iter()
            .filter(|&&a| used[a])
            .map(|&a| network.arc(a).cap)
            .sum()
    }

    pub fn is_violated(&self, network: &Network, used: &[bool], z: i64) -> bool {
        z > self.rhs(network, used)
    }
}
