//! Polynomial relaxation: pairwise arc-disjoint paths chosen to maximize
//! their number, then their minimum bottleneck capacity, then to minimize
//! their total cost.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::flow::min_cost_flow;
use crate::network::{mincap, path_cost, ArcSpec, Network, PathSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RapcpError {
    #[error("no disjoint path to replicate")]
    NothingToReplicate,
    #[error("{found} disjoint paths exceed the budget k = {k}")]
    TooManyPaths { found: usize, k: usize },
}

/// Which threshold the capacity filter uses after each round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterMode {
    /// Drop arcs with capacity `<= obj_b`, the current minimum bottleneck.
    #[default]
    Bottleneck,
    /// Drop arcs with capacity `<= obj_a * obj_b`, the product objective.
    Product,
}

impl FromStr for FilterMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bottleneck" | "obj-b" => Ok(FilterMode::Bottleneck),
            "product" | "obj-ab" | "literal" => Ok(FilterMode::Product),
            other => Err(format!(
                "unknown filter mode `{other}` (expected bottleneck or product)"
            )),
        }
    }
}

impl fmt::Display for FilterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterMode::Bottleneck => "bottleneck",
            FilterMode::Product => "product",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RapcpSolution {
    pub disjoint_paths: Vec<Vec<usize>>,
    /// Exactly `k` paths (empty when no path exists).
    pub completed: PathSet,
    pub obj_a: usize,
    pub obj_b: i64,
    pub obj_ab: i64,
    pub cost: i64,
    /// Min-cost-flow rounds performed.
    pub rounds: usize,
}

/// Maximum number of arc-disjoint `s -> t` paths (capped at `k`) at minimum
/// total cost, from one min-cost flow of value `k` on unit capacities with a
/// dummy `s -> t` arc of capacity `k`. The dummy costs one more than all
/// arcs together, so every real path is cheaper.
pub fn rapcpa2(network: &Network, s: usize, t: usize, k: usize) -> Vec<Vec<usize>> {
    rapcpa2_within(network, s, t, k, &vec![true; network.arc_count()])
}

fn rapcpa2_within(network: &Network, s: usize, t: usize, k: usize, allowed: &[bool]) -> Vec<Vec<usize>> {
    assert!(k >= 1, "path budget must be positive");
    let mut specs: Vec<ArcSpec> = network
        .arc_specs()
        .into_iter()
        .zip(allowed)
        .filter(|(_, &keep)| keep)
        .map(|(spec, _)| ArcSpec { cap: 1, ..spec })
        .collect();
    let dummy_id = network.arcs().last().map_or(0, |a| a.id + 1);
    specs.push(ArcSpec {
        id: dummy_id,
        tail: network.node_id(s),
        head: network.node_id(t),
        cap: k as i64,
        cost: network.total_cost() + 1,
    });
    let aux = Network::new(network.node_ids().to_vec(), &specs).expect("auxiliary network is valid");
    let dummy = aux.arc_count() - 1;
    let result = min_cost_flow(&aux, s, t, k as i64).expect("dummy arc carries the full demand");
    let real = k - result.flow[dummy] as usize;

    // Costs are positive, so an optimal flow has no cycles and each walk
    // along unit-flow arcs from s is a simple path.
    let mut remaining = result.flow;
    remaining[dummy] = 0;
    let mut paths = Vec::with_capacity(real);
    for _ in 0..real {
        let mut path = Vec::new();
        let mut v = s;
        while v != t {
            let a = aux
                .out_arcs(v)
                .iter()
                .copied()
                .find(|&a| remaining[a] > 0)
                .expect("flow conservation");
            remaining[a] -= 1;
            path.push(network.arc_index(aux.arc(a).id).expect("arc ids preserved"));
            v = aux.arc(a).head;
            debug_assert!(path.len() <= network.node_count(), "cycle in optimal unit flow");
        }
        paths.push(path);
    }
    paths
}

/// Repeated [`rapcpa2`] with capacity filtering: after each round, arcs at or
/// below the current threshold are removed and the round repeated; stop once
/// the number of disjoint paths would drop, returning the last set that kept
/// it.
pub fn rapcp(network: &Network, s: usize, t: usize, k: usize, mode: FilterMode) -> RapcpSolution {
    let mut allowed = vec![true; network.arc_count()];
    let mut best = rapcpa2_within(network, s, t, k, &allowed);
    let mut rounds = 1;
    let target = best.len();
    if target > 0 {
        let mut current = best.clone();
        loop {
            let obj_b = min_bottleneck(network, &current);
            let threshold = match mode {
                FilterMode::Bottleneck => obj_b,
                FilterMode::Product => current.len() as i64 * obj_b,
            };
            for (a, arc) in network.arcs().iter().enumerate() {
                if arc.cap <= threshold {
                    allowed[a] = false;
                }
            }
            current = rapcpa2_within(network, s, t, k, &allowed);
            rounds += 1;
            if current.len() < target {
                break;
            }
            best = current.clone();
        }
    }
    let obj_a = best.len();
    let obj_b = min_bottleneck(network, &best);
    let cost = best.iter().map(|p| path_cost(network, p)).sum();
    let completed = complete_to_k(network, &best, k).unwrap_or_default();
    RapcpSolution {
        obj_a,
        obj_b,
        obj_ab: obj_a as i64 * obj_b,
        cost,
        completed,
        disjoint_paths: best,
        rounds,
    }
}

fn min_bottleneck(network: &Network, paths: &[Vec<usize>]) -> i64 {
    paths.iter().map(|p| mincap(network, p)).min().unwrap_or(0)
}

/// Pads `disjoint` to exactly `k` paths with copies of its cheapest path
/// (the first one on cost ties).
pub fn complete_to_k(network: &Network, disjoint: &[Vec<usize>], k: usize) -> Result<PathSet, RapcpError> {
    if disjoint.len() > k {
        return Err(RapcpError::TooManyPaths {
            found: disjoint.len(),
            k,
        });
    }
    let cheapest = disjoint
        .iter()
        .min_by_key(|p| path_cost(network, p))
        .ok_or(RapcpError::NothingToReplicate)?;
    let mut paths = disjoint.to_vec();
    paths.resize(k, cheapest.clone());
    Ok(PathSet::new(paths))
}
