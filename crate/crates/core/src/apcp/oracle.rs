use std::time::Instant;

use thiserror::Error;

use super::{worst_case_flow, ApcpSolution, SolveStats, Status};
use crate::network::{path_cost, Instance, Network, PathSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    /// Refuse instances with more simple s-t paths than this.
    pub max_paths: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_paths: 60 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance has more than {cap} simple paths; the exhaustive oracle refuses it")]
    TooManyPaths { cap: usize },
}

/// All simple `s -> t` paths in lexicographic arc-index order, or `None` as
/// soon as more than `cap` exist.
pub fn enumerate_simple_paths(network: &Network, s: usize, t: usize, cap: usize) -> Option<Vec<Vec<usize>>> {
    fn walk(
        network: &Network,
        v: usize,
        t: usize,
        on_path: &mut [bool],
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> bool {
        if v == t {
            out.push(path.clone());
            return out.len() <= cap;
        }
        for &a in network.out_arcs(v) {
            let w = network.arc(a).head;
            if on_path[w] {
                continue;
            }
            on_path[w] = true;
            path.push(a);
            let ok = walk(network, w, t, on_path, path, out, cap);
            path.pop();
            on_path[w] = false;
            if !ok {
                return false;
            }
        }
        true
    }
    let mut on_path = vec![false; network.node_count()];
    on_path[s] = true;
    let mut out = Vec::new();
    walk(network, s, t, &mut on_path, &mut Vec::new(), &mut out, cap).then_some(out)
}

/// Evaluates every multiset of `k` simple paths and keeps the lexicographic
/// best `(z, -cost)`; among equals, the first in path-index tuple order.
pub fn exhaustive_oracle(instance: &Instance, limits: OracleLimits) -> Result<ApcpSolution, OracleError> {
    let started = Instant::now();
    let network = &instance.network;
    let (s, t, k) = (instance.source, instance.dest, instance.k);
    let paths = enumerate_simple_paths(network, s, t, limits.max_paths)
        .ok_or(OracleError::TooManyPaths { cap: limits.max_paths })?;
    if paths.is_empty() {
        return Ok(ApcpSolution::infeasible(SolveStats {
            time_s: started.elapsed().as_secs_f64(),
            ..SolveStats::default()
        }));
    }
    let costs: Vec<i64> = paths.iter().map(|p| path_cost(network, p)).collect();

    let mut best: Option<((i64, i64), Vec<usize>)> = None;
    let mut evaluated = 0u64;
    let mut choice = vec![0usize; k];
    loop {
        evaluated += 1;
        let mut used: Vec<usize> = choice.iter().flat_map(|&p| paths[p].iter().copied()).collect();
        used.sort_unstable();
        used.dedup();
        let z = worst_case_flow(network, &used, s, t);
        let cost: i64 = choice.iter().map(|&p| costs[p]).sum();
        let key = (z, -cost);
        if best.as_ref().is_none_or(|(b, _)| key > *b) {
            best = Some((key, choice.clone()));
        }

        // Next non-decreasing index tuple.
        let Some(pos) = (0..k).rev().find(|&i| choice[i] + 1 < paths.len()) else {
            break;
        };
        let next = choice[pos] + 1;
        choice[pos..].iter_mut().for_each(|c| *c = next);
    }

    let ((z, neg_cost), choice) = best.expect("at least one multiset");
    Ok(ApcpSolution {
        pathset: PathSet::new(choice.iter().map(|&p| paths[p].clone()).collect()),
        z: Some(z),
        cost: Some(-neg_cost),
        status: Status::Optimal,
        stats: SolveStats {
            nodes: evaluated,
            cuts: 0,
            time_s: started.elapsed().as_secs_f64(),
        },
    })
}
