//! Exact integral flow kernels: Edmonds–Karp max-flow with min-cut
//! extraction, successive-shortest-path min-cost flow, and cost-shortest
//! paths with a deterministic tie-break.
//!
//! All arithmetic is on `i64`; no floating point is involved.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use thiserror::Error;

use crate::network::Network;

const INF: i64 = i64::MAX / 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowResult {
    pub value: i64,
    /// Flow on every arc of the network, indexed by arc index (0 on arcs
    /// outside the allowed set).
    pub flow: Vec<i64>,
    /// Allowed arcs leaving the residual-reachable set, sorted by index.
    pub min_cut: Vec<usize>,
    /// Nodes reachable from the source in the final residual graph.
    pub source_side: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostFlowResult {
    pub value: i64,
    pub flow: Vec<i64>,
    pub cost: i64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("required flow {required} exceeds the maximum flow {max_flow}")]
    Infeasible { required: i64, max_flow: i64 },
    #[error("required flow must be at least 1")]
    NonPositiveDemand,
}

/// Residual graph over a subset of the network's arcs. Edge `2i` is the
/// forward copy of the i-th selected arc and `2i + 1` its reverse.
struct Residual {
    head: Vec<usize>,
    residual: Vec<i64>,
    cost: Vec<i64>,
    arc_of: Vec<usize>,
    adj: Vec<Vec<usize>>,
}

impl Residual {
    fn new(network: &Network, arcs: impl Iterator<Item = usize>, with_cost: bool) -> Self {
        let n = network.node_count();
        let mut r = Residual {
            head: Vec::new(),
            residual: Vec::new(),
            cost: Vec::new(),
            arc_of: Vec::new(),
            adj: vec![Vec::new(); n],
        };
        for a in arcs {
            let arc = network.arc(a);
            let e = r.head.len();
            r.head.extend([arc.head, arc.tail]);
            r.residual.extend([arc.cap, 0]);
            if with_cost {
                r.cost.extend([arc.cost, -arc.cost]);
            }
            r.arc_of.push(a);
            r.adj[arc.tail].push(e);
            r.adj[arc.head].push(e + 1);
        }
        r
    }

    fn tail(&self, e: usize) -> usize {
        self.head[e ^ 1]
    }

    fn push(&mut self, e: usize, amount: i64) {
        self.residual[e] -= amount;
        self.residual[e ^ 1] += amount;
    }

    fn arc_flows(&self, network: &Network) -> Vec<i64> {
        let mut flow = vec![0; network.arc_count()];
        for (i, &a) in self.arc_of.iter().enumerate() {
            flow[a] = self.residual[2 * i + 1];
        }
        flow
    }

    fn bfs_reachable(&self, s: usize) -> (Vec<bool>, Vec<usize>) {
        let n = self.adj.len();
        let mut seen = vec![false; n];
        let mut parent = vec![usize::MAX; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.head[e];
                if !seen[v] && self.residual[e] > 0 {
                    seen[v] = true;
                    parent[v] = e;
                    queue.push_back(v);
                }
            }
        }
        (seen, parent)
    }
}

/// Maximum `s -> t` flow using only arcs with `allowed[a]` set, at their
/// original capacities.
pub fn max_flow(network: &Network, allowed: &[bool], s: usize, t: usize) -> FlowResult {
    assert_eq!(allowed.len(), network.arc_count(), "allowed mask length");
    max_flow_over(network, (0..network.arc_count()).filter(|&a| allowed[a]), s, t)
}

/// [`max_flow`] over an explicit list of arc indices.
pub fn max_flow_over(network: &Network, arcs: impl Iterator<Item = usize>, s: usize, t: usize) -> FlowResult {
    assert_ne!(s, t, "source and sink must differ");
    let mut r = Residual::new(network, arcs, false);
    let mut value = 0;
    loop {
        let (seen, parent) = r.bfs_reachable(s);
        if !seen[t] {
            let flow = r.arc_flows(network);
            let min_cut: Vec<usize> = {
                let mut cut: Vec<usize> = r
                    .arc_of
                    .iter()
                    .copied()
                    .filter(|&a| {
                        let arc = network.arc(a);
                        seen[arc.tail] && !seen[arc.head]
                    })
                    .collect();
                cut.sort_unstable();
                cut
            };
            debug_assert_eq!(
                value,
                min_cut.iter().map(|&a| network.arc(a).cap).sum::<i64>(),
                "max-flow/min-cut duality"
            );
            return FlowResult {
                value,
                flow,
                min_cut,
                source_side: seen,
            };
        }
        let mut bottleneck = INF;
        let mut v = t;
        while v != s {
            let e = parent[v];
            bottleneck = bottleneck.min(r.residual[e]);
            v = r.tail(e);
        }
        let mut v = t;
        while v != s {
            let e = parent[v];
            r.push(e, bottleneck);
            v = r.tail(e);
        }
        value += bottleneck;
    }
}

/// Minimum-cost `s -> t` flow of exactly `required` units over the whole
/// network, by successive shortest augmenting paths with node potentials.
pub fn min_cost_flow(network: &Network, s: usize, t: usize, required: i64) -> Result<CostFlowResult, FlowError> {
    assert_ne!(s, t, "source and sink must differ");
    if required < 1 {
        return Err(FlowError::NonPositiveDemand);
    }
    let n = network.node_count();
    let mut r = Residual::new(network, 0..network.arc_count(), true);
    // Costs are non-negative, so zero potentials are feasible to start.
    let mut potential = vec![0i64; n];
    let mut sent = 0;
    let mut total_cost = 0;
    while sent < required {
        let mut dist = vec![INF; n];
        let mut parent = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[s] = 0;
        heap.push(Reverse((0i64, s)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &e in &r.adj[u] {
                if r.residual[e] == 0 {
                    continue;
                }
                let v = r.head[e];
                let reduced = r.cost[e] + potential[u] - potential[v];
                debug_assert!(reduced >= 0, "negative reduced cost");
                let nd = d + reduced;
                if nd < dist[v] {
                    dist[v] = nd;
                    parent[v] = e;
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        if dist[t] == INF {
            return Err(FlowError::Infeasible {
                required,
                max_flow: sent,
            });
        }
        for v in 0..n {
            if dist[v] < INF {
                potential[v] += dist[v];
            }
        }
        let mut amount = required - sent;
        let mut v = t;
        while v != s {
            let e = parent[v];
            amount = amount.min(r.residual[e]);
            v = r.tail(e);
        }
        let mut v = t;
        while v != s {
            let e = parent[v];
            r.push(e, amount);
            total_cost += amount * r.cost[e];
            v = r.tail(e);
        }
        sent += amount;
    }
    Ok(CostFlowResult {
        value: sent,
        flow: r.arc_flows(network),
        cost: total_cost,
    })
}

/// Bellman–Ford check for a negative-cost cycle in the residual graph of
/// `flow`. A feasible flow is cost-optimal for its value iff this is false.
pub fn residual_has_negative_cycle(network: &Network, flow: &[i64]) -> bool {
    let mut edges = Vec::new();
    for (a, arc) in network.arcs().iter().enumerate() {
        if flow[a] < arc.cap {
            edges.push((arc.tail, arc.head, arc.cost));
        }
        if flow[a] > 0 {
            edges.push((arc.head, arc.tail, -arc.cost));
        }
    }
    // Virtual source at distance 0 to every node.
    let mut dist = vec![0i64; network.node_count()];
    for _ in 0..network.node_count() {
        let mut changed = false;
        for &(u, v, c) in &edges {
            if dist[u] + c < dist[v] {
                dist[v] = dist[u] + c;
                changed = true;
            }
        }
        if !changed {
            return false;
        }
    }
    true
}

/// Cost distance from every node to `t` over arcs with `allowed[a]` set
/// (`None` for unreachable nodes).
pub fn distances_to(network: &Network, t: usize, allowed: impl Fn(usize) -> bool) -> Vec<Option<i64>> {
    let n = network.node_count();
    let mut dist = vec![INF; n];
    let mut heap = BinaryHeap::new();
    dist[t] = 0;
    heap.push(Reverse((0i64, t)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &a in network.in_arcs(v) {
            if !allowed(a) {
                continue;
            }
            let arc = network.arc(a);
            let nd = d + arc.cost;
            if nd < dist[arc.tail] {
                dist[arc.tail] = nd;
                heap.push(Reverse((nd, arc.tail)));
            }
        }
    }
    dist.into_iter().map(|d| (d < INF).then_some(d)).collect()
}

/// Minimum-cost `s -> t` path; among optimal paths the one whose arc-index
/// sequence is lexicographically smallest. Requires positive costs.
pub fn shortest_path(network: &Network, s: usize, t: usize) -> Option<Vec<usize>> {
    shortest_path_within(network, s, t, |_| true)
}

/// [`shortest_path`] restricted to arcs accepted by `allowed`.
pub fn shortest_path_within(
    network: &Network,
    s: usize,
    t: usize,
    allowed: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let dist = distances_to(network, t, &allowed);
    let mut remaining = dist[s]?;
    let mut path = Vec::new();
    let mut v = s;
    // Following tight arcs strictly decreases the distance to t (costs are
    // positive), so the walk is a simple path.
    while v != t {
        let next = network.out_arcs(v).iter().copied().find(|&a| {
            let arc = network.arc(a);
            allowed(a) && dist[arc.head].is_some_and(|d| d + arc.cost == remaining)
        })?;
        let arc = network.arc(next);
        remaining -= arc.cost;
        path.push(next);
        v = arc.head;
    }
    Some(path)
}
