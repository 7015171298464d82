//! Random small instances and brute-force references shared by the test
//! targets.
#![allow(dead_code)]

use altpaths::apcp::enumerate_simple_paths;
use altpaths::flow::max_flow;
use altpaths::network::{mincap, path_cost, ArcSpec, Instance, Network};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random multigraph on `n` nodes with `m` arcs (parallel arcs allowed, no
/// self-loops).
pub fn random_network(rng: &mut ChaCha8Rng, n: usize, m: usize, cap_max: i64, cost_max: i64) -> Network {
    let specs: Vec<ArcSpec> = (0..m)
        .map(|id| {
            let tail = rng.gen_range(0..n);
            let mut head = rng.gen_range(0..n - 1);
            if head >= tail {
                head += 1;
            }
            ArcSpec {
                id: id as u32,
                tail: tail as u32,
                head: head as u32,
                cap: rng.gen_range(1..=cap_max),
                cost: rng.gen_range(1..=cost_max),
            }
        })
        .collect();
    Network::new((0..n as u32).collect(), &specs).unwrap()
}

/// Instance on 3..=`max_nodes` nodes from `seed`, source 0, destination
/// `n - 1`.
pub fn random_instance(seed: u64, max_nodes: usize, k: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=max_nodes);
    let m = rng.gen_range(n..=3 * n);
    let net = random_network(&mut rng, n, m, 12, 9);
    Instance::new(net, 0, n as u32 - 1, k, None).unwrap()
}

/// First `count` seeds from `start` whose instance is feasible and has at
/// most `cap` simple paths.
pub fn oracle_sized_instances(
    start: u64,
    count: usize,
    max_nodes: usize,
    cap: usize,
    k_of: impl Fn(u64) -> usize,
) -> Vec<(u64, Instance)> {
    let mut out = Vec::new();
    let mut seed = start;
    while out.len() < count {
        let inst = random_instance(seed, max_nodes, k_of(seed));
        if inst.is_feasible() && enumerate_simple_paths(&inst.network, inst.source, inst.dest, cap).is_some() {
            out.push((seed, inst));
        }
        seed += 1;
    }
    out
}

/// Minimum `s`-`t` cut capacity over allowed arcs by subset enumeration.
pub fn brute_min_cut(net: &Network, allowed: &[bool], s: usize, t: usize) -> i64 {
    let n = net.node_count();
    let others: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
    let mut best = i64::MAX;
    for mask in 0u64..(1 << others.len()) {
        let mut side = vec![false; n];
        side[s] = true;
        for (i, &v) in others.iter().enumerate() {
            side[v] = mask >> i & 1 == 1;
        }
        let cap: i64 = net
            .arcs()
            .iter()
            .enumerate()
            .filter(|&(a, arc)| allowed[a] && side[arc.tail] && !side[arc.head])
            .map(|(_, arc)| arc.cap)
            .sum();
        best = best.min(cap);
    }
    best
}

/// Cheapest integral flow of exactly `required` units, by enumerating every
/// flow vector. Only for tiny graphs.
pub fn brute_min_cost_flow(net: &Network, s: usize, t: usize, required: i64) -> Option<i64> {
    let m = net.arc_count();
    let mut flow = vec![0i64; m];
    let mut best: Option<i64> = None;
    fn rec(net: &Network, a: usize, flow: &mut Vec<i64>, s: usize, t: usize, required: i64, best: &mut Option<i64>) {
        if a == flow.len() {
            let mut excess = vec![0i64; net.node_count()];
            for (i, arc) in net.arcs().iter().enumerate() {
                excess[arc.tail] -= flow[i];
                excess[arc.head] += flow[i];
            }
            let ok = (0..net.node_count()).all(|v| {
                if v == s {
                    excess[v] == -required
                } else if v == t {
                    excess[v] == required
                } else {
                    excess[v] == 0
                }
            });
            if ok {
                let cost: i64 = net.arcs().iter().zip(flow.iter()).map(|(arc, f)| arc.cost * f).sum();
                if best.is_none_or(|b| cost < b) {
                    *best = Some(cost);
                }
            }
            return;
        }
        for f in 0..=net.arc(a).cap {
            flow[a] = f;
            rec(net, a + 1, flow, s, t, required, best);
        }
        flow[a] = 0;
    }
    rec(net, 0, &mut flow, s, t, required, &mut best);
    best
}

/// Max number of arc-disjoint paths (Menger): unit-capacity max-flow.
pub fn unit_max_flow(net: &Network, s: usize, t: usize) -> i64 {
    let specs: Vec<ArcSpec> = net.arc_specs().into_iter().map(|a| ArcSpec { cap: 1, ..a }).collect();
    let unit = Network::new(net.node_ids().to_vec(), &specs).unwrap();
    max_flow(&unit, &vec![true; unit.arc_count()], s, t).value
}

/// Best `(size, min bottleneck, -cost)` over all sets of at most `k`
/// pairwise arc-disjoint simple paths; `(0, 0, 0)` when none exists.
pub fn brute_rapcp(inst: &Instance, cap: usize) -> (usize, i64, i64) {
    let net = &inst.network;
    let paths = enumerate_simple_paths(net, inst.source, inst.dest, cap).expect("within cap");
    let mut best = (0usize, 0i64, 0i64);
    fn rec(
        net: &Network,
        paths: &[Vec<usize>],
        next: usize,
        used: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        k: usize,
        best: &mut (usize, i64, i64),
    ) {
        if !chosen.is_empty() {
            let bn = chosen.iter().map(|&p| mincap(net, &paths[p])).min().unwrap();
            let cost: i64 = chosen.iter().map(|&p| path_cost(net, &paths[p])).sum();
            *best = (*best).max((chosen.len(), bn, -cost));
        }
        if chosen.len() == k {
            return;
        }
        for p in next..paths.len() {
            if paths[p].iter().any(|&a| used[a]) {
                continue;
            }
            paths[p].iter().for_each(|&a| used[a] = true);
            chosen.push(p);
            rec(net, paths, p + 1, used, chosen, k, best);
            chosen.pop();
            paths[p].iter().for_each(|&a| used[a] = false);
        }
    }
    rec(
        net,
        &paths,
        0,
        &mut vec![false; net.arc_count()],
        &mut Vec::new(),
        inst.k,
        &mut best,
    );
    best
}
