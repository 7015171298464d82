//! Branch-and-Benders-cut search for the exact lexicographic optimum.
//!
//! The master problem picks `k` simple paths. It is explored depth-first,
//! one path at a time and one arc at a time, so path structure (flow balance,
//! degree bounds, no sub-tours) holds by construction. Paths are generated in
//! non-decreasing lexicographic order of their arc-index sequences, which
//! visits every multiset exactly once.
//!
//! Every complete candidate is handed to the sub-problem family: one
//! max-flow per failed arc. If the master's estimate of `z` exceeds the true
//! worst case, the min-cut of the worst failure is added to a global cut
//! pool; that single cut dominates the cuts of all other failures at the
//! candidate. Partial candidates are pruned with upper bounds on `z` derived
//! from the pooled cuts (plus the source and sink stars, which every path
//! crosses exactly once) and with lower bounds on cost.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::time::{Duration, Instant};

use super::split_flow::SplitFlow;
use super::{scan_failures, ApcpSolution, BendersCut, SolveStats, Status};
use crate::flow::{distances_to, shortest_path};
use crate::network::{Instance, Network, PathSet};
use crate::rapcp::{rapcp, FilterMode};

#[derive(Debug, Clone, PartialEq)]
pub struct BendersParams {
    pub time_limit: Duration,
    /// Seed the incumbent with the completed relaxation solution.
    pub warm_start: bool,
    /// Stop after this many search nodes. Unlike the time limit, the result
    /// then does not depend on machine speed.
    pub node_limit: Option<u64>,
}

impl Default for BendersParams {
    fn default() -> Self {
        BendersParams {
            time_limit: Duration::from_secs(200),
            warm_start: true,
            node_limit: None,
        }
    }
}

pub fn benders_solve(instance: &Instance, params: &BendersParams) -> ApcpSolution {
    BendersSolver::new(instance, params.clone()).solve()
}

/// A crossing arc of a cut, laid out for the bound's hot loop.
#[derive(Clone, Copy)]
struct CutArc {
    cap: i64,
    arc: u32,
    tail: u32,
    head: u32,
}

/// Usable crossing arcs, sorted by capacity, largest first.
fn cut_arcs(net: &Network, arcs: impl Iterator<Item = usize>) -> Vec<CutArc> {
    let mut out: Vec<CutArc> = arcs
        .map(|a| {
            let arc = net.arc(a);
            CutArc {
                cap: arc.cap,
                arc: a as u32,
                tail: arc.tail as u32,
                head: arc.head as u32,
            }
        })
        .collect();
    out.sort_by_key(|e| (Reverse(e.cap), e.arc));
    out
}

struct PooledCut {
    cut: BendersCut,
    arcs: Vec<CutArc>,
}

struct Incumbent {
    z: i64,
    cost: i64,
    paths: Vec<Vec<usize>>,
}

#[derive(Clone, Copy)]
enum Star {
    Source,
    Sink,
}

pub struct BendersSolver<'a> {
    #[cfg_attr(not(debug_assertions), allow(dead_code))]
    instance: &'a Instance,
    net: &'a Network,
    s: usize,
    t: usize,
    k: usize,
    params: BendersParams,

    usable: Vec<bool>,
    dist_to_t: Vec<Option<i64>>,
    dist_from_s: Vec<i64>,
    children: Vec<Vec<usize>>,
    out_by_cap: Vec<Vec<usize>>,
    in_by_cap: Vec<Vec<usize>>,
    source_star: Vec<CutArc>,
    sink_star: Vec<CutArc>,
    pool: Vec<PooledCut>,
    pool_keys: HashSet<Vec<bool>>,

    // Search state.
    paths: Vec<Vec<usize>>,
    cur: Vec<usize>,
    cur_node: usize,
    on_path: Vec<bool>,
    use_count: Vec<u32>,
    cost: i64,
    /// The current path equals a prefix of the previous one.
    tight: bool,

    // Scratch buffers for the bounds.
    leave_count: Vec<u32>,
    enter_count: Vec<u32>,
    leave_allow: Vec<u32>,
    enter_allow: Vec<u32>,
    completion: Vec<i64>,
    out_bound: Vec<i64>,
    in_bound: Vec<i64>,
    split: SplitFlow,
    split_edge: Vec<usize>,
    arc_edge: Vec<usize>,

    incumbent: Option<Incumbent>,
    nodes: u64,
    deadline: Instant,
    timed_out: bool,
}

impl<'a> BendersSolver<'a> {
    pub fn new(instance: &'a Instance, params: BendersParams) -> Self {
        let net = &instance.network;
        let (s, t) = (instance.source, instance.dest);
        let n = net.node_count();

        // Arcs that can lie on a simple s-t path: never into s or out of t,
        // tail reachable from s avoiding t, head reaching t avoiding s.
        let fwd = net.reachable(s, |a| net.arc(a).tail != t);
        let bwd = reverse_reachable(net, t, s);
        let usable: Vec<bool> = net
            .arcs()
            .iter()
            .map(|a| a.tail != t && a.head != s && fwd[a.tail] && bwd[a.head])
            .collect();
        let dist_to_t = distances_to(net, t, |a| usable[a]);
        let usable: Vec<bool> = (0..net.arc_count())
            .map(|a| usable[a] && dist_to_t[net.arc(a).head].is_some())
            .collect();
        let dist_from_s = dijkstra(net, &usable, s);

        let mut children = vec![Vec::new(); n];
        for (v, list) in children.iter_mut().enumerate() {
            list.extend(net.out_arcs(v).iter().copied().filter(|&a| usable[a]));
            // Cheapest completion first, then smallest index.
            list.sort_by_key(|&a| {
                let arc = net.arc(a);
                (arc.cost + dist_to_t[arc.head].unwrap_or(0), a)
            });
        }
        let by_cap = |arcs: &[usize]| {
            let mut arcs: Vec<usize> = arcs.iter().copied().filter(|&a| usable[a]).collect();
            arcs.sort_by_key(|&a| (Reverse(net.arc(a).cap), a));
            arcs
        };
        let out_by_cap: Vec<Vec<usize>> = (0..n).map(|v| by_cap(net.out_arcs(v))).collect();
        let in_by_cap: Vec<Vec<usize>> = (0..n).map(|v| by_cap(net.in_arcs(v))).collect();

        BendersSolver {
            instance,
            net,
            s,
            t,
            k: instance.k,
            source_star: cut_arcs(net, out_by_cap[s].iter().copied()),
            sink_star: cut_arcs(net, in_by_cap[t].iter().copied()),
            usable,
            dist_to_t,
            dist_from_s,
            children,
            out_by_cap,
            in_by_cap,
            pool: Vec::new(),
            pool_keys: HashSet::new(),
            paths: Vec::new(),
            cur: Vec::new(),
            cur_node: s,
            on_path: vec![false; n],
            use_count: vec![0; net.arc_count()],
            cost: 0,
            tight: false,
            leave_count: vec![0; n],
            enter_count: vec![0; n],
            leave_allow: vec![0; n],
            enter_allow: vec![0; n],
            completion: vec![i64::MAX; n],
            out_bound: vec![0; n],
            in_bound: vec![0; n],
            split: SplitFlow::default(),
            split_edge: vec![0; n],
            arc_edge: vec![usize::MAX; net.arc_count()],
            incumbent: None,
            nodes: 0,
            deadline: Instant::now() + params.time_limit,
            timed_out: false,
            params,
        }
    }

    /// Cuts generated so far.
    pub fn cuts(&self) -> impl Iterator<Item = &BendersCut> {
        self.pool.iter().map(|p| &p.cut)
    }

    pub fn solve(&mut self) -> ApcpSolution {
        let started = Instant::now();
        self.deadline = started + self.params.time_limit;
        let Some(shortest_cost) = self.dist_to_t[self.s] else {
            return ApcpSolution::infeasible(SolveStats {
                time_s: started.elapsed().as_secs_f64(),
                ..SolveStats::default()
            });
        };

        let shortest = shortest_path(self.net, self.s, self.t).expect("t is reachable");
        self.incumbent = Some(Incumbent {
            z: 0,
            cost: shortest_cost * self.k as i64,
            paths: vec![shortest; self.k],
        });
        if self.params.warm_start {
            let relaxed = rapcp(self.net, self.s, self.t, self.k, FilterMode::Bottleneck);
            if !relaxed.completed.is_empty() {
                self.offer(relaxed.completed.paths);
            }
        }

        self.cur_node = self.s;
        self.on_path[self.s] = true;
        self.dfs();

        let inc = self.incumbent.take().expect("incumbent is always set");
        ApcpSolution {
            pathset: PathSet::new(inc.paths),
            z: Some(inc.z),
            cost: Some(inc.cost),
            status: if self.timed_out {
                Status::TimeLimitIncumbent
            } else {
                Status::Optimal
            },
            stats: SolveStats {
                nodes: self.nodes,
                cuts: self.pool.len(),
                time_s: started.elapsed().as_secs_f64(),
            },
        }
    }

    /// Evaluates an externally built path set and keeps it if it improves
    /// the incumbent.
    fn offer(&mut self, paths: Vec<Vec<usize>>) {
        let ps = PathSet::new(paths);
        let z = scan_failures(self.net, &ps.used_arcs(), self.s, self.t).z;
        let cost = ps.total_cost(self.net);
        if self.improves(z, cost) {
            self.incumbent = Some(Incumbent {
                z,
                cost,
                paths: ps.paths,
            });
        }
    }

    fn improves(&self, z: i64, cost: i64) -> bool {
        self.incumbent
            .as_ref()
            .is_none_or(|inc| (z, -cost) > (inc.z, -inc.cost))
    }

    fn dfs(&mut self) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if self.params.node_limit.is_some_and(|l| self.nodes > l)
            || (self.nodes.is_multiple_of(256) && Instant::now() >= self.deadline)
        {
            self.timed_out = true;
            return;
        }

        if self.cur_node == self.t {
            let finished = std::mem::take(&mut self.cur);
            self.paths.push(finished);
            if self.paths.len() == self.k {
                self.evaluate_candidate();
            } else {
                let saved_on_path = std::mem::replace(&mut self.on_path, vec![false; self.net.node_count()]);
                let saved_tight = self.tight;
                self.on_path[self.s] = true;
                self.cur_node = self.s;
                self.tight = true;
                self.dfs();
                self.on_path = saved_on_path;
                self.tight = saved_tight;
                self.cur_node = self.t;
            }
            self.cur = self.paths.pop().expect("just pushed");
            return;
        }

        if self.prune() {
            return;
        }

        let v = self.cur_node;
        let pos = self.cur.len();
        let floor = if self.tight {
            self.paths.last().map_or(0, |p| p[pos])
        } else {
            0
        };
        for i in 0..self.children[v].len() {
            let a = self.children[v][i];
            let arc = *self.net.arc(a);
            if self.on_path[arc.head] || (self.tight && a < floor) {
                continue;
            }
            let was_tight = self.tight;
            self.tight = was_tight && a == floor;
            self.cur.push(a);
            self.on_path[arc.head] = true;
            self.use_count[a] += 1;
            self.cost += arc.cost;
            self.cur_node = arc.head;

            self.dfs();

            self.cur_node = v;
            self.cost -= arc.cost;
            self.use_count[a] -= 1;
            self.on_path[arc.head] = false;
            self.cur.pop();
            self.tight = was_tight;
            if self.timed_out {
                return;
            }
        }
    }

    fn evaluate_candidate(&mut self) {
        let used: Vec<usize> = (0..self.net.arc_count()).filter(|&a| self.use_count[a] > 0).collect();
        let failure = scan_failures(self.net, &used, self.s, self.t);
        let z = failure.z;

        #[cfg(debug_assertions)]
        {
            let ps = PathSet::new(self.paths.clone());
            debug_assert!(super::compact_check(self.instance, &ps).is_empty());
            let mask = ps.used_mask(self.net);
            for pooled in &self.pool {
                debug_assert!(
                    !pooled.cut.is_violated(self.net, &mask, z),
                    "pooled cut cut off a feasible point"
                );
            }
        }

        // Master estimate at this integer point: every cut evaluated on the
        // fixed arcs alone.
        let estimate = [self.source_star.as_slice(), self.sink_star.as_slice()]
            .into_iter()
            .chain(self.pool.iter().map(|p| p.arcs.as_slice()))
            .map(|arcs| self.fixed_bound(arcs))
            .min()
            .unwrap_or(i64::MAX);
        if estimate > z {
            let cut = failure.cut(self.net);
            if self.pool_keys.insert(cut.source_side.clone()) {
                let arcs = cut_arcs(
                    self.net,
                    (0..self.net.arc_count()).filter(|&a| {
                        let arc = self.net.arc(a);
                        self.usable[a] && cut.source_side[arc.tail] && !cut.source_side[arc.head]
                    }),
                );
                self.pool.push(PooledCut { cut, arcs });
            }
        }

        if self.improves(z, self.cost) {
            self.incumbent = Some(Incumbent {
                z,
                cost: self.cost,
                paths: self.paths.clone(),
            });
        }
    }

    /// Capacity of the fixed arcs in a cut minus the largest of them: failing
    /// that largest arc leaves at most this much across the cut.
    fn fixed_bound(&self, arcs: &[CutArc]) -> i64 {
        let (sum, largest) = arcs
            .iter()
            .filter(|e| self.use_count[e.arc as usize] > 0)
            .map(|e| e.cap)
            .fold((0, 0), |(sum, largest), cap| (sum + cap, largest.max(cap)));
        sum - largest
    }

    /// Whether no completion of the current partial solution can beat the
    /// incumbent.
    fn prune(&mut self) -> bool {
        let Some(inc) = self.incumbent.as_ref() else {
            return false;
        };
        let (inc_z, inc_cost) = (inc.z, inc.cost);
        let remaining = (self.k - self.paths.len() - 1) as u32;
        self.compute_completion();
        let completion = self.completion[self.t];
        if completion == i64::MAX {
            // The current path cannot reach t without revisiting a node.
            return true;
        }
        let cost_lb = self.cost + completion + remaining as i64 * self.dist_from_s[self.t];
        let lex_min = match (self.cur.first(), self.paths.last()) {
            (Some(&first), _) => first,
            (None, Some(prev)) if self.tight => prev[0],
            _ => 0,
        };

        let z_ub = self.cut_bound(remaining, lex_min, inc_z - 1);
        if z_ub < inc_z {
            return true;
        }
        let last_path = remaining == 0;
        let cannot_exceed = z_ub <= inc_z || (last_path && self.flow_bound_at_most(lex_min, inc_z));
        if !cannot_exceed {
            return false;
        }
        // Only ties on z remain possible; they must be strictly cheaper.
        if cost_lb >= inc_cost {
            return true;
        }
        let star_cost = [Star::Source, Star::Sink]
            .into_iter()
            .map(|star| self.star_cost_bound(star, remaining, lex_min, inc_z))
            .try_fold(0, |acc, lb| lb.map(|lb| acc.max(lb)));
        match star_cost {
            None => true,
            Some(extra) if self.cost + extra >= inc_cost => true,
            Some(_) => last_path && self.flow_bound_at_most(lex_min, inc_z - 1),
        }
    }

    /// Distances from the current node avoiding the current path's other
    /// nodes, into `self.completion`.
    fn compute_completion(&mut self) {
        let net = self.net;
        self.completion.fill(i64::MAX);
        self.completion[self.cur_node] = 0;
        let mut heap = BinaryHeap::from([(Reverse(0), self.cur_node)]);
        while let Some((Reverse(d), v)) = heap.pop() {
            if d > self.completion[v] || v == self.t {
                continue;
            }
            for &a in &self.children[v] {
                let arc = net.arc(a);
                let nd = d + arc.cost;
                if !self.on_path[arc.head] && nd < self.completion[arc.head] {
                    self.completion[arc.head] = nd;
                    heap.push((Reverse(nd), arc.head));
                }
            }
        }
    }

    /// Smallest upper bound on `z` over the stars and the pooled cuts,
    /// returning as soon as one is at most `stop`.
    fn cut_bound(&mut self, remaining: u32, lex_min: usize, stop: i64) -> i64 {
        for v in 0..self.net.node_count() {
            let leave = v == self.cur_node || !self.on_path[v];
            self.leave_allow[v] = remaining + leave as u32;
            self.enter_allow[v] = remaining + !self.on_path[v] as u32;
        }
        let mut best = i64::MAX;
        for star in [Star::Source, Star::Sink] {
            let arcs = std::mem::take(self.star_arcs(star));
            best = best.min(self.allowance_bound(&arcs, lex_min));
            *self.star_arcs(star) = arcs;
            if best <= stop {
                return best;
            }
        }
        for i in 0..self.pool.len() {
            let arcs = std::mem::take(&mut self.pool[i].arcs);
            let bound = self.allowance_bound(&arcs, lex_min);
            self.pool[i].arcs = arcs;
            if bound < best {
                best = bound;
                if bound <= stop + 1 {
                    // Let decisive cuts drift to the front.
                    self.pool.swap(i, i / 2);
                }
                if bound <= stop {
                    return best;
                }
            }
        }
        best
    }

    fn star_arcs(&mut self, star: Star) -> &mut Vec<CutArc> {
        match star {
            Star::Source => &mut self.source_star,
            Star::Sink => &mut self.sink_star,
        }
    }

    /// Upper bound on `z` from one cut: the fixed crossing arcs plus the
    /// best arcs the unfinished paths could still add, minus the largest
    /// arc (which may fail). Each path leaves every node at most once and
    /// enters every node at most once, giving two per-node allowances
    /// (`leave_allow`, `enter_allow`); the smaller resulting bound is
    /// returned.
    fn allowance_bound(&mut self, arcs: &[CutArc], lex_min: usize) -> i64 {
        let (mut leave_sum, mut leave_max) = (0, 0);
        let (mut enter_sum, mut enter_max) = (0, 0);
        for e in arcs {
            if self.use_count[e.arc as usize] > 0 {
                leave_sum += e.cap;
                enter_sum += e.cap;
                leave_max = leave_max.max(e.cap);
                enter_max = enter_max.max(e.cap);
                continue;
            }
            if e.tail as usize == self.s && (e.arc as usize) < lex_min {
                continue;
            }
            let (tail, head) = (e.tail as usize, e.head as usize);
            if self.leave_count[tail] < self.leave_allow[tail] {
                self.leave_count[tail] += 1;
                leave_sum += e.cap;
                leave_max = leave_max.max(e.cap);
            }
            if self.enter_count[head] < self.enter_allow[head] {
                self.enter_count[head] += 1;
                enter_sum += e.cap;
                enter_max = enter_max.max(e.cap);
            }
        }
        self.leave_count.fill(0);
        self.enter_count.fill(0);
        (leave_sum - leave_max).min(enter_sum - enter_max)
    }

    /// Lower bound on the cost the unfinished paths still add, given that
    /// the final union keeps at least `target` across the star after any
    /// single failure. Every unfinished path picks one star arc and pays at
    /// least the cheapest route through it. `None` if no choice of star arcs
    /// reaches `target`.
    fn star_cost_bound(&self, star: Star, remaining: u32, lex_min: usize, target: i64) -> Option<i64> {
        let net = self.net;
        let star_arcs: Vec<usize> = match star {
            Star::Source => &self.source_star,
            Star::Sink => &self.sink_star,
        }
        .iter()
        .map(|e| e.arc as usize)
        .collect();
        let through_source = |a: usize| {
            let arc = net.arc(a);
            (a >= lex_min).then(|| arc.cost + self.dist_to_t[arc.head].expect("usable arc"))
        };
        let sorted = |mut options: Vec<(i64, usize)>| {
            options.sort_unstable();
            options
        };

        // The current path's choice, or its fixed remaining cost when it has
        // already crossed the star.
        let (current, fixed_extra) = match star {
            Star::Source if self.cur.is_empty() => (
                Some(sorted(
                    star_arcs
                        .iter()
                        .filter_map(|&a| through_source(a).map(|c| (c, a)))
                        .collect(),
                )),
                0,
            ),
            Star::Source => (None, self.completion[self.t]),
            Star::Sink => (
                Some(sorted(
                    star_arcs
                        .iter()
                        .filter_map(|&a| {
                            let d = self.completion[net.arc(a).tail];
                            (d != i64::MAX).then(|| (d + net.arc(a).cost, a))
                        })
                        .collect(),
                )),
                0,
            ),
        };
        let future = sorted(match star {
            Star::Source => star_arcs
                .iter()
                .filter_map(|&a| through_source(a).map(|c| (c, a)))
                .collect(),
            Star::Sink => star_arcs
                .iter()
                .map(|&a| (self.dist_from_s[net.arc(a).tail].saturating_add(net.arc(a).cost), a))
                .collect(),
        });

        let mut search = StarChoice {
            net,
            target,
            future: &future,
            chosen: star_arcs.iter().copied().filter(|&a| self.use_count[a] > 0).collect(),
            best: i64::MAX,
        };
        match current {
            Some(options) => {
                let cheapest_future = future.first().map_or(0, |f| f.0);
                for (c, a) in options {
                    if c + remaining as i64 * cheapest_future >= search.best {
                        break;
                    }
                    search.chosen.push(a);
                    search.pick_future(remaining, 0, c);
                    search.chosen.pop();
                }
            }
            None => search.pick_future(remaining, 0, 0),
        }
        (search.best != i64::MAX).then_some(search.best + fixed_extra)
    }

    /// Relaxed max-flow bound for the last path: is the minimum over arcs
    /// `a` of the max-flow avoiding `a` at most `threshold`? Every arc the
    /// path can still take is present; a node passes at most its fixed arcs
    /// plus the largest arc the path could add on each side.
    fn flow_bound_at_most(&mut self, lex_min: usize, threshold: i64) -> bool {
        let net = self.net;
        let n = net.node_count();
        let (s, t) = (self.s, self.t);
        let can_leave = |u: usize, me: &Self| u == me.cur_node || !me.on_path[u];
        let extra = |a: usize, me: &Self| {
            let arc = net.arc(a);
            me.use_count[a] == 0 && can_leave(arc.tail, me) && !me.on_path[arc.head] && !(arc.tail == s && a < lex_min)
        };

        for v in 0..n {
            let mut out_sum = 0;
            let mut taken = !can_leave(v, self);
            for &a in &self.out_by_cap[v] {
                if self.use_count[a] > 0 {
                    out_sum += net.arc(a).cap;
                } else if !taken && extra(a, self) {
                    out_sum += net.arc(a).cap;
                    taken = true;
                }
            }
            let mut in_sum = 0;
            let mut taken = self.on_path[v];
            for &a in &self.in_by_cap[v] {
                if self.use_count[a] > 0 {
                    in_sum += net.arc(a).cap;
                } else if !taken && extra(a, self) {
                    in_sum += net.arc(a).cap;
                    taken = true;
                }
            }
            self.out_bound[v] = out_sum;
            self.in_bound[v] = in_sum;
        }
        let split_cap = |v: usize, out: i64, inn: i64| {
            if v == s {
                out
            } else if v == t {
                inn
            } else {
                out.min(inn)
            }
        };

        self.split.clear(2 * n);
        for v in 0..n {
            self.split_edge[v] =
                self.split
                    .add_edge(2 * v, 2 * v + 1, split_cap(v, self.out_bound[v], self.in_bound[v]));
        }
        for a in 0..net.arc_count() {
            self.arc_edge[a] = usize::MAX;
            if self.usable[a] && (self.use_count[a] > 0 || extra(a, self)) {
                let arc = net.arc(a);
                self.arc_edge[a] = self.split.add_edge(2 * arc.tail + 1, 2 * arc.head, arc.cap);
            }
        }
        let g = &mut self.split;
        let (source, sink) = (2 * s, 2 * t + 1);
        if g.max_flow(source, sink, i64::MAX) <= threshold {
            return true;
        }
        // The final union is a subset of the relaxed graph and the worst-case
        // flow only grows with the arc set, so failing any arc of the relaxed
        // graph (not only a fixed one) still bounds it. Arcs without flow can
        // be failed for free.
        let mut carrying: Vec<(i64, usize)> = (0..net.arc_count())
            .filter(|&a| self.arc_edge[a] != usize::MAX)
            .map(|a| (g.flow(self.arc_edge[a]), a))
            .filter(|&(f, _)| f > 0)
            .collect();
        carrying.sort_by_key(|&(f, a)| (Reverse(f), a));
        for (_, failed) in carrying {
            let arc = net.arc(failed);
            let (tail_edge, head_edge, arc_edge) = (
                self.split_edge[arc.tail],
                self.split_edge[arc.head],
                self.arc_edge[failed],
            );
            let saved = (g.cap(tail_edge), g.cap(head_edge));
            g.set_cap(arc_edge, 0);
            if self.use_count[failed] > 0 {
                g.set_cap(
                    tail_edge,
                    split_cap(arc.tail, self.out_bound[arc.tail] - arc.cap, self.in_bound[arc.tail]),
                );
                g.set_cap(
                    head_edge,
                    split_cap(arc.head, self.out_bound[arc.head], self.in_bound[arc.head] - arc.cap),
                );
            }
            let value = g.max_flow(source, sink, threshold);
            g.set_cap(arc_edge, arc.cap);
            g.set_cap(tail_edge, saved.0);
            g.set_cap(head_edge, saved.1);
            if value <= threshold {
                return true;
            }
        }
        false
    }
}

/// Branch-and-bound over the star arcs of the future paths.
struct StarChoice<'n> {
    net: &'n Network,
    target: i64,
    /// `(least path cost through the arc, arc)`, cheapest first.
    future: &'n [(i64, usize)],
    chosen: Vec<usize>,
    best: i64,
}

impl StarChoice<'_> {
    fn pick_future(&mut self, left: u32, from: usize, acc: i64) {
        if left == 0 {
            if self.survives() {
                self.best = self.best.min(acc);
            }
            return;
        }
        for i in from..self.future.len() {
            let (c, a) = self.future[i];
            // Options are sorted, so every later completion is dearer.
            if acc.saturating_add((left as i64).saturating_mul(c)) >= self.best {
                break;
            }
            self.chosen.push(a);
            self.pick_future(left - 1, i, acc + c);
            self.chosen.pop();
        }
    }

    fn survives(&self) -> bool {
        let mut arcs = self.chosen.clone();
        arcs.sort_unstable();
        arcs.dedup();
        let (sum, largest) = arcs
            .iter()
            .map(|&a| self.net.arc(a).cap)
            .fold((0, 0), |(sum, largest), cap| (sum + cap, largest.max(cap)));
        sum - largest >= self.target
    }
}

fn dijkstra(net: &Network, usable: &[bool], from: usize) -> Vec<i64> {
    let mut dist = vec![i64::MAX; net.node_count()];
    dist[from] = 0;
    let mut heap = BinaryHeap::from([(Reverse(0), from)]);
    while let Some((Reverse(d), v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &a in net.out_arcs(v) {
            let arc = net.arc(a);
            let nd = d + arc.cost;
            if usable[a] && nd < dist[arc.head] {
                dist[arc.head] = nd;
                heap.push((Reverse(nd), arc.head));
            }
        }
    }
    dist
}

fn reverse_reachable(net: &Network, to: usize, avoid: usize) -> Vec<bool> {
    let mut seen = vec![false; net.node_count()];
    seen[to] = true;
    let mut stack = vec![to];
    while let Some(v) = stack.pop() {
        for &a in net.in_arcs(v) {
            let u = net.arc(a).tail;
            if !seen[u] {
                seen[u] = true;
                if u != avoid {
                    stack.push(u);
                }
            }
        }
    }
    seen
}
