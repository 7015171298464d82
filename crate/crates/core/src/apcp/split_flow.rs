//! Small reusable Dinic max-flow over an explicit edge list, used for the
//! search bounds. Buffers are kept between calls so the hot loop does not
//! allocate.

use std::collections::VecDeque;

#[derive(Debug, Default)]
pub(crate) struct SplitFlow {
    n: usize,
    head: Vec<usize>,
    cap: Vec<i64>,
    residual: Vec<i64>,
    adj: Vec<Vec<usize>>,
    level: Vec<u32>,
    next: Vec<usize>,
    queue: VecDeque<usize>,
}

impl SplitFlow {
    pub fn clear(&mut self, n: usize) {
        self.n = n;
        self.head.clear();
        self.cap.clear();
        if self.adj.len() < n {
            self.adj.resize_with(n, Vec::new);
        }
        self.adj[..n].iter_mut().for_each(Vec::clear);
    }

    /// Adds `u -> v` and returns its edge index (its reverse is `index ^ 1`).
    pub fn add_edge(&mut self, u: usize, v: usize, cap: i64) -> usize {
        let e = self.head.len();
        self.head.extend([v, u]);
        self.cap.extend([cap, 0]);
        self.adj[u].push(e);
        self.adj[v].push(e + 1);
        e
    }

    pub fn set_cap(&mut self, e: usize, cap: i64) {
        self.cap[e] = cap;
    }

    pub fn cap(&self, e: usize) -> i64 {
        self.cap[e]
    }

    /// Flow on edge `e` after the last [`SplitFlow::max_flow`].
    pub fn flow(&self, e: usize) -> i64 {
        self.residual[e ^ 1]
    }

    /// Max flow from `s` to `t`, stopping early once it exceeds `stop_above`.
    pub fn max_flow(&mut self, s: usize, t: usize, stop_above: i64) -> i64 {
        self.residual.clear();
        self.residual.extend_from_slice(&self.cap);
        self.level.resize(self.n, 0);
        self.next.resize(self.n, 0);
        let mut total = 0;
        while total <= stop_above && self.build_levels(s, t) {
            self.next[..self.n].fill(0);
            loop {
                let pushed = self.augment(s, t, i64::MAX);
                if pushed == 0 {
                    break;
                }
                total += pushed;
            }
        }
        total
    }

    fn build_levels(&mut self, s: usize, t: usize) -> bool {
        self.level[..self.n].iter_mut().for_each(|l| *l = u32::MAX);
        self.level[s] = 0;
        self.queue.clear();
        self.queue.push_back(s);
        while let Some(u) = self.queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.head[e];
                if self.residual[e] > 0 && self.level[v] == u32::MAX {
                    self.level[v] = self.level[u] + 1;
                    self.queue.push_back(v);
                }
            }
        }
        self.level[t] != u32::MAX
    }

    fn augment(&mut self, u: usize, t: usize, limit: i64) -> i64 {
        if u == t {
            return limit;
        }
        while self.next[u] < self.adj[u].len() {
            let e = self.adj[u][self.next[u]];
            let v = self.head[e];
            if self.residual[e] > 0 && self.level[v] == self.level[u] + 1 {
                let pushed = self.augment(v, t, limit.min(self.residual[e]));
                if pushed > 0 {
                    self.residual[e] -= pushed;
                    self.residual[e ^ 1] += pushed;
                    return pushed;
                }
            }
            self.next[u] += 1;
        }
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diamond_and_early_stop() {
        let mut g = SplitFlow::default();
        g.clear(4);
        g.add_edge(0, 1, 10);
        g.add_edge(0, 2, 5);
        let mid = g.add_edge(1, 2, 15);
        g.add_edge(1, 3, 5);
        g.add_edge(2, 3, 10);
        assert_eq!(g.max_flow(0, 3, i64::MAX), 15);
        assert_eq!(g.flow(mid), 5);
        g.set_cap(mid, 0);
        assert_eq!(g.max_flow(0, 3, i64::MAX), 10);
        assert!(g.max_flow(0, 3, 3) >= 4);
    }
}
