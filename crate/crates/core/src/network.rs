//! Network and instance data model plus the random instance generator.
//!
//! Nodes and arcs carry external integer ids (the ones that appear in JSON
//! files and solution output). Internally everything is addressed by dense
//! indices: nodes and arcs are stored sorted by id, so index order and id
//! order coincide and "smallest arc id" tie-breaks can be done on indices.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type NodeId = u32;
pub type ArcId = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("nodes[{index}]: duplicate node id {id}")]
    DuplicateNode { index: usize, id: NodeId },
    #[error("arcs[{index}] (id {id}): {reason}")]
    InvalidArc { index: usize, id: ArcId, reason: String },
    #[error("{field}: node {id} does not exist in the network")]
    UnknownNode { field: &'static str, id: NodeId },
    #[error("source and dest must differ (both are node {0})")]
    SameEndpoints(NodeId),
    #[error("k: path budget must be at least 1")]
    ZeroPathBudget,
    #[error("congested_arc: arc {0} is still present in the network")]
    CongestedArcPresent(ArcId),
    #[error(
        "density {density} gives {requested} arcs, fewer than the {tree} arcs of a bidirected spanning tree on {nodes} nodes"
    )]
    DensityBelowTree {
        density: f64,
        nodes: usize,
        requested: usize,
        tree: usize,
    },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
}

/// A directed arc with integer capacity (bandwidth) and routing cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub id: ArcId,
    pub tail: usize,
    pub head: usize,
    pub cap: i64,
    pub cost: i64,
}

/// Arc as it appears in input files: endpoints given as node ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcSpec {
    pub id: ArcId,
    pub tail: NodeId,
    pub head: NodeId,
    pub cap: i64,
    pub cost: i64,
}

#[derive(Debug, Clone)]
pub struct Network {
    node_ids: Vec<NodeId>,
    node_index: HashMap<NodeId, usize>,
    arcs: Vec<Arc>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.node_ids == other.node_ids && self.arcs == other.arcs
    }
}

impl Eq for Network {}

impl Network {
    /// Builds a network, validating every invariant. Arcs may be given in any
    /// order; errors refer to their position in `arcs`.
    pub fn new(node_ids: Vec<NodeId>, arcs: &[ArcSpec]) -> Result<Self, ModelError> {
        let mut sorted_nodes = node_ids.clone();
        sorted_nodes.sort_unstable();
        let mut node_index = HashMap::with_capacity(sorted_nodes.len());
        for (i, &id) in sorted_nodes.iter().enumerate() {
            if node_index.insert(id, i).is_some() {
                let index = node_ids.iter().rposition(|&n| n == id).unwrap_or(0);
                return Err(ModelError::DuplicateNode { index, id });
            }
        }

        let mut seen = HashSet::with_capacity(arcs.len());
        let mut order: Vec<usize> = (0..arcs.len()).collect();
        order.sort_by_key(|&i| arcs[i].id);
        let mut built = Vec::with_capacity(arcs.len());
        for i in order {
            let spec = &arcs[i];
            let bad = |reason: String| ModelError::InvalidArc {
                index: i,
                id: spec.id,
                reason,
            };
            if !seen.insert(spec.id) {
                return Err(bad("duplicate arc id".into()));
            }
            let tail = *node_index
                .get(&spec.tail)
                .ok_or_else(|| bad(format!("tail node {} does not exist", spec.tail)))?;
            let head = *node_index
                .get(&spec.head)
                .ok_or_else(|| bad(format!("head node {} does not exist", spec.head)))?;
            if tail == head {
                return Err(bad("self-loops are not allowed".into()));
            }
            if spec.cap < 1 {
                return Err(bad(format!("capacity must be at least 1 (got {})", spec.cap)));
            }
            if spec.cost < 1 {
                return Err(bad(format!("cost must be at least 1 (got {})", spec.cost)));
            }
            built.push(Arc {
                id: spec.id,
                tail,
                head,
                cap: spec.cap,
                cost: spec.cost,
            });
        }
        Ok(Self::from_sorted(sorted_nodes, node_index, built))
    }

    fn from_sorted(node_ids: Vec<NodeId>, node_index: HashMap<NodeId, usize>, arcs: Vec<Arc>) -> Self {
        let n = node_ids.len();
        let mut out_arcs = vec![Vec::new(); n];
        let mut in_arcs = vec![Vec::new(); n];
        for (i, a) in arcs.iter().enumerate() {
            out_arcs[a.tail].push(i);
            in_arcs[a.head].push(i);
        }
        Network {
            node_ids,
            node_index,
            arcs,
            out_arcs,
            in_arcs,
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.node_ids
    }

    pub fn node_id(&self, index: usize) -> NodeId {
        self.node_ids[index]
    }

    pub fn node_index(&self, id: NodeId) -> Option<usize> {
        self.node_index.get(&id).copied()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, index: usize) -> &Arc {
        &self.arcs[index]
    }

    pub fn arc_index(&self, id: ArcId) -> Option<usize> {
        self.arcs.binary_search_by_key(&id, |a| a.id).ok()
    }

    /// Indices of the arcs leaving `v`, in id order.
    pub fn out_arcs(&self, v: usize) -> &[usize] {
        &self.out_arcs[v]
    }

    /// Indices of the arcs entering `v`, in id order.
    pub fn in_arcs(&self, v: usize) -> &[usize] {
        &self.in_arcs[v]
    }

    pub fn total_cost(&self) -> i64 {
        self.arcs.iter().map(|a| a.cost).sum()
    }

    pub fn arc_specs(&self) -> Vec<ArcSpec> {
        self.arcs
            .iter()
            .map(|a| ArcSpec {
                id: a.id,
                tail: self.node_ids[a.tail],
                head: self.node_ids[a.head],
                cap: a.cap,
                cost: a.cost,
            })
            .collect()
    }

    /// Copy of the network with the arc at `index` removed.
    pub fn without_arc(&self, index: usize) -> Network {
        let arcs = self
            .arcs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != index)
            .map(|(_, a)| *a)
            .collect();
        Self::from_sorted(self.node_ids.clone(), self.node_index.clone(), arcs)
    }

    /// Copy of the network keeping only arcs for which `keep` holds.
    pub fn filter_arcs(&self, mut keep: impl FnMut(&Arc) -> bool) -> Network {
        let arcs = self.arcs.iter().filter(|a| keep(a)).copied().collect();
        Self::from_sorted(self.node_ids.clone(), self.node_index.clone(), arcs)
    }

    /// Nodes reachable from `from` using arcs accepted by `allowed`.
    pub fn reachable(&self, from: usize, allowed: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.out_arcs[u] {
                let v = self.arcs[a].head;
                if !seen[v] && allowed(a) {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }
}

/// One congestion scenario: the congested arc has already been removed and
/// `k` alternative paths are sought from `source` to `dest`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub network: Network,
    pub source: usize,
    pub dest: usize,
    pub k: usize,
    pub congested_arc: Option<ArcId>,
}

impl Instance {
    pub fn new(
        network: Network,
        source: NodeId,
        dest: NodeId,
        k: usize,
        congested_arc: Option<ArcId>,
    ) -> Result<Self, ModelError> {
        let s = network.node_index(source).ok_or(ModelError::UnknownNode {
            field: "source",
            id: source,
        })?;
        let t = network.node_index(dest).ok_or(ModelError::UnknownNode {
            field: "dest",
            id: dest,
        })?;
        if s == t {
            return Err(ModelError::SameEndpoints(source));
        }
        if k == 0 {
            return Err(ModelError::ZeroPathBudget);
        }
        if let Some(c) = congested_arc {
            if network.arc_index(c).is_some() {
                return Err(ModelError::CongestedArcPresent(c));
            }
        }
        Ok(Instance {
            network,
            source: s,
            dest: t,
            k,
            congested_arc,
        })
    }

    pub fn with_k(&self, k: usize) -> Result<Self, ModelError> {
        if k == 0 {
            return Err(ModelError::ZeroPathBudget);
        }
        Ok(Instance { k, ..self.clone() })
    }

    /// Whether `dest` can be reached from `source` at all.
    pub fn is_feasible(&self) -> bool {
        self.network.reachable(self.source, |_| true)[self.dest]
    }
}

/// An ordered multiset of paths, each an arc-index sequence from source to
/// destination. Duplicate paths are allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathSet {
    pub paths: Vec<Vec<usize>>,
}

impl PathSet {
    pub fn new(paths: Vec<Vec<usize>>) -> Self {
        PathSet { paths }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Membership mask over the network's arcs for the union of all paths.
    pub fn used_mask(&self, network: &Network) -> Vec<bool> {
        let mut used = vec![false; network.arc_count()];
        for &a in self.paths.iter().flatten() {
            used[a] = true;
        }
        used
    }

    /// Union of the paths' arcs, sorted by index.
    pub fn used_arcs(&self) -> Vec<usize> {
        let mut arcs: Vec<usize> = self.paths.iter().flatten().copied().collect();
        arcs.sort_unstable();
        arcs.dedup();
        arcs
    }

    pub fn total_cost(&self, network: &Network) -> i64 {
        self.paths.iter().map(|p| path_cost(network, p)).sum()
    }

    pub fn to_arc_ids(&self, network: &Network) -> Vec<Vec<ArcId>> {
        self.paths
            .iter()
            .map(|p| p.iter().map(|&a| network.arc(a).id).collect())
            .collect()
    }

    pub fn from_arc_ids(network: &Network, paths: &[Vec<ArcId>]) -> Result<Self, ArcId> {
        paths
            .iter()
            .map(|p| p.iter().map(|&id| network.arc_index(id).ok_or(id)).collect())
            .collect::<Result<Vec<_>, _>>()
            .map(PathSet::new)
    }
}

pub fn path_cost(network: &Network, path: &[usize]) -> i64 {
    path.iter().map(|&a| network.arc(a).cost).sum()
}

/// Bottleneck capacity of a path; 0 for an empty path.
pub fn mincap(network: &Network, path: &[usize]) -> i64 {
    path.iter().map(|&a| network.arc(a).cap).min().unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub node_count: usize,
    pub density: f64,
    pub capacity_range: (i64, i64),
    pub cost_range: (i64, i64),
    pub seed: u64,
}

impl GeneratorConfig {
    pub const DEFAULT_CAPACITY_RANGE: (i64, i64) = (10, 100);
    pub const DEFAULT_COST_RANGE: (i64, i64) = (1, 20);

    pub fn new(node_count: usize, density: f64, seed: u64) -> Self {
        GeneratorConfig {
            node_count,
            density,
            capacity_range: Self::DEFAULT_CAPACITY_RANGE,
            cost_range: Self::DEFAULT_COST_RANGE,
            seed,
        }
    }

    /// Number of arcs a generated network will have.
    pub fn target_arcs(&self) -> usize {
        let n = self.node_count as f64;
        (self.density * n * (n - 1.0)).round() as usize
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.node_count;
        if n < 2 {
            return Err(ModelError::InvalidConfig(format!(
                "node_count must be at least 2 (got {n})"
            )));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(ModelError::InvalidConfig(format!(
                "density must lie in (0, 1] (got {})",
                self.density
            )));
        }
        for (name, (lo, hi)) in [("capacity_range", self.capacity_range), ("cost_range", self.cost_range)] {
            if lo < 1 || lo > hi {
                return Err(ModelError::InvalidConfig(format!(
                    "{name} must be a non-empty interval with lower bound >= 1 (got [{lo}, {hi}])"
                )));
            }
        }
        let tree = 2 * (n - 1);
        let requested = self.target_arcs();
        if requested < tree {
            return Err(ModelError::DensityBelowTree {
                density: self.density,
                nodes: n,
                requested,
                tree,
            });
        }
        Ok(())
    }
}

/// Random network: a uniformly shuffled spanning tree with every edge
/// bidirected, topped up with random single arcs until the density target is
/// met. Node ids are `0..n`, arc ids `0..m` in creation order.
pub fn generate_random(config: &GeneratorConfig) -> Result<Network, ModelError> {
    config.validate()?;
    let n = config.node_count;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(config.target_arcs());
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        let child = order[i];
        pairs.push((parent, child));
        pairs.push((child, parent));
    }

    let present: HashSet<(usize, usize)> = pairs.iter().copied().collect();
    let mut free: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| u != v && !present.contains(&(u, v)))
        .collect();
    free.shuffle(&mut rng);
    let extra = config.target_arcs() - pairs.len();
    pairs.extend(free.into_iter().take(extra));

    let (cap_lo, cap_hi) = config.capacity_range;
    let (cost_lo, cost_hi) = config.cost_range;
    let specs: Vec<ArcSpec> = pairs
        .into_iter()
        .enumerate()
        .map(|(id, (u, v))| ArcSpec {
            id: id as ArcId,
            tail: u as NodeId,
            head: v as NodeId,
            cap: rng.gen_range(cap_lo..=cap_hi),
            cost: rng.gen_range(cost_lo..=cost_hi),
        })
        .collect();
    Network::new((0..n as NodeId).collect(), &specs)
}

/// An instance produced by [`enumerate_instances`], tagged with a stable id.
#[derive(Debug, Clone)]
pub struct EnumeratedInstance {
    /// `a<congested arc id>-d<destination node id>`
    pub id: String,
    pub instance: Instance,
    pub feasible: bool,
}

/// One instance per (congested arc, destination) pair, skipping destinations
/// equal to the arc's tail: exactly `|A| * (|V| - 1)` instances, in arc-id then
/// node-id order.
pub fn enumerate_instances(network: &Network, k: usize) -> Vec<EnumeratedInstance> {
    let mut out = Vec::with_capacity(network.arc_count() * network.node_count().saturating_sub(1));
    for (ai, arc) in network.arcs().iter().enumerate() {
        let reduced = network.without_arc(ai);
        let reach = reduced.reachable(arc.tail, |_| true);
        for (d, &feasible) in reach.iter().enumerate() {
            if d == arc.tail {
                continue;
            }
            let instance = Instance {
                network: reduced.clone(),
                source: arc.tail,
                dest: d,
                k,
                congested_arc: Some(arc.id),
            };
            out.push(EnumeratedInstance {
                id: format!("a{}-d{}", arc.id, network.node_id(d)),
                instance,
                feasible,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(id: ArcId, tail: NodeId, head: NodeId, cap: i64, cost: i64) -> ArcSpec {
        ArcSpec {
            id,
            tail,
            head,
            cap,
            cost,
        }
    }

    #[test]
    fn arcs_are_sorted_by_id_and_indexed() {
        let net = Network::new(vec![5, 1], &[spec(9, 1, 5, 3, 1), spec(2, 5, 1, 4, 2)]).unwrap();
        assert_eq!(net.node_ids(), &[1, 5]);
        assert_eq!(net.arc(0).id, 2);
        assert_eq!(net.arc_index(9), Some(1));
        assert_eq!(net.out_arcs(0), &[1]);
        assert_eq!(net.in_arcs(0), &[0]);
    }

    #[test]
    fn rejects_bad_arcs() {
        let err = Network::new(vec![0, 1], &[spec(0, 0, 1, 5, 1), spec(4, 0, 1, 0, 1)]).unwrap_err();
        assert!(err.to_string().contains("arcs[1] (id 4)"), "{err}");
        assert!(err.to_string().contains("capacity"), "{err}");
        assert!(Network::new(vec![0, 1], &[spec(0, 0, 0, 5, 1)]).is_err());
        assert!(Network::new(vec![0, 1], &[spec(0, 0, 7, 5, 1)]).is_err());
        assert!(Network::new(vec![0, 1], &[spec(0, 0, 1, 5, 0)]).is_err());
        assert!(Network::new(vec![0, 1], &[spec(0, 0, 1, 5, 1), spec(0, 1, 0, 5, 1)]).is_err());
        assert!(Network::new(vec![0, 0], &[]).is_err());
    }

    #[test]
    fn parallel_arcs_are_allowed() {
        let net = Network::new(vec![0, 1], &[spec(0, 0, 1, 5, 1), spec(1, 0, 1, 5, 1)]).unwrap();
        assert_eq!(net.out_arcs(0).len(), 2);
    }

    #[test]
    fn instance_invariants() {
        let net = Network::new(vec![0, 1], &[spec(0, 0, 1, 5, 1)]).unwrap();
        assert!(Instance::new(net.clone(), 0, 0, 1, None).is_err());
        assert!(Instance::new(net.clone(), 0, 2, 1, None).is_err());
        assert!(Instance::new(net.clone(), 0, 1, 0, None).is_err());
        assert_eq!(
            Instance::new(net.clone(), 0, 1, 1, Some(0)).unwrap_err(),
            ModelError::CongestedArcPresent(0)
        );
        assert!(Instance::new(net, 0, 1, 2, Some(1)).unwrap().is_feasible());
    }

    #[test]
    fn two_node_generation_is_the_bidirected_pair() {
        let net = generate_random(&GeneratorConfig::new(2, 1.0, 7)).unwrap();
        assert_eq!(net.arc_count(), 2);
        let mut ends: Vec<_> = net.arcs().iter().map(|a| (a.tail, a.head)).collect();
        ends.sort();
        assert_eq!(ends, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn generation_is_deterministic_and_hits_the_arc_count() {
        let cfg = GeneratorConfig::new(20, 0.4, 42);
        let a = generate_random(&cfg).unwrap();
        let b = generate_random(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.arc_count(), 152);
        let other = generate_random(&GeneratorConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn generated_networks_are_strongly_connected_without_duplicates() {
        for seed in 0..20 {
            let cfg = GeneratorConfig::new(12, 0.25, seed);
            let net = generate_random(&cfg).unwrap();
            let pairs: HashSet<_> = net.arcs().iter().map(|a| (a.tail, a.head)).collect();
            assert_eq!(pairs.len(), net.arc_count());
            for v in 0..net.node_count() {
                assert!(net.reachable(v, |_| true).iter().all(|&r| r));
            }
            for a in net.arcs() {
                assert!((10..=100).contains(&a.cap));
                assert!((1..=20).contains(&a.cost));
            }
        }
    }

    #[test]
    fn density_below_tree_is_rejected() {
        let err = generate_random(&GeneratorConfig::new(20, 0.05, 1)).unwrap_err();
        assert!(matches!(
            err,
            ModelError::DensityBelowTree {
                requested: 19,
                tree: 38,
                ..
            }
        ));
    }

    #[test]
    fn two_node_enumeration() {
        let net = generate_random(&GeneratorConfig::new(2, 1.0, 7)).unwrap();
        let inst = enumerate_instances(&net, 2);
        assert_eq!(inst.len(), 2);
        for e in &inst {
            assert_eq!(e.instance.network.arc_count(), 1);
            assert_ne!(e.instance.source, e.instance.dest);
            // The only remaining arc points back at the source.
            assert!(!e.feasible);
        }
    }

    #[test]
    fn enumeration_count_and_disconnection_flag() {
        let net = generate_random(&GeneratorConfig::new(20, 0.4, 3)).unwrap();
        assert_eq!(enumerate_instances(&net, 3).len(), 152 * 19);

        // s -> m -> t with the s -> m arc congested: t is cut off.
        let line = Network::new(
            vec![0, 1, 2],
            &[
                spec(0, 0, 1, 5, 1),
                spec(1, 1, 2, 5, 1),
                spec(2, 2, 1, 5, 1),
                spec(3, 1, 0, 5, 1),
            ],
        )
        .unwrap();
        let inst = enumerate_instances(&line, 1);
        let cut = inst.iter().find(|e| e.id == "a0-d2").unwrap();
        assert!(!cut.feasible);
        assert_eq!(cut.instance.congested_arc, Some(0));
        assert!(!inst.iter().find(|e| e.id == "a1-d2").unwrap().feasible);
        assert!(inst.iter().find(|e| e.id == "a3-d2").unwrap().feasible);
    }
}
