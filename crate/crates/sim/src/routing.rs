//! Topology management: edge-cost functions (PDTM and the distance-squared
//! DDTM baseline), the level-constrained weighted digraph, and Dijkstra
//! from the sink producing per-timeslot routing trees.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::network::{NetworkGraph, Node, NodeId};

#[derive(Debug, Error)]
pub enum RoutingError {
    #[error("relay node {0} has no residual energy; dead relays never get edges")]
    DeadRelay(NodeId),
    #[error("edge {from}->{to} has invalid weight {weight}; weights must be finite and >= 0")]
    BadWeight { from: NodeId, to: NodeId, weight: f64 },
    #[error("dijkstra source {0} out of range for {1} nodes")]
    InvalidSource(NodeId, usize),
    #[error("PDTM exponent must satisfy 1 < alpha <= 2, got {0}")]
    BadCostAlpha(f64),
    #[error("sink energy constant must be positive, got {0}")]
    BadSinkEnergy(f64),
}

/// Which edge-cost function drives tree construction.
///
/// PDTM weighs an edge by how much the relay should be protected: relays
/// with many dependants, high level, or little energy left get expensive.
/// DDTM is the plain distance-squared baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostMethod {
    Pdtm {
        alpha: f64,
        /// Stand-in energy for the sink in the weight formula. The sink
        /// is mains-powered, so the default is infinity, which makes
        /// every sink-adjacent edge free.
        sink_energy: f64,
    },
    Ddtm,
}

impl CostMethod {
    pub fn pdtm_default() -> Self {
        CostMethod::Pdtm {
            alpha: 2.0,
            sink_energy: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<(), RoutingError> {
        if let CostMethod::Pdtm { alpha, sink_energy } = *self {
            if !(alpha > 1.0 && alpha <= 2.0) {
                return Err(RoutingError::BadCostAlpha(alpha));
            }
            if !(sink_energy > 0.0) {
                return Err(RoutingError::BadSinkEnergy(sink_energy));
            }
        }
        Ok(())
    }
}

fn dist_pow_alpha(d_sq: f64, alpha: f64) -> f64 {
    // Exact at the alpha = 2 default: squared grid distances are integers.
    if alpha == 2.0 {
        d_sq
    } else {
        d_sq.powf(alpha * 0.5)
    }
}

/// PDTM edge weight with the given node as relay:
/// relay_degree * d^alpha * (level + 1) / residual_energy.
///
/// The sink (the unique level-0 node) uses `sink_energy` in place of its
/// residual energy and is exempt from the dead-relay check.
pub fn edge_weight_pdtm(
    relay: &Node,
    sender: &Node,
    alpha: f64,
    sink_energy: f64,
) -> Result<f64, RoutingError> {
    let is_sink = relay.level == Some(0);
    let energy = if is_sink {
        sink_energy
    } else {
        if relay.residual_energy <= 0.0 {
            return Err(RoutingError::DeadRelay(relay.id));
        }
        relay.residual_energy
    };
    let d_term = dist_pow_alpha(relay.pos.dist_sq(&sender.pos), alpha);
    let level = relay.level.map_or(0.0, |l| l as f64);
    Ok(relay.relay_degree as f64 * d_term * (level + 1.0) / energy)
}

/// DDTM edge weight: squared distance, nothing else.
pub fn edge_weight_ddtm(relay: &Node, sender: &Node) -> f64 {
    relay.pos.dist_sq(&sender.pos)
}

/// Directed graph over which shortest paths are computed. Every edge
/// carries a non-negative weight and runs from a relay towards a sender
/// at the same or a higher level.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    pub n: usize,
    pub edges: Vec<(NodeId, NodeId, f64)>,
}

/// Builds the directed edge set: one edge relay -> sender per alive
/// neighbour pair where both nodes are levelled and the relay's level does
/// not exceed the sender's. Dead and unreachable nodes get no edges.
pub fn build_weighted_digraph(
    graph: &NetworkGraph,
    method: &CostMethod,
) -> Result<WeightedDigraph, RoutingError> {
    method.validate()?;
    let mut edges = Vec::new();
    for i in 0..graph.nodes.len() {
        let relay = &graph.nodes[i];
        let li = match (relay.alive, relay.level) {
            (true, Some(l)) => l,
            _ => continue,
        };
        for &(j, _) in &graph.adjacency[i] {
            let sender = &graph.nodes[j];
            match (sender.alive, sender.level) {
                (true, Some(lj)) if li <= lj => {
                    let w = match *method {
                        CostMethod::Pdtm { alpha, sink_energy } => {
                            edge_weight_pdtm(relay, sender, alpha, sink_energy)?
                        }
                        CostMethod::Ddtm => edge_weight_ddtm(relay, sender),
                    };
                    edges.push((i, j, w));
                }
                _ => {}
            }
        }
    }
    Ok(WeightedDigraph {
        n: graph.nodes.len(),
        edges,
    })
}

/// Shortest-path tree rooted at the Dijkstra source (the sink). Distances
/// of unreachable nodes are left at infinity with no parent.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingTree {
    pub dist: Vec<f64>,
    pub parent: Vec<Option<NodeId>>,
    /// Nodes in the order Dijkstra settled them; ancestors always come
    /// before descendants, which the simulation engine relies on when it
    /// drains packet queues.
    pub settle_order: Vec<NodeId>,
}

impl RoutingTree {
    pub fn reachable(&self, v: NodeId) -> bool {
        self.dist[v].is_finite()
    }

    /// Debug/fixture export: `id,parent,dist,level` per node, with -1 for
    /// missing parents and levels and `inf` for unreachable distances.
    pub fn snapshot_table(&self, graph: &NetworkGraph) -> String {
        let mut out = String::from("id,parent,dist,level\n");
        for (id, node) in graph.nodes.iter().enumerate() {
            let parent = self.parent[id].map_or(-1i64, |p| p as i64);
            let level = node.level.map_or(-1i64, |l| l as i64);
            writeln!(out, "{},{},{},{}", id, parent, self.dist[id], level).unwrap();
        }
        out
    }
}

/// Min-heap entry ordered by (distance, node id). BinaryHeap is a
/// max-heap, so the ordering is reversed here.
#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    node: NodeId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Weights are validated finite before the heap is touched, so
        // partial_cmp cannot fail.
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap()
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra over the directed graph. Every weight is checked before any
/// relaxation: a negative or non-finite weight fails the whole call. On
/// equal path cost the lower parent id wins, which pins the tree down
/// deterministically.
pub fn dijkstra(dg: &WeightedDigraph, source: NodeId) -> Result<RoutingTree, RoutingError> {
    if source >= dg.n {
        return Err(RoutingError::InvalidSource(source, dg.n));
    }
    for &(from, to, weight) in &dg.edges {
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(RoutingError::BadWeight { from, to, weight });
        }
    }

    let mut adj = vec![Vec::new(); dg.n];
    for &(from, to, weight) in &dg.edges {
        adj[from].push((to, weight));
    }

    let mut dist = vec![f64::INFINITY; dg.n];
    let mut parent = vec![None; dg.n];
    let mut settled = vec![false; dg.n];
    let mut settle_order = Vec::new();
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry {
        dist: 0.0,
        node: source,
    });

    while let Some(HeapEntry { dist: d, node: u }) = heap.pop() {
        if settled[u] {
            continue;
        }
        settled[u] = true;
        settle_order.push(u);
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                parent[v] = Some(u);
                heap.push(HeapEntry { dist: nd, node: v });
            } else if nd == dist[v] && !settled[v] {
                // Same cost through a lower-id predecessor takes over.
                if parent[v].map_or(false, |p| u < p) {
                    parent[v] = Some(u);
                }
            }
        }
    }

    Ok(RoutingTree {
        dist,
        parent,
        settle_order,
    })
}

/// Full per-timeslot tree rebuild: refresh levels and relay degrees, build
/// the weighted digraph, and run Dijkstra from the sink. Unreachable nodes
/// simply stay at infinite distance.
pub fn build_routing_tree(
    graph: &mut NetworkGraph,
    method: &CostMethod,
) -> Result<RoutingTree, RoutingError> {
    graph.assign_levels();
    graph.compute_relay_degrees();
    let dg = build_weighted_digraph(graph, method)?;
    dijkstra(&dg, graph.sink_id)
}
