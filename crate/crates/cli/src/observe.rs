//! Topology observables logged alongside each experiment: neighbour
//! statistics from the deployed graph and hop statistics from the
//! initial routing tree, the way a deployed network would sample them
//! at startup.

use wsn_sim::energy::{rx_energy, tx_energy_from_dist_sq};
use wsn_sim::routing::RoutingError;
use wsn_sim::{build_routing_tree, CostMethod, NetworkGraph, RadioParams};

/// Startup observations of one deployed network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologyObservables {
    /// Mean neighbour count over all nodes, sink included.
    pub avg_neighbors: f64,
    /// Mean over nodes (with at least one neighbour) of their mean
    /// neighbour distance.
    pub avg_distance: f64,
    /// Mean routing-tree hop count from reachable sensors to the sink.
    pub avg_hops: f64,
    /// Mean per-packet transmission energy over the initial tree's
    /// parent links.
    pub tx_cost: f64,
    /// Mean parent-link distance as a fraction of the radio range; a
    /// dimensionless proxy for per-hop airtime.
    pub tx_delay: f64,
    /// Per-packet receive energy under the radio parameters.
    pub rx_cost: f64,
}

/// Build the initial routing tree and collect the observables. Values
/// that average over reachable sensors fall back to 0 when nothing is
/// reachable.
pub fn observe_topology(
    graph: &mut NetworkGraph,
    method: &CostMethod,
    radio: &RadioParams,
) -> Result<TopologyObservables, RoutingError> {
    let tree = build_routing_tree(graph, method)?;
    let n = graph.nodes.len();

    let mut neighbor_total = 0usize;
    let mut distance_sum = 0.0;
    let mut nodes_with_neighbors = 0usize;
    for adj in &graph.adjacency {
        neighbor_total += adj.len();
        if !adj.is_empty() {
            let mean: f64 = adj.iter().map(|(_, d)| d).sum::<f64>() / adj.len() as f64;
            distance_sum += mean;
            nodes_with_neighbors += 1;
        }
    }

    // Hop counts propagate in settle order, parents before children.
    let mut hops = vec![0u32; n];
    let mut hop_sum = 0u64;
    let mut parent_dist_sum = 0.0;
    let mut parent_cost_sum = 0.0;
    let mut reachable_sensors = 0usize;
    for &v in &tree.settle_order {
        let Some(p) = tree.parent[v] else { continue };
        hops[v] = hops[p] + 1;
        hop_sum += u64::from(hops[v]);
        let d_sq = graph.nodes[v].pos.dist_sq(&graph.nodes[p].pos);
        parent_dist_sum += d_sq.sqrt();
        parent_cost_sum += tx_energy_from_dist_sq(radio, d_sq, 1);
        reachable_sensors += 1;
    }

    let over = |sum: f64, count: usize| if count == 0 { 0.0 } else { sum / count as f64 };
    Ok(TopologyObservables {
        avg_neighbors: neighbor_total as f64 / n as f64,
        avg_distance: over(distance_sum, nodes_with_neighbors),
        avg_hops: over(hop_sum as f64, reachable_sensors),
        tx_cost: over(parent_cost_sum, reachable_sensors),
        tx_delay: over(parent_dist_sum, reachable_sensors) / graph.tx_radius,
        rx_cost: rx_energy(radio, 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use wsn_sim::{deploy_random, DeploymentConfig, Node, NodeId, Position};

    fn chain_graph() -> NetworkGraph {
        let positions = [(0.0, 0.0), (3.0, 0.0), (7.0, 0.0)];
        let nodes: Vec<Node> = positions
            .iter()
            .enumerate()
            .map(|(id, &(x, y))| Node {
                id: id as NodeId,
                pos: Position::new(x, y),
                residual_energy: 100.0,
                level: None,
                relay_degree: 0,
                alive: true,
                pending_packets: 0,
            })
            .collect();
        let mut graph = NetworkGraph {
            nodes,
            sink_id: 0,
            tx_radius: 5.0,
            adjacency: Vec::new(),
            area: (10.0, 10.0),
        };
        graph.rebuild_adjacency();
        graph
    }

    #[test]
    fn chain_observables_match_hand_values() {
        let mut graph = chain_graph();
        let obs =
            observe_topology(&mut graph, &CostMethod::Ddtm, &RadioParams::default()).unwrap();
        // Neighbour counts 1, 2, 1; mean neighbour distances 3, 3.5, 4.
        assert!((obs.avg_neighbors - 4.0 / 3.0).abs() < 1e-12);
        assert!((obs.avg_distance - 3.5).abs() < 1e-12);
        // Tree: sink <- A (3 units) <- B (4 units); hops 1 and 2.
        assert!((obs.avg_hops - 1.5).abs() < 1e-12);
        assert!((obs.tx_delay - 3.5 / 5.0).abs() < 1e-12);
        // Default radio: tx = d^2 per packet, rx free.
        assert!((obs.tx_cost - 12.5).abs() < 1e-12);
        assert_eq!(obs.rx_cost, 0.0);
    }

    #[test]
    fn isolated_sink_yields_zero_hop_statistics() {
        let config = DeploymentConfig {
            n_nodes: 5,
            tx_radius: 1.0,
            rng_seed: 3,
            ..DeploymentConfig::default()
        };
        let mut graph = deploy_random(&config).unwrap();
        let obs =
            observe_topology(&mut graph, &CostMethod::pdtm_default(), &RadioParams::default())
                .unwrap();
        assert_eq!(obs.avg_hops, 0.0);
        assert_eq!(obs.tx_cost, 0.0);
        assert_eq!(obs.tx_delay, 0.0);
    }

    #[test]
    fn rx_cost_reflects_the_radio() {
        let mut graph = chain_graph();
        let radio = RadioParams {
            e_elec: 50.0,
            ..RadioParams::default()
        };
        let obs = observe_topology(&mut graph, &CostMethod::Ddtm, &radio).unwrap();
        assert_eq!(obs.rx_cost, 50.0);
    }

    #[test]
    fn methods_see_the_same_neighbour_statistics() {
        let mut a = chain_graph();
        let mut b = chain_graph();
        let radio = RadioParams::default();
        let pdtm = observe_topology(&mut a, &CostMethod::pdtm_default(), &radio).unwrap();
        let ddtm = observe_topology(&mut b, &CostMethod::Ddtm, &radio).unwrap();
        assert_eq!(pdtm.avg_neighbors, ddtm.avg_neighbors);
        assert_eq!(pdtm.avg_distance, ddtm.avg_distance);
    }
}
