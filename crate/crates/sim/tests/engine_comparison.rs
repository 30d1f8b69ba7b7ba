//! End-to-end behavioural fixtures: PDTM against the DDTM baseline on a
//! seeded layout, load spreading across relays, and tree coincidence on a
//! fully symmetric layout.

use wsn_sim::engine::{compare_methods, SimConfig, Simulation};
use wsn_sim::network::{DeploymentConfig, NetworkGraph, Node, Position};
use wsn_sim::routing::{build_routing_tree, CostMethod};

fn graph_from(positions: &[(f64, f64)], tx: f64, energy: f64) -> NetworkGraph {
    let nodes = positions
        .iter()
        .enumerate()
        .map(|(id, &(x, y))| Node {
            id,
            pos: Position::new(x, y),
            residual_energy: energy,
            level: None,
            relay_degree: 0,
            alive: true,
            pending_packets: 0,
        })
        .collect();
    let mut g = NetworkGraph {
        nodes,
        sink_id: 0,
        tx_radius: tx,
        adjacency: Vec::new(),
        area: (1000.0, 1000.0),
    };
    g.rebuild_adjacency();
    g
}

#[test]
fn pdtm_outlives_and_outdelivers_ddtm_on_seeded_fixture() {
    let config = SimConfig {
        deployment: DeploymentConfig {
            n_nodes: 50,
            rng_seed: 3,
            ..DeploymentConfig::default()
        },
        ..SimConfig::default()
    };
    let cmp = compare_methods(&config).unwrap();
    assert!(
        cmp.pdtm.delivered > cmp.ddtm.delivered,
        "delivered: {} vs {}",
        cmp.pdtm.delivered,
        cmp.ddtm.delivered
    );
    assert!(
        cmp.pdtm.lifetime > cmp.ddtm.lifetime,
        "lifetime: {} vs {}",
        cmp.pdtm.lifetime,
        cmp.ddtm.lifetime
    );
}

/// Records which parent each tree gives the sender before every slot.
fn parent_trace(positions: &[(f64, f64)], method: CostMethod, slots: usize) -> Vec<usize> {
    let graph = graph_from(positions, 100.0, 100_000.0);
    let mut sim = Simulation::from_parts(graph, SimConfig::default()).unwrap();
    let mut trace = Vec::new();
    for _ in 0..slots {
        let mut preview = sim.graph.clone();
        let tree = build_routing_tree(&mut preview, &method).unwrap();
        trace.push(tree.parent[3].unwrap());
        sim.config.method = method;
        sim.step().unwrap().unwrap();
    }
    trace
}

#[test]
fn pdtm_rotates_the_relay_as_energy_drains() {
    // One sender exactly between two relays. DDTM has no reason to ever
    // move it off the tie-break winner; PDTM charges the drained relay
    // more each slot, so the sender ping-pongs and the load is shared.
    let positions = [
        (0.0, 0.0),   // sink
        (90.0, 0.0),  // R1
        (90.0, 40.0), // R2
        (170.0, 20.0), // sender, equidistant from both relays
    ];
    let ddtm = parent_trace(&positions, CostMethod::Ddtm, 4);
    assert_eq!(ddtm, vec![1, 1, 1, 1], "DDTM never moves the sender");
    let pdtm = parent_trace(&positions, CostMethod::pdtm_default(), 4);
    assert_eq!(pdtm, vec![1, 2, 1, 2], "PDTM alternates between the relays");
}

#[test]
fn symmetric_layout_makes_both_methods_agree() {
    // Four sensors at exactly the radius from the sink and out of range of
    // each other: every candidate edge has the same weight under either
    // method, so the trees coincide.
    let positions = [
        (10.0, 10.0),
        (20.0, 10.0),
        (10.0, 20.0),
        (0.0, 10.0),
        (10.0, 0.0),
    ];
    let mut g = graph_from(&positions, 10.0, 100_000.0);
    let pdtm = build_routing_tree(&mut g, &CostMethod::pdtm_default()).unwrap();
    let ddtm = build_routing_tree(&mut g, &CostMethod::Ddtm).unwrap();
    assert_eq!(pdtm.parent, ddtm.parent);
    for s in 1..5 {
        assert_eq!(pdtm.parent[s], Some(0));
    }
}
