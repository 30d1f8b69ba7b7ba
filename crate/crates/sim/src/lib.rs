//! Wireless sensor network energy simulation.
//!
//! The crate is organised bottom-up: [`network`] builds random disk-model
//! graphs and maintains hop levels and relay degrees, [`energy`] does all
//! energy arithmetic against a five-constituent ledger, [`edm`] holds the
//! packet-flow regression model, [`routing`] builds per-timeslot shortest
//! path trees (PDTM and the distance-squared DDTM baseline), and
//! [`engine`] runs the timeslot loop that ties them together.

pub mod edm;
pub mod energy;
pub mod engine;
pub mod network;
pub mod routing;

pub use energy::{Constituent, ConstituentLedger, RadioParams};
pub use engine::{
    compare_methods, run_experiment, ExperimentRecord, MethodComparison, SimConfig, Simulation,
    TimeslotMetrics,
};
pub use network::{deploy_random, DeploymentConfig, NetworkGraph, Node, NodeId, Position};
pub use routing::{build_routing_tree, CostMethod, RoutingTree, WeightedDigraph};
