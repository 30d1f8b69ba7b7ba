//! The timeslot loop: per slot, rebuild the routing tree, charge standing
//! overheads, let every reachable sensor generate one packet, and forward
//! packets hop-by-hop along parent pointers while accounting every unit of
//! energy, every death, and every lost packet.

use std::fmt::Write as _;

use thiserror::Error;

use crate::energy::{
    apply_consumption, rx_energy, tx_energy_from_dist_sq, Constituent, ConstituentLedger,
    EnergyError, RadioParams,
};
use crate::network::{deploy_random, BuildError, DeploymentConfig, NetworkGraph, NodeId};
use crate::routing::{build_routing_tree, CostMethod, RoutingError, RoutingTree};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error("max_timeslots must be at least 1")]
    BadMaxTimeslots,
    #[error("overhead charges must be non-negative, got {0}")]
    BadOverhead(f64),
}

/// Everything one experiment needs: the deployment, the tree-building
/// method, the radio cost model, standing per-slot charges, and a safety
/// cap on slot count.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub deployment: DeploymentConfig,
    pub method: CostMethod,
    pub radio: RadioParams,
    /// Energy charged to every alive sensor each slot, booked as local
    /// traffic (monitoring, neighbourhood chatter). Default 0.
    pub local_overhead: f64,
    /// Energy charged to every alive sensor each slot, booked as global
    /// traffic (topology control packets). Default 0.
    pub topo_overhead: f64,
    pub max_timeslots: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            deployment: DeploymentConfig::default(),
            method: CostMethod::pdtm_default(),
            radio: RadioParams::default(),
            local_overhead: 0.0,
            topo_overhead: 0.0,
            max_timeslots: 20_000,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        self.deployment.validate()?;
        self.method.validate()?;
        self.radio.validate()?;
        if self.max_timeslots < 1 {
            return Err(SimError::BadMaxTimeslots);
        }
        if self.local_overhead < 0.0 {
            return Err(SimError::BadOverhead(self.local_overhead));
        }
        if self.topo_overhead < 0.0 {
            return Err(SimError::BadOverhead(self.topo_overhead));
        }
        Ok(())
    }
}

/// What happened in one timeslot.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TimeslotMetrics {
    pub slot_index: usize,
    pub generated: u64,
    pub delivered: u64,
    pub lost: u64,
    /// Nodes whose residual energy hit 0 during this slot.
    pub new_dead: u64,
    /// Alive sensors with no route to the sink this slot. They idle: no
    /// generation, no charges. Reported so disconnection is visible even
    /// though it is not a death.
    pub disconnected_alive: u64,
    pub energy_consumed: f64,
    pub ledger: ConstituentLedger,
}

/// Full record of one experiment: the config it ran under, every slot's
/// metrics, and the end-of-run totals.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub config: SimConfig,
    pub slots: Vec<TimeslotMetrics>,
    pub delivered: u64,
    pub lost: u64,
    pub dead_nodes_at_end: u64,
    /// Completed timeslots. One slot is the nominal time unit.
    pub lifetime: u64,
    pub final_residuals: Vec<f64>,
    pub ledger: ConstituentLedger,
}

impl ExperimentRecord {
    pub fn generated(&self) -> u64 {
        self.slots.iter().map(|s| s.generated).sum()
    }

    /// Serializes the record as a delimited table: `#`-prefixed config
    /// header lines, one row per slot, then a totals row.
    pub fn to_table(&self) -> String {
        let d = &self.config.deployment;
        let mut out = String::new();
        writeln!(
            out,
            "# n_nodes={} tx_radius={} area={}x{} sink=({},{}) seed={} initial_energy={}",
            d.n_nodes,
            d.tx_radius,
            d.area.0,
            d.area.1,
            d.sink_position.x,
            d.sink_position.y,
            d.rng_seed,
            d.initial_energy
        )
        .unwrap();
        match self.config.method {
            CostMethod::Pdtm { alpha, sink_energy } => {
                writeln!(out, "# method=pdtm alpha={alpha} sink_energy={sink_energy}").unwrap()
            }
            CostMethod::Ddtm => writeln!(out, "# method=ddtm").unwrap(),
        }
        let r = &self.config.radio;
        writeln!(
            out,
            "# radio e_amp={} e_elec={} alpha={} packet_bits={}",
            r.e_amp, r.e_elec, r.alpha, r.packet_bits
        )
        .unwrap();
        writeln!(
            out,
            "# local_overhead={} topo_overhead={} max_timeslots={}",
            self.config.local_overhead, self.config.topo_overhead, self.config.max_timeslots
        )
        .unwrap();
        writeln!(out, "slot,generated,delivered,lost,new_dead,energy").unwrap();
        for s in &self.slots {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                s.slot_index, s.generated, s.delivered, s.lost, s.new_dead, s.energy_consumed
            )
            .unwrap();
        }
        writeln!(
            out,
            "total,{},{},{},{},{}",
            self.generated(),
            self.delivered,
            self.lost,
            self.dead_nodes_at_end,
            self.ledger.total()
        )
        .unwrap();
        out
    }
}

/// One experiment in progress. Use [`Simulation::step`] to advance slot by
/// slot, or [`Simulation::run`] to drive it to termination.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub config: SimConfig,
    pub graph: NetworkGraph,
    pub ledger: ConstituentLedger,
    pub slots: Vec<TimeslotMetrics>,
}

impl Simulation {
    pub fn new(config: SimConfig) -> Result<Self, SimError> {
        config.validate()?;
        let graph = deploy_random(&config.deployment)?;
        Ok(Simulation {
            config,
            graph,
            ledger: ConstituentLedger::default(),
            slots: Vec::new(),
        })
    }

    /// Starts from a pre-built graph instead of a random deployment, for
    /// hand-crafted fixtures. The deployment echoed in the config is not
    /// consulted.
    pub fn from_parts(graph: NetworkGraph, config: SimConfig) -> Result<Self, SimError> {
        config.method.validate()?;
        config.radio.validate()?;
        if config.max_timeslots < 1 {
            return Err(SimError::BadMaxTimeslots);
        }
        if config.local_overhead < 0.0 || config.topo_overhead < 0.0 {
            return Err(SimError::BadOverhead(
                config.local_overhead.min(config.topo_overhead),
            ));
        }
        Ok(Simulation {
            config,
            graph,
            ledger: ConstituentLedger::default(),
            slots: Vec::new(),
        })
    }

    /// Runs one timeslot. Returns `None` without running anything when the
    /// experiment is over: the sink has no alive neighbour left, or the
    /// slot cap is reached.
    pub fn step(&mut self) -> Result<Option<&TimeslotMetrics>, SimError> {
        if self.slots.len() >= self.config.max_timeslots {
            return Ok(None);
        }
        if !self.graph.sink_has_alive_neighbor() {
            return Ok(None);
        }
        let tree = build_routing_tree(&mut self.graph, &self.config.method)?;
        let metrics = self.run_timeslot(&tree);
        self.slots.push(metrics);
        Ok(self.slots.last())
    }

    pub fn run(mut self) -> Result<ExperimentRecord, SimError> {
        while self.step()?.is_some() {}
        Ok(self.into_record())
    }

    pub fn into_record(self) -> ExperimentRecord {
        let delivered = self.slots.iter().map(|s| s.delivered).sum();
        let lost = self.slots.iter().map(|s| s.lost).sum();
        let dead_nodes_at_end = self.slots.iter().map(|s| s.new_dead).sum();
        let lifetime = self.slots.len() as u64;
        let final_residuals = self.graph.nodes.iter().map(|n| n.residual_energy).collect();
        ExperimentRecord {
            config: self.config,
            slots: self.slots,
            delivered,
            lost,
            dead_nodes_at_end,
            lifetime,
            final_residuals,
            ledger: self.ledger,
        }
    }

    /// Charges up to `amount`, capped at what the node has, and handles a
    /// resulting death: count it and convert any held packets to losses.
    fn charge_capped(
        &mut self,
        id: NodeId,
        amount: f64,
        slot: Constituent,
        m: &mut TimeslotMetrics,
    ) {
        let node = &mut self.graph.nodes[id];
        let pay = amount.min(node.residual_energy);
        let was_alive = node.alive;
        apply_consumption(node, pay, slot, &mut m.ledger).expect("capped charge is non-negative");
        if was_alive && !node.alive {
            m.new_dead += 1;
            m.lost += node.pending_packets as u64;
            node.pending_packets = 0;
        }
    }

    fn run_timeslot(&mut self, tree: &RoutingTree) -> TimeslotMetrics {
        let mut m = TimeslotMetrics {
            slot_index: self.slots.len(),
            ..TimeslotMetrics::default()
        };
        let radio = self.config.radio;
        let sink = self.graph.sink_id;
        let n = self.graph.nodes.len();

        // Standing per-slot charges first; a node that cannot pay them
        // dies before it gets to generate.
        if self.config.local_overhead > 0.0 || self.config.topo_overhead > 0.0 {
            let charges = [
                (self.config.local_overhead, Constituent::Local),
                (self.config.topo_overhead, Constituent::Global),
            ];
            for id in 0..n {
                for (amount, slot) in charges {
                    if id != sink && self.graph.nodes[id].alive && amount > 0.0 {
                        self.charge_capped(id, amount, slot, &mut m);
                    }
                }
            }
        }

        // Generation: one packet per alive sensor that has a route. A
        // sensor cut off from the sink idles and is only counted.
        for id in 0..n {
            if id == sink || !self.graph.nodes[id].alive {
                continue;
            }
            if tree.reachable(id) {
                self.graph.nodes[id].pending_packets += 1;
                m.generated += 1;
            } else {
                m.disconnected_alive += 1;
            }
        }

        // Forwarding, deepest nodes first. Reverse settle order guarantees
        // a node drains its queue before its parent runs, so one pass
        // moves every packet as far as it can get this slot.
        for &u in tree.settle_order.iter().rev() {
            if u == sink || !self.graph.nodes[u].alive {
                continue;
            }
            let Some(p) = tree.parent[u] else { continue };
            while self.graph.nodes[u].pending_packets > 0 {
                if !self.graph.nodes[p].alive {
                    // Parent died earlier this slot; everything still
                    // queued here has nowhere to go.
                    m.lost += self.graph.nodes[u].pending_packets as u64;
                    self.graph.nodes[u].pending_packets = 0;
                    break;
                }
                let d_sq = self.graph.nodes[u].pos.dist_sq(&self.graph.nodes[p].pos);
                let cost = tx_energy_from_dist_sq(&radio, d_sq, 1);
                let residual = self.graph.nodes[u].residual_energy;
                if residual < cost {
                    // Cannot afford a full transmission: the node burns
                    // out trying and its whole queue is lost.
                    apply_consumption(
                        &mut self.graph.nodes[u],
                        residual,
                        Constituent::Global,
                        &mut m.ledger,
                    )
                    .expect("residual is non-negative");
                    m.new_dead += 1;
                    m.lost += self.graph.nodes[u].pending_packets as u64;
                    self.graph.nodes[u].pending_packets = 0;
                    break;
                }
                apply_consumption(
                    &mut self.graph.nodes[u],
                    cost,
                    Constituent::Global,
                    &mut m.ledger,
                )
                .expect("transmit cost is non-negative");
                self.graph.nodes[u].pending_packets -= 1;

                let rx = rx_energy(&radio, 1);
                if p == sink {
                    m.delivered += 1;
                    if rx > 0.0 {
                        // The sink pays like anyone else but is mains
                        // powered: it can bottom out, never die.
                        self.charge_capped(p, rx, Constituent::Global, &mut m);
                        self.graph.nodes[p].alive = true;
                    }
                } else {
                    if rx > 0.0 {
                        self.charge_capped(p, rx, Constituent::Global, &mut m);
                    }
                    if self.graph.nodes[p].alive {
                        self.graph.nodes[p].pending_packets += 1;
                    } else {
                        // Receiving this packet finished the parent off
                        // (its queue was flushed by the charge).
                        m.lost += 1;
                    }
                }

                if !self.graph.nodes[u].alive {
                    // Paid for that hop with its last unit; anything left
                    // in the queue dies with it.
                    m.new_dead += 1;
                    m.lost += self.graph.nodes[u].pending_packets as u64;
                    self.graph.nodes[u].pending_packets = 0;
                    break;
                }
            }
        }

        m.energy_consumed = m.ledger.total();
        self.ledger.add(&m.ledger);
        m
    }
}

pub fn run_experiment(config: &SimConfig) -> Result<ExperimentRecord, SimError> {
    Simulation::new(config.clone())?.run()
}

/// Both methods run on the identical deployment, plus headline deltas
/// (PDTM minus DDTM).
#[derive(Debug, Clone, PartialEq)]
pub struct MethodComparison {
    pub pdtm: ExperimentRecord,
    pub ddtm: ExperimentRecord,
    pub delta_delivered: i64,
    pub delta_lost: i64,
    pub delta_dead: i64,
    pub delta_lifetime: i64,
}

/// Runs PDTM and DDTM over the same seeded deployment. The config's own
/// method selects the PDTM parameters when it already is PDTM; a DDTM
/// config gets the default PDTM arm.
pub fn compare_methods(config: &SimConfig) -> Result<MethodComparison, SimError> {
    let pdtm_method = match config.method {
        m @ CostMethod::Pdtm { .. } => m,
        CostMethod::Ddtm => CostMethod::pdtm_default(),
    };
    let mut pdtm_config = config.clone();
    pdtm_config.method = pdtm_method;
    let mut ddtm_config = config.clone();
    ddtm_config.method = CostMethod::Ddtm;
    let pdtm = run_experiment(&pdtm_config)?;
    let ddtm = run_experiment(&ddtm_config)?;
    Ok(MethodComparison {
        delta_delivered: pdtm.delivered as i64 - ddtm.delivered as i64,
        delta_lost: pdtm.lost as i64 - ddtm.lost as i64,
        delta_dead: pdtm.dead_nodes_at_end as i64 - ddtm.dead_nodes_at_end as i64,
        delta_lifetime: pdtm.lifetime as i64 - ddtm.lifetime as i64,
        pdtm,
        ddtm,
    })
}
