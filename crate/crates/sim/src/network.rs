//! Graph construction: random deployment on an integer grid, neighbour
//! discovery under a transmission radius, hop levels from the sink, and
//! relay degrees.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("need at least 2 nodes (sink plus one sensor), got {0}")]
    TooFewNodes(usize),
    #[error("transmission radius must be positive, got {0}")]
    NonPositiveTxRadius(f64),
    #[error("initial energy must be positive, got {0}")]
    NonPositiveEnergy(f64),
    #[error("area dimensions must be positive, got {0} x {1}")]
    NonPositiveArea(f64, f64),
    #[error("sink position ({0}, {1}) lies outside the deployment area")]
    SinkOutsideArea(f64, f64),
    #[error("node id {0} out of range for a graph of {1} nodes")]
    InvalidId(NodeId, usize),
}

/// A point on the deployment plane. Sensors are placed on integer grid
/// coordinates, so squared distances between them are exact in f64.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    /// Squared euclidean distance. Preferred over `dist` wherever the
    /// squared form is what a formula actually consumes, because it stays
    /// exact for grid coordinates.
    pub fn dist_sq(&self, other: &Position) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Position) -> f64 {
        self.dist_sq(other).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub pos: Position,
    pub residual_energy: f64,
    /// Hop count from the sink over alive nodes; `None` when unreachable.
    pub level: Option<u32>,
    /// How many alive neighbours sit at the same or a higher level, i.e.
    /// may hand this node packets to forward.
    pub relay_degree: u32,
    pub alive: bool,
    pub pending_packets: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeploymentConfig {
    pub n_nodes: usize,
    pub tx_radius: f64,
    pub area: (f64, f64),
    pub sink_position: Position,
    pub rng_seed: u64,
    pub initial_energy: f64,
}

impl Default for DeploymentConfig {
    fn default() -> Self {
        DeploymentConfig {
            n_nodes: 100,
            tx_radius: 100.0,
            area: (600.0, 300.0),
            sink_position: Position::new(50.0, 50.0),
            rng_seed: 1,
            initial_energy: 100_000.0,
        }
    }
}

impl DeploymentConfig {
    pub fn validate(&self) -> Result<(), BuildError> {
        if self.n_nodes < 2 {
            return Err(BuildError::TooFewNodes(self.n_nodes));
        }
        if !(self.tx_radius > 0.0) {
            return Err(BuildError::NonPositiveTxRadius(self.tx_radius));
        }
        if !(self.area.0 > 0.0 && self.area.1 > 0.0) {
            return Err(BuildError::NonPositiveArea(self.area.0, self.area.1));
        }
        if !(self.initial_energy > 0.0) {
            return Err(BuildError::NonPositiveEnergy(self.initial_energy));
        }
        let s = self.sink_position;
        if s.x < 0.0 || s.x > self.area.0 || s.y < 0.0 || s.y > self.area.1 {
            return Err(BuildError::SinkOutsideArea(s.x, s.y));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct NetworkGraph {
    pub nodes: Vec<Node>,
    pub sink_id: NodeId,
    pub tx_radius: f64,
    /// Per node: (neighbour id, euclidean distance), sorted by id.
    pub adjacency: Vec<Vec<(NodeId, f64)>>,
    pub area: (f64, f64),
}

/// Deploys the sink plus `n_nodes - 1` sensors uniformly on the integer
/// grid covering the area. The same config always yields the same graph.
pub fn deploy_random(config: &DeploymentConfig) -> Result<NetworkGraph, BuildError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let w = config.area.0.floor() as i64;
    let h = config.area.1.floor() as i64;
    let mut nodes = Vec::with_capacity(config.n_nodes);
    nodes.push(Node {
        id: 0,
        pos: config.sink_position,
        residual_energy: config.initial_energy,
        level: Some(0),
        relay_degree: 0,
        alive: true,
        pending_packets: 0,
    });
    for id in 1..config.n_nodes {
        let x = rng.gen_range(0..=w) as f64;
        let y = rng.gen_range(0..=h) as f64;
        nodes.push(Node {
            id,
            pos: Position::new(x, y),
            residual_energy: config.initial_energy,
            level: None,
            relay_degree: 0,
            alive: true,
            pending_packets: 0,
        });
    }
    let mut graph = NetworkGraph {
        nodes,
        sink_id: 0,
        tx_radius: config.tx_radius,
        adjacency: Vec::new(),
        area: config.area,
    };
    graph.rebuild_adjacency();
    Ok(graph)
}

impl NetworkGraph {
    /// Recomputes the symmetric neighbour lists. Two nodes are neighbours
    /// when their distance is at most the transmission radius, boundary
    /// inclusive; the comparison is done on squared distances so the
    /// boundary case is exact on the integer grid.
    pub fn rebuild_adjacency(&mut self) {
        let n = self.nodes.len();
        let tx_sq = self.tx_radius * self.tx_radius;
        let mut adj = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d_sq = self.nodes[i].pos.dist_sq(&self.nodes[j].pos);
                if d_sq <= tx_sq {
                    let d = d_sq.sqrt();
                    adj[i].push((j, d));
                    adj[j].push((i, d));
                }
            }
        }
        self.adjacency = adj;
    }

    pub fn neighbors(&self, i: NodeId) -> Result<&[(NodeId, f64)], BuildError> {
        self.adjacency
            .get(i)
            .map(|v| v.as_slice())
            .ok_or(BuildError::InvalidId(i, self.nodes.len()))
    }

    /// Breadth-first hop levels from the sink over alive nodes only.
    /// Dead or cut-off nodes end up with `level = None`.
    pub fn assign_levels(&mut self) {
        for node in &mut self.nodes {
            node.level = None;
        }
        self.nodes[self.sink_id].level = Some(0);
        let mut queue = VecDeque::new();
        queue.push_back(self.sink_id);
        while let Some(u) = queue.pop_front() {
            let next_level = self.nodes[u].level.unwrap() + 1;
            for k in 0..self.adjacency[u].len() {
                let v = self.adjacency[u][k].0;
                if self.nodes[v].alive && self.nodes[v].level.is_none() {
                    self.nodes[v].level = Some(next_level);
                    queue.push_back(v);
                }
            }
        }
    }

    /// Counts, for every alive levelled node, the alive neighbours at the
    /// same or a higher level (the potential senders it would relay for).
    /// Dead and unreachable nodes get degree 0.
    pub fn compute_relay_degrees(&mut self) {
        for i in 0..self.nodes.len() {
            let degree = match (self.nodes[i].alive, self.nodes[i].level) {
                (true, Some(li)) => self.adjacency[i]
                    .iter()
                    .filter(|&&(j, _)| {
                        self.nodes[j].alive && self.nodes[j].level.map_or(false, |lj| lj >= li)
                    })
                    .count() as u32,
                _ => 0,
            };
            self.nodes[i].relay_degree = degree;
        }
    }

    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    /// True while at least one alive sensor sits within radio range of the
    /// sink; once this goes false the network cannot deliver anything.
    pub fn sink_has_alive_neighbor(&self) -> bool {
        self.adjacency[self.sink_id]
            .iter()
            .any(|&(j, _)| self.nodes[j].alive)
    }

    /// Debug/fixture export: one `id,x,y,energy,level,relay_degree,alive`
    /// line per node. Unreachable levels print as -1.
    pub fn snapshot_table(&self) -> String {
        let mut out = String::from("id,x,y,energy,level,relay_degree,alive\n");
        for n in &self.nodes {
            let level = n.level.map_or(-1i64, |l| l as i64);
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                n.id, n.pos.x, n.pos.y, n.residual_energy, level, n.relay_degree, n.alive
            )
            .unwrap();
        }
        out
    }
}
