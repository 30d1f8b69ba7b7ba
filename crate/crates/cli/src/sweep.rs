//! The `sweep` command: one experiment per grid cell, in parallel,
//! emitted in deterministic grid order.

use rayon::prelude::*;
use thiserror::Error;
use wsn_sim::engine::SimError;
use wsn_sim::network::BuildError;
use wsn_sim::routing::RoutingError;
use wsn_sim::{deploy_random, DeploymentConfig, SimConfig};

use crate::observe::observe_topology;
use crate::output::{Report, Table};
use crate::seeds::cell_seed;
use crate::spec::{MethodKind, SpecError, SweepSpec};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
}

/// One grid cell's outcome: the configuration echo, end-of-run totals,
/// and topology observables measured on the initial deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n_nodes: usize,
    pub tx_radius: f64,
    pub graph_index: usize,
    pub method: MethodKind,
    pub seed: u64,
    pub delivered: u64,
    pub lost: u64,
    pub dead: u64,
    pub lifetime: u64,
    pub energy: f64,
    pub avg_neighbors: f64,
    pub avg_hops: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

/// Builds a thread pool honouring `workers` (0 means the rayon default)
/// and runs `f` inside it.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool construction cannot fail for a sane worker count");
    pool.install(f)
}

fn run_cell(spec: &SweepSpec, n_nodes: usize, tx_radius: f64, graph_index: usize, method: MethodKind) -> Result<SweepRow, SweepError> {
    let seed = cell_seed(spec.base_seed, n_nodes, tx_radius, graph_index);
    let deployment = DeploymentConfig {
        n_nodes,
        tx_radius,
        rng_seed: seed,
        ..DeploymentConfig::default()
    };
    let config = SimConfig {
        deployment: deployment.clone(),
        method: method.cost_method(),
        ..SimConfig::default()
    };

    let mut graph = deploy_random(&deployment)?;
    let topo = observe_topology(&mut graph, &config.method, &config.radio)?;
    let record = wsn_sim::run_experiment(&config)?;

    Ok(SweepRow {
        n_nodes,
        tx_radius,
        graph_index,
        method,
        seed,
        delivered: record.delivered,
        lost: record.lost,
        dead: record.dead_nodes_at_end,
        lifetime: record.lifetime,
        energy: record.ledger.total(),
        avg_neighbors: topo.avg_neighbors,
        avg_hops: topo.avg_hops,
    })
}

/// Runs the full grid. Cells execute in parallel; the returned rows are
/// in grid order (node count, then radius, then graph index, then
/// method) no matter which cell finished first.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepOutput, SweepError> {
    spec.validate()?;
    let mut jobs = Vec::with_capacity(spec.row_count());
    for &n_nodes in &spec.node_counts {
        for &tx_radius in &spec.tx_radii {
            for graph_index in 0..spec.graphs_per_cell {
                for &method in &spec.methods {
                    jobs.push((n_nodes, tx_radius, graph_index, method));
                }
            }
        }
    }
    let rows: Result<Vec<SweepRow>, SweepError> = with_workers(workers, || {
        jobs.par_iter()
            .map(|&(n, tx, g, m)| run_cell(spec, n, tx, g, m))
            .collect()
    });
    Ok(SweepOutput {
        spec: spec.clone(),
        rows: rows?,
    })
}

impl SweepOutput {
    pub fn to_report(&self) -> Report {
        let spec = &self.spec;
        let mut report = Report::new("sweep");
        report.setting(
            "node_counts",
            spec.node_counts
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        report.setting(
            "tx_radii",
            spec.tx_radii
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        report.setting("graphs_per_cell", spec.graphs_per_cell);
        report.setting("base_seed", spec.base_seed);
        report.setting(
            "methods",
            spec.methods
                .iter()
                .map(|m| m.name().to_string())
                .collect::<Vec<_>>()
                .join(","),
        );

        let mut table = Table::new(
            "sweep",
            &[
                "n_nodes",
                "tx_radius",
                "graph_index",
                "method",
                "seed",
                "delivered",
                "lost",
                "dead",
                "lifetime",
                "energy",
                "avg_neighbors",
                "avg_hops",
            ],
        );
        for row in &self.rows {
            table.push_row(vec![
                row.n_nodes.into(),
                row.tx_radius.into(),
                row.graph_index.into(),
                row.method.name().into(),
                row.seed.into(),
                row.delivered.into(),
                row.lost.into(),
                row.dead.into(),
                row.lifetime.into(),
                row.energy.into(),
                row.avg_neighbors.into(),
                row.avg_hops.into(),
            ]);
        }
        report.tables.push(table);
        report
    }
}
