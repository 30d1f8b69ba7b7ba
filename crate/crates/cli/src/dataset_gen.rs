//! The `dataset` command: randomly sampled configurations, each
//! simulated several times, averaged into one analytics row per run.
//!
//! Column convention: configuration parameters first (`tx_radius`,
//! `network_size`, `n_sinks`), observed parameters next, the target
//! (`energy_per_delivered`) last. The engine routes to a single sink;
//! `n_sinks` is sampled and recorded so the analysis stage sees an
//! independently drawn parameter, but it does not alter the simulation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;
use wsn_analytics::{Dataset, DatasetError};
use wsn_sim::engine::SimError;
use wsn_sim::network::BuildError;
use wsn_sim::routing::RoutingError;
use wsn_sim::{deploy_random, DeploymentConfig, Position, RadioParams, SimConfig};

use crate::observe::observe_topology;
use crate::output::{Report, Table};
use crate::seeds::{config_seed, repeat_seed};
use crate::spec::{AnalyticsSweepSpec, SpecError};
use crate::sweep::with_workers;

#[derive(Debug, Error)]
pub enum DatasetGenError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("every sampled configuration delivered zero packets; nothing to write")]
    AllRowsExcluded,
}

pub const DATASET_COLUMNS: [&str; 9] = [
    "tx_radius",
    "network_size",
    "n_sinks",
    "tx_cost",
    "tx_delay",
    "avg_distance",
    "avg_neighbors",
    "rx_cost",
    "avg_hops",
];
pub const DATASET_TARGET: &str = "energy_per_delivered";

/// One sampled configuration, drawn uniformly from the sweep ranges in a
/// fixed order (radius, size, sinks, receive cost) so a given run index
/// always sees the same draw.
#[derive(Debug, Clone, Copy, PartialEq)]
struct SampledConfig {
    tx_radius: f64,
    network_size: usize,
    n_sinks: u32,
    rx_cost_per_bit: f64,
}

fn sample_config(spec: &AnalyticsSweepSpec, run_index: usize) -> SampledConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(config_seed(spec.base_seed, run_index));
    let (tx_lo, tx_hi) = spec.tx_radius_range;
    let (n_lo, n_hi) = spec.network_size_range;
    let (s_lo, s_hi) = spec.sinks_range;
    let (r_lo, r_hi) = spec.rx_cost_range;
    SampledConfig {
        tx_radius: rng.gen_range(tx_lo..tx_hi),
        network_size: rng.gen_range(n_lo..=n_hi),
        n_sinks: rng.gen_range(s_lo..=s_hi),
        rx_cost_per_bit: rng.gen_range(r_lo..r_hi),
    }
}

/// Outcome of one run: either a finished row or an exclusion because
/// some repeat delivered nothing (the target is undefined there).
enum RunOutcome {
    Row(Vec<f64>, f64),
    Excluded,
}

fn run_one(spec: &AnalyticsSweepSpec, run_index: usize) -> Result<RunOutcome, DatasetGenError> {
    let sampled = sample_config(spec, run_index);
    let cseed = config_seed(spec.base_seed, run_index);

    let repeats = spec.repeats_per_config;
    let mut sums = [0.0f64; 7];
    for repeat in 0..repeats {
        let deployment = DeploymentConfig {
            n_nodes: sampled.network_size,
            tx_radius: sampled.tx_radius,
            sink_position: Position::new(300.0, 150.0),
            rng_seed: repeat_seed(cseed, repeat),
            ..DeploymentConfig::default()
        };
        let radio = RadioParams {
            e_elec: sampled.rx_cost_per_bit,
            ..RadioParams::default()
        };
        let config = SimConfig {
            deployment: deployment.clone(),
            radio,
            ..SimConfig::default()
        };

        let mut graph = deploy_random(&deployment)?;
        let topo = observe_topology(&mut graph, &config.method, &config.radio)?;
        let record = wsn_sim::run_experiment(&config)?;
        if record.delivered == 0 {
            return Ok(RunOutcome::Excluded);
        }
        sums[0] += topo.tx_cost;
        sums[1] += topo.tx_delay;
        sums[2] += topo.avg_distance;
        sums[3] += topo.avg_neighbors;
        sums[4] += topo.rx_cost;
        sums[5] += topo.avg_hops;
        sums[6] += record.ledger.total() / record.delivered as f64;
    }

    let k = repeats as f64;
    let row = vec![
        sampled.tx_radius,
        sampled.network_size as f64,
        sampled.n_sinks as f64,
        sums[0] / k,
        sums[1] / k,
        sums[2] / k,
        sums[3] / k,
        sums[4] / k,
        sums[5] / k,
    ];
    Ok(RunOutcome::Row(row, sums[6] / k))
}

#[derive(Debug, Clone)]
pub struct DatasetOutput {
    pub spec: AnalyticsSweepSpec,
    pub dataset: Dataset,
    /// Runs dropped because a repeat delivered zero packets.
    pub excluded: usize,
}

/// Runs the sampling grid in parallel; rows come back in run order with
/// excluded runs counted rather than written.
pub fn generate_dataset(
    spec: &AnalyticsSweepSpec,
    workers: usize,
) -> Result<DatasetOutput, DatasetGenError> {
    spec.validate()?;
    let outcomes: Result<Vec<RunOutcome>, DatasetGenError> = with_workers(workers, || {
        (0..spec.runs)
            .into_par_iter()
            .map(|run_index| run_one(spec, run_index))
            .collect()
    });

    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut excluded = 0usize;
    for outcome in outcomes? {
        match outcome {
            RunOutcome::Row(row, target) => {
                x.push(row);
                y.push(target);
            }
            RunOutcome::Excluded => excluded += 1,
        }
    }
    if x.is_empty() {
        return Err(DatasetGenError::AllRowsExcluded);
    }
    let dataset = Dataset::from_parts(
        DATASET_COLUMNS.iter().map(|c| c.to_string()).collect(),
        DATASET_TARGET.to_string(),
        x,
        y,
    )?;
    Ok(DatasetOutput {
        spec: spec.clone(),
        dataset,
        excluded,
    })
}

impl DatasetOutput {
    /// The delimited rendering doubles as the analytics input format:
    /// `#` header lines are skipped by the dataset parser, and the first
    /// plain line is the column header.
    pub fn to_report(&self) -> Report {
        let spec = &self.spec;
        let mut report = Report::new("dataset");
        report.setting("runs", spec.runs);
        report.setting("repeats_per_config", spec.repeats_per_config);
        report.setting("base_seed", spec.base_seed);
        report.setting(
            "tx_radius_range",
            format!("{}:{}", spec.tx_radius_range.0, spec.tx_radius_range.1),
        );
        report.setting(
            "network_size_range",
            format!("{}:{}", spec.network_size_range.0, spec.network_size_range.1),
        );
        report.setting(
            "sinks_range",
            format!("{}:{}", spec.sinks_range.0, spec.sinks_range.1),
        );
        report.setting(
            "rx_cost_range",
            format!("{}:{}", spec.rx_cost_range.0, spec.rx_cost_range.1),
        );
        report.note(format!(
            "excluded_rows = {} (zero delivered packets)",
            self.excluded
        ));

        let mut columns: Vec<&str> = DATASET_COLUMNS.to_vec();
        columns.push(DATASET_TARGET);
        let mut table = Table::new("dataset", &columns);
        for (row, target) in self.dataset.x.iter().zip(&self.dataset.y) {
            let mut cells: Vec<crate::output::CellValue> =
                row.iter().map(|&v| v.into()).collect();
            cells.push((*target).into());
            table.push_row(cells);
        }
        report.tables.push(table);
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::OutputFormat;
    use wsn_analytics::parse_dataset;

    /// Narrow, well-connected ranges so every run delivers packets and
    /// the row count is exact.
    fn connected_spec(runs: usize) -> AnalyticsSweepSpec {
        AnalyticsSweepSpec {
            runs,
            repeats_per_config: 2,
            base_seed: 3,
            tx_radius_range: (180.0, 250.0),
            network_size_range: (40, 60),
            sinks_range: (1, 50),
            rx_cost_range: (0.0, 5.0),
        }
    }

    #[test]
    fn row_counts_match_the_grid_arithmetic() {
        let out = generate_dataset(&connected_spec(6), 2).unwrap();
        assert_eq!(out.dataset.n_samples() + out.excluded, 6);
        assert_eq!(out.excluded, 0);
        assert_eq!(out.dataset.n_parameters(), DATASET_COLUMNS.len());
    }

    #[test]
    fn sampled_values_stay_in_their_ranges() {
        let spec = connected_spec(8);
        let out = generate_dataset(&spec, 2).unwrap();
        for row in &out.dataset.x {
            assert!(row[0] >= spec.tx_radius_range.0 && row[0] <= spec.tx_radius_range.1);
            assert!(row[1] >= 40.0 && row[1] <= 60.0);
            assert!(row[2] >= 1.0 && row[2] <= 50.0);
            assert!(row[1].fract() == 0.0 && row[2].fract() == 0.0);
        }
    }

    #[test]
    fn delimited_output_parses_back_as_a_dataset() {
        let out = generate_dataset(&connected_spec(5), 2).unwrap();
        let text = out.to_report().render(OutputFormat::Csv);
        let parsed = parse_dataset(&text).unwrap();
        assert_eq!(parsed.column_names, out.dataset.column_names);
        assert_eq!(parsed.target_name, DATASET_TARGET);
        assert_eq!(parsed.x, out.dataset.x);
        assert_eq!(parsed.y, out.dataset.y);
    }

    #[test]
    fn generation_is_deterministic_across_worker_counts() {
        let a = generate_dataset(&connected_spec(5), 1).unwrap();
        let b = generate_dataset(&connected_spec(5), 4).unwrap();
        assert_eq!(a.dataset.x, b.dataset.x);
        assert_eq!(a.dataset.y, b.dataset.y);
    }

    #[test]
    fn sparse_configs_get_excluded_not_written() {
        // Tiny radius in a large area: most deployments cannot reach the
        // sink at all, so runs land in the exclusion count instead of
        // producing rows with an undefined target.
        let spec = AnalyticsSweepSpec {
            runs: 4,
            repeats_per_config: 1,
            base_seed: 9,
            tx_radius_range: (1.0, 2.0),
            network_size_range: (2, 4),
            sinks_range: (1, 2),
            rx_cost_range: (0.0, 1.0),
        };
        match generate_dataset(&spec, 1) {
            Ok(out) => assert_eq!(out.dataset.n_samples() + out.excluded, 4),
            Err(DatasetGenError::AllRowsExcluded) => {}
            Err(other) => panic!("unexpected error: {other}"),
        }
    }
}
