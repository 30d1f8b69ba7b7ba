//! The `compare` command: paired PDTM/DDTM experiments on identical
//! layouts, with per-cell and pooled win statistics.

use rayon::prelude::*;
use thiserror::Error;
use wsn_sim::engine::SimError;
use wsn_sim::{compare_methods, DeploymentConfig, SimConfig};

use crate::output::{Report, Table};
use crate::seeds::cell_seed;
use crate::spec::{CompareCell, CompareSpec, SpecError};
use crate::sweep::with_workers;

#[derive(Debug, Error)]
pub enum CompareError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// One paired run: both methods on the same seeded deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparePair {
    pub cell: CompareCell,
    pub pair_index: usize,
    pub seed: u64,
    pub pdtm_delivered: u64,
    pub pdtm_lost: u64,
    pub pdtm_dead: u64,
    pub pdtm_lifetime: u64,
    pub ddtm_delivered: u64,
    pub ddtm_lost: u64,
    pub ddtm_dead: u64,
    pub ddtm_lifetime: u64,
}

impl ComparePair {
    pub fn pdtm_won_delivery(&self) -> bool {
        self.pdtm_delivered > self.ddtm_delivered
    }
}

/// Aggregates over a slice of pairs (one cell, or the pooled grid).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareSummary {
    pub pairs: usize,
    pub pdtm_delivery_wins: usize,
    pub delivery_ties: usize,
    pub mean_pdtm_delivered: f64,
    pub mean_ddtm_delivered: f64,
    pub mean_pdtm_lost: f64,
    pub mean_ddtm_lost: f64,
    pub mean_pdtm_dead: f64,
    pub mean_ddtm_dead: f64,
    pub mean_pdtm_lifetime: f64,
    pub mean_ddtm_lifetime: f64,
}

impl CompareSummary {
    pub fn from_pairs(pairs: &[ComparePair]) -> Self {
        let n = pairs.len();
        let mean = |f: &dyn Fn(&ComparePair) -> u64| {
            pairs.iter().map(|p| f(p) as f64).sum::<f64>() / n as f64
        };
        CompareSummary {
            pairs: n,
            pdtm_delivery_wins: pairs.iter().filter(|p| p.pdtm_won_delivery()).count(),
            delivery_ties: pairs
                .iter()
                .filter(|p| p.pdtm_delivered == p.ddtm_delivered)
                .count(),
            mean_pdtm_delivered: mean(&|p| p.pdtm_delivered),
            mean_ddtm_delivered: mean(&|p| p.ddtm_delivered),
            mean_pdtm_lost: mean(&|p| p.pdtm_lost),
            mean_ddtm_lost: mean(&|p| p.ddtm_lost),
            mean_pdtm_dead: mean(&|p| p.pdtm_dead),
            mean_ddtm_dead: mean(&|p| p.ddtm_dead),
            mean_pdtm_lifetime: mean(&|p| p.pdtm_lifetime),
            mean_ddtm_lifetime: mean(&|p| p.ddtm_lifetime),
        }
    }

    pub fn win_fraction(&self) -> f64 {
        self.pdtm_delivery_wins as f64 / self.pairs as f64
    }
}

#[derive(Debug, Clone)]
pub struct CompareOutput {
    pub spec: CompareSpec,
    pub pairs: Vec<ComparePair>,
}

fn run_pair(spec: &CompareSpec, cell: CompareCell, pair_index: usize) -> Result<ComparePair, CompareError> {
    let seed = cell_seed(spec.base_seed, cell.n_nodes, cell.tx_radius, pair_index);
    let config = SimConfig {
        deployment: DeploymentConfig {
            n_nodes: cell.n_nodes,
            tx_radius: cell.tx_radius,
            rng_seed: seed,
            ..DeploymentConfig::default()
        },
        ..SimConfig::default()
    };
    let cmp = compare_methods(&config)?;
    Ok(ComparePair {
        cell,
        pair_index,
        seed,
        pdtm_delivered: cmp.pdtm.delivered,
        pdtm_lost: cmp.pdtm.lost,
        pdtm_dead: cmp.pdtm.dead_nodes_at_end,
        pdtm_lifetime: cmp.pdtm.lifetime,
        ddtm_delivered: cmp.ddtm.delivered,
        ddtm_lost: cmp.ddtm.lost,
        ddtm_dead: cmp.ddtm.dead_nodes_at_end,
        ddtm_lifetime: cmp.ddtm.lifetime,
    })
}

/// Runs every (cell, pair index) combination in parallel; pairs come
/// back grouped by cell in spec order, then by pair index.
pub fn run_compare(spec: &CompareSpec, workers: usize) -> Result<CompareOutput, CompareError> {
    spec.validate()?;
    let mut jobs = Vec::with_capacity(spec.cells.len() * spec.pairs_per_cell);
    for &cell in &spec.cells {
        for pair_index in 0..spec.pairs_per_cell {
            jobs.push((cell, pair_index));
        }
    }
    let pairs: Result<Vec<ComparePair>, CompareError> = with_workers(workers, || {
        jobs.par_iter()
            .map(|&(cell, i)| run_pair(spec, cell, i))
            .collect()
    });
    Ok(CompareOutput {
        spec: spec.clone(),
        pairs: pairs?,
    })
}

impl CompareOutput {
    pub fn pooled_summary(&self) -> CompareSummary {
        CompareSummary::from_pairs(&self.pairs)
    }

    pub fn cell_summary(&self, cell: CompareCell) -> CompareSummary {
        let pairs: Vec<ComparePair> = self
            .pairs
            .iter()
            .filter(|p| p.cell == cell)
            .cloned()
            .collect();
        CompareSummary::from_pairs(&pairs)
    }

    pub fn to_report(&self) -> Report {
        let mut report = Report::new("compare");
        report.setting(
            "cells",
            self.spec
                .cells
                .iter()
                .map(CompareCell::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        report.setting("pairs_per_cell", self.spec.pairs_per_cell);
        report.setting("base_seed", self.spec.base_seed);

        let mut pairs_table = Table::new(
            "pairs",
            &[
                "n_nodes",
                "tx_radius",
                "pair_index",
                "seed",
                "pdtm_delivered",
                "ddtm_delivered",
                "pdtm_lost",
                "ddtm_lost",
                "pdtm_dead",
                "ddtm_dead",
                "pdtm_lifetime",
                "ddtm_lifetime",
            ],
        );
        for p in &self.pairs {
            pairs_table.push_row(vec![
                p.cell.n_nodes.into(),
                p.cell.tx_radius.into(),
                p.pair_index.into(),
                p.seed.into(),
                p.pdtm_delivered.into(),
                p.ddtm_delivered.into(),
                p.pdtm_lost.into(),
                p.ddtm_lost.into(),
                p.pdtm_dead.into(),
                p.ddtm_dead.into(),
                p.pdtm_lifetime.into(),
                p.ddtm_lifetime.into(),
            ]);
        }

        let mut summary_table = Table::new(
            "summary",
            &[
                "scope",
                "pairs",
                "pdtm_delivery_wins",
                "delivery_ties",
                "mean_pdtm_delivered",
                "mean_ddtm_delivered",
                "mean_pdtm_lost",
                "mean_ddtm_lost",
                "mean_pdtm_dead",
                "mean_ddtm_dead",
                "mean_pdtm_lifetime",
                "mean_ddtm_lifetime",
            ],
        );
        let mut push_summary = |scope: String, s: CompareSummary| {
            summary_table.push_row(vec![
                scope.into(),
                s.pairs.into(),
                s.pdtm_delivery_wins.into(),
                s.delivery_ties.into(),
                s.mean_pdtm_delivered.into(),
                s.mean_ddtm_delivered.into(),
                s.mean_pdtm_lost.into(),
                s.mean_ddtm_lost.into(),
                s.mean_pdtm_dead.into(),
                s.mean_ddtm_dead.into(),
                s.mean_pdtm_lifetime.into(),
                s.mean_ddtm_lifetime.into(),
            ]);
        };
        for &cell in &self.spec.cells {
            push_summary(cell.to_string(), self.cell_summary(cell));
        }
        push_summary("pooled".to_string(), self.pooled_summary());

        report.tables.push(pairs_table);
        report.tables.push(summary_table);
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::OutputFormat;

    fn tiny_spec() -> CompareSpec {
        CompareSpec {
            cells: vec![
                CompareCell {
                    n_nodes: 25,
                    tx_radius: 120.0,
                },
                CompareCell {
                    n_nodes: 40,
                    tx_radius: 150.0,
                },
            ],
            pairs_per_cell: 3,
            base_seed: 5,
        }
    }

    #[test]
    fn pairs_cover_the_grid_in_order() {
        let out = run_compare(&tiny_spec(), 2).unwrap();
        assert_eq!(out.pairs.len(), 6);
        let key: Vec<(usize, usize)> = out
            .pairs
            .iter()
            .map(|p| (p.cell.n_nodes, p.pair_index))
            .collect();
        assert_eq!(key, vec![(25, 0), (25, 1), (25, 2), (40, 0), (40, 1), (40, 2)]);
    }

    #[test]
    fn summaries_add_up() {
        let out = run_compare(&tiny_spec(), 2).unwrap();
        let pooled = out.pooled_summary();
        assert_eq!(pooled.pairs, 6);
        let per_cell: usize = out
            .spec
            .cells
            .iter()
            .map(|&c| out.cell_summary(c).pdtm_delivery_wins)
            .sum();
        assert_eq!(per_cell, pooled.pdtm_delivery_wins);
    }

    #[test]
    fn report_carries_both_tables() {
        let out = run_compare(&tiny_spec(), 1).unwrap();
        let text = out.to_report().render(OutputFormat::Csv);
        assert!(text.contains("# table: pairs\n"));
        assert!(text.contains("# table: summary\n"));
        assert!(text.contains("pooled,6,"));
    }

    #[test]
    fn rerun_is_identical() {
        let a = run_compare(&tiny_spec(), 1).unwrap();
        let b = run_compare(&tiny_spec(), 3).unwrap();
        assert_eq!(a.pairs, b.pairs);
    }
}
