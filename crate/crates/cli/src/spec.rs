//! Experiment grid specifications shared by the sweep, dataset and
//! compare commands, with their defaults and validation rules.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;
use wsn_sim::CostMethod;

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error("{list} must not be empty")]
    EmptyList { list: &'static str },
    #[error("{field} must be at least {min}, got {got}")]
    TooSmall {
        field: &'static str,
        min: u64,
        got: u64,
    },
    #[error("{field} must be positive and finite, got {got}")]
    BadPositive { field: &'static str, got: f64 },
    #[error("{field} range is degenerate: {lo}..{hi} (need lo < hi)")]
    DegenerateRange {
        field: &'static str,
        lo: f64,
        hi: f64,
    },
    #[error("unknown method `{0}` (expected pdtm or ddtm)")]
    UnknownMethod(String),
    #[error("bad cell `{0}` (expected NODESxRADIUS, e.g. 100x200)")]
    BadCell(String),
}

/// Topology-management method selector, the CLI-facing face of
/// [`CostMethod`]. The radio exponent and sink stand-in energy stay at
/// their defaults; experiments vary the method, not its internals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodKind {
    Pdtm,
    Ddtm,
}

impl MethodKind {
    pub fn cost_method(self) -> CostMethod {
        match self {
            MethodKind::Pdtm => CostMethod::pdtm_default(),
            MethodKind::Ddtm => CostMethod::Ddtm,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Pdtm => "pdtm",
            MethodKind::Ddtm => "ddtm",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pdtm" => Ok(MethodKind::Pdtm),
            "ddtm" => Ok(MethodKind::Ddtm),
            other => Err(SpecError::UnknownMethod(other.to_string())),
        }
    }
}

/// Grid for the `sweep` command: every combination of node count,
/// transmission radius, graph index and method becomes one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub node_counts: Vec<usize>,
    pub tx_radii: Vec<f64>,
    pub graphs_per_cell: usize,
    pub base_seed: u64,
    pub methods: Vec<MethodKind>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            node_counts: vec![100, 150, 200, 250, 300],
            tx_radii: vec![100.0, 200.0, 300.0],
            graphs_per_cell: 30,
            base_seed: 1,
            methods: vec![MethodKind::Pdtm, MethodKind::Ddtm],
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.node_counts.is_empty() {
            return Err(SpecError::EmptyList { list: "node_counts" });
        }
        if self.tx_radii.is_empty() {
            return Err(SpecError::EmptyList { list: "tx_radii" });
        }
        if self.methods.is_empty() {
            return Err(SpecError::EmptyList { list: "methods" });
        }
        if self.graphs_per_cell < 1 {
            return Err(SpecError::TooSmall {
                field: "graphs_per_cell",
                min: 1,
                got: self.graphs_per_cell as u64,
            });
        }
        for &n in &self.node_counts {
            if n < 1 {
                return Err(SpecError::TooSmall {
                    field: "node_counts entry",
                    min: 1,
                    got: n as u64,
                });
            }
        }
        for &tx in &self.tx_radii {
            if !(tx > 0.0 && tx.is_finite()) {
                return Err(SpecError::BadPositive {
                    field: "tx_radii entry",
                    got: tx,
                });
            }
        }
        Ok(())
    }

    pub fn row_count(&self) -> usize {
        self.node_counts.len() * self.tx_radii.len() * self.graphs_per_cell * self.methods.len()
    }
}

/// Sampling ranges and run counts for the `dataset` command. Each run
/// draws one configuration; each configuration is simulated
/// `repeats_per_config` times and the observed columns are averaged.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticsSweepSpec {
    pub runs: usize,
    pub repeats_per_config: usize,
    pub base_seed: u64,
    /// Transmission radius sampling range (uniform, continuous).
    pub tx_radius_range: (f64, f64),
    /// Sensor count sampling range (uniform, integer, inclusive).
    pub network_size_range: (usize, usize),
    /// Sink count sampling range (uniform, integer, inclusive). The
    /// engine routes to a single sink; this column is recorded so the
    /// analysis stage sees an independently sampled parameter.
    pub sinks_range: (u32, u32),
    /// Receive cost per bit sampling range (uniform, continuous).
    pub rx_cost_range: (f64, f64),
}

impl Default for AnalyticsSweepSpec {
    fn default() -> Self {
        AnalyticsSweepSpec {
            runs: 1000,
            repeats_per_config: 5,
            base_seed: 1,
            tx_radius_range: (30.0, 250.0),
            network_size_range: (10, 200),
            sinks_range: (1, 50),
            rx_cost_range: (0.0, 2000.0),
        }
    }
}

impl AnalyticsSweepSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.runs < 1 {
            return Err(SpecError::TooSmall {
                field: "runs",
                min: 1,
                got: self.runs as u64,
            });
        }
        if self.repeats_per_config < 1 {
            return Err(SpecError::TooSmall {
                field: "repeats_per_config",
                min: 1,
                got: self.repeats_per_config as u64,
            });
        }
        let (tx_lo, tx_hi) = self.tx_radius_range;
        if !(tx_lo.is_finite() && tx_hi.is_finite() && tx_lo < tx_hi && tx_lo > 0.0) {
            return Err(SpecError::DegenerateRange {
                field: "tx_radius_range",
                lo: tx_lo,
                hi: tx_hi,
            });
        }
        let (n_lo, n_hi) = self.network_size_range;
        if n_lo < 1 || n_lo >= n_hi {
            return Err(SpecError::DegenerateRange {
                field: "network_size_range",
                lo: n_lo as f64,
                hi: n_hi as f64,
            });
        }
        let (s_lo, s_hi) = self.sinks_range;
        if s_lo < 1 || s_lo >= s_hi {
            return Err(SpecError::DegenerateRange {
                field: "sinks_range",
                lo: s_lo as f64,
                hi: s_hi as f64,
            });
        }
        let (r_lo, r_hi) = self.rx_cost_range;
        if !(r_lo.is_finite() && r_hi.is_finite() && r_lo < r_hi && r_lo >= 0.0) {
            return Err(SpecError::DegenerateRange {
                field: "rx_cost_range",
                lo: r_lo,
                hi: r_hi,
            });
        }
        Ok(())
    }
}

/// One (node count, transmission radius) cell of the paired comparison
/// grid, written `NODESxRADIUS` on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareCell {
    pub n_nodes: usize,
    pub tx_radius: f64,
}

impl fmt::Display for CompareCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_nodes, self.tx_radius)
    }
}

impl FromStr for CompareCell {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let bad = || SpecError::BadCell(s.to_string());
        let (n, tx) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let n_nodes: usize = n.trim().parse().map_err(|_| bad())?;
        let tx_radius: f64 = tx.trim().parse().map_err(|_| bad())?;
        Ok(CompareCell { n_nodes, tx_radius })
    }
}

/// Grid for the `compare` command: paired PDTM/DDTM runs on identical
/// layouts, over an explicit list of cells rather than a product grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareSpec {
    pub cells: Vec<CompareCell>,
    pub pairs_per_cell: usize,
    pub base_seed: u64,
}

impl Default for CompareSpec {
    fn default() -> Self {
        CompareSpec {
            cells: vec![
                CompareCell {
                    n_nodes: 50,
                    tx_radius: 100.0,
                },
                CompareCell {
                    n_nodes: 100,
                    tx_radius: 100.0,
                },
                CompareCell {
                    n_nodes: 100,
                    tx_radius: 200.0,
                },
            ],
            pairs_per_cell: 30,
            base_seed: 1,
        }
    }
}

impl CompareSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.cells.is_empty() {
            return Err(SpecError::EmptyList { list: "cells" });
        }
        if self.pairs_per_cell < 1 {
            return Err(SpecError::TooSmall {
                field: "pairs_per_cell",
                min: 1,
                got: self.pairs_per_cell as u64,
            });
        }
        for cell in &self.cells {
            if cell.n_nodes < 1 {
                return Err(SpecError::TooSmall {
                    field: "cell node count",
                    min: 1,
                    got: cell.n_nodes as u64,
                });
            }
            if !(cell.tx_radius > 0.0 && cell.tx_radius.is_finite()) {
                return Err(SpecError::BadPositive {
                    field: "cell tx radius",
                    got: cell.tx_radius,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sweep_grid_has_900_rows() {
        let spec = SweepSpec::default();
        spec.validate().unwrap();
        assert_eq!(spec.row_count(), 900);
    }

    #[test]
    fn sweep_rejects_empty_lists_and_zero_graphs() {
        let mut spec = SweepSpec::default();
        spec.node_counts.clear();
        assert_eq!(
            spec.validate(),
            Err(SpecError::EmptyList { list: "node_counts" })
        );

        let mut spec = SweepSpec::default();
        spec.graphs_per_cell = 0;
        assert!(matches!(spec.validate(), Err(SpecError::TooSmall { .. })));

        let mut spec = SweepSpec::default();
        spec.tx_radii = vec![100.0, -3.0];
        assert!(matches!(spec.validate(), Err(SpecError::BadPositive { .. })));
    }

    #[test]
    fn method_names_round_trip() {
        assert_eq!("pdtm".parse::<MethodKind>().unwrap(), MethodKind::Pdtm);
        assert_eq!("DDTM".parse::<MethodKind>().unwrap(), MethodKind::Ddtm);
        assert_eq!(MethodKind::Pdtm.to_string(), "pdtm");
        assert!(matches!(
            "dijkstra".parse::<MethodKind>(),
            Err(SpecError::UnknownMethod(_))
        ));
    }

    #[test]
    fn analytics_defaults_validate_and_bad_ranges_do_not() {
        let spec = AnalyticsSweepSpec::default();
        spec.validate().unwrap();

        let mut spec = AnalyticsSweepSpec::default();
        spec.tx_radius_range = (250.0, 250.0);
        assert!(matches!(
            spec.validate(),
            Err(SpecError::DegenerateRange { field: "tx_radius_range", .. })
        ));

        let mut spec = AnalyticsSweepSpec::default();
        spec.network_size_range = (200, 10);
        assert!(matches!(spec.validate(), Err(SpecError::DegenerateRange { .. })));

        let mut spec = AnalyticsSweepSpec::default();
        spec.rx_cost_range = (-1.0, 5.0);
        assert!(matches!(spec.validate(), Err(SpecError::DegenerateRange { .. })));
    }

    #[test]
    fn compare_cells_parse_and_default_grid_matches() {
        let cell: CompareCell = "100x200".parse().unwrap();
        assert_eq!(cell.n_nodes, 100);
        assert_eq!(cell.tx_radius, 200.0);
        assert!("100-200".parse::<CompareCell>().is_err());
        assert!("x200".parse::<CompareCell>().is_err());

        let spec = CompareSpec::default();
        spec.validate().unwrap();
        assert_eq!(spec.cells.len(), 3);
        assert_eq!(spec.pairs_per_cell, 30);
    }
}
