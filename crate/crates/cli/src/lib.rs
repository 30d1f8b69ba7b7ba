//! Batch experiment driver for the sensor-network simulator and the
//! analytics pipeline.
//!
//! Five commands, each a thin binary wrapper over a library function so
//! tests can drive them in-process: [`sweep`] runs the method-by-grid
//! experiment matrix, [`dataset_gen`] samples random configurations
//! into an analytics dataset, [`analyze`] runs the dependency pipeline
//! on such a dataset, [`fitedm`] fits the flow regression on a flow
//! table, and [`compare`] runs paired PDTM/DDTM experiments on shared
//! layouts. [`seeds`] derives per-cell seeds from the base seed so grid
//! cells are independent and stable, [`observe`] measures topology
//! observables on a freshly deployed graph, [`output`] renders results
//! as delimited text or JSON behind a configuration-echo header, and
//! [`config_file`] reads `key = value` files mirroring the flags.

pub mod analyze;
pub mod compare;
pub mod config_file;
pub mod dataset_gen;
pub mod fitedm;
pub mod observe;
pub mod output;
pub mod seeds;
pub mod spec;
pub mod sweep;
