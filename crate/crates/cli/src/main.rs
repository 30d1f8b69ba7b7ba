use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use wsn_cli::analyze::{analyze, AnalyzeOptions};
use wsn_cli::compare::run_compare;
use wsn_cli::config_file::ConfigMap;
use wsn_cli::dataset_gen::generate_dataset;
use wsn_cli::fitedm::fit_edm;
use wsn_cli::output::{open_output, write_rendered, OutputFormat};
use wsn_cli::spec::{AnalyticsSweepSpec, CompareCell, CompareSpec, MethodKind, SweepSpec};
use wsn_cli::sweep::run_sweep;

#[derive(Parser)]
#[command(
    name = "wsn-cli",
    version,
    about = "Seeded experiment sweeps and analytics for the sensor-network simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment per (node count, radius, graph, method) cell.
    Sweep(SweepArgs),
    /// Sample random configurations and emit an analytics dataset.
    Dataset(DatasetArgs),
    /// Correlations, prevalent selection and forest CV on a dataset file.
    Analyze(AnalyzeArgs),
    /// Fit the constituent-flow regression on a flow table.
    FitEdm(FitEdmArgs),
    /// Paired PDTM vs DDTM runs on identical layouts.
    Compare(CompareArgs),
}

/// Flags shared by every command. All optional here; a `--config` file
/// may supply any of them, explicit flags win, and built-in defaults
/// apply last.
#[derive(Args)]
struct CommonArgs {
    /// Base RNG seed (default 1).
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 means one per core (default 0).
    #[arg(long)]
    workers: Option<usize>,
    /// Output format (default csv).
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// `key = value` file mirroring the flags of this command.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated node counts (default 100,150,200,250,300).
    #[arg(long, value_delimiter = ',')]
    node_counts: Option<Vec<usize>>,
    /// Comma-separated transmission radii (default 100,200,300).
    #[arg(long, value_delimiter = ',')]
    tx_radii: Option<Vec<f64>>,
    /// Random graphs per grid cell (default 30).
    #[arg(long)]
    graphs_per_cell: Option<usize>,
    /// Comma-separated methods: pdtm, ddtm (default both).
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<MethodKind>>,
}

#[derive(Args)]
struct DatasetArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Sampled configurations (default 1000).
    #[arg(long)]
    runs: Option<usize>,
    /// Simulations averaged per configuration (default 5).
    #[arg(long)]
    repeats_per_config: Option<usize>,
    /// Transmission radius sampling range LO:HI (default 30:250).
    #[arg(long, value_parser = parse_range_f64)]
    tx_radius_range: Option<(f64, f64)>,
    /// Sensor count sampling range LO:HI (default 10:200).
    #[arg(long, value_parser = parse_range_usize)]
    network_size_range: Option<(usize, usize)>,
    /// Recorded sink count sampling range LO:HI (default 1:50).
    #[arg(long, value_parser = parse_range_u32)]
    sinks_range: Option<(u32, u32)>,
    /// Receive cost per bit sampling range LO:HI (default 0:2000).
    #[arg(long, value_parser = parse_range_f64)]
    rx_cost_range: Option<(f64, f64)>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Dataset file to analyze (as produced by `dataset`).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Correlation pass mark (default 0.35; 0.25 is the relaxed mark).
    #[arg(long)]
    corr_threshold: Option<f64>,
    /// Significance cutoff (default 0.05).
    #[arg(long)]
    p_threshold: Option<f64>,
    /// Cross-validation folds (default 5).
    #[arg(long)]
    folds: Option<usize>,
    /// Trees per forest (default 20).
    #[arg(long)]
    trees: Option<usize>,
    /// Minimum samples per leaf (default 1).
    #[arg(long)]
    min_leaf: Option<usize>,
}

#[derive(Args)]
struct FitEdmArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Flow table file with the five flow columns and overall energy.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated cells NODESxRADIUS (default 50x100,100x100,100x200).
    #[arg(long, value_delimiter = ',')]
    cells: Option<Vec<CompareCell>>,
    /// Paired runs per cell (default 30).
    #[arg(long)]
    pairs_per_cell: Option<usize>,
}

fn parse_range_with<T, E: std::fmt::Display>(
    s: &str,
    parse: impl Fn(&str) -> Result<T, E>,
) -> Result<(T, T), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got `{s}`"))?;
    let lo = parse(lo.trim()).map_err(|e| format!("bad lower bound `{lo}`: {e}"))?;
    let hi = parse(hi.trim()).map_err(|e| format!("bad upper bound `{hi}`: {e}"))?;
    Ok((lo, hi))
}

fn parse_range_f64(s: &str) -> Result<(f64, f64), String> {
    parse_range_with(s, str::parse::<f64>)
}

fn parse_range_usize(s: &str) -> Result<(usize, usize), String> {
    parse_range_with(s, str::parse::<usize>)
}

fn parse_range_u32(s: &str) -> Result<(u32, u32), String> {
    parse_range_with(s, str::parse::<u32>)
}

fn parse_list<T>(s: &str) -> Result<Vec<T>, String>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|item| {
            item.trim()
                .parse::<T>()
                .map_err(|e| format!("bad entry `{item}`: {e}"))
        })
        .collect()
}

/// Common flags after merging with the config file and defaults.
struct Effective {
    seed: u64,
    out: Option<PathBuf>,
    workers: usize,
    format: OutputFormat,
}

const COMMON_KEYS: [&str; 4] = ["seed", "out", "workers", "format"];

fn load_config(path: Option<&PathBuf>) -> anyhow::Result<ConfigMap> {
    match path {
        None => Ok(ConfigMap::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read config file {}", p.display()))?;
            Ok(ConfigMap::parse(&text)?)
        }
    }
}

fn resolve_common(args: CommonArgs, cfg: &ConfigMap) -> anyhow::Result<Effective> {
    let seed = cfg
        .resolve(args.seed, "seed", |s| {
            s.parse::<u64>().map_err(|e| e.to_string())
        })?
        .unwrap_or(1);
    let out = cfg
        .resolve(args.out, "out", |s| Ok(PathBuf::from(s)))?;
    let workers = cfg
        .resolve(args.workers, "workers", |s| {
            s.parse::<usize>().map_err(|e| e.to_string())
        })?
        .unwrap_or(0);
    let format = cfg
        .resolve(args.format, "format", |s| match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("expected csv or json, got `{other}`")),
        })?
        .unwrap_or(OutputFormat::Csv);
    Ok(Effective {
        seed,
        out,
        workers,
        format,
    })
}

/// Opens the output before any work starts, so a bad path fails fast.
fn open_target(effective: &Effective) -> anyhow::Result<Option<std::fs::File>> {
    open_output(effective.out.as_deref()).with_context(|| match &effective.out {
        Some(p) => format!("cannot open output file {}", p.display()),
        None => "cannot open output".to_string(),
    })
}

fn cmd_sweep(args: SweepArgs) -> anyhow::Result<()> {
    let cfg = load_config(args.common.config.as_ref())?;
    let mut keys = COMMON_KEYS.to_vec();
    keys.extend(["node_counts", "tx_radii", "graphs_per_cell", "methods"]);
    cfg.check_known(&keys)?;

    let effective = resolve_common(args.common, &cfg)?;
    let defaults = SweepSpec::default();
    let spec = SweepSpec {
        node_counts: cfg
            .resolve(args.node_counts, "node_counts", parse_list::<usize>)?
            .unwrap_or(defaults.node_counts),
        tx_radii: cfg
            .resolve(args.tx_radii, "tx_radii", parse_list::<f64>)?
            .unwrap_or(defaults.tx_radii),
        graphs_per_cell: cfg
            .resolve(args.graphs_per_cell, "graphs_per_cell", |s| {
                s.parse::<usize>().map_err(|e| e.to_string())
            })?
            .unwrap_or(defaults.graphs_per_cell),
        base_seed: effective.seed,
        methods: cfg
            .resolve(args.methods, "methods", parse_list::<MethodKind>)?
            .unwrap_or(defaults.methods),
    };

    let target = open_target(&effective)?;
    let output = run_sweep(&spec, effective.workers)?;
    write_rendered(target, &output.to_report().render(effective.format))?;
    Ok(())
}

fn cmd_dataset(args: DatasetArgs) -> anyhow::Result<()> {
    let cfg = load_config(args.common.config.as_ref())?;
    let mut keys = COMMON_KEYS.to_vec();
    keys.extend([
        "runs",
        "repeats_per_config",
        "tx_radius_range",
        "network_size_range",
        "sinks_range",
        "rx_cost_range",
    ]);
    cfg.check_known(&keys)?;

    let effective = resolve_common(args.common, &cfg)?;
    let defaults = AnalyticsSweepSpec::default();
    let spec = AnalyticsSweepSpec {
        runs: cfg
            .resolve(args.runs, "runs", |s| {
                s.parse::<usize>().map_err(|e| e.to_string())
            })?
            .unwrap_or(defaults.runs),
        repeats_per_config: cfg
            .resolve(args.repeats_per_config, "repeats_per_config", |s| {
                s.parse::<usize>().map_err(|e| e.to_string())
            })?
            .unwrap_or(defaults.repeats_per_config),
        base_seed: effective.seed,
        tx_radius_range: cfg
            .resolve(args.tx_radius_range, "tx_radius_range", |s| {
                parse_range_f64(s)
            })?
            .unwrap_or(defaults.tx_radius_range),
        network_size_range: cfg
            .resolve(args.network_size_range, "network_size_range", |s| {
                parse_range_usize(s)
            })?
            .unwrap_or(defaults.network_size_range),
        sinks_range: cfg
            .resolve(args.sinks_range, "sinks_range", |s| parse_range_u32(s))?
            .unwrap_or(defaults.sinks_range),
        rx_cost_range: cfg
            .resolve(args.rx_cost_range, "rx_cost_range", |s| parse_range_f64(s))?
            .unwrap_or(defaults.rx_cost_range),
    };

    let target = open_target(&effective)?;
    let output = generate_dataset(&spec, effective.workers)?;
    write_rendered(target, &output.to_report().render(effective.format))?;
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> anyhow::Result<()> {
    let cfg = load_config(args.common.config.as_ref())?;
    let mut keys = COMMON_KEYS.to_vec();
    keys.extend([
        "input",
        "corr_threshold",
        "p_threshold",
        "folds",
        "trees",
        "min_leaf",
    ]);
    cfg.check_known(&keys)?;

    let effective = resolve_common(args.common, &cfg)?;
    let input = cfg
        .resolve(args.input, "input", |s| Ok(PathBuf::from(s)))?
        .ok_or_else(|| anyhow!("missing --input (the dataset file to analyze)"))?;
    let defaults = AnalyzeOptions::default();
    let parse_f64 = |s: &str| s.parse::<f64>().map_err(|e| e.to_string());
    let parse_usize = |s: &str| s.parse::<usize>().map_err(|e| e.to_string());
    let options = AnalyzeOptions {
        corr_threshold: cfg
            .resolve(args.corr_threshold, "corr_threshold", parse_f64)?
            .unwrap_or(defaults.corr_threshold),
        p_threshold: cfg
            .resolve(args.p_threshold, "p_threshold", parse_f64)?
            .unwrap_or(defaults.p_threshold),
        folds: cfg
            .resolve(args.folds, "folds", parse_usize)?
            .unwrap_or(defaults.folds),
        seed: effective.seed,
        n_trees: cfg
            .resolve(args.trees, "trees", parse_usize)?
            .unwrap_or(defaults.n_trees),
        min_leaf: cfg
            .resolve(args.min_leaf, "min_leaf", parse_usize)?
            .unwrap_or(defaults.min_leaf),
    };

    let target = open_target(&effective)?;
    let text = std::fs::read_to_string(&input)
        .with_context(|| format!("cannot read dataset file {}", input.display()))?;
    let dataset = wsn_analytics::parse_dataset(&text)?;
    let output = analyze(&dataset, &options)?;
    write_rendered(target, &output.to_report().render(effective.format))?;
    Ok(())
}

fn cmd_fit_edm(args: FitEdmArgs) -> anyhow::Result<()> {
    let cfg = load_config(args.common.config.as_ref())?;
    let mut keys = COMMON_KEYS.to_vec();
    keys.push("input");
    cfg.check_known(&keys)?;

    let effective = resolve_common(args.common, &cfg)?;
    let input = cfg
        .resolve(args.input, "input", |s| Ok(PathBuf::from(s)))?
        .ok_or_else(|| anyhow!("missing --input (the flow table to fit)"))?;
    let target = open_target(&effective)?;
    let text = std::fs::read_to_string(&input)
        .with_context(|| format!("cannot read flow table {}", input.display()))?;
    let output = fit_edm(&text, effective.seed)?;
    write_rendered(target, &output.to_report().render(effective.format))?;
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> anyhow::Result<()> {
    let cfg = load_config(args.common.config.as_ref())?;
    let mut keys = COMMON_KEYS.to_vec();
    keys.extend(["cells", "pairs_per_cell"]);
    cfg.check_known(&keys)?;

    let effective = resolve_common(args.common, &cfg)?;
    let defaults = CompareSpec::default();
    let spec = CompareSpec {
        cells: cfg
            .resolve(args.cells, "cells", parse_list::<CompareCell>)?
            .unwrap_or(defaults.cells),
        pairs_per_cell: cfg
            .resolve(args.pairs_per_cell, "pairs_per_cell", |s| {
                s.parse::<usize>().map_err(|e| e.to_string())
            })?
            .unwrap_or(defaults.pairs_per_cell),
        base_seed: effective.seed,
    };

    let target = open_target(&effective)?;
    let output = run_compare(&spec, effective.workers)?;
    write_rendered(target, &output.to_report().render(effective.format))?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Dataset(args) => cmd_dataset(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::FitEdm(args) => cmd_fit_edm(args),
        Command::Compare(args) => cmd_compare(args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
