use std::fs;
use std::path::PathBuf;

use clap::Args;
use mwsp_core::{dataset_statistics, Result, SpLengthMode};

use crate::common::DatasetArgs;

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,

    /// Shortest-path averaging: per-graph (mean of per-graph means) or
    /// pooled (one mean over all connected pairs)
    #[arg(long, default_value = "per-graph", value_parser = parse_sp_mode)]
    pub sp_mode: SpLengthMode,

    /// Also write the JSON report to this file
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_sp_mode(s: &str) -> std::result::Result<SpLengthMode, String> {
    match s.to_ascii_lowercase().as_str() {
        "per-graph" => Ok(SpLengthMode::PerGraphMean),
        "pooled" => Ok(SpLengthMode::Pooled),
        other => Err(format!("unknown sp mode {other:?} (per-graph or pooled)")),
    }
}

pub fn run(args: StatsArgs) -> Result<()> {
    let dataset = args.dataset.load()?;
    let report = dataset_statistics(&dataset, args.sp_mode)?;
    let labels = report
        .node_label_count
        .map_or("N/A".to_string(), |c| c.to_string());
    println!(
        "{:<16} {:>6} {:>8} {:>10} {:>10} {:>7} {:>9} {:>7}",
        "dataset", "size", "classes", "avg_nodes", "avg_edges", "labels", "mean_sp", "max_sp"
    );
    println!(
        "{:<16} {:>6} {:>8} {:>10.2} {:>10.2} {:>7} {:>9.2} {:>7}",
        report.name,
        report.size,
        report.class_count,
        report.avg_nodes,
        report.avg_edges,
        labels,
        report.mean_sp_length,
        report.max_sp_length
    );
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{json}");
    if let Some(path) = &args.out {
        fs::write(path, format!("{json}\n"))?;
    }
    Ok(())
}
