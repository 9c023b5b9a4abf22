//! Shared dataset resolution and loading for all subcommands.

use std::path::{Path, PathBuf};

use clap::Args;
use mwsp_core::{tudataset, Error, GraphDataset, Result, SurrogateMode};

/// Environment variable holding the default dataset root.
pub const DATA_ROOT_ENV: &str = "MWSP_DATA";

#[derive(Args, Debug, Clone)]
pub struct DatasetArgs {
    /// Dataset root directory (default: $MWSP_DATA)
    #[arg(long)]
    pub data: Option<PathBuf>,

    /// Dataset name; files are read from <root>/<name>/ or <root>
    #[arg(long)]
    pub name: String,

    /// Assign surrogate node labels (degree or uniform)
    #[arg(long, value_parser = parse_label_mode)]
    pub labels: Option<SurrogateMode>,

    /// Allow --labels to replace existing node labels
    #[arg(long)]
    pub override_labels: bool,
}

fn parse_label_mode(s: &str) -> std::result::Result<SurrogateMode, String> {
    match s.to_ascii_lowercase().as_str() {
        "degree" => Ok(SurrogateMode::Degree),
        "uniform" => Ok(SurrogateMode::Uniform),
        other => Err(format!("unknown label mode {other:?} (degree or uniform)")),
    }
}

impl DatasetArgs {
    pub fn root(&self) -> Result<PathBuf> {
        if let Some(root) = &self.data {
            return Ok(root.clone());
        }
        std::env::var_os(DATA_ROOT_ENV).map(PathBuf::from).ok_or_else(|| {
            Error::InvalidInput(format!(
                "no dataset root: pass --data or set {DATA_ROOT_ENV}"
            ))
        })
    }

    /// Loads the dataset, trying <root>/<name>/ then <root> itself, and
    /// applies surrogate labeling when requested.
    pub fn load(&self) -> Result<GraphDataset> {
        let root = self.root()?;
        let dataset = load_from_root(&root, &self.name)?;
        match self.labels {
            Some(mode) => dataset.with_surrogate_labels(mode, self.override_labels),
            None => Ok(dataset),
        }
    }
}

pub fn load_from_root(root: &Path, name: &str) -> Result<GraphDataset> {
    let nested = root.join(name);
    if nested.join(format!("{name}_graph_indicator.txt")).is_file() {
        tudataset::load_tudataset(&nested, name)
    } else {
        tudataset::load_tudataset(root, name)
    }
}
