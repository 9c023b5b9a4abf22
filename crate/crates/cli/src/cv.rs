use std::fs;
use std::path::PathBuf;

use clap::Args;
use mwsp_core::cv::{cross_validate, CvConfig, FixedParams, Grids};
use mwsp_core::{Error, KernelVariant, Result};

use crate::common::DatasetArgs;

#[derive(Args, Debug)]
pub struct CvArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,

    /// Kernel variant: mwsp, wsp, mwsp-gfm, or sp
    #[arg(long, default_value = "mwsp")]
    pub variant: String,

    #[arg(long, default_value_t = 10)]
    pub folds: usize,

    #[arg(long, default_value_t = 10)]
    pub repeats: usize,

    #[arg(long, default_value_t = 3)]
    pub inner_folds: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Cap on both the d and k grids (keeps desk-scale runtimes)
    #[arg(long)]
    pub max_dk: Option<usize>,

    /// Comma-separated d grid, e.g. 0,1,2
    #[arg(long)]
    pub d_grid: Option<String>,

    /// Comma-separated k grid
    #[arg(long)]
    pub k_grid: Option<String>,

    /// Comma-separated lambda grid
    #[arg(long)]
    pub lambda_grid: Option<String>,

    /// Comma-separated C grid
    #[arg(long)]
    pub c_grid: Option<String>,

    /// Fixed parameters bypassing inner selection, e.g. d=2,k=1,lambda=0.1,C=10
    #[arg(long)]
    pub fixed: Option<String>,

    /// Output JSON report path
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_list<T: std::str::FromStr>(text: &str, flag: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| Error::InvalidInput(format!("bad {flag} entry {t:?}")))
        })
        .collect()
}

fn parse_fixed(text: &str) -> Result<FixedParams> {
    let mut d = None;
    let mut k = None;
    let mut lambda = None;
    let mut c = None;
    for pair in text.split([',', ' ']).filter(|p| !p.trim().is_empty()) {
        let (key, value) = pair.split_once('=').ok_or_else(|| {
            Error::InvalidInput(format!("bad --fixed entry {pair:?} (expected key=value)"))
        })?;
        let parse_err = || Error::InvalidInput(format!("bad --fixed value in {pair:?}"));
        match key.trim().to_ascii_lowercase().as_str() {
            "d" => d = Some(value.trim().parse().map_err(|_| parse_err())?),
            "k" => k = Some(value.trim().parse().map_err(|_| parse_err())?),
            "lambda" => lambda = Some(value.trim().parse().map_err(|_| parse_err())?),
            "c" => c = Some(value.trim().parse().map_err(|_| parse_err())?),
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown --fixed key {other:?} (d, k, lambda, C)"
                )))
            }
        }
    }
    match (d, k, lambda, c) {
        (Some(d), Some(k), Some(lambda), Some(c)) => Ok(FixedParams { d, k, lambda, c }),
        _ => Err(Error::InvalidInput(
            "--fixed needs all of d, k, lambda, and C".into(),
        )),
    }
}

pub fn run(args: CvArgs) -> Result<()> {
    let variant = KernelVariant::parse(&args.variant)?;
    let mut grids = match args.max_dk {
        Some(cap) => Grids::capped(cap),
        None => Grids::full(),
    };
    if let Some(text) = &args.d_grid {
        grids.ds = parse_list(text, "--d-grid")?;
    }
    if let Some(text) = &args.k_grid {
        grids.ks = parse_list(text, "--k-grid")?;
    }
    if let Some(text) = &args.lambda_grid {
        grids.lambdas = parse_list(text, "--lambda-grid")?;
    }
    if let Some(text) = &args.c_grid {
        grids.cs = parse_list(text, "--c-grid")?;
    }
    let fixed = args.fixed.as_deref().map(parse_fixed).transpose()?;
    let config = CvConfig {
        folds: args.folds,
        repeats: args.repeats,
        inner_folds: args.inner_folds,
        seed: args.seed,
        fixed,
    };
    let dataset = args.dataset.load()?;
    let report = cross_validate(&dataset, variant, &grids, &config)?;
    fs::write(
        &args.out,
        format!(
            "{}\n",
            serde_json::to_string_pretty(&report).expect("report serializes")
        ),
    )?;
    println!(
        "{}: {} accuracy {:.4} +/- {:.4} over {} repeats x {} folds",
        report.dataset,
        report.variant,
        report.mean_accuracy,
        report.std_over_repeats,
        report.repeats,
        report.folds
    );
    eprintln!("wrote {}", args.out.display());
    Ok(())
}
