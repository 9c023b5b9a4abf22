use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use mwsp_core::paths::count_paths;
use mwsp_core::{build_gram, Error, KernelConfig, KernelVariant, Result};

use crate::common::DatasetArgs;

#[derive(Args, Debug)]
pub struct GramArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,

    /// Kernel variant: mwsp, wsp, mwsp-gfm, or sp
    #[arg(long, default_value = "mwsp")]
    pub variant: String,

    /// Depth of the path-extraction trees
    #[arg(long, default_value_t = 2)]
    pub d: usize,

    /// Depth of the node-augmentation trees (scales 0..=k)
    #[arg(long, default_value_t = 1)]
    pub k: usize,

    /// Exponential rate of the kernel
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,

    /// Output CSV path; the JSON sidecar replaces the extension with .json
    #[arg(long)]
    pub out: PathBuf,

    /// Refuse configurations whose feature storage estimate exceeds this
    #[arg(long, default_value_t = 4096)]
    pub mem_limit_mb: usize,
}

/// Storage estimate in bytes for paths plus per-scale feature maps; a
/// deliberate overcount so refusals happen before allocation.
fn estimate_feature_bytes(path_count: usize, total_path_len: usize, k: usize) -> usize {
    let path_storage = total_path_len * 8 + path_count * 40;
    let per_scale = total_path_len * 16 + path_count * 56;
    path_storage + (k + 1) * per_scale
}

pub fn run(args: GramArgs) -> Result<()> {
    let variant = KernelVariant::parse(&args.variant)?;
    if variant == KernelVariant::SpBaseline && (args.d != 2 || args.k != 1 || args.lambda != 0.1) {
        eprintln!("note: the sp variant ignores --d, --k, and --lambda");
    }
    let config = KernelConfig::new(variant, args.d, args.k, args.lambda)?;
    let dataset = args.dataset.load()?;

    if variant != KernelVariant::SpBaseline {
        let (path_count, total_path_len) = count_paths(&dataset, config.d);
        let estimate = estimate_feature_bytes(path_count, total_path_len, config.k);
        let limit = args.mem_limit_mb.saturating_mul(1024 * 1024);
        if estimate > limit {
            return Err(Error::InvalidInput(format!(
                "estimated feature storage {} MiB exceeds the {} MiB limit; \
                 try a smaller k (currently {}) or d, or raise --mem-limit-mb",
                estimate / (1024 * 1024),
                args.mem_limit_mb,
                config.k
            )));
        }
    }

    let started = Instant::now();
    let gram = build_gram(&dataset, config)?;
    let wall = started.elapsed().as_secs_f64();

    fs::write(&args.out, gram.to_csv())?;
    let sidecar_path = args.out.with_extension("json");
    let sidecar = serde_json::json!({
        "dataset": gram.dataset,
        "variant": config.variant.to_string(),
        "d": config.d,
        "k": config.k,
        "lambda": config.lambda,
        "n": gram.n(),
        "wall_time_seconds": wall,
    });
    fs::write(
        &sidecar_path,
        format!(
            "{}\n",
            serde_json::to_string_pretty(&sidecar).expect("sidecar serializes")
        ),
    )?;
    eprintln!(
        "wrote {} ({} x {}) and {} in {:.2}s",
        args.out.display(),
        gram.n(),
        gram.n(),
        sidecar_path.display(),
        wall
    );
    Ok(())
}
