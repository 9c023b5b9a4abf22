//! Repeated stratified k-fold cross-validation with inner-loop
//! hyperparameter selection.
//!
//! Pairwise distance matrices are built once per (d, k) on the full
//! dataset (vocabularies are unsupervised) and sliced per fold; every
//! training submatrix is spectrum-clipped before the SVM sees it. The
//! inner selection loop only ever receives training indices, so test-fold
//! labels cannot leak into model choice.

use std::collections::HashMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::GraphDataset;
use crate::kernels::{self, DistanceMatrix, GramMatrix, KernelVariant};
use crate::svm;

/// Hyperparameter grids searched by the inner selection loop.
#[derive(Debug, Clone, Serialize)]
pub struct Grids {
    pub ds: Vec<usize>,
    pub ks: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub cs: Vec<f64>,
}

impl Grids {
    /// The full experiment grids: d, k in 0..=6, lambda in 1e-4..=1e1,
    /// C in 1e-3..=1e3 (decades).
    pub fn full() -> Self {
        Grids {
            ds: (0..=6).collect(),
            ks: (0..=6).collect(),
            lambdas: (-4..=1).map(|e| 10f64.powi(e)).collect(),
            cs: (-3..=3).map(|e| 10f64.powi(e)).collect(),
        }
    }

    /// Full grids with d and k capped (the desk-scale restriction).
    pub fn capped(max_dk: usize) -> Self {
        let mut grids = Grids::full();
        grids.ds.retain(|&d| d <= max_dk);
        grids.ks.retain(|&k| k <= max_dk);
        grids
    }

    fn validate(&self) -> Result<()> {
        if self.ds.is_empty() || self.ks.is_empty() || self.lambdas.is_empty() || self.cs.is_empty()
        {
            return Err(Error::InvalidInput("empty hyperparameter grid".into()));
        }
        if self.lambdas.iter().any(|&l| !(l > 0.0)) || self.cs.iter().any(|&c| !(c > 0.0)) {
            return Err(Error::InvalidInput(
                "lambda and C grid values must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Bypasses inner selection with one fixed configuration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FixedParams {
    pub d: usize,
    pub k: usize,
    pub lambda: f64,
    pub c: f64,
}

/// Protocol parameters.
#[derive(Debug, Clone, Serialize)]
pub struct CvConfig {
    pub folds: usize,
    pub repeats: usize,
    pub inner_folds: usize,
    pub seed: u64,
    pub fixed: Option<FixedParams>,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            repeats: 10,
            inner_folds: 3,
            seed: 0,
            fixed: None,
        }
    }
}

/// The hyperparameters picked for one outer fold.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct ChosenParams {
    pub d: usize,
    pub k: usize,
    pub lambda: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CvTimings {
    pub total_seconds: f64,
    pub distance_seconds: f64,
}

/// Full cross-validation output: the raw fold table plus aggregates.
#[derive(Debug, Clone, Serialize)]
pub struct CvReport {
    pub dataset: String,
    pub variant: String,
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    pub grids: Grids,
    pub fixed: Option<FixedParams>,
    /// accuracy[repeat][fold]
    pub fold_accuracies: Vec<Vec<f64>>,
    /// chosen[repeat][fold]
    pub chosen_params: Vec<Vec<ChosenParams>>,
    pub mean_accuracy: f64,
    /// Sample standard deviation of the per-repeat mean accuracies (the
    /// headline number).
    pub std_over_repeats: f64,
    /// Sample standard deviation over all individual fold accuracies.
    pub std_over_folds: f64,
    pub timings: CvTimings,
}

/// Stratified fold assignment: per class, indices are shuffled and dealt
/// round-robin, so each class's fold counts differ by at most one.
pub fn stratified_folds(
    class_ids: &[i64],
    folds: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let mut classes: Vec<i64> = class_ids.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let mut assignment = vec![Vec::new(); folds];
    for class in classes {
        let mut members: Vec<usize> = (0..class_ids.len())
            .filter(|&i| class_ids[i] == class)
            .collect();
        members.shuffle(rng);
        for (slot, index) in members.into_iter().enumerate() {
            assignment[slot % folds].push(index);
        }
    }
    for fold in &mut assignment {
        fold.sort_unstable();
    }
    assignment
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / (values.len() - 1) as f64;
    var.sqrt()
}

/// Kernel source shared by all folds: distance matrices per (d, k) for the
/// Wasserstein family, or the single precomputed Gram for the baseline.
enum KernelSource {
    Distances {
        combos: Vec<(usize, usize)>,
        matrices: HashMap<(usize, usize), DistanceMatrix>,
    },
    Precomputed(GramMatrix),
}

impl KernelSource {
    /// (d, k) combinations in selection order.
    fn combos(&self) -> Vec<(usize, usize)> {
        match self {
            KernelSource::Distances { combos, .. } => combos.clone(),
            KernelSource::Precomputed(_) => vec![(0, 0)],
        }
    }

    /// Kernel block rows x cols for one configuration.
    fn block(
        &self,
        dk: (usize, usize),
        lambda: f64,
        rows: &[usize],
        cols: &[usize],
    ) -> Vec<f64> {
        let mut out = vec![0.0f64; rows.len() * cols.len()];
        match self {
            KernelSource::Distances { matrices, .. } => {
                let distances = &matrices[&dk];
                for (r, &i) in rows.iter().enumerate() {
                    for (s, &j) in cols.iter().enumerate() {
                        out[r * cols.len() + s] = if i == j {
                            1.0
                        } else {
                            (-lambda * distances.get(i, j)).exp()
                        };
                    }
                }
            }
            KernelSource::Precomputed(gram) => {
                for (r, &i) in rows.iter().enumerate() {
                    for (s, &j) in cols.iter().enumerate() {
                        out[r * cols.len() + s] = gram.get(i, j);
                    }
                }
            }
        }
        out
    }
}

fn derive_rng(seed: u64, salt: &[u64]) -> ChaCha8Rng {
    let mut state = seed;
    for &s in salt {
        state = state
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(s)
            .rotate_left(17);
    }
    ChaCha8Rng::seed_from_u64(state)
}

/// Trains on the clipped block and scores predictions against the held-out
/// classes; a single-class training split yields no counts.
fn fit_and_score(
    train_block_clipped: &[f64],
    train_classes: &[i64],
    cross_block: &[f64],
    test_classes: &[i64],
    c: f64,
) -> Result<(usize, usize)> {
    let n = train_classes.len();
    match svm::train_one_vs_one(train_block_clipped, n, train_classes, c) {
        Ok(model) => {
            let predicted = svm::predict_one_vs_one(&model, cross_block, n)?;
            let correct = predicted
                .iter()
                .zip(test_classes)
                .filter(|(p, t)| p == t)
                .count();
            Ok((correct, test_classes.len()))
        }
        Err(Error::Precondition(_)) => Ok((0, 0)),
        Err(other) => Err(other),
    }
}

/// Runs the full protocol and aggregates a report.
pub fn cross_validate(
    dataset: &GraphDataset,
    variant: KernelVariant,
    grids: &Grids,
    config: &CvConfig,
) -> Result<CvReport> {
    let started = Instant::now();
    if !dataset.is_labeled() {
        return Err(Error::Precondition(
            "dataset has no node labels; assign surrogate labels first".into(),
        ));
    }
    if dataset.class_count() < 2 {
        return Err(Error::Precondition(
            "classification needs at least two classes".into(),
        ));
    }
    if config.folds < 2 || config.repeats < 1 || config.inner_folds < 2 {
        return Err(Error::InvalidInput(
            "folds and inner folds must be at least 2, repeats at least 1".into(),
        ));
    }
    let class_ids = dataset.class_labels().to_vec();
    let smallest_class = {
        let mut counts: HashMap<i64, usize> = HashMap::new();
        for &c in &class_ids {
            *counts.entry(c).or_insert(0) += 1;
        }
        counts.values().copied().min().unwrap_or(0)
    };
    if config.folds > smallest_class {
        return Err(Error::Precondition(format!(
            "{} folds exceed the smallest class size {}",
            config.folds, smallest_class
        )));
    }
    grids.validate()?;

    // (d, k) combinations in grid order, deduplicated
    let requested_combos: Vec<(usize, usize)> = if let Some(fixed) = &config.fixed {
        vec![(fixed.d, fixed.k)]
    } else {
        let mut combos = Vec::new();
        for &d in &grids.ds {
            for &k in &grids.ks {
                let k = if variant == KernelVariant::Wsp { 0 } else { k };
                if !combos.contains(&(d, k)) {
                    combos.push((d, k));
                }
            }
        }
        combos
    };

    let distance_started = Instant::now();
    let source = match variant {
        KernelVariant::SpBaseline => KernelSource::Precomputed(kernels::sp_baseline_gram(dataset)?),
        _ => {
            let mut matrices = HashMap::new();
            for &(d, k) in &requested_combos {
                matrices.insert((d, k), kernels::build_distances(dataset, variant, d, k)?);
            }
            KernelSource::Distances {
                combos: requested_combos,
                matrices,
            }
        }
    };
    let distance_seconds = distance_started.elapsed().as_secs_f64();

    let combos = source.combos();
    let lambdas: Vec<f64> = match (&source, &config.fixed) {
        (KernelSource::Precomputed(_), _) => vec![1.0],
        (_, Some(fixed)) => vec![fixed.lambda],
        _ => grids.lambdas.clone(),
    };
    let cs: Vec<f64> = match &config.fixed {
        Some(fixed) => vec![fixed.c],
        None => grids.cs.clone(),
    };

    let mut fold_accuracies = Vec::with_capacity(config.repeats);
    let mut chosen_params = Vec::with_capacity(config.repeats);

    for repeat in 0..config.repeats {
        let mut fold_rng = derive_rng(config.seed, &[repeat as u64, 0xF01D]);
        let folds = stratified_folds(&class_ids, config.folds, &mut fold_rng);
        let mut repeat_accuracies = Vec::with_capacity(config.folds);
        let mut repeat_chosen = Vec::with_capacity(config.folds);

        for (fold_idx, test_idx) in folds.iter().enumerate() {
            let train_idx: Vec<usize> = (0..dataset.len())
                .filter(|i| !test_idx.contains(i))
                .collect();
            let train_classes: Vec<i64> = train_idx.iter().map(|&i| class_ids[i]).collect();
            let test_classes: Vec<i64> = test_idx.iter().map(|&i| class_ids[i]).collect();

            let chosen = if let Some(fixed) = &config.fixed {
                ChosenParams {
                    d: fixed.d,
                    k: fixed.k,
                    lambda: fixed.lambda,
                    c: fixed.c,
                }
            } else {
                select_params(
                    &source,
                    &combos,
                    &lambdas,
                    &cs,
                    &train_idx,
                    &train_classes,
                    config,
                    repeat,
                    fold_idx,
                )?
            };

            // final model on the whole training split, scored on the fold
            let train_block = source.block(
                (chosen.d, chosen.k),
                chosen.lambda,
                &train_idx,
                &train_idx,
            );
            let clipped = svm::spectrum_clip(&train_block, train_idx.len())?;
            let cross_block =
                source.block((chosen.d, chosen.k), chosen.lambda, test_idx, &train_idx);
            let (correct, total) = fit_and_score(
                &clipped,
                &train_classes,
                &cross_block,
                &test_classes,
                chosen.c,
            )?;
            if total == 0 {
                return Err(Error::Precondition(
                    "outer training split degenerated to a single class".into(),
                ));
            }
            repeat_accuracies.push(correct as f64 / total as f64);
            repeat_chosen.push(chosen);
        }
        fold_accuracies.push(repeat_accuracies);
        chosen_params.push(repeat_chosen);
    }

    let all: Vec<f64> = fold_accuracies.iter().flatten().copied().collect();
    let mean_accuracy = all.iter().sum::<f64>() / all.len() as f64;
    let repeat_means: Vec<f64> = fold_accuracies
        .iter()
        .map(|r| r.iter().sum::<f64>() / r.len() as f64)
        .collect();

    Ok(CvReport {
        dataset: dataset.name().to_string(),
        variant: variant.to_string(),
        folds: config.folds,
        repeats: config.repeats,
        seed: config.seed,
        grids: grids.clone(),
        fixed: config.fixed,
        fold_accuracies,
        chosen_params,
        mean_accuracy,
        std_over_repeats: sample_std(&repeat_means),
        std_over_folds: sample_std(&all),
        timings: CvTimings {
            total_seconds: started.elapsed().as_secs_f64(),
            distance_seconds,
        },
    })
}

/// Inner-loop selection: pooled accuracy over stratified inner folds of
/// the training split; ties keep the earliest candidate in (d, k, lambda,
/// C) grid order.
#[allow(clippy::too_many_arguments)]
fn select_params(
    source: &KernelSource,
    combos: &[(usize, usize)],
    lambdas: &[f64],
    cs: &[f64],
    train_idx: &[usize],
    train_classes: &[i64],
    config: &CvConfig,
    repeat: usize,
    fold_idx: usize,
) -> Result<ChosenParams> {
    let mut inner_rng = derive_rng(
        config.seed,
        &[repeat as u64, fold_idx as u64, 0x13EE],
    );
    let inner_folds = stratified_folds(train_classes, config.inner_folds, &mut inner_rng);
    // inner fold entries are positions into train_idx; lift to dataset ids
    let inner_folds: Vec<Vec<usize>> = inner_folds
        .into_iter()
        .map(|fold| fold.into_iter().map(|p| train_idx[p]).collect())
        .collect();

    let class_of: HashMap<usize, i64> = train_idx
        .iter()
        .zip(train_classes)
        .map(|(&i, &c)| (i, c))
        .collect();

    // one task per (d-k combo, lambda, inner fold); each task reuses its
    // clipped kernel across the whole C grid
    let tasks: Vec<(usize, usize, usize)> = (0..combos.len())
        .flat_map(|dk| {
            (0..lambdas.len()).flat_map(move |l| {
                (0..config.inner_folds).map(move |f| (dk, l, f))
            })
        })
        .collect();

    let results: Vec<Vec<(usize, usize)>> = tasks
        .par_iter()
        .map(|&(dk, l, f)| -> Result<Vec<(usize, usize)>> {
            let val_idx = &inner_folds[f];
            let fit_idx: Vec<usize> = train_idx
                .iter()
                .copied()
                .filter(|i| !val_idx.contains(i))
                .collect();
            let fit_classes: Vec<i64> = fit_idx.iter().map(|i| class_of[i]).collect();
            let val_classes: Vec<i64> = val_idx.iter().map(|i| class_of[i]).collect();
            let block = source.block(combos[dk], lambdas[l], &fit_idx, &fit_idx);
            let clipped = svm::spectrum_clip(&block, fit_idx.len())?;
            let cross = source.block(combos[dk], lambdas[l], val_idx, &fit_idx);
            cs.iter()
                .map(|&c| fit_and_score(&clipped, &fit_classes, &cross, &val_classes, c))
                .collect()
        })
        .collect::<Result<_>>()?;

    // pool correct/total per candidate over the inner folds
    let mut totals: HashMap<(usize, usize, usize), (usize, usize)> = HashMap::new();
    for (&(dk, l, _), per_c) in tasks.iter().zip(&results) {
        for (c_idx, &(correct, total)) in per_c.iter().enumerate() {
            let entry = totals.entry((dk, l, c_idx)).or_insert((0, 0));
            entry.0 += correct;
            entry.1 += total;
        }
    }

    let mut best: Option<(f64, ChosenParams)> = None;
    for (dk, &(d, k)) in combos.iter().enumerate() {
        for (l, &lambda) in lambdas.iter().enumerate() {
            for (c_idx, &c) in cs.iter().enumerate() {
                let (correct, total) = totals[&(dk, l, c_idx)];
                if total == 0 {
                    continue;
                }
                let accuracy = correct as f64 / total as f64;
                if best.is_none() || accuracy > best.as_ref().unwrap().0 {
                    best = Some((accuracy, ChosenParams { d, k, lambda, c }));
                }
            }
        }
    }
    best.map(|(_, p)| p).ok_or_else(|| {
        Error::Precondition("every inner training split degenerated to a single class".into())
    })
}
