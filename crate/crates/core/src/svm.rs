//! Indefinite-kernel-aware support vector classification on precomputed
//! Gram matrices: spectrum clipping to restore positive semidefiniteness,
//! a sequential-minimal-optimization solver for the binary soft-margin
//! dual, and a one-vs-one wrapper for multi-class data.

use crate::error::{Error, Result};
use crate::linalg;

/// Stopping tolerance on the maximal KKT violation.
pub const SMO_TOL: f64 = 1e-3;

/// How asymmetric an input matrix may be before spectrum clipping refuses
/// it.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Replaces negative eigenvalues with zero: eigendecompose, clip,
/// reconstruct. The result is positive semidefinite within numerical
/// accuracy and exactly symmetric.
pub fn spectrum_clip(matrix: &[f64], n: usize) -> Result<Vec<f64>> {
    if matrix.len() != n * n {
        return Err(Error::Dimension(format!(
            "matrix of {} entries is not {}x{}",
            matrix.len(),
            n,
            n
        )));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (matrix[i * n + j] - matrix[j * n + i]).abs() > SYMMETRY_TOL {
                return Err(Error::InvalidInput(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let mut symmetrized = matrix.to_vec();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (symmetrized[i * n + j] + symmetrized[j * n + i]);
            symmetrized[i * n + j] = avg;
            symmetrized[j * n + i] = avg;
        }
    }
    let (eigenvalues, v) = linalg::jacobi_eigh(&symmetrized, n)?;
    let clipped: Vec<f64> = eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    // scale columns of V by the clipped values, multiply back by V^T
    let mut scaled = vec![0.0f64; n * n];
    for r in 0..n {
        for l in 0..n {
            scaled[r * n + l] = v[r * n + l] * clipped[l];
        }
    }
    let mut out = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i..n {
            let mut sum = 0.0;
            for l in 0..n {
                sum += scaled[i * n + l] * v[j * n + l];
            }
            out[i * n + j] = sum;
            out[j * n + i] = sum;
        }
    }
    Ok(out)
}

/// A trained binary classifier over a precomputed kernel.
#[derive(Debug, Clone)]
pub struct SvmModel {
    support: Vec<usize>,
    dual_coef: Vec<f64>,
    bias: f64,
    /// Maximal KKT violation at the last iteration.
    pub kkt_residual: f64,
    /// Dual objective value at the solution.
    pub objective: f64,
    train_size: usize,
}

impl SvmModel {
    /// Indices (into the training set) of the support vectors.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// alpha_i * y_i per support vector.
    pub fn dual_coef(&self) -> &[f64] {
        &self.dual_coef
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn train_size(&self) -> usize {
        self.train_size
    }

    /// Decision values for rows of a test-by-train kernel block.
    pub fn decision_values(&self, cross: &[f64], train_size: usize) -> Result<Vec<f64>> {
        if train_size != self.train_size || cross.len() % train_size != 0 {
            return Err(Error::Dimension(format!(
                "cross kernel block of {} entries does not match training size {}",
                cross.len(),
                self.train_size
            )));
        }
        let rows = cross.len() / train_size;
        Ok((0..rows)
            .map(|r| {
                let row = &cross[r * train_size..(r + 1) * train_size];
                let sum: f64 = self
                    .support
                    .iter()
                    .zip(&self.dual_coef)
                    .map(|(&s, &coef)| coef * row[s])
                    .sum();
                sum + self.bias
            })
            .collect())
    }
}

/// Trains a binary soft-margin classifier on a precomputed (clipped) kernel
/// by sequential minimal optimization with maximal-violating-pair working
/// sets. `labels` must be +1/-1 with at least one example of each.
pub fn train_csvm(gram: &[f64], n: usize, labels: &[f64], c: f64) -> Result<SvmModel> {
    if gram.len() != n * n || labels.len() != n {
        return Err(Error::Dimension(format!(
            "kernel of {} entries with {} labels does not match n = {}",
            gram.len(),
            labels.len(),
            n
        )));
    }
    if !(c > 0.0) {
        return Err(Error::InvalidInput(format!("C must be positive, got {c}")));
    }
    if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
        return Err(Error::InvalidInput("labels must be +1 or -1".into()));
    }
    if labels.iter().all(|&y| y == 1.0) || labels.iter().all(|&y| y == -1.0) {
        return Err(Error::Precondition(
            "training fold contains a single class".into(),
        ));
    }

    let mut alpha = vec![0.0f64; n];
    // gradient of 1/2 a'Qa - e'a  starts at -1
    let mut grad = vec![-1.0f64; n];
    let max_iter = 200_000.max(100 * n);
    let mut residual = f64::INFINITY;

    for _ in 0..max_iter {
        // maximal violating pair
        let mut i_best: Option<(usize, f64)> = None;
        let mut j_best: Option<(usize, f64)> = None;
        for t in 0..n {
            let up = (labels[t] > 0.0 && alpha[t] < c) || (labels[t] < 0.0 && alpha[t] > 0.0);
            let low = (labels[t] < 0.0 && alpha[t] < c) || (labels[t] > 0.0 && alpha[t] > 0.0);
            let score = -labels[t] * grad[t];
            if up && i_best.is_none_or(|(_, s)| score > s) {
                i_best = Some((t, score));
            }
            if low && j_best.is_none_or(|(_, s)| score < s) {
                j_best = Some((t, score));
            }
        }
        let (Some((i, m_up)), Some((j, m_low))) = (i_best, j_best) else {
            residual = 0.0;
            break;
        };
        residual = m_up - m_low;
        if residual <= SMO_TOL {
            break;
        }

        // two-variable subproblem along alpha_i += y_i t, alpha_j -= y_j t
        let eta = (gram[i * n + i] + gram[j * n + j] - 2.0 * gram[i * n + j]).max(1e-12);
        let mut step = residual / eta;
        // box constraints for both coordinates
        let cap_i = if labels[i] > 0.0 {
            c - alpha[i]
        } else {
            alpha[i]
        };
        let cap_j = if labels[j] > 0.0 {
            alpha[j]
        } else {
            c - alpha[j]
        };
        step = step.min(cap_i).min(cap_j);
        if step <= 0.0 {
            // numerically stuck pair; treat as converged
            break;
        }
        alpha[i] += labels[i] * step;
        alpha[j] -= labels[j] * step;
        for t in 0..n {
            grad[t] += labels[t] * step * (gram[t * n + i] - gram[t * n + j]);
        }
    }

    // bias from the violating-pair band at the solution
    let mut m_up = f64::NEG_INFINITY;
    let mut m_low = f64::INFINITY;
    for t in 0..n {
        let up = (labels[t] > 0.0 && alpha[t] < c) || (labels[t] < 0.0 && alpha[t] > 0.0);
        let low = (labels[t] < 0.0 && alpha[t] < c) || (labels[t] > 0.0 && alpha[t] > 0.0);
        let score = -labels[t] * grad[t];
        if up {
            m_up = m_up.max(score);
        }
        if low {
            m_low = m_low.min(score);
        }
    }
    let bias = match (m_up.is_finite(), m_low.is_finite()) {
        (true, true) => 0.5 * (m_up + m_low),
        (true, false) => m_up,
        (false, true) => m_low,
        (false, false) => 0.0,
    };

    let objective: f64 = alpha
        .iter()
        .zip(&grad)
        .map(|(&a, &g)| 0.5 * a * (g - 1.0))
        .sum();

    let mut support = Vec::new();
    let mut dual_coef = Vec::new();
    for t in 0..n {
        if alpha[t] > 0.0 {
            support.push(t);
            dual_coef.push(alpha[t] * labels[t]);
        }
    }
    Ok(SvmModel {
        support,
        dual_coef,
        bias,
        kkt_residual: residual.max(0.0),
        objective,
        train_size: n,
    })
}

/// Signs of the decision values; exact zeros resolve to +1.
pub fn predict(model: &SvmModel, cross: &[f64], train_size: usize) -> Result<Vec<i8>> {
    Ok(model
        .decision_values(cross, train_size)?
        .into_iter()
        .map(|v| if v >= 0.0 { 1 } else { -1 })
        .collect())
}

/// One binary model per class pair, trained on the pair's rows of a shared
/// precomputed kernel.
#[derive(Debug, Clone)]
pub struct OvoModel {
    classes: Vec<i64>,
    // (class index a, class index b, training subset, model)
    models: Vec<(usize, usize, Vec<usize>, SvmModel)>,
    train_size: usize,
}

impl OvoModel {
    pub fn classes(&self) -> &[i64] {
        &self.classes
    }

    pub fn pair_count(&self) -> usize {
        self.models.len()
    }
}

/// Trains the one-vs-one ensemble. `class_ids` are arbitrary integers; the
/// distinct sorted values define the class set.
pub fn train_one_vs_one(gram: &[f64], n: usize, class_ids: &[i64], c: f64) -> Result<OvoModel> {
    if gram.len() != n * n || class_ids.len() != n {
        return Err(Error::Dimension(format!(
            "kernel of {} entries with {} class ids does not match n = {}",
            gram.len(),
            class_ids.len(),
            n
        )));
    }
    let mut classes: Vec<i64> = class_ids.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Precondition(
            "at least two classes are required".into(),
        ));
    }
    let mut models = Vec::new();
    for a in 0..classes.len() {
        for b in (a + 1)..classes.len() {
            let subset: Vec<usize> = (0..n)
                .filter(|&t| class_ids[t] == classes[a] || class_ids[t] == classes[b])
                .collect();
            let labels: Vec<f64> = subset
                .iter()
                .map(|&t| if class_ids[t] == classes[a] { 1.0 } else { -1.0 })
                .collect();
            let m = subset.len();
            let mut sub = vec![0.0f64; m * m];
            for (r, &tr) in subset.iter().enumerate() {
                for (s, &ts) in subset.iter().enumerate() {
                    sub[r * m + s] = gram[tr * n + ts];
                }
            }
            let model = train_csvm(&sub, m, &labels, c)?;
            models.push((a, b, subset, model));
        }
    }
    Ok(OvoModel {
        classes,
        models,
        train_size: n,
    })
}

/// Majority vote over the pairwise models; vote ties resolve to the
/// smallest class id. `cross` is the test-by-train kernel block.
pub fn predict_one_vs_one(model: &OvoModel, cross: &[f64], train_size: usize) -> Result<Vec<i64>> {
    if train_size != model.train_size || cross.len() % train_size != 0 {
        return Err(Error::Dimension(format!(
            "cross kernel block of {} entries does not match training size {}",
            cross.len(),
            model.train_size
        )));
    }
    let rows = cross.len() / train_size;
    let mut votes = vec![vec![0u32; model.classes.len()]; rows];
    for (a, b, subset, binary) in &model.models {
        let m = subset.len();
        let mut pair_cross = vec![0.0f64; rows * m];
        for r in 0..rows {
            for (s, &ts) in subset.iter().enumerate() {
                pair_cross[r * m + s] = cross[r * train_size + ts];
            }
        }
        for (r, sign) in predict(binary, &pair_cross, m)?.into_iter().enumerate() {
            let winner = if sign > 0 { *a } else { *b };
            votes[r][winner] += 1;
        }
    }
    Ok(votes
        .into_iter()
        .map(|v| {
            let best = v.iter().copied().max().unwrap_or(0);
            let idx = v.iter().position(|&x| x == best).unwrap();
            model.classes[idx]
        })
        .collect())
}
