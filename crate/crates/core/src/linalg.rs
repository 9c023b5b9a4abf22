//! Dense symmetric eigendecomposition by cyclic Jacobi rotations. Matrix
//! sizes in this artifact stay in the low thousands, where Jacobi is simple
//! and dependable.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition of a symmetric matrix (row-major, n x n).
///
/// Returns `(eigenvalues, vectors)` with `vectors` row-major whose COLUMN
/// `l` is the eigenvector of `eigenvalues[l]`, so
/// `A = V diag(eigenvalues) V^T`.
pub fn jacobi_eigh(matrix: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if matrix.len() != n * n {
        return Err(Error::Dimension(format!(
            "matrix of {} entries is not {}x{}",
            matrix.len(),
            n,
            n
        )));
    }
    let mut a = matrix.to_vec();
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n < 2 {
        return Ok((a, v));
    }

    for sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].abs();
            }
        }
        if off == 0.0 {
            let eigenvalues = (0..n).map(|i| a[i * n + i]).collect();
            return Ok((eigenvalues, v));
        }
        // rotate aggressively only once the matrix is nearly diagonal
        let thresh = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let g = 100.0 * apq.abs();
                // skip rotations that cannot change the diagonal anymore
                if sweep > 3
                    && a[p * n + p].abs() + g == a[p * n + p].abs()
                    && a[q * n + q].abs() + g == a[q * n + q].abs()
                {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq.abs() <= thresh {
                    continue;
                }
                let h = a[q * n + q] - a[p * n + p];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = 0.5 * h / apq;
                    let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                    if theta < 0.0 {
                        t = -t;
                    }
                    t
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let h = t * apq;
                a[p * n + p] -= h;
                a[q * n + q] += h;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                let rotate = |m: &mut [f64], ij: usize, kl: usize| {
                    let g = m[ij];
                    let h = m[kl];
                    m[ij] = g - s * (h + g * tau);
                    m[kl] = h + s * (g - h * tau);
                };
                for j in 0..p {
                    rotate(&mut a, j * n + p, j * n + q);
                }
                for j in (p + 1)..q {
                    rotate(&mut a, p * n + j, j * n + q);
                }
                for j in (q + 1)..n {
                    rotate(&mut a, p * n + j, q * n + j);
                }
                for j in 0..n {
                    rotate(&mut v, j * n + p, j * n + q);
                }
            }
        }
    }
    Err(Error::Internal(format!(
        "Jacobi eigensolver did not converge within {MAX_SWEEPS} sweeps"
    )))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(matrix: &[f64], n: usize) -> Result<f64> {
    let (eigenvalues, _) = jacobi_eigh(matrix, n)?;
    Ok(eigenvalues.into_iter().fold(f64::INFINITY, f64::min))
}
