//! Truncated SVD by a randomized range finder, and the LSI document
//! representation built on it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{jacobi_svd_wide, sparse_dense_mul, sparse_t_dense_mul, DenseMat};
use crate::vectors::DenseVectorSet;
use crate::weighting::SparseDocTermMatrix;

/// Gaussian oversampling columns beyond the requested rank.
const OVERSAMPLE: usize = 10;
/// Power iterations sharpening the captured subspace.
const POWER_ITERS: usize = 2;

/// Truncated SVD `a ~ u * diag(s) * v^T` with `u` n_docs x k, `v` n_words x k.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    pub u: Vec<f64>,
    pub singular_values: Vec<f64>,
    pub v: Vec<f64>,
    pub k: usize,
}

impl TruncatedSvd {
    pub fn u_row(&self, i: usize) -> &[f64] {
        &self.u[i * self.k..(i + 1) * self.k]
    }

    pub fn v_row(&self, j: usize) -> &[f64] {
        &self.v[j * self.k..(j + 1) * self.k]
    }
}

/// Rank-k randomized SVD (Gaussian range finder, `OVERSAMPLE` extra columns,
/// `POWER_ITERS` power iterations, QR re-orthonormalization each pass).
///
/// Signs are fixed by making the largest-magnitude entry of each right
/// singular vector positive, so results are deterministic given the seed.
pub fn truncated_svd(matrix: &SparseDocTermMatrix, k: usize, seed: u64) -> Result<TruncatedSvd> {
    let n_docs = matrix.n_docs();
    let n_words = matrix.n_words();
    let min_dim = n_docs.min(n_words);
    if k < 1 || k > min_dim {
        return Err(Error::Param(format!("k must be in 1..={min_dim}, got {k}")));
    }

    let samples = (k + OVERSAMPLE).min(min_dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let omega = DenseMat::from_fn(n_words, samples, |_, _| normal.sample(&mut rng));

    // Range finder with power iterations: q spans the dominant column space.
    let mut q = sparse_dense_mul(matrix, &omega).thin_q();
    for _ in 0..POWER_ITERS {
        let z = sparse_t_dense_mul(matrix, &q).thin_q();
        q = sparse_dense_mul(matrix, &z).thin_q();
    }

    // Project: b = q^T a is samples x n_words, small enough for Jacobi.
    let b = sparse_t_dense_mul(matrix, &q).transpose();
    let (u_small, sigma, v_full) = jacobi_svd_wide(&b);

    // u = q * u_small, truncated to k columns.
    let u_full = q.matmul(&u_small);
    let mut u = vec![0.0; n_docs * k];
    let mut v = vec![0.0; n_words * k];
    let mut singular_values = Vec::with_capacity(k);
    for c in 0..k {
        let s = sigma[c];
        singular_values.push(s);
        // Sign convention keyed off the right singular vector.
        let mut best = 0usize;
        let mut best_abs = 0.0;
        for r in 0..n_words {
            let a = v_full.at(r, c).abs();
            if a > best_abs {
                best_abs = a;
                best = r;
            }
        }
        let flip = if v_full.at(best, c) < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n_docs {
            u[r * k + c] = flip * u_full.at(r, c);
        }
        for r in 0..n_words {
            v[r * k + c] = flip * v_full.at(r, c);
        }
    }

    Ok(TruncatedSvd {
        u,
        singular_values,
        v,
        k,
    })
}

/// LSI: document coordinates are the rows of `u_k * diag(sigma_k)`.
///
/// Returns the document vector set (row labels are document indices until the
/// caller relabels them) and the k singular values, non-increasing.
pub fn lsi_fit(
    matrix: &SparseDocTermMatrix,
    k: usize,
    seed: u64,
) -> Result<(DenseVectorSet, Vec<f64>)> {
    let svd = truncated_svd(matrix, k, seed)?;
    let n_docs = matrix.n_docs();
    let mut data = vec![0.0; n_docs * k];
    for i in 0..n_docs {
        for c in 0..k {
            data[i * k + c] = svd.u[i * k + c] * svd.singular_values[c];
        }
    }
    let docs = DenseVectorSet::unlabeled(n_docs, k, data)?;
    Ok((docs, svd.singular_values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weighting::MatrixKind;

    fn dense_to_matrix(n: usize, m: usize, data: &[f64]) -> SparseDocTermMatrix {
        SparseDocTermMatrix::from_dense(MatrixKind::TfIdf, n, m, data).unwrap()
    }

    #[test]
    fn diagonal_matrix_recovers_its_entries() {
        let x = dense_to_matrix(3, 3, &[3.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        let (docs, sigma) = lsi_fit(&x, 2, 7).unwrap();
        assert!((sigma[0] - 3.0).abs() < 1e-10);
        assert!((sigma[1] - 2.0).abs() < 1e-10);
        // Sign convention makes the diagonal entries positive.
        let want = [[3.0, 0.0], [0.0, 2.0], [0.0, 0.0]];
        for i in 0..3 {
            for c in 0..2 {
                assert!(
                    (docs.row(i)[c] - want[i][c]).abs() < 1e-10,
                    "row {i} col {c}: {}",
                    docs.row(i)[c]
                );
            }
        }
    }

    #[test]
    fn rank_one_matrix_sigma_is_norm_product() {
        let u = [1.0, 2.0, 3.0, 4.0];
        let v = [0.5, 1.5, 2.5];
        let mut data = vec![0.0; 12];
        for i in 0..4 {
            for j in 0..3 {
                data[i * 3 + j] = u[i] * v[j];
            }
        }
        let x = dense_to_matrix(4, 3, &data);
        let svd = truncated_svd(&x, 1, 3).unwrap();
        let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!((svd.singular_values[0] - nu * nv).abs() < 1e-10);
    }

    #[test]
    fn full_rank_reconstruction() {
        // 12 x 9 deterministic non-negative matrix, k = full min dimension.
        let n = 12;
        let m = 9;
        let data: Vec<f64> = (0..n * m)
            .map(|i| ((i as f64 * 0.7).sin().abs() * 10.0).round() / 10.0)
            .collect();
        let x = dense_to_matrix(n, m, &data);
        let svd = truncated_svd(&x, m, 11).unwrap();
        // Reconstruct u * diag(s) * v^T.
        let mut recon = vec![0.0; n * m];
        for i in 0..n {
            for j in 0..m {
                let mut acc = 0.0;
                for c in 0..m {
                    acc += svd.u[i * m + c] * svd.singular_values[c] * svd.v[j * m + c];
                }
                recon[i * m + j] = acc;
            }
        }
        let dense = x.to_dense();
        let err: f64 = recon
            .iter()
            .zip(&dense)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(err < 1e-8, "frobenius err {err}");
    }

    #[test]
    fn k_out_of_range_is_param_error() {
        let x = dense_to_matrix(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert!(truncated_svd(&x, 0, 1).is_err());
        assert!(truncated_svd(&x, 3, 1).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let data: Vec<f64> = (0..30).map(|i| (i as f64 * 0.13).cos().abs()).collect();
        let x = dense_to_matrix(5, 6, &data);
        let a = truncated_svd(&x, 3, 42).unwrap();
        let b = truncated_svd(&x, 3, 42).unwrap();
        assert_eq!(a.u, b.u);
        assert_eq!(a.singular_values, b.singular_values);
    }
}
