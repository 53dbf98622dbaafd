//! Non-negative matrix factorization with multiplicative Frobenius updates.

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{sparse_dense_mul, sparse_t_dense_mul, DenseMat};
use crate::vectors::DenseVectorSet;
use crate::weighting::SparseDocTermMatrix;

/// Denominator guard for the multiplicative updates.
const UPDATE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct NmfOptions {
    pub max_iters: usize,
    /// Stop when the relative objective change drops below this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for NmfOptions {
    fn default() -> Self {
        NmfOptions {
            max_iters: 200,
            tol: 1e-4,
            seed: 1,
        }
    }
}

/// Result of an NMF run: `x ~ doc_factors * word_factors^T`.
#[derive(Debug, Clone)]
pub struct NmfFit {
    pub doc_factors: DenseVectorSet,
    pub word_factors: DenseVectorSet,
    /// Squared Frobenius objective after each iteration, starting with the
    /// objective of the initial factors.
    pub objective_trace: Vec<f64>,
}

/// Factor a non-negative matrix into `doc_factors` (n_docs x k) and
/// `word_factors` (n_words x k) by Lee-Seung multiplicative updates on the
/// squared Frobenius objective. The objective is non-increasing per
/// iteration up to floating-point slack, and factors stay non-negative
/// exactly.
pub fn nmf_fit(matrix: &SparseDocTermMatrix, k: usize, opts: &NmfOptions) -> Result<NmfFit> {
    if k < 1 {
        return Err(Error::Param(format!("k must be >= 1, got {k}")));
    }
    // Kinds are non-negative by construction; a negative weight here means a
    // corrupted matrix.
    if matrix.iter_entries().any(|(_, _, w)| w < 0.0) {
        return Err(Error::Param("nmf_fit requires non-negative entries".into()));
    }
    let n_docs = matrix.n_docs();
    let n_words = matrix.n_words();
    let x_sq: f64 = matrix.iter_entries().map(|(_, _, w)| w * w).sum();

    // Magnitude-matched uniform init.
    let mean = matrix.total() / (n_docs * n_words).max(1) as f64;
    let scale = (mean / k as f64).max(0.0).sqrt().max(UPDATE_EPS);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut docs = DenseMat::from_fn(n_docs, k, |_, _| rng.random::<f64>() * scale);
    let mut words = DenseMat::from_fn(n_words, k, |_, _| rng.random::<f64>() * scale);

    let mut trace = Vec::with_capacity(opts.max_iters + 1);
    trace.push(objective(matrix, &docs, &words, x_sq));

    for _ in 0..opts.max_iters {
        // docs <- docs * (x words) / (docs (words^T words))
        let numer = sparse_dense_mul(matrix, &words);
        let gram = words.transpose().matmul(&words);
        let denom = docs.matmul(&gram);
        hadamard_update(&mut docs, &numer, &denom);

        // words <- words * (x^T docs) / (words (docs^T docs))
        let numer = sparse_t_dense_mul(matrix, &docs);
        let gram = docs.transpose().matmul(&docs);
        let denom = words.matmul(&gram);
        hadamard_update(&mut words, &numer, &denom);

        let obj = objective(matrix, &docs, &words, x_sq);
        let prev = *trace.last().unwrap();
        trace.push(obj);
        if prev > 0.0 && (prev - obj).abs() / prev.max(UPDATE_EPS) < opts.tol {
            break;
        }
    }

    if docs
        .data
        .iter()
        .chain(words.data.iter())
        .any(|v| !v.is_finite())
    {
        return Err(Error::Diverged("nmf factors became non-finite".into()));
    }

    Ok(NmfFit {
        doc_factors: DenseVectorSet::unlabeled(n_docs, k, docs.data)?,
        word_factors: DenseVectorSet::unlabeled(n_words, k, words.data)?,
        objective_trace: trace,
    })
}

fn hadamard_update(base: &mut DenseMat, numer: &DenseMat, denom: &DenseMat) {
    for ((b, &n), &d) in base.data.iter_mut().zip(&numer.data).zip(&denom.data) {
        *b *= n / (d + UPDATE_EPS);
    }
}

/// ||x - docs words^T||_F^2 via the Gram identity, so the sparse structure is
/// never densified.
fn objective(matrix: &SparseDocTermMatrix, docs: &DenseMat, words: &DenseMat, x_sq: f64) -> f64 {
    let k = docs.cols;
    let mut cross = 0.0;
    for (i, j, w) in matrix.iter_entries() {
        let drow = docs.row(i);
        let wrow = words.row(j as usize);
        let mut dot = 0.0;
        for c in 0..k {
            dot += drow[c] * wrow[c];
        }
        cross += w * dot;
    }
    let dg = docs.transpose().matmul(docs);
    let wg = words.transpose().matmul(words);
    let mut approx_sq = 0.0;
    for a in 0..k {
        for b in 0..k {
            approx_sq += dg.at(a, b) * wg.at(a, b);
        }
    }
    (x_sq - 2.0 * cross + approx_sq).max(0.0)
}
