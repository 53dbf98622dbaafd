//! LDA document representations via collapsed Gibbs sampling.

use rand::Rng as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::vectors::DenseVectorSet;
use crate::weighting::{MatrixKind, SparseDocTermMatrix};

/// LDA hyperparameters and sweep count. `alpha = None` means the usual
/// `50 / k`.
#[derive(Debug, Clone, Copy)]
pub struct LdaOptions {
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for LdaOptions {
    fn default() -> Self {
        LdaOptions {
            alpha: None,
            beta: 0.01,
            iterations: 200,
            seed: 1,
        }
    }
}

/// Sampler state: one topic assignment per token instance plus the count
/// tables the conditional distribution is read from.
struct LdaState {
    n_topics: usize,
    n_words: usize,
    /// (doc, word, assigned topic) per token instance, doc-major order.
    assignments: Vec<(u32, u32, u32)>,
    doc_topic: Vec<u64>,
    topic_word: Vec<u64>,
    topic_totals: Vec<u64>,
    doc_lens: Vec<u64>,
}

impl LdaState {
    fn init(matrix: &SparseDocTermMatrix, n_topics: usize, rng: &mut ChaCha8Rng) -> Self {
        let n_docs = matrix.n_docs();
        let n_words = matrix.n_words();
        let mut state = LdaState {
            n_topics,
            n_words,
            assignments: Vec::new(),
            doc_topic: vec![0; n_docs * n_topics],
            topic_word: vec![0; n_topics * n_words],
            topic_totals: vec![0; n_topics],
            doc_lens: vec![0; n_docs],
        };
        for i in 0..n_docs {
            for (j, count) in matrix.row(i) {
                for _ in 0..count as u64 {
                    let t = rng.random_range(0..n_topics) as u32;
                    state.assignments.push((i as u32, j, t));
                    state.add(i, j as usize, t as usize);
                }
            }
        }
        state
    }

    fn add(&mut self, doc: usize, word: usize, topic: usize) {
        self.doc_topic[doc * self.n_topics + topic] += 1;
        self.topic_word[topic * self.n_words + word] += 1;
        self.topic_totals[topic] += 1;
        self.doc_lens[doc] += 1;
    }

    fn remove(&mut self, doc: usize, word: usize, topic: usize) {
        self.doc_topic[doc * self.n_topics + topic] -= 1;
        self.topic_word[topic * self.n_words + word] -= 1;
        self.topic_totals[topic] -= 1;
        self.doc_lens[doc] -= 1;
    }

    fn sweep(&mut self, alpha: f64, beta: f64, rng: &mut ChaCha8Rng) {
        let k = self.n_topics;
        let vbeta = self.n_words as f64 * beta;
        let mut weights = vec![0.0; k];
        for idx in 0..self.assignments.len() {
            let (doc, word, old) = self.assignments[idx];
            let (doc, word) = (doc as usize, word as usize);
            self.remove(doc, word, old as usize);

            let mut total = 0.0;
            for (t, w) in weights.iter_mut().enumerate() {
                let dt = self.doc_topic[doc * k + t] as f64;
                let tw = self.topic_word[t * self.n_words + word] as f64;
                let tt = self.topic_totals[t] as f64;
                *w = (dt + alpha) * (tw + beta) / (tt + vbeta);
                total += *w;
            }
            let mut target = rng.random::<f64>() * total;
            let mut choice = k - 1;
            for (t, &w) in weights.iter().enumerate() {
                target -= w;
                if target < 0.0 {
                    choice = t;
                    break;
                }
            }

            self.add(doc, word, choice);
            self.assignments[idx].2 = choice as u32;
        }
    }

    /// Count tables must always agree with the assignment list.
    #[cfg(test)]
    fn check_consistency(&self) {
        let total = self.assignments.len() as u64;
        assert_eq!(self.doc_topic.iter().sum::<u64>(), total);
        assert_eq!(self.topic_word.iter().sum::<u64>(), total);
        assert_eq!(self.topic_totals.iter().sum::<u64>(), total);
    }
}

/// Collapsed Gibbs LDA over a count matrix. Returns the smoothed
/// document-topic proportions from the final sweep,
/// `theta[i][t] = (n_it + alpha) / (len_i + k * alpha)`; rows sum to one and
/// empty documents get the uniform row.
pub fn lda_fit(
    matrix: &SparseDocTermMatrix,
    k: usize,
    opts: &LdaOptions,
) -> Result<DenseVectorSet> {
    if matrix.kind() != MatrixKind::Count {
        return Err(Error::Param(format!(
            "lda_fit expects a count matrix, got {}",
            matrix.kind()
        )));
    }
    if k < 1 {
        return Err(Error::Param(format!("k must be >= 1, got {k}")));
    }
    if opts.iterations < 1 {
        return Err(Error::Param("iterations must be >= 1".into()));
    }
    let alpha = opts.alpha.unwrap_or(50.0 / k as f64);
    if alpha <= 0.0 || opts.beta <= 0.0 {
        return Err(Error::Param("alpha and beta must be positive".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut state = LdaState::init(matrix, k, &mut rng);
    for _ in 0..opts.iterations {
        state.sweep(alpha, opts.beta, &mut rng);
    }

    let n_docs = matrix.n_docs();
    let mut theta = vec![0.0; n_docs * k];
    for i in 0..n_docs {
        let len = state.doc_lens[i] as f64;
        let denom = len + k as f64 * alpha;
        for t in 0..k {
            theta[i * k + t] = (state.doc_topic[i * k + t] as f64 + alpha) / denom;
        }
    }
    DenseVectorSet::unlabeled(n_docs, k, theta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_matrix_from(n: usize, v: usize, dense: &[f64]) -> SparseDocTermMatrix {
        SparseDocTermMatrix::from_dense(MatrixKind::Count, n, v, dense).unwrap()
    }

    #[test]
    fn single_topic_gives_all_ones() {
        let m = count_matrix_from(2, 2, &[3.0, 1.0, 0.0, 2.0]);
        let theta = lda_fit(&m, 1, &LdaOptions::default()).unwrap();
        assert_eq!(theta.row(0), &[1.0]);
        assert_eq!(theta.row(1), &[1.0]);
    }

    #[test]
    fn empty_document_gets_uniform_row() {
        let m = SparseDocTermMatrix::from_rows(
            MatrixKind::Count,
            2,
            vec![vec![(0, 2.0), (1, 1.0)], vec![]],
        )
        .unwrap();
        let theta = lda_fit(
            &m,
            4,
            &LdaOptions {
                iterations: 5,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(theta.row(1), &[0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn rows_sum_to_one() {
        let dense: Vec<f64> = (0..40).map(|i| ((i * 3) % 4) as f64).collect();
        let m = count_matrix_from(5, 8, &dense);
        for k in [2, 3, 7] {
            let theta = lda_fit(
                &m,
                k,
                &LdaOptions {
                    iterations: 10,
                    seed: k as u64,
                    ..Default::default()
                },
            )
            .unwrap();
            for i in 0..theta.rows() {
                let sum: f64 = theta.row(i).iter().sum();
                assert!((sum - 1.0).abs() < 1e-9, "row {i} sums to {sum}");
                assert!(theta.row(i).iter().all(|&v| v > 0.0));
            }
        }
    }

    #[test]
    fn count_tables_stay_consistent_across_sweeps() {
        let dense: Vec<f64> = (0..24).map(|i| ((i * 5) % 3) as f64).collect();
        let m = count_matrix_from(4, 6, &dense);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut state = LdaState::init(&m, 3, &mut rng);
        state.check_consistency();
        for _ in 0..8 {
            state.sweep(0.5, 0.01, &mut rng);
            state.check_consistency();
        }
        assert_eq!(state.assignments.len() as f64, m.total());
    }

    #[test]
    fn deterministic_given_seed() {
        let dense: Vec<f64> = (0..40).map(|i| ((i * 7) % 3) as f64).collect();
        let m = count_matrix_from(5, 8, &dense);
        let opts = LdaOptions {
            iterations: 20,
            seed: 42,
            ..Default::default()
        };
        let a = lda_fit(&m, 3, &opts).unwrap();
        let b = lda_fit(&m, 3, &opts).unwrap();
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn rejects_non_count_matrix() {
        let m = SparseDocTermMatrix::from_dense(MatrixKind::TfIdf, 2, 2, &[0.5, 0.0, 0.0, 0.5])
            .unwrap();
        assert!(lda_fit(&m, 2, &LdaOptions::default()).is_err());
    }
}
