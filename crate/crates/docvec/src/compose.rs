//! BOWE: document vectors as linear combinations of word vectors.

use crate::error::{Error, Result};
use crate::vectors::DenseVectorSet;
use crate::weighting::{MatrixKind, SparseDocTermMatrix};

/// `doc_i = sum_j x_ij * word_vectors[j]` — a plain sparse-dense product.
/// Scale is left to the analogy layer's normalization. Accepts count
/// (default) or TF-IDF weighting; empty documents come out as zero rows.
pub fn bowe_compose(
    weights: &SparseDocTermMatrix,
    word_vectors: &DenseVectorSet,
) -> Result<DenseVectorSet> {
    if weights.kind() == MatrixKind::Ppmi {
        return Err(Error::Param(
            "bowe_compose accepts count or tfidf weighting, not ppmi".into(),
        ));
    }
    if weights.n_words() != word_vectors.rows() {
        return Err(Error::Param(format!(
            "dimension mismatch: matrix has {} words, vector set has {} rows",
            weights.n_words(),
            word_vectors.rows()
        )));
    }
    let dim = word_vectors.dim();
    let n_docs = weights.n_docs();
    let mut data = vec![0.0; n_docs * dim];
    for i in 0..n_docs {
        let dst = &mut data[i * dim..(i + 1) * dim];
        for (j, w) in weights.row(i) {
            for (d, s) in dst.iter_mut().zip(word_vectors.row(j as usize)) {
                *d += w * s;
            }
        }
    }
    DenseVectorSet::unlabeled(n_docs, dim, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectors::normalize_rows;

    fn word_vectors(rows: usize, dim: usize) -> DenseVectorSet {
        let data: Vec<f64> = (0..rows * dim).map(|i| (i as f64 * 0.37).sin()).collect();
        DenseVectorSet::unlabeled(rows, dim, data).unwrap()
    }

    #[test]
    fn one_hot_doc_copies_the_word_vector() {
        let w = word_vectors(4, 3);
        let x = SparseDocTermMatrix::from_rows(MatrixKind::Count, 4, vec![vec![(2, 1.0)]]).unwrap();
        let d = bowe_compose(&x, &w).unwrap();
        assert_eq!(d.row(0), w.row(2));
    }

    #[test]
    fn two_word_doc_is_the_sum() {
        let w = word_vectors(4, 3);
        let x =
            SparseDocTermMatrix::from_rows(MatrixKind::Count, 4, vec![vec![(0, 1.0), (1, 1.0)]])
                .unwrap();
        let d = bowe_compose(&x, &w).unwrap();
        for c in 0..3 {
            assert!((d.row(0)[c] - (w.row(0)[c] + w.row(1)[c])).abs() < 1e-15);
        }
    }

    #[test]
    fn scaling_counts_scales_vectors_but_not_directions() {
        let w = word_vectors(3, 4);
        let once =
            SparseDocTermMatrix::from_rows(MatrixKind::Count, 3, vec![vec![(0, 1.0)]]).unwrap();
        let twice =
            SparseDocTermMatrix::from_rows(MatrixKind::Count, 3, vec![vec![(0, 2.0)]]).unwrap();
        let d1 = bowe_compose(&once, &w).unwrap();
        let d2 = bowe_compose(&twice, &w).unwrap();
        for c in 0..4 {
            assert!((d2.row(0)[c] - 2.0 * d1.row(0)[c]).abs() < 1e-15);
        }
        let n1 = normalize_rows(&d1);
        let n2 = normalize_rows(&d2);
        for c in 0..4 {
            assert!((n1.row(0)[c] - n2.row(0)[c]).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_document_is_zero() {
        let w = word_vectors(3, 2);
        let x = SparseDocTermMatrix::from_rows(MatrixKind::Count, 3, vec![vec![]]).unwrap();
        let d = bowe_compose(&x, &w).unwrap();
        assert_eq!(d.row(0), &[0.0, 0.0]);
    }

    #[test]
    fn rejects_mismatched_dimensions_and_ppmi() {
        let w = word_vectors(3, 2);
        let x = SparseDocTermMatrix::from_rows(MatrixKind::Count, 5, vec![vec![(0, 1.0)]]).unwrap();
        assert!(bowe_compose(&x, &w).is_err());
        let p = SparseDocTermMatrix::from_rows(MatrixKind::Ppmi, 3, vec![vec![(0, 1.0)]]).unwrap();
        assert!(bowe_compose(&p, &w).is_err());
    }
}
