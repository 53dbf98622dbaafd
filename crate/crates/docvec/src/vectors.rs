//! Labeled dense vector sets, the common currency between training methods,
//! file export, and the analogy evaluator.

use crate::error::{Error, Result};

/// An M x k real matrix with one label per row. Rows are finite by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVectorSet {
    labels: Vec<String>,
    dim: usize,
    data: Vec<f64>,
}

impl DenseVectorSet {
    pub fn new(labels: Vec<String>, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim < 1 {
            return Err(Error::Param("vector dimension must be >= 1".into()));
        }
        if labels.len() * dim != data.len() {
            return Err(Error::Param(format!(
                "vector data length {} does not match {} rows of dim {dim}",
                data.len(),
                labels.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Param(format!(
                "non-finite value in row {}",
                pos / dim
            )));
        }
        Ok(DenseVectorSet { labels, dim, data })
    }

    /// Rows labeled by their index: "0", "1", ... Used by the fit routines,
    /// which know nothing about titles or tokens.
    pub fn unlabeled(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        let labels = (0..rows).map(|i| i.to_string()).collect();
        Self::new(labels, dim, data)
    }

    /// Replace row labels, e.g. with document titles before export.
    pub fn relabel(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.labels.len() {
            return Err(Error::Param(format!(
                "relabel: {} labels for {} rows",
                labels.len(),
                self.labels.len()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.labels
            .iter()
            .map(|l| l.as_str())
            .zip(self.data.chunks_exact(self.dim))
    }
}

/// Divide every row by its L2 norm; zero rows stay zero.
pub fn normalize_rows(set: &DenseVectorSet) -> DenseVectorSet {
    let dim = set.dim();
    let mut data = set.data().to_vec();
    for row in data.chunks_exact_mut(dim) {
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in row.iter_mut() {
                *v /= norm;
            }
        }
    }
    DenseVectorSet {
        labels: set.labels().to_vec(),
        dim,
        data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_simple_row() {
        let set = DenseVectorSet::unlabeled(1, 2, vec![3.0, 4.0]).unwrap();
        let n = normalize_rows(&set);
        assert_eq!(n.row(0), &[0.6, 0.8]);
    }

    #[test]
    fn normalize_keeps_zero_rows() {
        let set = DenseVectorSet::unlabeled(2, 2, vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        let n = normalize_rows(&set);
        assert_eq!(n.row(0), &[0.0, 0.0]);
        assert_eq!(n.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(DenseVectorSet::unlabeled(1, 2, vec![f64::NAN, 0.0]).is_err());
        assert!(DenseVectorSet::unlabeled(1, 2, vec![f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn rejects_shape_mismatch() {
        assert!(DenseVectorSet::unlabeled(2, 3, vec![0.0; 5]).is_err());
        assert!(DenseVectorSet::unlabeled(1, 0, vec![]).is_err());
    }
}
