//! The document-word matrix and its weighting transforms (TF-IDF, shifted PPMI).

use std::fmt;

use crate::corpus::{DocumentCorpus, Vocabulary};
use crate::error::{Error, Result};

/// What the stored weights mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// Raw occurrence counts (positive integers).
    Count,
    /// tf * ln(N / df) weights.
    TfIdf,
    /// Positive pointwise mutual information, optionally shifted.
    Ppmi,
}

impl MatrixKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MatrixKind::Count => "count",
            MatrixKind::TfIdf => "tfidf",
            MatrixKind::Ppmi => "ppmi",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "count" => Some(MatrixKind::Count),
            "tfidf" => Some(MatrixKind::TfIdf),
            "ppmi" => Some(MatrixKind::Ppmi),
            _ => None,
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Doc-word weights in compressed sparse row form.
///
/// No explicit zeros are stored and word ids are strictly increasing within
/// each row.
#[derive(Debug, Clone)]
pub struct SparseDocTermMatrix {
    n_docs: usize,
    n_words: usize,
    kind: MatrixKind,
    row_offsets: Vec<usize>,
    word_ids: Vec<u32>,
    weights: Vec<f64>,
}

impl SparseDocTermMatrix {
    /// Build from per-row `(word_id, weight)` pairs, validating the kind's
    /// value constraints and the row ordering invariant.
    pub fn from_rows(kind: MatrixKind, n_words: usize, rows: Vec<Vec<(u32, f64)>>) -> Result<Self> {
        let n_docs = rows.len();
        let mut row_offsets = Vec::with_capacity(n_docs + 1);
        let mut word_ids = Vec::new();
        let mut weights = Vec::new();
        row_offsets.push(0);
        for (i, row) in rows.into_iter().enumerate() {
            let mut last: Option<u32> = None;
            for (j, w) in row {
                if (j as usize) >= n_words {
                    return Err(Error::Param(format!(
                        "row {i}: word id {j} out of range (n_words = {n_words})"
                    )));
                }
                if let Some(prev) = last {
                    if j <= prev {
                        return Err(Error::Param(format!(
                            "row {i}: word ids must be strictly increasing"
                        )));
                    }
                }
                if !w.is_finite() {
                    return Err(Error::Param(format!("row {i}: non-finite weight")));
                }
                match kind {
                    MatrixKind::Count => {
                        if w <= 0.0 || w.fract() != 0.0 {
                            return Err(Error::Param(format!(
                                "row {i}: count entries must be positive integers, got {w}"
                            )));
                        }
                    }
                    MatrixKind::TfIdf | MatrixKind::Ppmi => {
                        if w < 0.0 {
                            return Err(Error::Param(format!(
                                "row {i}: {kind} entries must be non-negative, got {w}"
                            )));
                        }
                    }
                }
                if w == 0.0 {
                    continue; // no explicit zeros
                }
                last = Some(j);
                word_ids.push(j);
                weights.push(w);
            }
            row_offsets.push(word_ids.len());
        }
        Ok(SparseDocTermMatrix {
            n_docs,
            n_words,
            kind,
            row_offsets,
            word_ids,
            weights,
        })
    }

    /// Convenience constructor from a dense row-major array; zeros are dropped.
    pub fn from_dense(
        kind: MatrixKind,
        n_docs: usize,
        n_words: usize,
        data: &[f64],
    ) -> Result<Self> {
        assert_eq!(data.len(), n_docs * n_words);
        let rows = (0..n_docs)
            .map(|i| {
                (0..n_words)
                    .filter_map(|j| {
                        let w = data[i * n_words + j];
                        (w != 0.0).then_some((j as u32, w))
                    })
                    .collect()
            })
            .collect();
        Self::from_rows(kind, n_words, rows)
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn n_words(&self) -> usize {
        self.n_words
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn nnz(&self) -> usize {
        self.word_ids.len()
    }

    /// `(word_id, weight)` pairs of one row, word ids ascending.
    pub fn row(&self, doc: usize) -> impl Iterator<Item = (u32, f64)> + '_ {
        let lo = self.row_offsets[doc];
        let hi = self.row_offsets[doc + 1];
        self.word_ids[lo..hi]
            .iter()
            .zip(&self.weights[lo..hi])
            .map(|(&j, &w)| (j, w))
    }

    pub fn row_nnz(&self, doc: usize) -> usize {
        self.row_offsets[doc + 1] - self.row_offsets[doc]
    }

    pub fn iter_entries(&self) -> impl Iterator<Item = (usize, u32, f64)> + '_ {
        (0..self.n_docs).flat_map(move |i| self.row(i).map(move |(j, w)| (i, j, w)))
    }

    /// Sum of all stored weights.
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Per-document sums of stored weights.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n_docs)
            .map(|i| self.row(i).map(|(_, w)| w).sum())
            .collect()
    }

    /// Per-word sums of stored weights.
    pub fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_words];
        for (_, j, w) in self.iter_entries() {
            sums[j as usize] += w;
        }
        sums
    }

    /// Number of documents containing each word.
    pub fn doc_freqs(&self) -> Vec<usize> {
        let mut df = vec![0usize; self.n_words];
        for &j in &self.word_ids {
            df[j as usize] += 1;
        }
        df
    }

    /// Dense row-major copy; intended for small matrices and tests.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_docs * self.n_words];
        for (i, j, w) in self.iter_entries() {
            out[i * self.n_words + j as usize] = w;
        }
        out
    }
}

/// Count word occurrences per document into a `Count` matrix.
pub fn count_matrix(corpus: &DocumentCorpus, vocab: &Vocabulary) -> SparseDocTermMatrix {
    let n_words = vocab.len();
    let mut row_offsets = Vec::with_capacity(corpus.len() + 1);
    let mut word_ids = Vec::new();
    let mut weights = Vec::new();
    row_offsets.push(0);
    let mut counts: Vec<u32> = vec![0; n_words];
    let mut touched: Vec<u32> = Vec::new();
    for doc in corpus.docs() {
        for &t in &doc.tokens {
            if counts[t as usize] == 0 {
                touched.push(t);
            }
            counts[t as usize] += 1;
        }
        touched.sort_unstable();
        for &j in &touched {
            word_ids.push(j);
            weights.push(counts[j as usize] as f64);
            counts[j as usize] = 0;
        }
        touched.clear();
        row_offsets.push(word_ids.len());
    }
    SparseDocTermMatrix {
        n_docs: corpus.len(),
        n_words,
        kind: MatrixKind::Count,
        row_offsets,
        word_ids,
        weights,
    }
}

/// TF-IDF weighting: `tf * ln(N / df)` with raw term frequency and unsmoothed
/// document frequency. Words present in every document weigh zero and are
/// dropped from the rows.
pub fn tfidf_transform(counts: &SparseDocTermMatrix) -> Result<SparseDocTermMatrix> {
    if counts.kind() != MatrixKind::Count {
        return Err(Error::Param(format!(
            "tfidf_transform expects a count matrix, got {}",
            counts.kind()
        )));
    }
    let n = counts.n_docs() as f64;
    let df = counts.doc_freqs();
    let mut row_offsets = Vec::with_capacity(counts.n_docs() + 1);
    let mut word_ids = Vec::new();
    let mut weights = Vec::new();
    row_offsets.push(0);
    for i in 0..counts.n_docs() {
        for (j, tf) in counts.row(i) {
            let idf = (n / df[j as usize] as f64).ln();
            let w = tf * idf;
            if w > 0.0 {
                word_ids.push(j);
                weights.push(w);
            }
        }
        row_offsets.push(word_ids.len());
    }
    Ok(SparseDocTermMatrix {
        n_docs: counts.n_docs(),
        n_words: counts.n_words(),
        kind: MatrixKind::TfIdf,
        row_offsets,
        word_ids,
        weights,
    })
}

/// Shifted positive PMI: `max(ln(x_ij * T / (row_i * col_j)) - ln(shift_k), 0)`
/// with zeros removed. `shift_k = 1` is plain PPMI.
#[allow(clippy::needless_range_loop)]
pub fn ppmi_transform(counts: &SparseDocTermMatrix, shift_k: f64) -> Result<SparseDocTermMatrix> {
    if counts.kind() != MatrixKind::Count {
        return Err(Error::Param(format!(
            "ppmi_transform expects a count matrix, got {}",
            counts.kind()
        )));
    }
    if shift_k.is_nan() || shift_k < 1.0 {
        return Err(Error::Param(format!("shift_k must be >= 1, got {shift_k}")));
    }
    let total = counts.total();
    if total <= 0.0 {
        return Err(Error::Corpus(
            "degenerate corpus: total count is zero".into(),
        ));
    }
    let row_sums = counts.row_sums();
    let col_sums = counts.col_sums();
    let ln_shift = shift_k.ln();

    let mut row_offsets = Vec::with_capacity(counts.n_docs() + 1);
    let mut word_ids = Vec::new();
    let mut weights = Vec::new();
    row_offsets.push(0);
    for i in 0..counts.n_docs() {
        for (j, x) in counts.row(i) {
            let pmi = (x * total / (row_sums[i] * col_sums[j as usize])).ln();
            let w = (pmi - ln_shift).max(0.0);
            if w > 0.0 {
                word_ids.push(j);
                weights.push(w);
            }
        }
        row_offsets.push(word_ids.len());
    }
    Ok(SparseDocTermMatrix {
        n_docs: counts.n_docs(),
        n_words: counts.n_words(),
        kind: MatrixKind::Ppmi,
        row_offsets,
        word_ids,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{DocumentCorpus, RawDocument, Vocabulary};

    fn tiny_corpus(texts: &[&str]) -> (DocumentCorpus, Vocabulary) {
        let docs: Vec<RawDocument> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| RawDocument::new(format!("doc {i}"), *t))
            .collect();
        let vocab = Vocabulary::build(&docs, 1).unwrap();
        let corpus = DocumentCorpus::encode(&docs, &vocab).unwrap();
        (corpus, vocab)
    }

    /// Dense reference PMI used to cross-check the sparse transform.
    fn dense_ppmi(n_docs: usize, n_words: usize, dense: &[f64], shift_k: f64) -> Vec<f64> {
        let total: f64 = dense.iter().sum();
        let mut row = vec![0.0; n_docs];
        let mut col = vec![0.0; n_words];
        for i in 0..n_docs {
            for j in 0..n_words {
                row[i] += dense[i * n_words + j];
                col[j] += dense[i * n_words + j];
            }
        }
        let mut out = vec![0.0; dense.len()];
        for i in 0..n_docs {
            for j in 0..n_words {
                let x = dense[i * n_words + j];
                if x > 0.0 {
                    let pmi = (x * total / (row[i] * col[j])).ln();
                    out[i * n_words + j] = (pmi - shift_k.ln()).max(0.0);
                }
            }
        }
        out
    }

    #[test]
    fn counts_match_documents() {
        let (corpus, vocab) = tiny_corpus(&["the cat the", ""]);
        let m = count_matrix(&corpus, &vocab);
        let the = vocab.id("the").unwrap();
        let cat = vocab.id("cat").unwrap();
        let row0: Vec<(u32, f64)> = m.row(0).collect();
        assert_eq!(row0, vec![(the, 2.0), (cat, 1.0)]);
        assert_eq!(m.row_nnz(1), 0);
        assert_eq!(m.total(), corpus.total_tokens() as f64);
    }

    #[test]
    fn tfidf_drops_ubiquitous_words() {
        let (corpus, vocab) = tiny_corpus(&["shared only-a only-a only-a", "shared only-b"]);
        let m = tfidf_transform(&count_matrix(&corpus, &vocab)).unwrap();
        let shared = vocab.id("shared").unwrap();
        for i in 0..m.n_docs() {
            assert!(m.row(i).all(|(j, _)| j != shared));
        }
        // tf=3, df=1, N=2 -> 3 ln 2
        let w = m
            .row(0)
            .find(|&(j, _)| j == vocab.id("only-a").unwrap())
            .unwrap()
            .1;
        assert!((w - 3.0 * 2f64.ln()).abs() < 1e-12, "{w}");
    }

    #[test]
    fn tfidf_single_doc_corpus_is_all_zero() {
        let (corpus, vocab) = tiny_corpus(&["a b c a"]);
        let m = tfidf_transform(&count_matrix(&corpus, &vocab)).unwrap();
        assert_eq!(m.nnz(), 0);
    }

    #[test]
    fn ppmi_independence_gives_empty_matrix() {
        let m = SparseDocTermMatrix::from_dense(MatrixKind::Count, 2, 2, &[1.0, 1.0, 1.0, 1.0])
            .unwrap();
        let p = ppmi_transform(&m, 1.0).unwrap();
        assert_eq!(p.nnz(), 0);
    }

    #[test]
    fn ppmi_diagonal_log2() {
        let m = SparseDocTermMatrix::from_dense(MatrixKind::Count, 2, 2, &[2.0, 0.0, 0.0, 2.0])
            .unwrap();
        let p = ppmi_transform(&m, 1.0).unwrap();
        let d = p.to_dense();
        assert!((d[0] - 2f64.ln()).abs() < 1e-12);
        assert!((d[3] - 2f64.ln()).abs() < 1e-12);
        assert_eq!(d[1], 0.0);
        assert_eq!(d[2], 0.0);
    }

    #[test]
    fn ppmi_large_shift_empties_matrix() {
        let m = SparseDocTermMatrix::from_dense(MatrixKind::Count, 2, 2, &[5.0, 1.0, 1.0, 5.0])
            .unwrap();
        let p = ppmi_transform(&m, 1e9).unwrap();
        assert_eq!(p.nnz(), 0);
    }

    #[test]
    fn ppmi_matches_dense_reference() {
        // A handful of fixed small matrices; the randomized sweep lives in the
        // acceptance suite.
        let cases: Vec<(usize, usize, Vec<f64>)> = vec![
            (2, 3, vec![1.0, 2.0, 0.0, 0.0, 1.0, 4.0]),
            (3, 3, vec![1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]),
            (2, 2, vec![3.0, 1.0, 1.0, 3.0]),
        ];
        for (n, v, dense) in cases {
            for shift in [1.0, 2.0] {
                let m = SparseDocTermMatrix::from_dense(MatrixKind::Count, n, v, &dense).unwrap();
                let got = ppmi_transform(&m, shift).unwrap().to_dense();
                let want = dense_ppmi(n, v, &dense, shift);
                for (g, w) in got.iter().zip(&want) {
                    assert!((g - w).abs() < 1e-12, "{g} vs {w}");
                }
            }
        }
    }

    #[test]
    fn ppmi_rejects_zero_total() {
        let m = SparseDocTermMatrix::from_rows(MatrixKind::Count, 3, vec![vec![], vec![]]).unwrap();
        assert!(ppmi_transform(&m, 1.0).is_err());
    }

    #[test]
    fn ppmi_rejects_shift_below_one() {
        let m = SparseDocTermMatrix::from_dense(MatrixKind::Count, 2, 2, &[1.0, 0.0, 0.0, 1.0])
            .unwrap();
        assert!(ppmi_transform(&m, 0.5).is_err());
    }

    #[test]
    fn count_constructor_rejects_non_integers() {
        assert!(
            SparseDocTermMatrix::from_rows(MatrixKind::Count, 2, vec![vec![(0, 1.5)]]).is_err()
        );
        assert!(
            SparseDocTermMatrix::from_rows(MatrixKind::TfIdf, 2, vec![vec![(0, -1.0)]]).is_err()
        );
    }
}
