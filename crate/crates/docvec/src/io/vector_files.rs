//! The common vector file formats.
//!
//! Dense: header `M dim`, then `label<TAB>v1 v2 ... vk` with nine significant
//! digits per value. Sparse (the BOW backend): header `M n_words sparse`,
//! then `label<TAB>col:value ...` with columns ascending. Readers sniff the
//! header, so `eval` takes either file behind one flag.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use crate::analogy::{SparseVectors, VectorStore};
use crate::error::{Error, Result};
use crate::vectors::DenseVectorSet;
use crate::weighting::SparseDocTermMatrix;

use super::{check_label, fmt_value, open_reader};

/// Write a dense vector set; values round-trip at the printed precision.
pub fn write_dense_vectors(path: &Path, set: &DenseVectorSet) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    writeln!(out, "{} {}", set.rows(), set.dim()).map_err(|e| Error::io(path, e))?;
    for (label, row) in set.iter_rows() {
        check_label(path, label)?;
        let values: Vec<String> = row.iter().map(|&v| fmt_value(v)).collect();
        writeln!(out, "{label}\t{}", values.join(" ")).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Write sparse rows (normalization happens at evaluation time, so raw
/// weights go to disk).
pub fn write_sparse_vectors(
    path: &Path,
    matrix: &SparseDocTermMatrix,
    labels: &[String],
) -> Result<()> {
    if labels.len() != matrix.n_docs() {
        return Err(Error::Param(format!(
            "{} labels for {} matrix rows",
            labels.len(),
            matrix.n_docs()
        )));
    }
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    writeln!(out, "{} {} sparse", matrix.n_docs(), matrix.n_words())
        .map_err(|e| Error::io(path, e))?;
    for (i, label) in labels.iter().enumerate() {
        check_label(path, label)?;
        let entries: Vec<String> = matrix
            .row(i)
            .map(|(j, w)| format!("{j}:{}", fmt_value(w)))
            .collect();
        writeln!(out, "{label}\t{}", entries.join(" ")).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Vectors as stored on disk, before any normalization.
pub enum LoadedVectors {
    Dense(DenseVectorSet),
    Sparse {
        labels: Vec<String>,
        n_cols: usize,
        rows: Vec<Vec<(u32, f64)>>,
    },
}

impl LoadedVectors {
    /// Normalize into the analogy evaluator's backend.
    pub fn into_store(self) -> Result<VectorStore> {
        match self {
            LoadedVectors::Dense(set) => Ok(VectorStore::dense(set)),
            LoadedVectors::Sparse {
                labels,
                n_cols,
                mut rows,
            } => {
                for row in &mut rows {
                    let norm = row.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
                    if norm > 0.0 {
                        for (_, w) in row.iter_mut() {
                            *w /= norm;
                        }
                    }
                }
                Ok(VectorStore::Sparse(SparseVectors::from_raw_rows(
                    labels, n_cols, rows,
                )?))
            }
        }
    }
}

/// Read either vector format into an evaluation-ready (normalized) store.
pub fn read_vector_store(path: &Path) -> Result<VectorStore> {
    read_vectors(path)?.into_store()
}

/// Read either vector format, preserving raw values (composition inputs need
/// unnormalized word vectors).
pub fn read_vectors(path: &Path) -> Result<LoadedVectors> {
    let reader = open_reader(path)?;
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(path, 1, "empty vector file"))?;
    let header = header.map_err(|e| Error::io(path, e))?;
    let fields: Vec<&str> = header.split_whitespace().collect();

    let parse_count = |s: &str, what: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::format(path, 1, format!("bad {what} `{s}` in header")))
    };

    match fields.as_slice() {
        [rows, dim] => {
            let rows = parse_count(rows, "row count")?;
            let dim = parse_count(dim, "dimension")?;
            let mut labels = Vec::with_capacity(rows);
            let mut data = Vec::with_capacity(rows * dim);
            let mut seen = HashSet::new();
            for (i, line) in lines {
                let line = line.map_err(|e| Error::io(path, e))?;
                let (label, values) = line
                    .split_once('\t')
                    .ok_or_else(|| Error::format(path, i + 1, "expected `label<TAB>values`"))?;
                if !seen.insert(label.to_string()) {
                    return Err(Error::format(
                        path,
                        i + 1,
                        format!("duplicate label `{label}`"),
                    ));
                }
                let before = data.len();
                for v in values.split_whitespace() {
                    let v: f64 = v
                        .parse()
                        .map_err(|_| Error::format(path, i + 1, format!("bad value `{v}`")))?;
                    data.push(v);
                }
                if data.len() - before != dim {
                    return Err(Error::format(
                        path,
                        i + 1,
                        format!("expected {dim} values, found {}", data.len() - before),
                    ));
                }
                labels.push(label.to_string());
            }
            if labels.len() != rows {
                return Err(Error::format(
                    path,
                    1,
                    format!("header promises {rows} rows, file has {}", labels.len()),
                ));
            }
            Ok(LoadedVectors::Dense(DenseVectorSet::new(
                labels, dim, data,
            )?))
        }
        [rows, n_words, "sparse"] => {
            let rows = parse_count(rows, "row count")?;
            let n_words = parse_count(n_words, "word count")?;
            let mut labels = Vec::with_capacity(rows);
            let mut parsed_rows = Vec::with_capacity(rows);
            let mut seen = HashSet::new();
            for (i, line) in lines {
                let line = line.map_err(|e| Error::io(path, e))?;
                let (label, entries) = line
                    .split_once('\t')
                    .ok_or_else(|| Error::format(path, i + 1, "expected `label<TAB>entries`"))?;
                if !seen.insert(label.to_string()) {
                    return Err(Error::format(
                        path,
                        i + 1,
                        format!("duplicate label `{label}`"),
                    ));
                }
                let mut row = Vec::new();
                for entry in entries.split_whitespace() {
                    let (j, w) = entry.split_once(':').ok_or_else(|| {
                        Error::format(
                            path,
                            i + 1,
                            format!("expected `col:value`, found `{entry}`"),
                        )
                    })?;
                    let j: u32 = j
                        .parse()
                        .map_err(|_| Error::format(path, i + 1, format!("bad column `{j}`")))?;
                    let w: f64 = w
                        .parse()
                        .map_err(|_| Error::format(path, i + 1, format!("bad value `{w}`")))?;
                    row.push((j, w));
                }
                parsed_rows.push(row);
                labels.push(label.to_string());
            }
            if labels.len() != rows {
                return Err(Error::format(
                    path,
                    1,
                    format!("header promises {rows} rows, file has {}", labels.len()),
                ));
            }
            Ok(LoadedVectors::Sparse {
                labels,
                n_cols: n_words,
                rows: parsed_rows,
            })
        }
        _ => Err(Error::format(
            path,
            1,
            "unrecognized header: expected `M dim` or `M n_words sparse`",
        )),
    }
}
