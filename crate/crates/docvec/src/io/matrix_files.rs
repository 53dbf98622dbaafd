//! Debug export of the doc-word matrix: header `N n_words nnz kind`, then
//! one `doc_id word_id weight` triple per line.

use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::weighting::{MatrixKind, SparseDocTermMatrix};

use super::open_reader;

pub fn write_matrix(path: &Path, matrix: &SparseDocTermMatrix) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    writeln!(
        out,
        "{} {} {} {}",
        matrix.n_docs(),
        matrix.n_words(),
        matrix.nnz(),
        matrix.kind()
    )
    .map_err(|e| Error::io(path, e))?;
    for (i, j, w) in matrix.iter_entries() {
        // `{}` prints the shortest representation that parses back exactly.
        writeln!(out, "{i} {j} {w}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_matrix(path: &Path) -> Result<SparseDocTermMatrix> {
    let reader = open_reader(path)?;
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(path, 1, "empty matrix file"))?;
    let header = header.map_err(|e| Error::io(path, e))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [n_docs, n_words, nnz, kind] = fields.as_slice() else {
        return Err(Error::format(
            path,
            1,
            "expected `N n_words nnz kind` header",
        ));
    };
    let n_docs: usize = n_docs
        .parse()
        .map_err(|_| Error::format(path, 1, "bad doc count"))?;
    let n_words: usize = n_words
        .parse()
        .map_err(|_| Error::format(path, 1, "bad word count"))?;
    let nnz: usize = nnz.parse().map_err(|_| Error::format(path, 1, "bad nnz"))?;
    let kind = MatrixKind::parse(kind)
        .ok_or_else(|| Error::format(path, 1, format!("unknown matrix kind `{kind}`")))?;

    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n_docs];
    let mut count = 0usize;
    for (i, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        let mut parts = line.split_whitespace();
        let (Some(d), Some(w), Some(v), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(Error::format(
                path,
                i + 1,
                "expected `doc_id word_id weight`",
            ));
        };
        let d: usize = d
            .parse()
            .map_err(|_| Error::format(path, i + 1, "bad doc id"))?;
        let w: u32 = w
            .parse()
            .map_err(|_| Error::format(path, i + 1, "bad word id"))?;
        let v: f64 = v
            .parse()
            .map_err(|_| Error::format(path, i + 1, "bad weight"))?;
        if d >= n_docs {
            return Err(Error::format(
                path,
                i + 1,
                format!("doc id {d} out of range"),
            ));
        }
        rows[d].push((w, v));
        count += 1;
    }
    if count != nnz {
        return Err(Error::format(
            path,
            1,
            format!("header promises {nnz} entries, file has {count}"),
        ));
    }
    SparseDocTermMatrix::from_rows(kind, n_words, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_roundtrip_is_exact() {
        let matrix = SparseDocTermMatrix::from_rows(
            MatrixKind::TfIdf,
            4,
            vec![
                vec![(0, 0.1234567890123), (2, 7.0)],
                vec![],
                vec![(3, 1e-15)],
            ],
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.tsv");
        write_matrix(&path, &matrix).unwrap();
        let back = read_matrix(&path).unwrap();
        assert_eq!(back.n_docs(), 3);
        assert_eq!(back.kind(), MatrixKind::TfIdf);
        let orig: Vec<_> = matrix.iter_entries().collect();
        let reread: Vec<_> = back.iter_entries().collect();
        assert_eq!(orig, reread);
    }

    #[test]
    fn truncated_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.tsv");
        std::fs::write(&path, "2 2 2 count\n0 0 1\n").unwrap();
        let err = read_matrix(&path).unwrap_err();
        assert_eq!(err.category(), "format");
    }
}
