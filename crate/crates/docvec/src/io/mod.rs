//! Persistence formats: corpus files, preprocess artifacts, vector files,
//! test-set files, and the debug matrix export.
//!
//! All formats are line-oriented UTF-8 text. TAB separates a label from the
//! rest of a line because document titles contain spaces.

mod corpus_files;
mod matrix_files;
mod testset_files;
mod vector_files;

pub use corpus_files::{
    load_artifacts, read_corpus_file, read_vocabulary, write_artifacts, write_vocabulary,
    Artifacts, Manifest, CORPUS_FILE, MANIFEST_FILE, VOCAB_FILE,
};
pub use matrix_files::{read_matrix, write_matrix};
pub use testset_files::{read_questions, write_skip_report, write_testset};
pub use vector_files::{
    read_vector_store, read_vectors, write_dense_vectors, write_sparse_vectors, LoadedVectors,
};

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};

/// Nine significant digits, the precision the vector formats round-trip at.
pub(crate) fn fmt_value(v: f64) -> String {
    format!("{v:.8e}")
}

pub(crate) fn open_reader(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).map_err(|e| Error::io(path, e))?,
    ))
}

pub(crate) fn check_label(path: &Path, label: &str) -> Result<()> {
    if label.contains('\t') || label.contains('\n') {
        return Err(Error::Param(format!(
            "label `{}` contains a tab or newline and cannot be written to {}",
            label.escape_default(),
            path.display()
        )));
    }
    Ok(())
}

/// CRC32 of a file's raw bytes; manifests use it to detect stale artifacts.
pub fn crc32_of_file(path: &Path) -> Result<u32> {
    let mut reader = open_reader(path)?;
    let mut hasher = crc32fast::Hasher::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = reader.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hasher.finalize())
}
