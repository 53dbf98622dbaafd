//! Raw corpus input, vocabulary files, and the preprocess artifact bundle.

use std::fs::File;
use std::io::{BufRead, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::corpus::{DocumentCorpus, EncodedDocument, RawDocument, Vocabulary};
use crate::error::{Error, Result};

use super::{check_label, crc32_of_file, open_reader};

pub const VOCAB_FILE: &str = "vocab.tsv";
pub const CORPUS_FILE: &str = "corpus.tsv";
pub const MANIFEST_FILE: &str = "manifest.tsv";

/// Read a raw corpus: one document per line, `title<TAB>text`. Lines without
/// a TAB are rejected with their line number.
pub fn read_corpus_file(path: &Path) -> Result<Vec<RawDocument>> {
    let reader = open_reader(path)?;
    let mut docs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        match line.split_once('\t') {
            Some((title, text)) => docs.push(RawDocument::new(title, text)),
            None => {
                return Err(Error::format(
                    path,
                    i + 1,
                    "expected `title<TAB>text`, found no TAB",
                ))
            }
        }
    }
    Ok(docs)
}

/// Vocabulary export: one `token<TAB>freq` per line in id order.
pub fn write_vocabulary(path: &Path, vocab: &Vocabulary) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    for (token, freq) in vocab.tokens().iter().zip(vocab.freqs()) {
        writeln!(out, "{token}\t{freq}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_vocabulary(path: &Path, min_count: u64) -> Result<Vocabulary> {
    let reader = open_reader(path)?;
    let mut entries = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let (token, freq) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(path, i + 1, "expected `token<TAB>freq`"))?;
        let freq: u64 = freq
            .parse()
            .map_err(|_| Error::format(path, i + 1, format!("bad frequency `{freq}`")))?;
        entries.push((token.to_string(), freq));
    }
    Vocabulary::from_entries(entries, min_count)
}

fn write_encoded_corpus(path: &Path, corpus: &DocumentCorpus) -> Result<()> {
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    for doc in corpus.docs() {
        check_label(path, &doc.title)?;
        write!(out, "{}\t{}\t", doc.doc_id, doc.title).map_err(|e| Error::io(path, e))?;
        let ids: Vec<String> = doc.tokens.iter().map(|t| t.to_string()).collect();
        writeln!(out, "{}", ids.join(" ")).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

fn read_encoded_corpus(path: &Path, n_words: usize) -> Result<DocumentCorpus> {
    let reader = open_reader(path)?;
    let mut docs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let mut fields = line.splitn(3, '\t');
        let (Some(id), Some(title), Some(tokens)) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(Error::format(
                path,
                i + 1,
                "expected `id<TAB>title<TAB>tokens`",
            ));
        };
        let doc_id: u32 = id
            .parse()
            .map_err(|_| Error::format(path, i + 1, format!("bad doc id `{id}`")))?;
        let mut ids = Vec::new();
        for tok in tokens.split_whitespace() {
            let t: u32 = tok
                .parse()
                .map_err(|_| Error::format(path, i + 1, format!("bad token id `{tok}`")))?;
            if t as usize >= n_words {
                return Err(Error::format(
                    path,
                    i + 1,
                    format!("token id {t} out of range (vocabulary has {n_words} words)"),
                ));
            }
            ids.push(t);
        }
        docs.push(EncodedDocument {
            doc_id,
            title: title.to_string(),
            tokens: ids,
        });
    }
    DocumentCorpus::from_documents(docs)
}

/// Flat `key<TAB>value` metadata written alongside preprocess artifacts.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_u64(&self, key: &str) -> Result<u64> {
        let v = self
            .get(key)
            .ok_or_else(|| Error::Checksum(format!("manifest is missing `{key}`")))?;
        v.parse()
            .map_err(|_| Error::Checksum(format!("manifest `{key}` is not a number: `{v}`")))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        for (k, v) in &self.entries {
            writeln!(out, "{k}\t{v}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let reader = open_reader(path)?;
        let mut entries = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let (k, v) = line
                .split_once('\t')
                .ok_or_else(|| Error::format(path, i + 1, "expected `key<TAB>value`"))?;
            entries.push((k.to_string(), v.to_string()));
        }
        Ok(Manifest { entries })
    }
}

/// A loaded preprocess artifact bundle.
#[derive(Debug)]
pub struct Artifacts {
    pub vocab: Vocabulary,
    pub corpus: DocumentCorpus,
    pub manifest: Manifest,
    pub dir: PathBuf,
}

/// Write vocabulary, encoded corpus, and a manifest with parameters and
/// checksums into `dir`. Reruns over identical inputs are byte-identical.
pub fn write_artifacts(
    dir: &Path,
    vocab: &Vocabulary,
    corpus: &DocumentCorpus,
    input_crc32: u32,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let vocab_path = dir.join(VOCAB_FILE);
    let corpus_path = dir.join(CORPUS_FILE);
    write_vocabulary(&vocab_path, vocab)?;
    write_encoded_corpus(&corpus_path, corpus)?;

    let mut manifest = Manifest::default();
    manifest.push("format", 1);
    manifest.push("input_crc32", format!("{input_crc32:08x}"));
    manifest.push("min_count", vocab.min_count());
    manifest.push("n_docs", corpus.len());
    manifest.push("n_vocab", vocab.len());
    manifest.push("total_tokens", corpus.total_tokens());
    manifest.push(
        "vocab_crc32",
        format!("{:08x}", crc32_of_file(&vocab_path)?),
    );
    manifest.push(
        "corpus_crc32",
        format!("{:08x}", crc32_of_file(&corpus_path)?),
    );
    manifest.write(&dir.join(MANIFEST_FILE))
}

/// Load an artifact bundle, verifying the per-file checksums recorded in the
/// manifest before anything downstream trusts the data.
pub fn load_artifacts(dir: &Path) -> Result<Artifacts> {
    let manifest = Manifest::read(&dir.join(MANIFEST_FILE))?;
    for (key, file) in [("vocab_crc32", VOCAB_FILE), ("corpus_crc32", CORPUS_FILE)] {
        let want = manifest
            .get(key)
            .ok_or_else(|| Error::Checksum(format!("manifest is missing `{key}`")))?;
        let got = format!("{:08x}", crc32_of_file(&dir.join(file))?);
        if want != got {
            return Err(Error::Checksum(format!(
                "{file} does not match its manifest checksum (expected {want}, found {got}); \
                 rerun preprocess"
            )));
        }
    }
    let min_count = manifest.get_u64("min_count")?;
    let vocab = read_vocabulary(&dir.join(VOCAB_FILE), min_count)?;
    let corpus = read_encoded_corpus(&dir.join(CORPUS_FILE), vocab.len())?;
    if corpus.len() as u64 != manifest.get_u64("n_docs")? {
        return Err(Error::Checksum(
            "manifest n_docs does not match corpus".into(),
        ));
    }
    Ok(Artifacts {
        vocab,
        corpus,
        manifest,
        dir: dir.to_path_buf(),
    })
}
