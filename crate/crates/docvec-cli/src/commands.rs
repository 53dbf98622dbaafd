//! Implementations of the five subcommands.

use std::path::Path;

use docvec::analogy::{evaluate, resolve_testset, EvalReport};
use docvec::config::RunConfig;
use docvec::corpus::{DocumentCorpus, Vocabulary};
use docvec::io;
use docvec::strategy::{StrategyRegistry, TrainContext, TrainOutput};
use docvec::vectors::DenseVectorSet;
use docvec::weighting::{count_matrix, ppmi_transform, tfidf_transform};
use docvec::{Error, Result};

use crate::TrainArgs;

pub fn preprocess(corpus_path: &Path, out_dir: &Path, min_count: u64) -> Result<()> {
    let checksum = io::crc32_of_file(corpus_path)?;
    let raw_docs = io::read_corpus_file(corpus_path)?;
    let vocab = Vocabulary::build(&raw_docs, min_count)?;
    let corpus = DocumentCorpus::encode(&raw_docs, &vocab)?;
    io::write_artifacts(out_dir, &vocab, &corpus, checksum)?;
    println!(
        "preprocess: {} documents, {} vocabulary words, {} tokens -> {}",
        corpus.len(),
        vocab.len(),
        corpus.total_tokens(),
        out_dir.display()
    );
    Ok(())
}

pub fn train(args: &TrainArgs) -> Result<()> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &args.config {
        cfg.load_file(path)?;
    }
    apply_flags(&mut cfg, args);

    let artifacts = io::load_artifacts(&args.artifacts)?;
    let registry = StrategyRegistry::builtin();
    let strategy = registry.require(&args.method)?;

    // Hold the loaded word vectors outside the context so borrows line up.
    let word_vectors: Option<DenseVectorSet> =
        match (&args.word_vectors, strategy.needs_word_vectors()) {
            (Some(path), _) => match io::read_vectors(path)? {
                io::LoadedVectors::Dense(set) => Some(set),
                io::LoadedVectors::Sparse { .. } => {
                    return Err(Error::Param(format!(
                        "{}: word vectors must be a dense vector file",
                        path.display()
                    )))
                }
            },
            (None, true) => {
                return Err(Error::Param(format!(
                    "method `{}` requires --word-vectors",
                    args.method
                )))
            }
            (None, false) => None,
        };

    if let Some(path) = &args.dump_matrix {
        let counts = count_matrix(&artifacts.corpus, &artifacts.vocab);
        let matrix = match args.dump_matrix_kind.as_str() {
            "count" => counts,
            "tfidf" => tfidf_transform(&counts)?,
            "ppmi" => ppmi_transform(&counts, cfg.shift_k)?,
            other => {
                return Err(Error::Param(format!(
                    "unknown matrix kind `{other}` (count, tfidf, ppmi)"
                )))
            }
        };
        io::write_matrix(path, &matrix)?;
    }

    let mut ctx = TrainContext::new(&artifacts.corpus, &artifacts.vocab);
    if let Some(words) = &word_vectors {
        ctx = ctx.with_word_vectors(words);
    }

    let output = strategy.train(&ctx, &cfg)?;
    if args.word_output.is_some() && !matches!(output, TrainOutput::DocsAndWords { .. }) {
        return Err(Error::Param(format!(
            "method `{}` does not produce separate word vectors; drop --word-output",
            args.method
        )));
    }
    match output {
        TrainOutput::Docs(docs) => {
            io::write_dense_vectors(&args.output, &docs)?;
            println!(
                "train: {} -> {} document vectors, dim {} -> {}",
                args.method,
                docs.rows(),
                docs.dim(),
                args.output.display()
            );
        }
        TrainOutput::DocsAndWords { docs, words } => {
            io::write_dense_vectors(&args.output, &docs)?;
            if let Some(word_path) = &args.word_output {
                io::write_dense_vectors(word_path, &words)?;
            }
            println!(
                "train: {} -> {} document vectors (+{} word vectors), dim {} -> {}",
                args.method,
                docs.rows(),
                words.rows(),
                docs.dim(),
                args.output.display()
            );
        }
        TrainOutput::Words(words) => {
            io::write_dense_vectors(&args.output, &words)?;
            println!(
                "train: {} -> {} word vectors, dim {} -> {}",
                args.method,
                words.rows(),
                words.dim(),
                args.output.display()
            );
        }
        TrainOutput::SparseDocs { matrix, labels } => {
            io::write_sparse_vectors(&args.output, &matrix, &labels)?;
            println!(
                "train: {} -> {} sparse document rows ({} entries) -> {}",
                args.method,
                matrix.n_docs(),
                matrix.nnz(),
                args.output.display()
            );
        }
    }
    Ok(())
}

fn apply_flags(cfg: &mut RunConfig, args: &TrainArgs) {
    if let Some(v) = args.dim {
        cfg.dim = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.workers {
        cfg.workers = v;
    }
    if let Some(v) = args.window {
        cfg.window = v;
    }
    if let Some(v) = args.negatives {
        cfg.negatives = v;
    }
    if let Some(v) = args.initial_lr {
        cfg.initial_lr = Some(v);
    }
    if let Some(v) = args.epochs {
        cfg.epochs = v;
    }
    if let Some(v) = args.unigram_power {
        cfg.unigram_power = v;
    }
    if let Some(v) = args.subsample {
        cfg.subsample = Some(v);
    }
    if let Some(v) = args.shift_k {
        cfg.shift_k = v;
    }
    if let Some(v) = args.nmf_max_iters {
        cfg.nmf_max_iters = v;
    }
    if let Some(v) = args.nmf_tol {
        cfg.nmf_tol = v;
    }
    if let Some(v) = args.lda_alpha {
        cfg.lda_alpha = Some(v);
    }
    if let Some(v) = args.lda_beta {
        cfg.lda_beta = v;
    }
    if let Some(v) = args.lda_iterations {
        cfg.lda_iterations = v;
    }
    if args.bowe_tfidf {
        cfg.bowe_tfidf = true;
    }
    cfg.log_progress = !args.quiet;
}

pub fn build_testset(
    artifacts_dir: &Path,
    questions: &Path,
    output: &Path,
    skips: Option<&Path>,
) -> Result<()> {
    let artifacts = io::load_artifacts(artifacts_dir)?;
    let raw = io::read_questions(questions)?;
    let titles: Vec<String> = artifacts.corpus.titles().map(String::from).collect();
    let (testset, report) = docvec::analogy::build_testset(&raw, &titles)?;
    io::write_testset(output, &testset, &titles)?;

    let default_skips = output.with_extension("skips.tsv");
    let skips_path = skips.unwrap_or(&default_skips);
    io::write_skip_report(skips_path, &report)?;

    println!(
        "build-testset: kept {} questions, skipped {} ({} no-match, {} duplicate-ids) -> {}",
        testset.n_questions(),
        report.skipped.len(),
        report.no_match_count(),
        report.duplicate_count(),
        output.display()
    );
    Ok(())
}

pub fn eval(vectors: &Path, testset: &Path, tsv: Option<&Path>) -> Result<()> {
    let store = io::read_vector_store(vectors)?;
    let raw = io::read_questions(testset)?;
    let resolved = resolve_testset(&raw, store.labels())?;
    let report = evaluate(&resolved, &store)?;
    print_report(&report);
    if let Some(path) = tsv {
        write_report_tsv(path, &report)?;
    }
    Ok(())
}

fn print_report(report: &EvalReport) {
    let name_width = report
        .relations
        .iter()
        .map(|r| r.name.len())
        .chain(["relation".len(), "total".len()])
        .max()
        .unwrap_or(8);
    println!(
        "{:<name_width$}  {:>7}  {:>7}  {:>8}",
        "relation", "asked", "correct", "accuracy"
    );
    for rel in &report.relations {
        println!(
            "{:<name_width$}  {:>7}  {:>7}  {:>8.2}",
            rel.name,
            rel.asked,
            rel.correct,
            rel.accuracy()
        );
    }
    println!(
        "{:<name_width$}  {:>7}  {:>7}  {:>8.2}",
        "total",
        report.total_asked(),
        report.total_correct(),
        report.total_accuracy()
    );
}

fn write_report_tsv(path: &Path, report: &EvalReport) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?);
    let mut emit = |name: &str, asked: usize, correct: usize, acc: f64| -> std::io::Result<()> {
        writeln!(out, "{name}\t{asked}\t{correct}\t{acc:.2}")
    };
    for rel in &report.relations {
        emit(&rel.name, rel.asked, rel.correct, rel.accuracy()).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
    }
    emit(
        "total",
        report.total_asked(),
        report.total_correct(),
        report.total_accuracy(),
    )
    .map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

pub fn export_vectors(input: &Path, output: &Path) -> Result<()> {
    match io::read_vectors(input)? {
        io::LoadedVectors::Dense(set) => {
            io::write_dense_vectors(output, &set)?;
            println!(
                "export-vectors: {} dense rows -> {}",
                set.rows(),
                output.display()
            );
        }
        io::LoadedVectors::Sparse {
            labels,
            n_cols,
            rows,
        } => {
            let mut data = vec![0.0; labels.len() * n_cols];
            for (i, row) in rows.iter().enumerate() {
                for &(j, w) in row {
                    data[i * n_cols + j as usize] = w;
                }
            }
            let rows_n = labels.len();
            let set = DenseVectorSet::new(labels, n_cols, data)?;
            io::write_dense_vectors(output, &set)?;
            println!(
                "export-vectors: densified {} sparse rows to dim {} -> {}",
                rows_n,
                n_cols,
                output.display()
            );
        }
    }
    Ok(())
}
