//! `docvec` — train document vectors and evaluate them on the
//! document-analogy task.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "docvec",
    about = "Document-vector training methods and the document-analogy evaluation harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Tokenize a raw corpus and write vocabulary + encoded corpus artifacts.
    Preprocess {
        /// Corpus file: one document per line, `title<TAB>text`.
        #[arg(long)]
        corpus: PathBuf,
        /// Artifact output directory.
        #[arg(long)]
        out: PathBuf,
        /// Drop tokens occurring fewer than this many times.
        #[arg(long, default_value_t = 20)]
        min_count: u64,
    },
    /// Train document (or word) vectors with one of the registered methods.
    Train(TrainArgs),
    /// Match analogy questions to corpus titles and write a test set.
    BuildTestset {
        /// Preprocess artifact directory.
        #[arg(long)]
        artifacts: PathBuf,
        /// Questions file: `: relation` headers, TAB-separated quadruples.
        #[arg(long)]
        questions: PathBuf,
        /// Test-set output path.
        #[arg(long)]
        output: PathBuf,
        /// Skip-report path (defaults to the output path with a `skips.tsv`
        /// extension).
        #[arg(long)]
        skips: Option<PathBuf>,
    },
    /// Score a vector file on a test set and print the per-relation table.
    Eval {
        /// Dense or sparse vector file.
        #[arg(long)]
        vectors: PathBuf,
        /// Test-set file from build-testset.
        #[arg(long)]
        testset: PathBuf,
        /// Also write the report as TSV.
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
    /// Convert a vector file (e.g. densify sparse BOW rows).
    ExportVectors {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct TrainArgs {
    /// Preprocess artifact directory.
    #[arg(long)]
    artifacts: PathBuf,
    /// Training method; see `train --help` for the registry.
    #[arg(long)]
    method: String,
    /// Output vector file (document vectors; word vectors for cbow).
    #[arg(long)]
    output: PathBuf,
    /// Also write word vectors (pv-dm trains them alongside documents).
    #[arg(long)]
    word_output: Option<PathBuf>,
    /// Pre-trained word vectors (required by bowe).
    #[arg(long)]
    word_vectors: Option<PathBuf>,
    /// Optional `key=value` config file; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dump the doc-word matrix the run is based on (debug triple format).
    #[arg(long)]
    dump_matrix: Option<PathBuf>,
    /// Matrix kind for --dump-matrix.
    #[arg(long, default_value = "count")]
    dump_matrix_kind: String,

    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    negatives: Option<usize>,
    #[arg(long)]
    initial_lr: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    unigram_power: Option<f64>,
    #[arg(long)]
    subsample: Option<f64>,
    #[arg(long)]
    shift_k: Option<f64>,
    #[arg(long)]
    nmf_max_iters: Option<usize>,
    #[arg(long)]
    nmf_tol: Option<f64>,
    #[arg(long)]
    lda_alpha: Option<f64>,
    #[arg(long)]
    lda_beta: Option<f64>,
    #[arg(long)]
    lda_iterations: Option<usize>,
    /// Weight bowe by TF-IDF instead of raw counts.
    #[arg(long)]
    bowe_tfidf: bool,
    /// Suppress training progress on stderr.
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Preprocess {
            corpus,
            out,
            min_count,
        } => commands::preprocess(&corpus, &out, min_count),
        Command::Train(args) => commands::train(&args),
        Command::BuildTestset {
            artifacts,
            questions,
            output,
            skips,
        } => commands::build_testset(&artifacts, &questions, &output, skips.as_deref()),
        Command::Eval {
            vectors,
            testset,
            tsv,
        } => commands::eval(&vectors, &testset, tsv.as_deref()),
        Command::ExportVectors { input, output } => commands::export_vectors(&input, &output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // One line, machine-readable category first.
            eprintln!("error[{}]: {err}", err.category());
            ExitCode::FAILURE
        }
    }
}
