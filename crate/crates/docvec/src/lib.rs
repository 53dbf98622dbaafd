//! # docvec
//!
//! A document-representation toolkit: train document vectors over a corpus
//! with any of several interchangeable methods and evaluate them on the
//! document-analogy task (answer "a is to b as c is to ?" over document
//! vectors by the vector-offset rule).
//!
//! Training methods live behind the [`strategy::TrainStrategy`] trait and are
//! registered by name in a [`strategy::StrategyRegistry`]:
//!
//! | name      | representation                                        |
//! |-----------|-------------------------------------------------------|
//! | `bow`     | sparse TF-IDF rows, evaluated without densifying      |
//! | `lsi`     | truncated SVD of the TF-IDF matrix, rows of U_k S_k   |
//! | `lsi-pmi` | truncated SVD of the shifted-PPMI matrix              |
//! | `nmf`     | non-negative factors of the TF-IDF matrix             |
//! | `lda`     | topic proportions from collapsed Gibbs sampling       |
//! | `pv-dm`   | paragraph vectors, distributed-memory wiring          |
//! | `pv-dbow` | paragraph vectors, distributed bag-of-words wiring    |
//! | `bowe`    | bag of word embeddings: count rows times word vectors |
//! | `cbow`    | CBOW word vectors (input for `bowe`)                  |
//!
//! The pipeline is: [`corpus`] ingestion -> [`weighting`] matrix ->
//! one training method -> [`analogy`] evaluation, with persistence formats in
//! [`io`].

pub mod analogy;
pub mod compose;
pub mod config;
pub mod corpus;
pub mod embedding;
mod error;
pub mod factorization;
pub mod io;
mod linalg;
pub mod strategy;
pub mod topics;
pub mod vectors;
pub mod weighting;

pub use error::{Error, Result};
