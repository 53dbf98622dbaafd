//! The training-method registry. Every document-representation method hides
//! behind [`TrainStrategy`] and is selected by name at runtime, so the CLI,
//! the acceptance suite, and any embedding experiment drive all methods
//! through the same interface.

use std::collections::HashMap;

use crate::compose::bowe_compose;
use crate::config::RunConfig;
use crate::corpus::{DocumentCorpus, Vocabulary};
use crate::embedding::{train_cbow, train_pv_dbow, train_pv_dm};
use crate::error::{Error, Result};
use crate::factorization::{lsi_fit, nmf_fit};
use crate::topics::lda_fit;
use crate::vectors::DenseVectorSet;
use crate::weighting::{count_matrix, ppmi_transform, tfidf_transform, SparseDocTermMatrix};

/// Everything a strategy may draw on: the encoded corpus, its vocabulary,
/// and (for composition methods) previously trained word vectors.
pub struct TrainContext<'a> {
    pub corpus: &'a DocumentCorpus,
    pub vocab: &'a Vocabulary,
    pub word_vectors: Option<&'a DenseVectorSet>,
}

impl<'a> TrainContext<'a> {
    pub fn new(corpus: &'a DocumentCorpus, vocab: &'a Vocabulary) -> Self {
        TrainContext {
            corpus,
            vocab,
            word_vectors: None,
        }
    }

    pub fn with_word_vectors(mut self, words: &'a DenseVectorSet) -> Self {
        self.word_vectors = Some(words);
        self
    }

    fn titles(&self) -> Vec<String> {
        self.corpus.titles().map(String::from).collect()
    }
}

/// What a training run produces.
#[derive(Debug)]
pub enum TrainOutput {
    /// Dense document vectors labeled by title.
    Docs(DenseVectorSet),
    /// Document vectors plus the word vectors trained alongside them.
    DocsAndWords {
        docs: DenseVectorSet,
        words: DenseVectorSet,
    },
    /// Word vectors only (labeled by token).
    Words(DenseVectorSet),
    /// Sparse document rows, evaluated without densifying.
    SparseDocs {
        matrix: SparseDocTermMatrix,
        labels: Vec<String>,
    },
}

/// One interchangeable document-representation method.
pub trait TrainStrategy: Send + Sync {
    /// Registry key, also the CLI `--method` value.
    fn name(&self) -> &'static str;

    /// One-line description for listings.
    fn describe(&self) -> &'static str;

    /// True for methods that compose pre-trained word vectors (`bowe`).
    fn needs_word_vectors(&self) -> bool {
        false
    }

    fn train(&self, ctx: &TrainContext<'_>, cfg: &RunConfig) -> Result<TrainOutput>;
}

impl std::fmt::Debug for dyn TrainStrategy + '_ {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TrainStrategy({})", self.name())
    }
}

/// Name -> strategy table. Registration order is listing order.
pub struct StrategyRegistry {
    entries: Vec<Box<dyn TrainStrategy>>,
    by_name: HashMap<&'static str, usize>,
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        StrategyRegistry {
            entries: Vec::new(),
            by_name: HashMap::new(),
        }
    }

    /// All built-in methods, in the order reports list them.
    pub fn builtin() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(BowStrategy));
        registry.register(Box::new(LsiStrategy));
        registry.register(Box::new(LsiPmiStrategy));
        registry.register(Box::new(NmfStrategy));
        registry.register(Box::new(LdaStrategy));
        registry.register(Box::new(PvDmStrategy));
        registry.register(Box::new(PvDbowStrategy));
        registry.register(Box::new(BoweStrategy));
        registry.register(Box::new(CbowStrategy));
        registry
    }

    pub fn register(&mut self, strategy: Box<dyn TrainStrategy>) {
        let name = strategy.name();
        assert!(
            self.by_name.insert(name, self.entries.len()).is_none(),
            "duplicate strategy `{name}`"
        );
        self.entries.push(strategy);
    }

    pub fn get(&self, name: &str) -> Option<&dyn TrainStrategy> {
        self.by_name.get(name).map(|&i| self.entries[i].as_ref())
    }

    /// Like [`get`](Self::get) but with an error naming the alternatives.
    pub fn require(&self, name: &str) -> Result<&dyn TrainStrategy> {
        self.get(name)
            .ok_or_else(|| Error::UnknownMethod(name.to_string(), self.names().join(", ")))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|s| s.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn TrainStrategy> {
        self.entries.iter().map(|s| s.as_ref())
    }
}

struct BowStrategy;

impl TrainStrategy for BowStrategy {
    fn name(&self) -> &'static str {
        "bow"
    }

    fn describe(&self) -> &'static str {
        "sparse TF-IDF rows, evaluated by streaming sparse dot products"
    }

    fn train(&self, ctx: &TrainContext<'_>, _cfg: &RunConfig) -> Result<TrainOutput> {
        let counts = count_matrix(ctx.corpus, ctx.vocab);
        Ok(TrainOutput::SparseDocs {
            matrix: tfidf_transform(&counts)?,
            labels: ctx.titles(),
        })
    }
}

struct LsiStrategy;

impl TrainStrategy for LsiStrategy {
    fn name(&self) -> &'static str {
        "lsi"
    }

    fn describe(&self) -> &'static str {
        "truncated SVD of the TF-IDF matrix; documents as rows of U_k S_k"
    }

    fn train(&self, ctx: &TrainContext<'_>, cfg: &RunConfig) -> Result<TrainOutput> {
        let weights = tfidf_transform(&count_matrix(ctx.corpus, ctx.vocab))?;
        let (docs, _sigma) = lsi_fit(&weights, cfg.dim, cfg.seed)?;
        Ok(TrainOutput::Docs(docs.relabel(ctx.titles())?))
    }
}

struct LsiPmiStrategy;

impl TrainStrategy for LsiPmiStrategy {
    fn name(&self) -> &'static str {
        "lsi-pmi"
    }

    fn describe(&self) -> &'static str {
        "truncated SVD of the shifted positive-PMI matrix"
    }

    fn train(&self, ctx: &TrainContext<'_>, cfg: &RunConfig) -> Result<TrainOutput> {
        let weights = ppmi_transform(&count_matrix(ctx.corpus, ctx.vocab), cfg.shift_k)?;
        let (docs, _sigma) = lsi_fit(&weights, cfg.dim, cfg.seed)?;
        Ok(TrainOutput::Docs(docs.relabel(ctx.titles())?))
    }
}

struct NmfStrategy;

impl TrainStrategy for NmfStrategy {
    fn name(&self) -> &'static str {
        "nmf"
    }

    fn describe(&self) -> &'static str {
        "non-negative factorization of the TF-IDF matrix (multiplicative updates)"
    }

    fn train(&self, ctx: &TrainContext<'_>, cfg: &RunConfig) -> Result<TrainOutput> {
        let weights = tfidf_transform(&count_matrix(ctx.corpus, ctx.vocab))?;
        let fit = nmf_fit(&weights, cfg.dim, &cfg.nmf_options())?;
        Ok(TrainOutput::Docs(fit.doc_factors.relabel(ctx.titles())?))
    }
}

struct LdaStrategy;

impl TrainStrategy for LdaStrategy {
    fn name(&self) -> &'static str {
        "lda"
    }

    fn describe(&self) -> &'static str {
        "topic proportions from collapsed Gibbs sampling over raw counts"
    }

    fn train(&self, ctx: &TrainContext<'_>, cfg: &RunConfig) -> Result<TrainOutput> {
        let counts = count_matrix(ctx.corpus, ctx.vocab);
        let theta = lda_fit(&counts, cfg.dim, &cfg.lda_options())?;
        Ok(TrainOutput::Docs(theta.relabel(ctx.titles())?))
    }
}

struct PvDmStrategy;

impl TrainStrategy for PvDmStrategy {
    fn name(&self) -> &'static str {
        "pv-dm"
    }

    fn describe(&self) -> &'static str {
        "paragraph vectors, distributed memory: doc vector joins the context average"
    }

    fn train(&self, ctx: &TrainContext<'_>, cfg: &RunConfig) -> Result<TrainOutput> {
        let (docs, words) = train_pv_dm(ctx.corpus, ctx.vocab, &cfg.embedding_params())?;
        Ok(TrainOutput::DocsAndWords { docs, words })
    }
}

struct PvDbowStrategy;

impl TrainStrategy for PvDbowStrategy {
    fn name(&self) -> &'static str {
        "pv-dbow"
    }

    fn describe(&self) -> &'static str {
        "paragraph vectors, distributed bag of words: doc vector predicts each word"
    }

    fn train(&self, ctx: &TrainContext<'_>, cfg: &RunConfig) -> Result<TrainOutput> {
        let docs = train_pv_dbow(ctx.corpus, ctx.vocab, &cfg.embedding_params())?;
        Ok(TrainOutput::Docs(docs))
    }
}

struct BoweStrategy;

impl TrainStrategy for BoweStrategy {
    fn name(&self) -> &'static str {
        "bowe"
    }

    fn describe(&self) -> &'static str {
        "bag of word embeddings: doc-word weights times pre-trained word vectors"
    }

    fn needs_word_vectors(&self) -> bool {
        true
    }

    fn train(&self, ctx: &TrainContext<'_>, cfg: &RunConfig) -> Result<TrainOutput> {
        let words = ctx.word_vectors.ok_or_else(|| {
            Error::Param("bowe requires word vectors (see --word-vectors)".into())
        })?;
        let aligned = align_word_vectors(words, ctx.vocab)?;
        let counts = count_matrix(ctx.corpus, ctx.vocab);
        let weights = if cfg.bowe_tfidf {
            tfidf_transform(&counts)?
        } else {
            counts
        };
        let docs = bowe_compose(&weights, &aligned)?;
        Ok(TrainOutput::Docs(docs.relabel(ctx.titles())?))
    }
}

/// Reorder a labeled word-vector set into vocabulary id order. Every
/// vocabulary token must be present; extra rows are ignored.
fn align_word_vectors(words: &DenseVectorSet, vocab: &Vocabulary) -> Result<DenseVectorSet> {
    let by_label: HashMap<&str, usize> = words
        .labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let dim = words.dim();
    let mut data = Vec::with_capacity(vocab.len() * dim);
    let mut missing = Vec::new();
    for token in vocab.tokens() {
        match by_label.get(token.as_str()) {
            Some(&row) => data.extend_from_slice(words.row(row)),
            None => missing.push(token.clone()),
        }
    }
    if !missing.is_empty() {
        let shown: Vec<_> = missing.iter().take(5).cloned().collect();
        return Err(Error::Param(format!(
            "word vectors are missing {} vocabulary tokens (e.g. {})",
            missing.len(),
            shown.join(", ")
        )));
    }
    DenseVectorSet::new(vocab.tokens().to_vec(), dim, data)
}

struct CbowStrategy;

impl TrainStrategy for CbowStrategy {
    fn name(&self) -> &'static str {
        "cbow"
    }

    fn describe(&self) -> &'static str {
        "CBOW word vectors with negative sampling (input for bowe)"
    }

    fn train(&self, ctx: &TrainContext<'_>, cfg: &RunConfig) -> Result<TrainOutput> {
        let words = train_cbow(ctx.corpus, ctx.vocab, &cfg.embedding_params())?;
        Ok(TrainOutput::Words(words))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::RawDocument;

    fn fixture() -> (DocumentCorpus, Vocabulary) {
        let texts = [
            ("alpha", "red green blue red green blue"),
            ("beta", "red red green yellow yellow"),
            ("gamma", "blue blue yellow green red"),
            ("delta", "yellow green blue blue red"),
        ];
        let docs: Vec<RawDocument> = texts
            .iter()
            .map(|(t, x)| RawDocument::new(*t, *x))
            .collect();
        let vocab = Vocabulary::build(&docs, 1).unwrap();
        let corpus = DocumentCorpus::encode(&docs, &vocab).unwrap();
        (corpus, vocab)
    }

    fn small_cfg() -> RunConfig {
        RunConfig {
            dim: 2,
            epochs: 2,
            nmf_max_iters: 20,
            lda_iterations: 5,
            ..Default::default()
        }
    }

    #[test]
    fn registry_lists_every_method() {
        let registry = StrategyRegistry::builtin();
        assert_eq!(
            registry.names(),
            vec!["bow", "lsi", "lsi-pmi", "nmf", "lda", "pv-dm", "pv-dbow", "bowe", "cbow"]
        );
    }

    #[test]
    fn unknown_method_error_names_alternatives() {
        let registry = StrategyRegistry::builtin();
        let err = registry.require("word2vec").unwrap_err();
        assert_eq!(err.category(), "method");
        assert!(err.to_string().contains("pv-dbow"), "{err}");
    }

    #[test]
    fn every_strategy_trains_on_the_fixture() {
        let (corpus, vocab) = fixture();
        let registry = StrategyRegistry::builtin();
        let cfg = small_cfg();

        // cbow word vectors feed bowe below.
        let cbow_out = registry
            .require("cbow")
            .unwrap()
            .train(&TrainContext::new(&corpus, &vocab), &cfg)
            .unwrap();
        let TrainOutput::Words(word_vectors) = cbow_out else {
            panic!("cbow must produce word vectors");
        };

        for strategy in registry.iter() {
            let ctx = if strategy.needs_word_vectors() {
                TrainContext::new(&corpus, &vocab).with_word_vectors(&word_vectors)
            } else {
                TrainContext::new(&corpus, &vocab)
            };
            let out = strategy
                .train(&ctx, &cfg)
                .unwrap_or_else(|e| panic!("{} failed: {e}", strategy.name()));
            match out {
                TrainOutput::Docs(d) => assert_eq!(d.rows(), corpus.len()),
                TrainOutput::DocsAndWords { docs, words } => {
                    assert_eq!(docs.rows(), corpus.len());
                    assert_eq!(words.rows(), vocab.len());
                }
                TrainOutput::Words(w) => assert_eq!(w.rows(), vocab.len()),
                TrainOutput::SparseDocs { matrix, labels } => {
                    assert_eq!(matrix.n_docs(), corpus.len());
                    assert_eq!(labels.len(), corpus.len());
                }
            }
        }
    }

    #[test]
    fn bowe_without_word_vectors_is_param_error() {
        let (corpus, vocab) = fixture();
        let registry = StrategyRegistry::builtin();
        let err = registry
            .require("bowe")
            .unwrap()
            .train(&TrainContext::new(&corpus, &vocab), &small_cfg())
            .unwrap_err();
        assert_eq!(err.category(), "param");
    }

    #[test]
    fn bowe_reports_missing_tokens() {
        let (corpus, vocab) = fixture();
        let partial = DenseVectorSet::new(
            vec!["red".into(), "green".into()],
            2,
            vec![1.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let registry = StrategyRegistry::builtin();
        let err = registry
            .require("bowe")
            .unwrap()
            .train(
                &TrainContext::new(&corpus, &vocab).with_word_vectors(&partial),
                &small_cfg(),
            )
            .unwrap_err();
        assert!(err.to_string().contains("missing"), "{err}");
    }
}
