//! Run configuration shared by every training strategy, with `key=value`
//! config-file support. Command-line flags override file entries.

use std::path::Path;

use crate::embedding::EmbeddingParams;
use crate::error::{Error, Result};
use crate::factorization::NmfOptions;
use crate::io;
use crate::topics::LdaOptions;

/// Hyperparameters for a single `train` run. Defaults follow the models'
/// conventional settings; every field can come from a config file or a flag.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dim: usize,
    pub seed: u64,
    pub workers: usize,

    // Embedding trainers (cbow, pv-dm, pv-dbow).
    pub window: usize,
    pub negatives: usize,
    pub initial_lr: Option<f64>,
    pub epochs: usize,
    pub unigram_power: f64,
    pub subsample: Option<f64>,
    pub log_progress: bool,

    // lsi-pmi.
    pub shift_k: f64,

    // nmf.
    pub nmf_max_iters: usize,
    pub nmf_tol: f64,

    // lda.
    pub lda_alpha: Option<f64>,
    pub lda_beta: f64,
    pub lda_iterations: usize,

    // bowe: weight word vectors by TF-IDF instead of raw counts.
    pub bowe_tfidf: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dim: 100,
            seed: 1,
            workers: 1,
            window: 10,
            negatives: 10,
            initial_lr: None,
            epochs: 5,
            unigram_power: 0.75,
            subsample: None,
            log_progress: false,
            shift_k: 1.0,
            nmf_max_iters: 200,
            nmf_tol: 1e-4,
            lda_alpha: None,
            lda_beta: 0.01,
            lda_iterations: 200,
            bowe_tfidf: false,
        }
    }
}

impl RunConfig {
    /// Apply one `key=value` pair. Unknown keys are config errors so typos
    /// fail loudly.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
        }
        match key {
            "dim" => self.dim = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "workers" => self.workers = parse(key, value)?,
            "window" => self.window = parse(key, value)?,
            "negatives" => self.negatives = parse(key, value)?,
            "initial-lr" => self.initial_lr = Some(parse(key, value)?),
            "epochs" => self.epochs = parse(key, value)?,
            "unigram-power" => self.unigram_power = parse(key, value)?,
            "subsample" => self.subsample = Some(parse(key, value)?),
            "shift-k" => self.shift_k = parse(key, value)?,
            "nmf-max-iters" => self.nmf_max_iters = parse(key, value)?,
            "nmf-tol" => self.nmf_tol = parse(key, value)?,
            "lda-alpha" => self.lda_alpha = Some(parse(key, value)?),
            "lda-beta" => self.lda_beta = parse(key, value)?,
            "lda-iterations" => self.lda_iterations = parse(key, value)?,
            "bowe-tfidf" => self.bowe_tfidf = parse(key, value)?,
            _ => return Err(Error::Config(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Load `key=value` lines (blank lines and `#` comments allowed) over the
    /// current values.
    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        use std::io::BufRead;
        let reader = io::open_reader(path)?;
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::format(path, i + 1, "expected `key=value`"))?;
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn embedding_params(&self) -> EmbeddingParams {
        EmbeddingParams {
            dim: self.dim,
            window: self.window,
            negatives: self.negatives,
            initial_lr: self.initial_lr,
            epochs: self.epochs,
            unigram_power: self.unigram_power,
            subsample: self.subsample,
            seed: self.seed,
            workers: self.workers,
            log_progress: self.log_progress,
        }
    }

    pub fn nmf_options(&self) -> NmfOptions {
        NmfOptions {
            max_iters: self.nmf_max_iters,
            tol: self.nmf_tol,
            seed: self.seed,
        }
    }

    pub fn lda_options(&self) -> LdaOptions {
        LdaOptions {
            alpha: self.lda_alpha,
            beta: self.lda_beta,
            iterations: self.lda_iterations,
            seed: self.seed,
        }
    }
}
