//! Negative-sampling SGD trainer shared by CBOW word vectors and the PV-DM /
//! PV-DBOW document-vector models.

mod sampler;
mod trainer;

pub use sampler::{build_negative_table, NegativeSampler};
pub use trainer::{
    learning_rate_at, negative_sampling_gradients, train_cbow, train_pv_dbow, train_pv_dm,
};

use crate::error::{Error, Result};

/// Fraction of the initial learning rate the linear decay never drops below.
pub const LR_FLOOR: f64 = 1e-4;

/// Which model the shared trainer is wired as.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Cbow,
    PvDm,
    PvDbow,
}

impl ModelKind {
    /// 0.05 for CBOW and PV-DM, 0.025 for PV-DBOW.
    pub fn default_initial_lr(&self) -> f64 {
        match self {
            ModelKind::Cbow | ModelKind::PvDm => 0.05,
            ModelKind::PvDbow => 0.025,
        }
    }
}

/// Hyperparameters for the embedding trainers.
#[derive(Debug, Clone)]
pub struct EmbeddingParams {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    /// `None` selects the per-model default.
    pub initial_lr: Option<f64>,
    pub epochs: usize,
    pub unigram_power: f64,
    /// Frequent-word subsampling threshold; off by default.
    pub subsample: Option<f64>,
    pub seed: u64,
    /// Worker threads. One worker is the deterministic reference mode.
    pub workers: usize,
    /// Report words/sec and the current learning rate to stderr.
    pub log_progress: bool,
}

impl Default for EmbeddingParams {
    fn default() -> Self {
        EmbeddingParams {
            dim: 100,
            window: 10,
            negatives: 10,
            initial_lr: None,
            epochs: 5,
            unigram_power: 0.75,
            subsample: None,
            seed: 1,
            workers: 1,
            log_progress: false,
        }
    }
}

impl EmbeddingParams {
    pub fn validate(&self, model: ModelKind) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::Param("dim must be >= 1".into()));
        }
        if self.window < 1 {
            return Err(Error::Param("window must be >= 1".into()));
        }
        if self.epochs < 1 {
            return Err(Error::Param("epochs must be >= 1".into()));
        }
        if self.workers < 1 {
            return Err(Error::Param("workers must be >= 1".into()));
        }
        let lr = self.effective_lr(model);
        if !(lr > 0.0 && lr <= 1.0) {
            return Err(Error::Param(format!(
                "initial learning rate must be in (0, 1], got {lr}"
            )));
        }
        if self.unigram_power < 0.0 {
            return Err(Error::Param("unigram_power must be >= 0".into()));
        }
        Ok(())
    }

    pub fn effective_lr(&self, model: ModelKind) -> f64 {
        self.initial_lr
            .unwrap_or_else(|| model.default_initial_lr())
    }
}
