//! Low-rank document representations: truncated SVD (LSI) and non-negative
//! matrix factorization.

mod lsi;
mod nmf;

pub use lsi::{lsi_fit, truncated_svd, TruncatedSvd};
pub use nmf::{nmf_fit, NmfFit, NmfOptions};
