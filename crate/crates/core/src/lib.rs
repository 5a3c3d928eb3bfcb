//! Probabilistic language-model ranking over structured matrices.
//!
//! Three models are provided, each with an elementwise probability function
//! and a matrix formulation:
//!
//! * [`lmd`]: Dirichlet-smoothed query likelihood, whose probability matrix is
//!   held as a sparse-plus-rank-1 [`SparsePlusRank1`].
//! * [`lbdm`]: a convex mixture of the Dirichlet model with an LDA topic
//!   reconstruction `θ·φ`.
//! * [`ldi`]: cosine ranking of documents and queries projected into LDA topic
//!   space.
//!
//! With the default `parallel` feature, per-document and per-query loops run
//! on the rayon thread pool.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
mod error;
pub mod lbdm;
pub mod ldi;
pub mod lmd;
pub mod matrix;
mod par;
pub mod run;
pub mod score;
pub mod topics;

pub use corpus::{Corpus, Query, Vocabulary};
pub use error::{Error, Location, Result};
pub use lbdm::{LbdmConfig, LbdmModel};
pub use ldi::{LdiIndex, TopicQuery};
pub use lmd::SmoothConfig;
pub use matrix::{DenseMatrix, SparseMatrix, SparsePlusRank1};
pub use run::{rank, write_trec_run, RankedList, RunConfig};
pub use score::{ModelKind, ScoreMode, ScoreVector};
pub use topics::{TopicParams, WordMap};
