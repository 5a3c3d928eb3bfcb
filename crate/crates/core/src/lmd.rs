//! Dirichlet-smoothed query likelihood.
//!
//! The smoothed document model
//! `p(w|D) = |D|/(|D|+μ) · n_w/|D| + μ/(|D|+μ) · C_w/|C|`
//! is, over all documents and terms, the matrix
//! `P = diag(N_d+μ)⁻¹·F + diag(μ/(N_d+μ))·1·(C/|C|)ᵀ`, which is exactly a
//! [`SparsePlusRank1`]. Scores are `P·F_qᵀ` (linear) or the frequency-weighted
//! sum of `ln P[d][w]` (log) and are computed without materializing `P`.

use crate::corpus::{Corpus, Query};
use crate::error::{Error, Result};
use crate::matrix::SparsePlusRank1;
use crate::par;
use crate::score::{ModelKind, ScoreMode, ScoreVector};

pub const DEFAULT_MU: f64 = 2000.0;

/// Dirichlet prior and score aggregation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothConfig {
    pub mu: f64,
    pub score_mode: ScoreMode,
}

impl Default for SmoothConfig {
    fn default() -> Self {
        Self {
            mu: DEFAULT_MU,
            score_mode: ScoreMode::Log,
        }
    }
}

impl SmoothConfig {
    pub fn new(mu: f64, score_mode: ScoreMode) -> Result<Self> {
        check_mu(mu)?;
        Ok(Self { mu, score_mode })
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::domain(format!(
            "Dirichlet prior must be finite and non-negative, got {mu}"
        )));
    }
    Ok(())
}

/// Elementwise smoothed probability `p(term | doc)`, evaluated term by term
/// from corpus counts.
pub fn prob_oracle(corpus: &Corpus, doc: usize, term: usize, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    if doc >= corpus.num_docs() || term >= corpus.num_terms() {
        return Err(Error::domain(format!(
            "index ({doc}, {term}) outside {} documents x {} terms",
            corpus.num_docs(),
            corpus.num_terms()
        )));
    }
    let doc_len = corpus.doc_lens()[doc];
    if doc_len == 0.0 && mu == 0.0 {
        return Err(Error::domain(format!(
            "document {doc} is empty and mu = 0: p(w|D) is 0/0"
        )));
    }
    let doc_weight = doc_len / (doc_len + mu);
    // μ/(|D|+μ) rather than 1 − |D|/(|D|+μ): the subtraction cancels for small μ
    let collection_weight = mu / (doc_len + mu);
    let doc_mle = if doc_len > 0.0 {
        corpus.freq(doc, term) / doc_len
    } else {
        0.0
    };
    let collection_mle = corpus.collection_freqs()[term] / corpus.total_tokens();
    Ok(doc_weight * doc_mle + collection_weight * collection_mle)
}

/// Builds the structured document-term probability matrix `P`.
pub fn build_matrix(corpus: &Corpus, mu: f64) -> Result<SparsePlusRank1> {
    check_mu(mu)?;
    let lens = corpus.doc_lens();
    if mu == 0.0 {
        if let Some(d) = lens.iter().position(|&l| l == 0.0) {
            return Err(Error::domain(format!(
                "mu = 0 requires non-empty documents; document {d} is empty"
            )));
        }
    }
    let scale = lens.iter().map(|&l| 1.0 / (l + mu)).collect();
    let left = lens.iter().map(|&l| mu / (l + mu)).collect();
    let total = corpus.total_tokens();
    let right = corpus
        .collection_freqs()
        .iter()
        .map(|&c| c / total)
        .collect();
    SparsePlusRank1::new(scale, corpus.freqs().clone(), left, right)
}

/// Scores every document for `query` against a structured `P`.
///
/// Linear mode: `P·F_qᵀ`. Log mode: `Σ_w f_q(w)·ln P[d][w]`, which is `-inf`
/// for a document assigning zero probability to a query term. An empty query
/// scores all zeros in linear mode and is an error in log mode.
pub fn score(p: &SparsePlusRank1, query: &Query, mode: ScoreMode) -> Result<ScoreVector> {
    check_query(query, p.cols())?;
    let scores = match mode {
        ScoreMode::Linear => p.matvec_sparse(query.terms())?,
        ScoreMode::Log => {
            if query.is_empty() {
                return Err(empty_query(query));
            }
            par::map_range(p.rows(), |d| {
                query
                    .terms()
                    .iter()
                    .map(|&(w, f)| f * p.get(d, w).ln())
                    .sum()
            })
        }
    };
    Ok(ScoreVector {
        query_id: query.id().to_string(),
        model: ModelKind::Lmd,
        scores,
    })
}

pub(crate) fn check_query(query: &Query, num_terms: usize) -> Result<()> {
    if let Some(j) = query.max_term().filter(|&j| j >= num_terms) {
        return Err(Error::domain(format!(
            "query {} references term {j} outside a {num_terms}-term vocabulary",
            query.id()
        )));
    }
    Ok(())
}

pub(crate) fn empty_query(query: &Query) -> Error {
    Error::domain(format!(
        "query {} has no in-vocabulary terms; its log-likelihood is undefined",
        query.id()
    ))
}
