//! LDA-based document model: `P_LBDM = λ·P + (1−λ)·θ·φ`.
//!
//! The mixture is never formed. Linear scores are
//! `λ·P·F_qᵀ + (1−λ)·θ·(φ·F_qᵀ)` and log scores evaluate each needed cell of
//! the mixture from the two carriers.

use crate::corpus::{Corpus, Query};
use crate::error::{Error, Result};
use crate::lmd::{self, SmoothConfig};
use crate::matrix::{dense_matmul, DenseMatrix, SparsePlusRank1};
use crate::par;
use crate::score::{ModelKind, ScoreMode, ScoreVector};
use crate::topics::TopicParams;

pub const DEFAULT_LAMBDA: f64 = 0.7;

/// `θ·φ` is stored densely when it has fewer cells than this.
pub const DEFAULT_DENSE_THRESHOLD: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbdmConfig {
    /// Weight of the Dirichlet document model.
    pub lambda: f64,
    pub smooth: SmoothConfig,
    pub dense_threshold: usize,
}

impl Default for LbdmConfig {
    fn default() -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            smooth: SmoothConfig::default(),
            dense_threshold: DEFAULT_DENSE_THRESHOLD,
        }
    }
}

impl LbdmConfig {
    pub fn new(lambda: f64, smooth: SmoothConfig) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self {
            lambda,
            smooth,
            ..Self::default()
        })
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::domain(format!(
            "lambda must lie in [0, 1], got {lambda}"
        )));
    }
    Ok(())
}

/// The topic reconstruction `T = θ·φ`, either materialized or as its factors.
#[derive(Debug, Clone, PartialEq)]
pub enum TopicTerm {
    Dense(DenseMatrix),
    Factored {
        theta: DenseMatrix,
        phi: DenseMatrix,
    },
}

impl TopicTerm {
    /// `T[doc][term]`; the factored sum runs over topics in index order, as
    /// the dense product does.
    #[inline]
    pub fn get(&self, doc: usize, term: usize) -> f64 {
        match self {
            TopicTerm::Dense(t) => t.get(doc, term),
            TopicTerm::Factored { theta, phi } => theta
                .row(doc)
                .iter()
                .enumerate()
                .fold(0.0, |acc, (z, &t)| acc + t * phi.get(z, term)),
        }
    }

    /// `T · F_qᵀ`.
    fn matvec_query(&self, query: &Query) -> Vec<f64> {
        match self {
            TopicTerm::Dense(t) => par::map_range(t.rows(), |d| {
                let row = t.row(d);
                query.terms().iter().map(|&(w, f)| row[w] * f).sum()
            }),
            TopicTerm::Factored { theta, phi } => {
                let projected: Vec<f64> = (0..phi.rows())
                    .map(|z| query.terms().iter().map(|&(w, f)| phi.get(z, w) * f).sum())
                    .collect();
                theta
                    .matvec(&projected)
                    .expect("theta columns equal phi rows")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LbdmModel {
    p: SparsePlusRank1,
    topic: TopicTerm,
    lambda: f64,
    score_mode: ScoreMode,
}

/// Elementwise mixture probability: `λ·p_LMD(w|D) + (1−λ)·Σ_z p(w|z)·p(z|D)`.
pub fn prob_oracle(
    corpus: &Corpus,
    params: &TopicParams,
    doc: usize,
    term: usize,
    mu: f64,
    lambda: f64,
) -> Result<f64> {
    check_lambda(lambda)?;
    params.check_corpus(corpus)?;
    let dirichlet = lmd::prob_oracle(corpus, doc, term, mu)?;
    let mut topical = 0.0;
    for z in 0..params.num_topics() {
        topical += params.phi().get(z, term) * params.theta().get(doc, z);
    }
    Ok(lambda * dirichlet + (1.0 - lambda) * topical)
}

/// Builds the structured mixture model.
pub fn build(corpus: &Corpus, params: &TopicParams, config: &LbdmConfig) -> Result<LbdmModel> {
    check_lambda(config.lambda)?;
    params.check_corpus(corpus)?;
    let p = lmd::build_matrix(corpus, config.smooth.mu)?;
    let cells = corpus.num_docs().saturating_mul(corpus.num_terms());
    let topic = if cells < config.dense_threshold {
        TopicTerm::Dense(dense_matmul(params.theta(), params.phi())?)
    } else {
        TopicTerm::Factored {
            theta: params.theta().clone(),
            phi: params.phi().clone(),
        }
    };
    Ok(LbdmModel {
        p,
        topic,
        lambda: config.lambda,
        score_mode: config.smooth.score_mode,
    })
}

impl LbdmModel {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn score_mode(&self) -> ScoreMode {
        self.score_mode
    }

    /// The Dirichlet component `P`.
    pub fn dirichlet(&self) -> &SparsePlusRank1 {
        &self.p
    }

    pub fn topic_term(&self) -> &TopicTerm {
        &self.topic
    }

    pub fn num_docs(&self) -> usize {
        self.p.rows()
    }

    pub fn num_terms(&self) -> usize {
        self.p.cols()
    }

    /// `P_LBDM[doc][term]`.
    #[inline]
    pub fn prob(&self, doc: usize, term: usize) -> f64 {
        self.lambda * self.p.get(doc, term) + (1.0 - self.lambda) * self.topic.get(doc, term)
    }

    /// Materializes `P_LBDM`. For tests and small corpora.
    pub fn to_dense(&self) -> DenseMatrix {
        let (m, n) = (self.num_docs(), self.num_terms());
        let mut values = vec![0.0; m * n];
        par::for_each_row_mut(&mut values, n, |d, row| {
            for (w, v) in row.iter_mut().enumerate() {
                *v = self.prob(d, w);
            }
        });
        DenseMatrix::new(m, n, values).expect("finite mixture")
    }

    /// Linear scores of the pure topic model, `θ·φ·F_qᵀ`.
    pub fn topic_scores(&self, query: &Query) -> Result<Vec<f64>> {
        lmd::check_query(query, self.num_terms())?;
        Ok(self.topic.matvec_query(query))
    }

    /// Scores with the configured score mode.
    pub fn score(&self, query: &Query) -> Result<ScoreVector> {
        self.score_with(query, self.score_mode)
    }

    pub fn score_with(&self, query: &Query, mode: ScoreMode) -> Result<ScoreVector> {
        lmd::check_query(query, self.num_terms())?;
        let scores = match mode {
            ScoreMode::Linear => {
                let dirichlet = self.p.matvec_sparse(query.terms())?;
                let topical = self.topic.matvec_query(query);
                dirichlet
                    .iter()
                    .zip(&topical)
                    .map(|(a, b)| self.lambda * a + (1.0 - self.lambda) * b)
                    .collect()
            }
            ScoreMode::Log => {
                if query.is_empty() {
                    return Err(lmd::empty_query(query));
                }
                par::map_range(self.num_docs(), |d| {
                    query
                        .terms()
                        .iter()
                        .map(|&(w, f)| f * self.prob(d, w).ln())
                        .sum()
                })
            }
        };
        Ok(ScoreVector {
            query_id: query.id().to_string(),
            model: ModelKind::Lbdm,
            scores,
        })
    }
}
