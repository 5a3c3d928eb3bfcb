//! Topic-space indexing: terms, documents and queries become distributions
//! over topics and documents are ranked by cosine similarity to the query.
//!
//! With a uniform topic prior, `p(z|w)` is `φ` with columns normalized
//! (`W`), a document is the average of its tokens' columns
//! (`D = W·Fᵀ·diag(N_d)⁻¹`) and a query likewise (`Q = W·F_qᵀ/|Q|`).

use crate::corpus::{Corpus, Query};
use crate::error::{Error, Result};
use crate::lmd;
use crate::matrix::{col_normalize, cosine_columns, DenseMatrix};
use crate::par;
use crate::score::{ModelKind, ScoreVector};
use crate::topics::TopicParams;

/// `W` (`k × n`) and `D` (`k × m`).
#[derive(Debug, Clone, PartialEq)]
pub struct LdiIndex {
    term_topics: DenseMatrix,
    doc_topics: DenseMatrix,
}

/// A query's topic distribution `p(z|Q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicQuery {
    pub query_id: String,
    pub topics: Vec<f64>,
}

/// Builds `W` and `D` for a corpus.
pub fn build(corpus: &Corpus, params: &TopicParams) -> Result<LdiIndex> {
    params.check_corpus(corpus)?;
    let w = col_normalize(params.phi()).map_err(|_| {
        let sums = params.phi().col_sums();
        let j = sums.iter().position(|&s| !(s > 0.0)).unwrap_or(0);
        Error::domain(format!(
            "term {:?} has zero probability under every topic",
            corpus.vocab().term(j)
        ))
    })?;
    let k = w.rows();
    let freqs = corpus.freqs();
    // one k-vector per document, then transposed into columns
    let per_doc: Vec<Vec<f64>> = par::map_range(corpus.num_docs(), |d| {
        let mut acc = vec![0.0; k];
        let len = corpus.doc_lens()[d];
        if len == 0.0 {
            return acc;
        }
        let (idx, vals) = freqs.row(d);
        for (&t, &f) in idx.iter().zip(vals) {
            for (z, a) in acc.iter_mut().enumerate() {
                *a += w.get(z, t) * f;
            }
        }
        acc.iter_mut().for_each(|a| *a /= len);
        acc
    });
    let m = corpus.num_docs();
    let mut values = vec![0.0; k * m];
    for (d, col) in per_doc.iter().enumerate() {
        for (z, v) in col.iter().enumerate() {
            values[z * m + d] = *v;
        }
    }
    Ok(LdiIndex {
        term_topics: w,
        doc_topics: DenseMatrix::new(k, m, values)?,
    })
}

impl LdiIndex {
    /// `W`: column `w` is `p(z|w)`.
    pub fn term_topics(&self) -> &DenseMatrix {
        &self.term_topics
    }

    /// `D`: column `d` is `p(z|d)`; all-zero for an empty document.
    pub fn doc_topics(&self) -> &DenseMatrix {
        &self.doc_topics
    }

    pub fn num_topics(&self) -> usize {
        self.term_topics.rows()
    }

    /// Projects a query into topic space. Fails when no query term is in the
    /// vocabulary.
    pub fn project_query(&self, query: &Query) -> Result<TopicQuery> {
        lmd::check_query(query, self.term_topics.cols())?;
        if query.is_empty() {
            return Err(Error::domain(format!(
                "query {} has no in-vocabulary terms and no topic representation",
                query.id()
            )));
        }
        let len = query.len();
        let mut topics = vec![0.0; self.num_topics()];
        for &(t, f) in query.terms() {
            let weight = f / len;
            for (z, q) in topics.iter_mut().enumerate() {
                *q += self.term_topics.get(z, t) * weight;
            }
        }
        Ok(TopicQuery {
            query_id: query.id().to_string(),
            topics,
        })
    }

    /// Cosine of every document column with the query distribution.
    pub fn score(&self, tq: &TopicQuery) -> Result<ScoreVector> {
        Ok(ScoreVector {
            query_id: tq.query_id.clone(),
            model: ModelKind::Ldi,
            scores: cosine_columns(&self.doc_topics, &tq.topics)?,
        })
    }

    pub fn score_query(&self, query: &Query) -> Result<ScoreVector> {
        self.score(&self.project_query(query)?)
    }
}

/// `p(z|term)` by Bayes' rule with a uniform topic prior, evaluated per topic.
pub fn pzw_oracle(params: &TopicParams, term: usize) -> Result<Vec<f64>> {
    let phi = params.phi();
    if term >= phi.cols() {
        return Err(Error::domain(format!("term {term} out of range")));
    }
    let k = phi.rows();
    let prior = 1.0 / k as f64;
    let evidence: f64 = (0..k).map(|z| phi.get(z, term) * prior).sum();
    if !(evidence > 0.0) {
        return Err(Error::domain(format!(
            "term {term} has zero probability under every topic"
        )));
    }
    Ok((0..k)
        .map(|z| phi.get(z, term) * prior / evidence)
        .collect())
}

/// `p(z|D) = Σ_{w∈D} p(z|w)·n_w/N_w`, zero for an empty document.
pub fn pzd_oracle(corpus: &Corpus, params: &TopicParams, doc: usize) -> Result<Vec<f64>> {
    let k = params.num_topics();
    let len = corpus.doc_lens()[doc];
    let mut out = vec![0.0; k];
    if len == 0.0 {
        return Ok(out);
    }
    let (idx, vals) = corpus.freqs().row(doc);
    for (&t, &f) in idx.iter().zip(vals) {
        let pzw = pzw_oracle(params, t)?;
        for (o, p) in out.iter_mut().zip(pzw) {
            *o += p * (f / len);
        }
    }
    Ok(out)
}

/// `p(z|Q) = Σ_{w∈Q} p(z|w)·f_q(w)/|Q|`.
pub fn pzq_oracle(params: &TopicParams, query: &Query) -> Result<Vec<f64>> {
    if query.is_empty() {
        return Err(Error::domain("empty query has no topic representation"));
    }
    let len = query.len();
    let mut out = vec![0.0; params.num_topics()];
    for &(t, f) in query.terms() {
        for (o, p) in out.iter_mut().zip(pzw_oracle(params, t)?) {
            *o += p * (f / len);
        }
    }
    Ok(out)
}

/// Per-document cosine from the elementwise topic distributions.
pub fn score_oracle(corpus: &Corpus, params: &TopicParams, query: &Query) -> Result<Vec<f64>> {
    let q = pzq_oracle(params, query)?;
    let qn = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    (0..corpus.num_docs())
        .map(|d| {
            let dv = pzd_oracle(corpus, params, d)?;
            let dn = dv.iter().map(|v| v * v).sum::<f64>().sqrt();
            let dot: f64 = dv.iter().zip(&q).map(|(a, b)| a * b).sum();
            Ok(if dn == 0.0 || qn == 0.0 {
                0.0
            } else {
                dot / (dn * qn)
            })
        })
        .collect()
}
