//! End-to-end ranking runs and TREC run-file output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::corpus::{load_queries, Corpus, Query, QueryText};
use crate::error::{Error, Result};
use crate::lbdm::{self, LbdmConfig, LbdmModel};
use crate::ldi::{self, LdiIndex};
use crate::lmd::{self, SmoothConfig, DEFAULT_MU};
use crate::matrix::SparsePlusRank1;
use crate::par;
use crate::score::{ModelKind, ScoreMode, ScoreVector};
use crate::topics::TopicParams;

pub const DEFAULT_TOP_K: usize = 1000;
pub const DEFAULT_RUN_TAG: &str = "lmrank";

/// Everything a ranking run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub mu: f64,
    pub lambda: f64,
    pub score_mode: ScoreMode,
    pub top_k: usize,
    pub run_tag: String,
    pub corpus: PathBuf,
    /// Optional document ids, one per line, in corpus order.
    pub docids: Option<PathBuf>,
    pub queries: PathBuf,
    pub theta: Option<PathBuf>,
    pub phi: Option<PathBuf>,
    pub wordmap: Option<PathBuf>,
    pub output: PathBuf,
}

impl RunConfig {
    /// A config with default parameters for the given model and files.
    pub fn new(
        model: ModelKind,
        corpus: impl Into<PathBuf>,
        queries: impl Into<PathBuf>,
        output: impl Into<PathBuf>,
    ) -> Self {
        Self {
            model,
            mu: DEFAULT_MU,
            lambda: lbdm::DEFAULT_LAMBDA,
            score_mode: ScoreMode::default(),
            top_k: DEFAULT_TOP_K,
            run_tag: DEFAULT_RUN_TAG.to_string(),
            corpus: corpus.into(),
            docids: None,
            queries: queries.into(),
            theta: None,
            phi: None,
            wordmap: None,
            output: output.into(),
        }
    }

    pub fn with_topics(
        mut self,
        theta: impl Into<PathBuf>,
        phi: impl Into<PathBuf>,
        wordmap: impl Into<PathBuf>,
    ) -> Self {
        self.theta = Some(theta.into());
        self.phi = Some(phi.into());
        self.wordmap = Some(wordmap.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.top_k == 0 {
            return Err(Error::Config("top-k must be at least 1".into()));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::Config(format!(
                "mu must be finite and non-negative, got {}",
                self.mu
            )));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::Config(format!(
                "lambda must lie in [0, 1], got {}",
                self.lambda
            )));
        }
        if self.run_tag.is_empty() || self.run_tag.contains(char::is_whitespace) {
            return Err(Error::Config(format!(
                "run tag {:?} must be a non-empty token without whitespace",
                self.run_tag
            )));
        }
        if self.model.needs_topics() {
            for (flag, path) in [
                ("theta", &self.theta),
                ("phi", &self.phi),
                ("wordmap", &self.wordmap),
            ] {
                if path.is_none() {
                    return Err(Error::Config(format!(
                        "model {} requires --{flag}",
                        self.model
                    )));
                }
            }
        }
        Ok(())
    }

    fn topic_paths(&self) -> (&Path, &Path, &Path) {
        (
            self.theta.as_deref().expect("validated"),
            self.phi.as_deref().expect("validated"),
            self.wordmap.as_deref().expect("validated"),
        )
    }
}

/// One ranked result.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedEntry {
    pub doc: usize,
    pub doc_id: String,
    pub rank: usize,
    pub score: f64,
}

/// Top documents for one query, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    pub query_id: String,
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    /// Keeps the `top_k` best documents; ties go to the smaller index.
    pub fn from_scores(scores: &ScoreVector, doc_ids: &[String], top_k: usize) -> Self {
        let entries = scores
            .top_k(top_k)
            .into_iter()
            .enumerate()
            .map(|(r, doc)| RankedEntry {
                doc,
                doc_id: doc_ids[doc].clone(),
                rank: r + 1,
                score: scores.scores[doc],
            })
            .collect();
        Self {
            query_id: scores.query_id.clone(),
            entries,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    /// The query was ranked but something was dropped.
    Warning,
    /// The query was omitted from the run.
    Error,
}

/// Per-query message reported alongside the run.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub query_id: String,
    pub severity: Severity,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let level = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{level}: query {}: {}", self.query_id, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub lists: Vec<RankedList>,
    pub diagnostics: Vec<Diagnostic>,
}

/// A built model ready to score queries.
#[derive(Debug, Clone)]
pub enum Ranker {
    Lmd { p: SparsePlusRank1, mode: ScoreMode },
    Lbdm(LbdmModel),
    Ldi(LdiIndex),
}

impl Ranker {
    /// Builds the model named by `model`. `topics` is required for LBDM and LDI.
    pub fn build(
        model: ModelKind,
        corpus: &Corpus,
        topics: Option<&TopicParams>,
        smooth: SmoothConfig,
        lambda: f64,
    ) -> Result<Self> {
        let need = || Error::Config(format!("model {model} requires topic parameters"));
        Ok(match model {
            ModelKind::Lmd => Ranker::Lmd {
                p: lmd::build_matrix(corpus, smooth.mu)?,
                mode: smooth.score_mode,
            },
            ModelKind::Lbdm => {
                let config = LbdmConfig::new(lambda, smooth)?;
                Ranker::Lbdm(lbdm::build(corpus, topics.ok_or_else(need)?, &config)?)
            }
            ModelKind::Ldi => Ranker::Ldi(ldi::build(corpus, topics.ok_or_else(need)?)?),
        })
    }

    pub fn score(&self, query: &Query) -> Result<ScoreVector> {
        match self {
            Ranker::Lmd { p, mode } => lmd::score(p, query, *mode),
            Ranker::Lbdm(m) => m.score(query),
            Ranker::Ldi(idx) => idx.score_query(query),
        }
    }
}

/// Loads every input named by `config`, scores all queries and keeps the
/// top `top_k` documents per query. Queries that cannot be scored are
/// reported in `diagnostics` and left out of `lists`.
pub fn rank(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let corpus = Corpus::load(&config.corpus)?;
    let doc_ids = match &config.docids {
        Some(path) => load_doc_ids(path, corpus.num_docs())?,
        None => default_doc_ids(corpus.num_docs()),
    };
    let queries = load_queries(&config.queries)?;
    let topics = if config.model.needs_topics() {
        let (theta, phi, wordmap) = config.topic_paths();
        Some(TopicParams::load(theta, phi, wordmap, &corpus)?)
    } else {
        None
    };
    let smooth = SmoothConfig::new(config.mu, config.score_mode)?;
    let ranker = Ranker::build(
        config.model,
        &corpus,
        topics.as_ref(),
        smooth,
        config.lambda,
    )?;
    Ok(rank_queries(
        &ranker,
        &corpus,
        &queries,
        &doc_ids,
        config.top_k,
    ))
}

/// Scores parsed queries against a built model. Output keeps query order.
pub fn rank_queries(
    ranker: &Ranker,
    corpus: &Corpus,
    queries: &[QueryText],
    doc_ids: &[String],
    top_k: usize,
) -> RunOutput {
    let results = par::map_slice(queries, |qt| {
        let query = Query::build(qt.id.clone(), &qt.tokens, corpus.vocab());
        let mut diags = Vec::new();
        if !query.dropped_terms().is_empty() {
            diags.push(Diagnostic {
                query_id: qt.id.clone(),
                severity: Severity::Warning,
                message: format!(
                    "dropped out-of-vocabulary terms: {}",
                    query.dropped_terms().join(" ")
                ),
            });
        }
        let list = match ranker.score(&query) {
            Ok(scores) => Some(RankedList::from_scores(&scores, doc_ids, top_k)),
            Err(e) => {
                diags.push(Diagnostic {
                    query_id: qt.id.clone(),
                    severity: Severity::Error,
                    message: e.to_string(),
                });
                None
            }
        };
        (list, diags)
    });
    let mut output = RunOutput {
        lists: Vec::new(),
        diagnostics: Vec::new(),
    };
    for (list, diags) in results {
        output.lists.extend(list);
        output.diagnostics.extend(diags);
    }
    output
}

/// `d1`, `d2`, ... for documents without external ids.
pub fn default_doc_ids(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("d{i}")).collect()
}

/// Reads one document id per line; the count must equal the corpus size.
pub fn load_doc_ids(path: &Path, m: usize) -> Result<Vec<String>> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::io(&name, e))?;
    let mut ids: Vec<&str> = text.lines().map(str::trim).collect();
    while ids.last().is_some_and(|l| l.is_empty()) {
        ids.pop();
    }
    for (i, id) in ids.iter().enumerate() {
        if id.is_empty() || id.contains(char::is_whitespace) {
            return Err(Error::data_at(
                &name,
                i + 1,
                format!("invalid document id {id:?}"),
            ));
        }
    }
    if ids.len() != m {
        return Err(Error::data(
            &name,
            format!("{} document ids for {m} documents", ids.len()),
        ));
    }
    Ok(ids.into_iter().map(str::to_string).collect())
}

/// Renders lists as `<qid> Q0 <docid> <rank> <score> <run_tag>` lines with
/// six-decimal scores.
pub fn format_trec_run(lists: &[RankedList], run_tag: &str) -> String {
    let mut out = String::new();
    for list in lists {
        for e in &list.entries {
            writeln!(
                out,
                "{} Q0 {} {} {:.6} {}",
                list.query_id, e.doc_id, e.rank, e.score, run_tag
            )
            .unwrap();
        }
    }
    out
}

pub fn write_trec_run(lists: &[RankedList], run_tag: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_trec_run(lists, run_tag)).map_err(|e| Error::io(path.display(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(qid: &str, entries: &[(&str, f64)]) -> RankedList {
        RankedList {
            query_id: qid.into(),
            entries: entries
                .iter()
                .enumerate()
                .map(|(i, (d, s))| RankedEntry {
                    doc: i,
                    doc_id: d.to_string(),
                    rank: i + 1,
                    score: *s,
                })
                .collect(),
        }
    }

    #[test]
    fn trec_lines() {
        assert_eq!(
            format_trec_run(&[list("q1", &[("d1", 0.92)])], "run1"),
            "q1 Q0 d1 1 0.920000 run1\n"
        );
        assert_eq!(format_trec_run(&[], "run1"), "");
        let two = format_trec_run(
            &[
                list("q2", &[("d2", -1.6015), ("d1", -2.5)]),
                list("q1", &[("d1", 0.5)]),
            ],
            "t",
        );
        assert_eq!(
            two,
            "q2 Q0 d2 1 -1.601500 t\nq2 Q0 d1 2 -2.500000 t\nq1 Q0 d1 1 0.500000 t\n"
        );
    }

    #[test]
    fn ranked_list_ties_and_truncation() {
        let s = ScoreVector {
            query_id: "q".into(),
            model: ModelKind::Lmd,
            scores: vec![0.3, 0.7, 0.7],
        };
        let ids = default_doc_ids(3);
        let l = RankedList::from_scores(&s, &ids, 10);
        let got: Vec<_> = l
            .entries
            .iter()
            .map(|e| (e.doc_id.as_str(), e.rank))
            .collect();
        assert_eq!(got, vec![("d2", 1), ("d3", 2), ("d1", 3)]);
        assert_eq!(RankedList::from_scores(&s, &ids, 1).entries.len(), 1);
    }

    #[test]
    fn config_validation() {
        let base = RunConfig::new(ModelKind::Lmd, "c", "q", "o");
        assert!(base.validate().is_ok());
        assert!(RunConfig {
            top_k: 0,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            mu: -1.0,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            lambda: 2.0,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            run_tag: "a b".into(),
            ..base.clone()
        }
        .validate()
        .is_err());
        let ldi = RunConfig {
            model: ModelKind::Ldi,
            ..base.clone()
        };
        let err = ldi.validate().unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("--theta"));
        assert!(ldi.with_topics("t", "p", "w").validate().is_ok());
    }
}
