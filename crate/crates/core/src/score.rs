use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Which ranking model produced a score vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Dirichlet-smoothed query likelihood.
    Lmd,
    /// Dirichlet model mixed with the LDA topic reconstruction.
    Lbdm,
    /// Cosine ranking in LDA topic space.
    Ldi,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Lmd => "lmd",
            ModelKind::Lbdm => "lbdm",
            ModelKind::Ldi => "ldi",
        }
    }

    /// Whether the model reads `θ`/`φ`.
    pub fn needs_topics(self) -> bool {
        !matches!(self, ModelKind::Lmd)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lmd" => Ok(ModelKind::Lmd),
            "lbdm" => Ok(ModelKind::Lbdm),
            "ldi" => Ok(ModelKind::Ldi),
            _ => Err(Error::Config(format!(
                "unknown model {s:?} (expected lmd, lbdm or ldi)"
            ))),
        }
    }
}

/// How query-likelihood scores are aggregated over query terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreMode {
    /// `Σ_w f_q(w) · ln p(w|D)`.
    #[default]
    Log,
    /// `Σ_w f_q(w) · p(w|D)`, i.e. `P · F_qᵀ`.
    Linear,
}

impl fmt::Display for ScoreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreMode::Log => "log",
            ScoreMode::Linear => "linear",
        })
    }
}

impl FromStr for ScoreMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "log" => Ok(ScoreMode::Log),
            "linear" => Ok(ScoreMode::Linear),
            _ => Err(Error::Config(format!(
                "unknown score mode {s:?} (expected log or linear)"
            ))),
        }
    }
}

/// Per-document scores for one query.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    pub query_id: String,
    pub model: ModelKind,
    pub scores: Vec<f64>,
}

impl ScoreVector {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Document indices ordered by descending score, ties by ascending index.
    /// `-inf` sorts below every finite score; NaN sorts last.
    pub fn ranking(&self) -> Vec<usize> {
        self.top_k(self.scores.len())
    }

    /// The first `k` entries of [`ScoreVector::ranking`].
    pub fn top_k(&self, k: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.scores.len()).collect();
        let cmp =
            |&a: &usize, &b: &usize| descending(self.scores[a], self.scores[b]).then(a.cmp(&b));
        if k < idx.len() {
            if k == 0 {
                return Vec::new();
            }
            idx.select_nth_unstable_by(k - 1, cmp);
            idx.truncate(k);
        }
        idx.sort_unstable_by(cmp);
        idx
    }
}

fn descending(a: f64, b: f64) -> std::cmp::Ordering {
    b.partial_cmp(&a)
        .unwrap_or_else(|| a.is_nan().cmp(&b.is_nan()))
}
