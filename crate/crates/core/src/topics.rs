//! LDA parameter matrices `θ` (document × topic) and `φ` (topic × term) in the
//! GibbsLDA text formats, aligned to a corpus vocabulary.
//!
//! File formats, all UTF-8 with `\n` or `\r\n` line endings:
//!
//! * `.theta`: one line per document, `k` whitespace-separated floats `p(z|d)`.
//! * `.phi`: one line per topic, `V` whitespace-separated floats `p(w|z)`,
//!   column `i` belonging to the word with id `i` in the word map.
//! * `wordmap.txt`: first line the entry count `V`, then one `term id` pair per line.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Largest row-sum deviation from one accepted on load.
pub const ROW_SUM_TOLERANCE: f64 = 1e-6;

/// Rows closer to one than this are stored as read; rows between this and
/// [`ROW_SUM_TOLERANCE`] are renormalized. Keeps load/save/load a fixed point.
const RENORMALIZE_ABOVE: f64 = 1e-9;

/// Document-topic and topic-term distributions for one corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicParams {
    theta: DenseMatrix,
    phi: DenseMatrix,
}

impl TopicParams {
    /// Checks shapes and that every row of both matrices is a distribution.
    /// Rows within [`ROW_SUM_TOLERANCE`] of one are renormalized.
    pub fn new(theta: DenseMatrix, phi: DenseMatrix) -> Result<Self> {
        if theta.cols() != phi.rows() {
            return Err(Error::domain(format!(
                "theta has {} topics but phi has {}",
                theta.cols(),
                phi.rows()
            )));
        }
        if theta.cols() == 0 {
            return Err(Error::domain("topic count must be at least 1"));
        }
        let theta = stochastic_rows(theta, "theta")?;
        let phi = stochastic_rows(phi, "phi")?;
        Ok(Self { theta, phi })
    }

    pub fn num_topics(&self) -> usize {
        self.theta.cols()
    }

    /// `θ`, `m × k`.
    pub fn theta(&self) -> &DenseMatrix {
        &self.theta
    }

    /// `φ`, `k × n`.
    pub fn phi(&self) -> &DenseMatrix {
        &self.phi
    }

    /// Errors unless the matrices cover exactly the corpus documents and terms.
    pub fn check_corpus(&self, corpus: &Corpus) -> Result<()> {
        if self.theta.rows() != corpus.num_docs() || self.phi.cols() != corpus.num_terms() {
            return Err(Error::domain(format!(
                "topic parameters cover {} documents x {} terms, corpus has {} x {}",
                self.theta.rows(),
                self.phi.cols(),
                corpus.num_docs(),
                corpus.num_terms()
            )));
        }
        Ok(())
    }

    /// Draws `θ` and `φ` rows from a flat Dirichlet using a seeded generator.
    pub fn synthesize(seed: u64, m: usize, n: usize, k: usize) -> Result<Self> {
        if m == 0 || n == 0 || k == 0 {
            return Err(Error::domain("synthesize: m, n and k must be at least 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta = random_stochastic(&mut rng, m, k);
        let phi = random_stochastic(&mut rng, k, n);
        Ok(Self { theta, phi })
    }

    /// Loads `.theta`, `.phi` and word map files and reorders `φ`'s columns to
    /// the corpus vocabulary.
    pub fn load(
        theta_path: impl AsRef<Path>,
        phi_path: impl AsRef<Path>,
        wordmap_path: impl AsRef<Path>,
        corpus: &Corpus,
    ) -> Result<Self> {
        let read = |p: &Path| fs::read_to_string(p).map_err(|e| Error::io(p.display(), e));
        let (tp, pp, wp) = (
            theta_path.as_ref(),
            phi_path.as_ref(),
            wordmap_path.as_ref(),
        );
        let theta = parse_matrix(&read(tp)?, &tp.display().to_string())?;
        let phi = parse_matrix(&read(pp)?, &pp.display().to_string())?;
        let wordmap = WordMap::parse(&read(wp)?, &wp.display().to_string())?;
        Self::assemble(
            theta,
            phi,
            &wordmap,
            corpus,
            [
                &tp.display().to_string(),
                &pp.display().to_string(),
                &wp.display().to_string(),
            ],
        )
    }

    /// Same as [`TopicParams::load`] on in-memory file contents.
    pub fn parse(theta: &str, phi: &str, wordmap: &str, corpus: &Corpus) -> Result<Self> {
        let names = ["theta", "phi", "wordmap"];
        let theta = parse_matrix(theta, names[0])?;
        let phi = parse_matrix(phi, names[1])?;
        let wordmap = WordMap::parse(wordmap, names[2])?;
        Self::assemble(theta, phi, &wordmap, corpus, names)
    }

    fn assemble(
        theta: DenseMatrix,
        phi: DenseMatrix,
        wordmap: &WordMap,
        corpus: &Corpus,
        [theta_name, phi_name, wordmap_name]: [&str; 3],
    ) -> Result<Self> {
        let theta = validate_file_rows(theta, theta_name)?;
        let phi = validate_file_rows(phi, phi_name)?;
        if theta.rows() != corpus.num_docs() {
            return Err(Error::data(
                theta_name,
                format!(
                    "{} rows but the corpus has {} documents",
                    theta.rows(),
                    corpus.num_docs()
                ),
            ));
        }
        if theta.cols() != phi.rows() {
            return Err(Error::data(
                phi_name,
                format!(
                    "{} topic rows but theta has {} columns",
                    phi.rows(),
                    theta.cols()
                ),
            ));
        }
        if wordmap.len() != phi.cols() {
            return Err(Error::data(
                wordmap_name,
                format!(
                    "{} entries but phi has {} columns",
                    wordmap.len(),
                    phi.cols()
                ),
            ));
        }
        let ids: HashMap<&str, usize> = wordmap
            .entries()
            .iter()
            .map(|(t, id)| (t.as_str(), *id))
            .collect();
        let mut order = Vec::with_capacity(corpus.num_terms());
        for term in corpus.vocab().terms() {
            match ids.get(term.as_str()) {
                Some(&id) => order.push(id),
                None => {
                    return Err(Error::data(
                        wordmap_name,
                        format!("vocabulary term {term:?} missing from word map"),
                    ))
                }
            }
        }
        let mut aligned = phi.select_columns(&order);
        // A word map wider than the corpus vocabulary leaves part of each
        // topic's mass outside it; condition on the vocabulary.
        for z in 0..aligned.rows() {
            let row = aligned.row_mut(z);
            let sum: f64 = row.iter().sum();
            if !(sum > 0.0) {
                return Err(Error::data_at(
                    phi_name,
                    z + 1,
                    "topic assigns no probability to any corpus term",
                ));
            }
            if (sum - 1.0).abs() > RENORMALIZE_ABOVE {
                row.iter_mut().for_each(|v| *v /= sum);
            }
        }
        Ok(Self {
            theta,
            phi: aligned,
        })
    }

    /// Writes `.theta`, `.phi` and word map files whose columns follow the
    /// corpus vocabulary order (word ids `0..n`).
    pub fn save(
        &self,
        corpus: &Corpus,
        theta_path: impl AsRef<Path>,
        phi_path: impl AsRef<Path>,
        wordmap_path: impl AsRef<Path>,
    ) -> Result<()> {
        let write = |p: &Path, s: String| fs::write(p, s).map_err(|e| Error::io(p.display(), e));
        write(theta_path.as_ref(), format_matrix(&self.theta))?;
        write(phi_path.as_ref(), format_matrix(&self.phi))?;
        write(
            wordmap_path.as_ref(),
            WordMap::from_vocabulary(corpus.vocab().terms()).to_string(),
        )
    }
}

/// `term id` pairs from a GibbsLDA word map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordMap {
    entries: Vec<(String, usize)>,
}

impl WordMap {
    /// Assigns ids `0..n` in the given order.
    pub fn from_vocabulary<S: AsRef<str>>(terms: &[S]) -> Self {
        Self {
            entries: terms
                .iter()
                .enumerate()
                .map(|(i, t)| (t.as_ref().to_string(), i))
                .collect(),
        }
    }

    pub fn parse(text: &str, name: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::data_at(name, 1, "missing entry count line"))?;
        let declared: usize = header
            .trim()
            .parse()
            .map_err(|_| Error::data_at(name, 1, format!("invalid entry count {header:?}")))?;
        let mut entries = Vec::with_capacity(declared);
        let mut seen_terms = HashSet::new();
        let mut seen_ids = HashSet::new();
        for (i, line) in lines {
            let lineno = i + 1;
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [term, id] = fields[..] else {
                return Err(Error::data_at(name, lineno, "expected `term id`"));
            };
            let id: usize = id
                .parse()
                .map_err(|_| Error::data_at(name, lineno, format!("invalid word id {id:?}")))?;
            if !seen_ids.insert(id) {
                return Err(Error::data_at(
                    name,
                    lineno,
                    format!("duplicate word id {id}"),
                ));
            }
            if !seen_terms.insert(term.to_string()) {
                return Err(Error::data_at(
                    name,
                    lineno,
                    format!("duplicate term {term:?}"),
                ));
            }
            entries.push((term.to_string(), id));
        }
        if entries.len() != declared {
            return Err(Error::data(
                name,
                format!("declared {declared} entries, found {}", entries.len()),
            ));
        }
        if let Some((t, id)) = entries.iter().find(|(_, id)| *id >= declared) {
            return Err(Error::data(
                name,
                format!("word id {id} of {t:?} outside 0..{declared}"),
            ));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(String, usize)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl std::fmt::Display for WordMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.entries.len())?;
        for (term, id) in &self.entries {
            writeln!(f, "{term} {id}")?;
        }
        Ok(())
    }
}

/// Parses whitespace-separated float rows, one per non-blank line.
pub fn parse_matrix(text: &str, name: &str) -> Result<DenseMatrix> {
    let mut values = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let start = values.len();
        for field in line.split_whitespace() {
            let v: f64 = field.parse().map_err(|_| {
                Error::data_at(name, lineno, format!("non-numeric field {field:?}"))
            })?;
            if !v.is_finite() {
                return Err(Error::data_at(
                    name,
                    lineno,
                    format!("non-finite field {field:?}"),
                ));
            }
            values.push(v);
        }
        let width = values.len() - start;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(Error::data_at(
                    name,
                    lineno,
                    format!("ragged row: {width} fields, expected {c}"),
                ))
            }
            Some(_) => {}
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::data(name, "no rows"));
    }
    DenseMatrix::new(rows, cols.unwrap_or(0), values).map_err(|e| Error::data(name, e.to_string()))
}

/// Formats rows with the shortest representation that parses back exactly.
pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

// Row checks with file line numbers; rows map 1:1 to non-blank lines.
fn validate_file_rows(m: DenseMatrix, name: &str) -> Result<DenseMatrix> {
    normalize_rows(m).map_err(|(row, msg)| Error::data_at(name, row + 1, msg))
}

fn stochastic_rows(m: DenseMatrix, name: &str) -> Result<DenseMatrix> {
    normalize_rows(m).map_err(|(row, msg)| Error::domain(format!("{name} row {row}: {msg}")))
}

fn normalize_rows(mut m: DenseMatrix) -> std::result::Result<DenseMatrix, (usize, String)> {
    for i in 0..m.rows() {
        let row = m.row_mut(i);
        if let Some(v) = row
            .iter()
            .find(|v| !(**v >= 0.0 && **v <= 1.0 + ROW_SUM_TOLERANCE))
        {
            return Err((i, format!("entry {v} outside [0, 1]")));
        }
        let sum: f64 = row.iter().sum();
        let dev = (sum - 1.0).abs();
        if dev > ROW_SUM_TOLERANCE {
            return Err((
                i,
                format!("row sum {sum} deviates from 1 by more than {ROW_SUM_TOLERANCE}"),
            ));
        }
        if dev > RENORMALIZE_ABOVE {
            row.iter_mut().for_each(|v| *v /= sum);
        }
    }
    Ok(m)
}

fn random_stochastic(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    let mut values = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        // normalized Exp(1) draws are a flat Dirichlet sample
        let start = values.len();
        values.extend((0..cols).map(|_| -rng.gen_range(f64::EPSILON..1.0).ln()));
        let row = &mut values[start..];
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= sum);
    }
    DenseMatrix::new(rows, cols, values).expect("finite draws")
}
