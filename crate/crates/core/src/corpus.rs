//! Corpus statistics: vocabulary, the document-term frequency matrix `F`,
//! document lengths `N_d`, collection frequencies `C` and the total token count.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SparseMatrix;

/// Bijection between terms and dense indices `0..n`, in first-appearance order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of `term`, inserting it at the end if new.
    pub fn intern(&mut self, term: &str) -> usize {
        if let Some(&i) = self.index.get(term) {
            return i;
        }
        let i = self.terms.len();
        self.terms.push(term.to_string());
        self.index.insert(term.to_string(), i);
        i
    }

    pub fn get(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, i: usize) -> &str {
        &self.terms[i]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<S> for Vocabulary {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut v = Vocabulary::new();
        for t in iter {
            v.intern(t.as_ref());
        }
        v
    }
}

/// A document collection reduced to the count statistics the models use.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    vocab: Vocabulary,
    freqs: SparseMatrix,
    doc_lens: Vec<f64>,
    collection_freqs: Vec<f64>,
    total_tokens: f64,
}

impl Corpus {
    /// Counts pre-tokenized documents. Empty documents are allowed; an empty
    /// collection is not.
    pub fn build<D, T>(documents: D) -> Result<Self>
    where
        D: IntoIterator,
        D::Item: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let mut vocab = Vocabulary::new();
        let rows: Vec<Vec<(usize, f64)>> = documents
            .into_iter()
            .map(|doc| {
                doc.into_iter()
                    .map(|tok| (vocab.intern(tok.as_ref()), 1.0))
                    .collect()
            })
            .collect();
        if rows.is_empty() {
            return Err(Error::domain("corpus must contain at least one document"));
        }
        let freqs = SparseMatrix::from_row_entries(vocab.len(), rows)?;
        Self::from_counts(vocab, freqs)
    }

    /// Wraps an existing frequency matrix whose columns follow `vocab`.
    pub fn from_counts(vocab: Vocabulary, freqs: SparseMatrix) -> Result<Self> {
        if freqs.rows() == 0 {
            return Err(Error::domain("corpus must contain at least one document"));
        }
        if freqs.cols() != vocab.len() {
            return Err(Error::domain(format!(
                "frequency matrix has {} columns but the vocabulary has {} terms",
                freqs.cols(),
                vocab.len()
            )));
        }
        let doc_lens = freqs.row_sums();
        let collection_freqs = freqs.col_sums();
        let total_tokens = doc_lens.iter().sum();
        Ok(Self {
            vocab,
            freqs,
            doc_lens,
            collection_freqs,
            total_tokens,
        })
    }

    /// Reads a corpus in the GibbsLDA data format: the first line holds the
    /// document count `M`, each of the next `M` lines one document of
    /// whitespace-separated tokens. Trailing blank lines are ignored.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses the contents of a corpus file; `name` labels error locations.
    pub fn parse(text: &str, name: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::data_at(name, 1, "missing document count line"))?;
        let declared: usize = header
            .trim()
            .parse()
            .map_err(|_| Error::data_at(name, 1, format!("invalid document count {header:?}")))?;
        let mut docs: Vec<Vec<&str>> = lines.map(|l| l.split_whitespace().collect()).collect();
        while docs.len() > declared && docs.last().is_some_and(Vec::is_empty) {
            docs.pop();
        }
        if docs.len() != declared {
            let line = if docs.len() > declared {
                declared + 2
            } else {
                docs.len() + 1
            };
            return Err(Error::data_at(
                name,
                line,
                format!("declared {declared} documents, found {}", docs.len()),
            ));
        }
        Self::build(docs).map_err(|e| match e {
            Error::Domain(msg) => Error::data_at(name, 1, msg),
            other => other,
        })
    }

    /// Renders the corpus in the data format read by [`Corpus::parse`]. Each
    /// document lists its terms in vocabulary order, repeated by frequency,
    /// which reproduces the same vocabulary order on re-reading.
    pub fn to_data_string(&self) -> String {
        let mut out = format!("{}\n", self.num_docs());
        for d in 0..self.num_docs() {
            let (idx, vals) = self.freqs.row(d);
            let mut first = true;
            for (&j, &f) in idx.iter().zip(vals) {
                for _ in 0..f as usize {
                    if !first {
                        out.push(' ');
                    }
                    out.push_str(self.vocab.term(j));
                    first = false;
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_data_string()).map_err(|e| Error::io(path.display(), e))
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Document-term frequency matrix `F` (`m × n`).
    pub fn freqs(&self) -> &SparseMatrix {
        &self.freqs
    }

    /// Tokens per document, `N_d`.
    pub fn doc_lens(&self) -> &[f64] {
        &self.doc_lens
    }

    /// Collection frequency of each term, `C`.
    pub fn collection_freqs(&self) -> &[f64] {
        &self.collection_freqs
    }

    pub fn total_tokens(&self) -> f64 {
        self.total_tokens
    }

    pub fn num_docs(&self) -> usize {
        self.freqs.rows()
    }

    pub fn num_terms(&self) -> usize {
        self.freqs.cols()
    }

    /// Frequency of `term` in `doc`.
    pub fn freq(&self, doc: usize, term: usize) -> f64 {
        self.freqs.get(doc, term)
    }
}

/// A query projected onto the corpus vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    id: String,
    terms: Vec<(usize, f64)>,
    dropped: Vec<String>,
}

impl Query {
    /// Counts `tokens` against `vocab`. Out-of-vocabulary tokens are recorded
    /// in [`Query::dropped_terms`] and excluded from the frequency vector.
    pub fn build<T: AsRef<str>>(
        id: impl Into<String>,
        tokens: impl IntoIterator<Item = T>,
        vocab: &Vocabulary,
    ) -> Self {
        let mut counts: Vec<(usize, f64)> = Vec::new();
        let mut dropped = Vec::new();
        for tok in tokens {
            let tok = tok.as_ref();
            match vocab.get(tok) {
                Some(j) => match counts.iter_mut().find(|(t, _)| *t == j) {
                    Some((_, f)) => *f += 1.0,
                    None => counts.push((j, 1.0)),
                },
                None => dropped.push(tok.to_string()),
            }
        }
        counts.sort_by_key(|&(j, _)| j);
        Self {
            id: id.into(),
            terms: counts,
            dropped,
        }
    }

    /// Builds a query from explicit `(term, frequency)` pairs. Entries with
    /// zero frequency are kept out; duplicates are summed.
    pub fn from_frequencies(id: impl Into<String>, freqs: &[(usize, f64)]) -> Self {
        let mut terms: Vec<(usize, f64)> = Vec::new();
        for &(j, f) in freqs {
            if f == 0.0 {
                continue;
            }
            match terms.iter_mut().find(|(t, _)| *t == j) {
                Some((_, acc)) => *acc += f,
                None => terms.push((j, f)),
            }
        }
        terms.sort_by_key(|&(j, _)| j);
        Self {
            id: id.into(),
            terms,
            dropped: Vec::new(),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// `F_q` as `(term index, frequency)` pairs sorted by term index.
    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms
    }

    pub fn dropped_terms(&self) -> &[String] {
        &self.dropped
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total in-vocabulary query length `|Q|`.
    pub fn len(&self) -> f64 {
        self.terms.iter().map(|(_, f)| f).sum()
    }

    /// Largest term index referenced.
    pub(crate) fn max_term(&self) -> Option<usize> {
        self.terms.last().map(|&(j, _)| j)
    }
}

/// A raw query line: id plus tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryText {
    pub id: String,
    pub tokens: Vec<String>,
}

/// Parses a query file: one query per non-blank line, first field the id.
pub fn parse_queries(text: &str) -> Vec<QueryText> {
    text.lines()
        .filter_map(|line| {
            let mut fields = line.split_whitespace();
            let id = fields.next()?;
            Some(QueryText {
                id: id.to_string(),
                tokens: fields.map(str::to_string).collect(),
            })
        })
        .collect()
}

pub fn load_queries(path: impl AsRef<Path>) -> Result<Vec<QueryText>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
    Ok(parse_queries(&text))
}
