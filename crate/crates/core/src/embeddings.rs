//! Word-embedding matrices and the whitespace-separated text format.
//!
//! Each content line holds a token followed by `d` decimal values. An
//! optional first line consisting of exactly two integers (`count dim`) is
//! treated as a header and skipped. Tokens may contain any non-whitespace
//! characters.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Ordered set of unique tokens with constant-time ordinal lookup.
#[derive(Clone, Debug)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    folded: OnceLock<HashMap<String, usize>>,
}

impl Vocabulary {
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, token) in tokens.iter().enumerate() {
            if index.insert(token.clone(), i).is_some() {
                return Err(Error::DuplicateToken {
                    line: i + 1,
                    token: token.clone(),
                });
            }
        }
        Ok(Vocabulary {
            tokens,
            index,
            folded: OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, ordinal: usize) -> &str {
        &self.tokens[ordinal]
    }

    /// Exact-match ordinal of `token`.
    pub fn get(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Ordinal of `token`, optionally matching after lowercasing both sides.
    ///
    /// With case folding, several vocabulary entries may collapse onto one
    /// key; the lowest ordinal wins.
    pub fn lookup(&self, token: &str, fold_case: bool) -> Option<usize> {
        if fold_case {
            self.folded_index().get(&token.to_lowercase()).copied()
        } else {
            self.get(token)
        }
    }

    fn folded_index(&self) -> &HashMap<String, usize> {
        self.folded.get_or_init(|| {
            let mut folded = HashMap::with_capacity(self.tokens.len());
            for (i, token) in self.tokens.iter().enumerate() {
                folded.entry(token.to_lowercase()).or_insert(i);
            }
            folded
        })
    }
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
    }
}

/// `n x d` row-major matrix of finite values bound to a [`Vocabulary`].
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix<T> {
    vocab: Vocabulary,
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> EmbeddingMatrix<T> {
    /// Builds a matrix from row-major `data`, validating shape and finiteness.
    pub fn new(vocab: Vocabulary, dim: usize, data: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("dimension must be positive".into()));
        }
        if data.len() != vocab.len() * dim {
            return Err(Error::Shape(format!(
                "{} values for {} tokens of dimension {}",
                data.len(),
                vocab.len(),
                dim
            )));
        }
        let matrix = EmbeddingMatrix { vocab, dim, data };
        matrix.check_finite()?;
        Ok(matrix)
    }

    pub fn from_rows<S: Into<String>>(rows: Vec<(S, Vec<T>)>) -> Result<Self> {
        let dim = rows.first().map(|(_, r)| r.len()).unwrap_or(0);
        let mut tokens = Vec::with_capacity(rows.len());
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (i, (token, row)) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Dimension {
                    line: i + 1,
                    expected: dim,
                    found: row.len(),
                });
            }
            tokens.push(token.into());
            data.extend(row);
        }
        Self::new(Vocabulary::new(tokens)?, dim, data)
    }

    pub(crate) fn from_parts_unchecked(vocab: Vocabulary, dim: usize, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), vocab.len() * dim);
        EmbeddingMatrix { vocab, dim, data }
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn row(&self, ordinal: usize) -> &[T] {
        &self.data[ordinal * self.dim..(ordinal + 1) * self.dim]
    }

    pub(crate) fn row_mut(&mut self, ordinal: usize) -> &mut [T] {
        &mut self.data[ordinal * self.dim..(ordinal + 1) * self.dim]
    }

    pub fn get(&self, token: &str) -> Option<&[T]> {
        self.vocab.get(token).map(|i| self.row(i))
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[T])> {
        self.vocab
            .tokens()
            .iter()
            .map(String::as_str)
            .zip(self.data.chunks_exact(self.dim))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Copy of the matrix with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        let data = self.data.iter().map(|&v| v * factor).collect();
        Self::new(self.vocab.clone(), self.dim, data)
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        for (token, row) in self.rows() {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    token: token.to_owned(),
                });
            }
        }
        Ok(())
    }

    /// Divides each row by `sqrt(|row|^2 + 1e-6)`.
    ///
    /// The epsilon keeps zero rows at zero instead of dividing by zero.
    pub fn normalize_rows(&self) -> Self {
        let eps = T::from_f64(1e-6);
        let mut out = self.clone();
        for row in out.data.chunks_exact_mut(self.dim) {
            let norm = (crate::scalar::dot(row, row) + eps).sqrt();
            row.iter_mut().for_each(|v| *v = *v / norm);
        }
        out
    }
}

/// How [`read_embeddings`] treats a token seen more than once.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DuplicatePolicy {
    #[default]
    Strict,
    KeepFirst,
}

#[derive(Clone, Debug)]
pub struct LoadedEmbeddings<T> {
    pub matrix: EmbeddingMatrix<T>,
    /// Number of duplicate rows dropped under [`DuplicatePolicy::KeepFirst`].
    pub duplicates_skipped: usize,
}

fn parse_header(fields: &[&str]) -> Option<(usize, usize)> {
    match fields {
        [count, dim] => Some((count.parse().ok()?, dim.parse().ok()?)),
        _ => None,
    }
}

pub fn read_embeddings<T: Real, R: BufRead>(mut reader: R, policy: DuplicatePolicy) -> Result<LoadedEmbeddings<T>> {
    let mut tokens: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut data: Vec<T> = Vec::new();
    let mut dim: Option<usize> = None;
    let mut duplicates_skipped = 0;
    let mut seen_content = false;

    let mut buf = Vec::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let line = std::str::from_utf8(&buf).map_err(|_| Error::Parse {
            line: line_no,
            message: "invalid UTF-8".into(),
        })?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }

        if !seen_content {
            seen_content = true;
            if let Some((_, header_dim)) = parse_header(&fields) {
                if header_dim == 0 {
                    return Err(Error::Parse {
                        line: line_no,
                        message: "header declares dimension 0".into(),
                    });
                }
                dim = Some(header_dim);
                continue;
            }
        }

        let found = fields.len() - 1;
        let expected = *dim.get_or_insert(found);
        if found != expected || found == 0 {
            return Err(Error::Dimension {
                line: line_no,
                expected,
                found,
            });
        }

        let token = fields[0];
        if index.contains_key(token) {
            match policy {
                DuplicatePolicy::Strict => {
                    return Err(Error::DuplicateToken {
                        line: line_no,
                        token: token.to_owned(),
                    })
                }
                DuplicatePolicy::KeepFirst => {
                    duplicates_skipped += 1;
                    continue;
                }
            }
        }

        for field in &fields[1..] {
            let value: T = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid number `{field}`"),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("non-finite value `{field}`"),
                });
            }
            data.push(value);
        }
        index.insert(token.to_owned(), tokens.len());
        tokens.push(token.to_owned());
    }

    if tokens.is_empty() {
        return Err(Error::EmptyInput);
    }
    let dim = dim.expect("dimension is set once a row is read");
    let vocab = Vocabulary {
        tokens,
        index,
        folded: OnceLock::new(),
    };
    Ok(LoadedEmbeddings {
        matrix: EmbeddingMatrix::from_parts_unchecked(vocab, dim, data),
        duplicates_skipped,
    })
}

/// Writes one `token v1 .. vd` line per row, without a header.
///
/// Values use the shortest decimal form that parses back to the same float.
pub fn write_embeddings<T: Real, W: Write>(matrix: &EmbeddingMatrix<T>, mut sink: W) -> Result<()> {
    if matrix.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    for (token, row) in matrix.rows() {
        sink.write_all(token.as_bytes())?;
        for value in row {
            write!(sink, " {value}")?;
        }
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    Ok(())
}
