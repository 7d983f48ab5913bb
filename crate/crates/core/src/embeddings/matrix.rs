use std::fmt::Write as _;
use std::path::Path;

use super::Vocabulary;
use crate::error::{Error, Result};
use crate::io;

/// Dense `|V| × dim` word vectors, row-major, indexed by the vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    vocab: Vocabulary,
    dim: usize,
    data: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn new(vocab: Vocabulary, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("embedding dimension must be positive"));
        }
        if data.len() != vocab.len() * dim {
            return Err(Error::data(format!(
                "embedding data has {} entries, expected {} x {}",
                data.len(),
                vocab.len(),
                dim
            )));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::data(format!(
                "non-finite embedding entry for `{}`",
                vocab.word(i / dim)
            )));
        }
        Ok(EmbeddingMatrix { vocab, dim, data })
    }

    pub fn zeros(vocab: Vocabulary, dim: usize) -> Self {
        let data = vec![0.0; vocab.len() * dim];
        EmbeddingMatrix { vocab, dim, data }
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.vocab.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.vocab.get(word).map(|i| self.row(i))
    }

    /// Text format: a `|V| dim` header, then `word v1 .. vdim` per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows(), self.dim);
        for (i, w) in self.vocab.words().iter().enumerate() {
            out.push_str(w);
            for x in self.row(i) {
                write!(out, " {x}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::data("empty embedding file"))?;
        let mut hdr = header.split_whitespace().map(str::parse::<usize>);
        let (Some(Ok(rows)), Some(Ok(dim)), None) = (hdr.next(), hdr.next(), hdr.next()) else {
            return Err(Error::data(format!("bad embedding header `{header}`")));
        };
        let mut words = Vec::with_capacity(rows);
        let mut vectors = Vec::with_capacity(rows);
        for (n, line) in lines.enumerate() {
            let mut parts = line.split_whitespace();
            let word = parts.next().unwrap().to_string();
            let v: Vec<f64> = parts
                .map(|p| p.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::data(format!("embedding line {}: {e}", n + 2)))?;
            if v.len() != dim {
                return Err(Error::data(format!(
                    "embedding line {}: expected {dim} values, found {}",
                    n + 2,
                    v.len()
                )));
            }
            words.push((word, 0));
            vectors.push(v);
        }
        if words.len() != rows {
            return Err(Error::data(format!(
                "embedding header promises {rows} rows, found {}",
                words.len()
            )));
        }
        let vocab = Vocabulary::from_words(words.clone())?;
        let mut m = EmbeddingMatrix::zeros(vocab, dim);
        for ((w, _), v) in words.iter().zip(vectors) {
            let i = m.vocab.get(w).unwrap();
            m.row_mut(i).copy_from_slice(&v);
        }
        EmbeddingMatrix::new(m.vocab, dim, m.data)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_text(&io::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_bytes(path, self.to_text().as_bytes())
    }
}
