//! Versioned plain-text checkpoint.
//!
//! ```text
//! relbias-checkpoint 1
//! config <ModelConfig as one JSON line>
//! vocab <n>
//! <word>\t<count>             (n lines, vocabulary order)
//! tensor <name> <rows> <cols>
//! <cols values>               (rows lines)
//! ...                         (one block per parameter group)
//! ```
//!
//! Values use the shortest representation that round-trips exactly.

use std::fmt::Write as _;
use std::path::Path;

use super::{Model, ModelConfig, Parameters, Tensor};
use crate::embeddings::{Vocabulary, PAD, UNK};
use crate::error::{Error, Result};
use crate::io;

pub const CHECKPOINT_MAGIC: &str = "relbias-checkpoint 1";

pub fn checkpoint_to_string(model: &Model) -> String {
    let mut out = String::new();
    writeln!(out, "{CHECKPOINT_MAGIC}").unwrap();
    writeln!(out, "config {}", serde_json::to_string(&model.config).unwrap()).unwrap();
    writeln!(out, "vocab {}", model.vocab.len()).unwrap();
    for (i, w) in model.vocab.words().iter().enumerate() {
        writeln!(out, "{w}\t{}", model.vocab.count(i)).unwrap();
    }
    for (name, t) in model.params.groups() {
        writeln!(out, "tensor {name} {} {}", t.rows, t.cols).unwrap();
        for r in 0..t.rows {
            let row: Vec<String> = t.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
    }
    out
}

pub fn checkpoint_from_str(text: &str) -> Result<Model> {
    let bad = |msg: String| Error::data(format!("checkpoint: {msg}"));
    let mut lines = text.lines();
    let mut next = |what: &str| lines.next().ok_or_else(|| bad(format!("truncated before {what}")));

    let magic = next("header")?;
    if magic != CHECKPOINT_MAGIC {
        return Err(bad(format!("unsupported header `{magic}`")));
    }
    let config: ModelConfig = next("config")?
        .strip_prefix("config ")
        .ok_or_else(|| bad("missing config line".into()))
        .and_then(|j| serde_json::from_str(j).map_err(|e| bad(e.to_string())))?;
    let n: usize = next("vocab")?
        .strip_prefix("vocab ")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad("missing vocab line".into()))?;
    let mut words = Vec::with_capacity(n);
    for _ in 0..n {
        let line = next("vocabulary words")?;
        let (w, c) = line.split_once('\t').unwrap_or((line, "0"));
        let count = c.parse::<u64>().map_err(|e| bad(format!("vocabulary count: {e}")))?;
        words.push((w.to_string(), count));
    }
    if n < 2 || words[0].0 != UNK || words[1].0 != PAD {
        return Err(bad("vocabulary does not start with the special tokens".into()));
    }
    let vocab = Vocabulary::from_words(words.split_off(2))?;

    let mut params = Parameters::zeros(&config, n);
    for (name, tensor) in params.groups_mut() {
        let header = next("tensor header")?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let (rows, cols) = match parts.as_slice() {
            ["tensor", got, r, c] if *got == name => (
                r.parse::<usize>().map_err(|e| bad(e.to_string()))?,
                c.parse::<usize>().map_err(|e| bad(e.to_string()))?,
            ),
            _ => return Err(bad(format!("expected tensor `{name}`, found `{header}`"))),
        };
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            for v in next("tensor values")?.split_whitespace() {
                data.push(v.parse::<f64>().map_err(|e| bad(e.to_string()))?);
            }
        }
        if data.len() != rows * cols {
            return Err(bad(format!("tensor `{name}` has {} values, expected {}", data.len(), rows * cols)));
        }
        *tensor = Tensor { rows, cols, data };
    }
    params.check_shapes(&config)?;
    Ok(Model {
        config,
        vocab,
        params,
    })
}

pub fn write_checkpoint(model: &Model, path: &Path) -> Result<()> {
    io::write_bytes(path, checkpoint_to_string(model).as_bytes())
}

pub fn read_checkpoint(path: &Path) -> Result<Model> {
    checkpoint_from_str(&io::read_to_string(path)?)
}
