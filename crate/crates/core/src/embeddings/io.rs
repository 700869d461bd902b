use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{EmbeddingModel, Vocabulary};

#[derive(Debug, thiserror::Error)]
pub enum VectorFileError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Malformed { path: PathBuf, line: usize, message: String },
    #[error("token {0:?} contains whitespace and cannot be written")]
    UnwritableToken(String),
}

/// Text format: a `count dim` header, then one token per line followed by
/// its `dim` values. Values use the shortest representation that reads
/// back to the same f64.
pub fn write_vectors<W: Write>(model: &EmbeddingModel, mut w: W) -> Result<(), VectorFileError> {
    let io_err = |source| VectorFileError::Io { path: PathBuf::from("<writer>"), source };
    writeln!(w, "{} {}", model.vocab.len(), model.dim).map_err(io_err)?;
    for (id, token) in model.vocab.tokens().iter().enumerate() {
        if token.is_empty() || token.chars().any(char::is_whitespace) {
            return Err(VectorFileError::UnwritableToken(token.clone()));
        }
        let mut line = token.clone();
        for x in model.row(id as u32) {
            line.push(' ');
            line.push_str(&x.to_string());
        }
        line.push('\n');
        w.write_all(line.as_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn export_vectors(model: &EmbeddingModel, path: &Path) -> Result<(), VectorFileError> {
    let io_err = |source| VectorFileError::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    write_vectors(model, BufWriter::new(file)).map_err(|e| match e {
        VectorFileError::Io { source, .. } => io_err(source),
        other => other,
    })
}

pub fn read_vectors<R: BufRead>(reader: R, path: &Path) -> Result<EmbeddingModel, VectorFileError> {
    let malformed = |line: usize, message: String| VectorFileError::Malformed { path: path.to_path_buf(), line, message };
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(l) => l.map_err(|source| VectorFileError::Io { path: path.to_path_buf(), source })?,
        None => return Err(malformed(1, "empty file, expected a `count dim` header".into())),
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (count, dim) = match fields.as_slice() {
        [c, d] => match (c.parse::<usize>(), d.parse::<usize>()) {
            (Ok(c), Ok(d)) if d > 0 => (c, d),
            _ => return Err(malformed(1, format!("bad header {header:?}"))),
        },
        _ => return Err(malformed(1, format!("bad header {header:?}"))),
    };
    let mut tokens = Vec::with_capacity(count);
    let mut input = Vec::with_capacity(count * dim);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line.map_err(|source| VectorFileError::Io { path: path.to_path_buf(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        if tokens.len() == count {
            return Err(malformed(lineno, format!("more than the {count} rows announced in the header")));
        }
        let mut parts = line.split_whitespace();
        let token = parts.next().unwrap();
        let mut n = 0;
        for p in parts {
            let x: f64 = p.parse().map_err(|_| malformed(lineno, format!("value {p:?} is not a number")))?;
            if !x.is_finite() {
                return Err(malformed(lineno, format!("value {p:?} is not finite")));
            }
            n += 1;
            if n > dim {
                break;
            }
            input.push(x);
        }
        if n != dim {
            return Err(malformed(lineno, format!("expected {dim} values for {token:?}, found {}", if n > dim { "more".to_string() } else { n.to_string() })));
        }
        tokens.push(token.to_string());
    }
    if tokens.len() != count {
        return Err(malformed(tokens.len() + 2, format!("header announces {count} rows, file has {}", tokens.len())));
    }
    let vocab = Vocabulary::from_tokens(tokens).map_err(|dup| malformed(0, format!("duplicate token {dup:?}")))?;
    Ok(EmbeddingModel::new(vocab, dim, input, None))
}

pub fn import_vectors(path: &Path) -> Result<EmbeddingModel, VectorFileError> {
    let file = File::open(path).map_err(|source| VectorFileError::Io { path: path.to_path_buf(), source })?;
    read_vectors(BufReader::new(file), path)
}
