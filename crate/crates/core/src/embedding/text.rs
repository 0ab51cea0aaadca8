use std::io::{BufRead, Write};

use ndarray::Array2;

use super::{assemble, io_error, Embedding, EmbeddingError, Result};

/// A first line made of exactly two integer tokens is a `V D` header.
fn parse_header(line: &str) -> Option<(usize, usize)> {
    let mut tokens = line.split_ascii_whitespace();
    let v = tokens.next()?.parse().ok()?;
    let d = tokens.next()?.parse().ok()?;
    match tokens.next() {
        None => Some((v, d)),
        Some(_) => None,
    }
}

pub(super) fn read<R: BufRead>(reader: R) -> Result<Embedding> {
    let mut header = None;
    let mut dim = None;
    let mut vocab = Vec::new();
    let mut values = Vec::new();
    let mut first = true;

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(io_error)?;
        if line.trim().is_empty() {
            continue;
        }
        if first {
            first = false;
            if let Some((v, d)) = parse_header(&line) {
                header = Some((v, d));
                dim = Some(d);
                continue;
            }
        }

        let mut tokens = line.split_ascii_whitespace();
        let word = tokens.next().expect("line is not blank").to_string();
        let start = values.len();
        for (column, token) in tokens.enumerate() {
            let x: f32 = token.parse().map_err(|_| EmbeddingError::Parse {
                line: lineno,
                detail: format!("cannot parse {token:?} as a float"),
            })?;
            if !x.is_finite() {
                return Err(EmbeddingError::NonFinite { word, column });
            }
            values.push(x);
        }
        let found = values.len() - start;
        let expected = *dim.get_or_insert(found);
        if found != expected {
            return Err(EmbeddingError::RowLength { word, expected, found });
        }
        vocab.push(word);
    }

    if let Some((v, _)) = header {
        if v != vocab.len() {
            return Err(EmbeddingError::MalformedHeader(format!(
                "header declares {v} words but {} rows follow",
                vocab.len()
            )));
        }
    }
    let dim = dim.unwrap_or(0);
    let matrix = Array2::from_shape_vec((vocab.len(), dim), values).expect("every row was checked against dim");
    assemble(vocab, matrix)
}

/// Writes a `V D` header and one record per word. `{:?}` gives the
/// shortest representation that parses back to the same `f32`, and always
/// carries a decimal point or exponent so rows never look like a header.
pub(super) fn write<W: Write>(e: &Embedding, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{} {}", e.len(), e.dim())?;
    for (i, word) in e.vocab().iter().enumerate() {
        w.write_all(word.as_bytes())?;
        for x in e.row(i) {
            write!(w, " {x:?}")?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub(super) fn read_vocab<R: BufRead>(reader: R) -> Result<Vec<String>> {
    let mut vocab = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(io_error)?;
        let word = line.trim_end_matches('\r');
        if word.is_empty() {
            return Err(EmbeddingError::Parse {
                line: lineno + 1,
                detail: "empty word in vocabulary file".into(),
            });
        }
        vocab.push(word.to_string());
    }
    Ok(vocab)
}

pub(super) fn write_vocab<W: Write>(e: &Embedding, w: &mut W) -> std::io::Result<()> {
    for word in e.vocab() {
        w.write_all(word.as_bytes())?;
        w.write_all(b"\n")?;
    }
    Ok(())
}
