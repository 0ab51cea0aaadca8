//! word2vec binary format: `V D\n`, then per word the UTF-8 word, a 0x20
//! separator, `D` little-endian f32 values and an optional 0x0A.

use std::io::{BufRead, Write};

use ndarray::Array2;

use super::{assemble, io_error, Embedding, EmbeddingError, Result};

fn read_token<R: BufRead>(reader: &mut R, delim: u8, what: &str) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    reader.read_until(delim, &mut buf).map_err(io_error)?;
    if buf.last() != Some(&delim) {
        return Err(EmbeddingError::MalformedHeader(format!(
            "unexpected end of file while reading {what}"
        )));
    }
    buf.pop();
    Ok(buf)
}

pub(super) fn read<R: BufRead>(reader: &mut R) -> Result<Embedding> {
    let header = read_token(reader, b'\n', "the header")?;
    let header =
        String::from_utf8(header).map_err(|_| EmbeddingError::MalformedHeader("header is not ASCII".into()))?;
    let mut fields = header.split_ascii_whitespace().map(str::parse::<usize>);
    let (n_words, dim) = match (fields.next(), fields.next(), fields.next()) {
        (Some(Ok(v)), Some(Ok(d)), None) => (v, d),
        _ => {
            return Err(EmbeddingError::MalformedHeader(format!(
                "expected \"V D\", found {header:?}"
            )))
        }
    };

    let mut vocab = Vec::with_capacity(n_words);
    let mut values = Vec::with_capacity(n_words.saturating_mul(dim).min(1 << 28));
    let mut raw = vec![0u8; dim * 4];
    for row in 0..n_words {
        let word = read_token(reader, b' ', "a word")?;
        let word = String::from_utf8(word).map_err(|_| EmbeddingError::Parse {
            line: row + 2,
            detail: format!("word {row} is not valid UTF-8"),
        })?;
        reader.read_exact(&mut raw).map_err(|_| EmbeddingError::RowLength {
            word: word.clone(),
            expected: dim,
            found: 0,
        })?;
        for (column, chunk) in raw.chunks_exact(4).enumerate() {
            let x = f32::from_le_bytes(chunk.try_into().expect("chunks of four"));
            if !x.is_finite() {
                return Err(EmbeddingError::NonFinite { word, column });
            }
            values.push(x);
        }
        vocab.push(word);

        let next = reader.fill_buf().map_err(io_error)?;
        if next.first() == Some(&b'\n') {
            reader.consume(1);
        }
    }

    let matrix = Array2::from_shape_vec((n_words, dim), values).expect("n_words * dim values");
    assemble(vocab, matrix)
}

pub(super) fn write<W: Write>(e: &Embedding, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "{} {}", e.len(), e.dim())?;
    for (i, word) in e.vocab().iter().enumerate() {
        w.write_all(word.as_bytes())?;
        w.write_all(b" ")?;
        for x in e.row(i) {
            w.write_all(&x.to_le_bytes())?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bytes(rows: &[(&str, [f32; 2])], newline: bool) -> Vec<u8> {
        let mut out = format!("{} 2\n", rows.len()).into_bytes();
        for (word, v) in rows {
            out.extend_from_slice(word.as_bytes());
            out.push(b' ');
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
            if newline {
                out.push(b'\n');
            }
        }
        out
    }

    #[test]
    fn parses_canonical_bytes() {
        let data = bytes(&[("a", [1.0, 0.0]), ("b", [0.0, 1.0])], false);
        let e = read(&mut data.as_slice()).unwrap();
        let expected = Embedding::from_rows([("a", vec![1.0, 0.0]), ("b", vec![0.0, 1.0])]).unwrap();
        assert_eq!(e, expected);

        let with_newlines = bytes(&[("a", [1.0, 0.0]), ("b", [0.0, 1.0])], true);
        assert_eq!(read(&mut with_newlines.as_slice()).unwrap(), expected);
    }

    #[test]
    fn writer_emits_exact_grammar() {
        let e = Embedding::from_rows([("a", vec![1.0, 0.0]), ("b", vec![0.0, 1.0])]).unwrap();
        let mut out = Vec::new();
        write(&e, &mut out).unwrap();
        assert_eq!(out, bytes(&[("a", [1.0, 0.0]), ("b", [0.0, 1.0])], true));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            read(&mut "2 x\n".as_bytes()).unwrap_err(),
            EmbeddingError::MalformedHeader(_)
        ));
        let mut truncated = bytes(&[("a", [1.0, 0.0])], false);
        truncated.truncate(truncated.len() - 2);
        assert!(matches!(
            read(&mut truncated.as_slice()).unwrap_err(),
            EmbeddingError::RowLength { .. }
        ));
        let mut nan = bytes(&[("a", [1.0, 0.0])], false);
        let n = nan.len();
        nan[n - 4..].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(
            read(&mut nan.as_slice()).unwrap_err(),
            EmbeddingError::NonFinite { column: 1, .. }
        ));
    }
}
