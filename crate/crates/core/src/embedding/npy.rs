//! Minimal NPY 1.0 reader/writer for C-order `(V, D)` float matrices.

use std::io::{Read, Write};

use ndarray::{Array2, ArrayView2};

use super::{io_error, EmbeddingError, Result};

const MAGIC: &[u8; 6] = b"\x93NUMPY";
const ALIGN: usize = 64;

#[derive(Debug, PartialEq)]
struct Header {
    descr: String,
    fortran_order: bool,
    shape: Vec<usize>,
}

fn npy_err(msg: impl Into<String>) -> EmbeddingError {
    EmbeddingError::Npy(msg.into())
}

/// Value following `'key':` in a python dict literal.
fn dict_value<'a>(dict: &'a str, key: &str) -> Result<&'a str> {
    let quoted = [format!("'{key}'"), format!("\"{key}\"")];
    let start = quoted
        .iter()
        .find_map(|k| dict.find(k.as_str()).map(|i| i + k.len()))
        .ok_or_else(|| npy_err(format!("header has no {key:?} entry")))?;
    let rest = dict[start..].trim_start();
    rest.strip_prefix(':')
        .map(str::trim_start)
        .ok_or_else(|| npy_err(format!("expected ':' after {key:?}")))
}

fn parse_header(text: &str) -> Result<Header> {
    let descr = dict_value(text, "descr")?;
    let quote = descr
        .chars()
        .next()
        .filter(|c| *c == '\'' || *c == '"')
        .ok_or_else(|| npy_err("descr is not a string"))?;
    let descr = descr[1..]
        .split(quote)
        .next()
        .ok_or_else(|| npy_err("unterminated descr"))?
        .to_string();

    let fortran = dict_value(text, "fortran_order")?;
    let fortran_order = if fortran.starts_with("True") {
        true
    } else if fortran.starts_with("False") {
        false
    } else {
        return Err(npy_err("fortran_order is not a boolean"));
    };

    let shape = dict_value(text, "shape")?;
    let shape = shape
        .strip_prefix('(')
        .and_then(|s| s.split(')').next())
        .ok_or_else(|| npy_err("shape is not a tuple"))?;
    let shape = shape
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| npy_err(format!("bad shape entry {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Header {
        descr,
        fortran_order,
        shape,
    })
}

pub(super) fn read<R: Read>(reader: &mut R) -> Result<Array2<f32>> {
    let mut preamble = [0u8; 10];
    reader.read_exact(&mut preamble).map_err(io_error)?;
    if &preamble[..6] != MAGIC {
        return Err(npy_err("missing \\x93NUMPY magic"));
    }
    if preamble[6..8] != [1, 0] {
        return Err(npy_err(format!(
            "unsupported format version {}.{}",
            preamble[6], preamble[7]
        )));
    }
    let header_len = u16::from_le_bytes([preamble[8], preamble[9]]) as usize;
    let mut header = vec![0u8; header_len];
    reader.read_exact(&mut header).map_err(io_error)?;
    let header = String::from_utf8(header).map_err(|_| npy_err("header is not ASCII"))?;
    let header = parse_header(&header)?;

    if header.fortran_order {
        return Err(npy_err("Fortran-order arrays are not supported"));
    }
    let (rows, cols) = match header.shape.as_slice() {
        [r, c] => (*r, *c),
        other => return Err(npy_err(format!("expected a 2-D array, found shape {other:?}"))),
    };
    let count = rows * cols;

    let values: Vec<f32> = match header.descr.as_str() {
        "<f4" => {
            let mut raw = vec![0u8; count * 4];
            reader
                .read_exact(&mut raw)
                .map_err(|_| npy_err("array data is truncated"))?;
            raw.chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().expect("chunks of four")))
                .collect()
        }
        "<f8" => {
            log::warn!("npy array is float64; values are down-cast to float32");
            let mut raw = vec![0u8; count * 8];
            reader
                .read_exact(&mut raw)
                .map_err(|_| npy_err("array data is truncated"))?;
            raw.chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("chunks of eight")) as f32)
                .collect()
        }
        other => return Err(EmbeddingError::NpyDtype(other.to_string())),
    };
    Ok(Array2::from_shape_vec((rows, cols), values).expect("rows * cols values"))
}

pub(super) fn write<W: Write>(matrix: ArrayView2<'_, f32>, w: &mut W) -> std::io::Result<()> {
    let (rows, cols) = matrix.dim();
    let mut dict = format!("{{'descr': '<f4', 'fortran_order': False, 'shape': ({rows}, {cols}), }}");
    // magic + version + length field + dict + trailing newline is a multiple of ALIGN
    let unpadded = MAGIC.len() + 2 + 2 + dict.len() + 1;
    let padding = (ALIGN - unpadded % ALIGN) % ALIGN;
    dict.extend(std::iter::repeat_n(' ', padding));
    dict.push('\n');

    w.write_all(MAGIC)?;
    w.write_all(&[1, 0])?;
    w.write_all(&(dict.len() as u16).to_le_bytes())?;
    w.write_all(dict.as_bytes())?;
    for x in matrix.iter() {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn encode(dict: &str, data: &[u8]) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        out.extend_from_slice(&[1, 0]);
        out.extend_from_slice(&(dict.len() as u16).to_le_bytes());
        out.extend_from_slice(dict.as_bytes());
        out.extend_from_slice(data);
        out
    }

    #[test]
    fn header_is_aligned_and_parseable() {
        let m = Array2::from_shape_vec((2, 3), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let mut out = Vec::new();
        write(m.view(), &mut out).unwrap();
        let header_len = u16::from_le_bytes([out[8], out[9]]) as usize;
        assert_eq!((10 + header_len) % 64, 0);
        assert_eq!(out.len(), 10 + header_len + 6 * 4);
        assert_eq!(read(&mut out.as_slice()).unwrap(), m);
    }

    #[test]
    fn reads_f8_with_downcast() {
        let data: Vec<u8> = [0.5f64, -2.0].iter().flat_map(|x| x.to_le_bytes()).collect();
        let bytes = encode("{'descr': '<f8', 'fortran_order': False, 'shape': (1, 2), }\n", &data);
        let m = read(&mut bytes.as_slice()).unwrap();
        assert_eq!(m.row(0).to_vec(), vec![0.5f32, -2.0]);
    }

    #[test]
    fn rejects_unsupported_arrays() {
        let big = encode("{'descr': '>f4', 'fortran_order': False, 'shape': (1, 1), }\n", &[0; 4]);
        assert!(matches!(
            read(&mut big.as_slice()).unwrap_err(),
            EmbeddingError::NpyDtype(d) if d == ">f4"
        ));
        let fortran = encode("{'descr': '<f4', 'fortran_order': True, 'shape': (1, 1), }\n", &[0; 4]);
        assert!(matches!(
            read(&mut fortran.as_slice()).unwrap_err(),
            EmbeddingError::Npy(_)
        ));
        let one_d = encode("{'descr': '<f4', 'fortran_order': False, 'shape': (3,), }\n", &[0; 12]);
        assert!(matches!(
            read(&mut one_d.as_slice()).unwrap_err(),
            EmbeddingError::Npy(_)
        ));
        let short = encode("{'descr': '<f4', 'fortran_order': False, 'shape': (2, 2), }\n", &[0; 4]);
        assert!(matches!(
            read(&mut short.as_slice()).unwrap_err(),
            EmbeddingError::Npy(_)
        ));
        let mut v2 = encode("{'descr': '<f4', 'fortran_order': False, 'shape': (1, 1), }\n", &[0; 4]);
        v2[6] = 2;
        assert!(matches!(read(&mut v2.as_slice()).unwrap_err(), EmbeddingError::Npy(_)));
    }

    #[test]
    fn parses_header_variants() {
        let h = parse_header("{\"descr\": \"<f4\", \"fortran_order\": False, \"shape\": (0, 300)}").unwrap();
        assert_eq!(
            h,
            Header {
                descr: "<f4".into(),
                fortran_order: false,
                shape: vec![0, 300],
            }
        );
    }
}
