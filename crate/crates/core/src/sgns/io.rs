//! Embedding files. Only the input vectors are persisted.
//!
//! Text: a `n d` header line, then `index v1 ... vd` per row.
//! Binary: the 8-byte magic `WBEMB\0\x01\0`, `n` and `d` as little-endian
//! u64, then `n * d` little-endian f32 values in row order.

use std::io::{BufRead, BufReader, Read, Write};

use super::EmbeddingMatrix;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"WBEMB\0\x01\0";

fn fmt_err(message: String) -> Error {
    Error::Format { stage: "embed", message }
}

pub fn write_embedding(emb: &EmbeddingMatrix<f32>, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{} {}", emb.rows(), emb.dim)?;
    let mut line = String::new();
    for i in 0..emb.rows() {
        line.clear();
        line.push_str(&i.to_string());
        for x in emb.row(i) {
            line.push(' ');
            line.push_str(&x.to_string());
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Reads a text embedding. The returned matrix has zero output vectors.
pub fn read_embedding(input: impl Read) -> Result<EmbeddingMatrix<f32>> {
    let mut lines = BufReader::new(input).lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| fmt_err(e.to_string()))?
        .ok_or_else(|| fmt_err("missing header".into()))?;
    let dims: Vec<usize> = header.split_whitespace().filter_map(|x| x.parse().ok()).collect();
    let [n, d] = dims[..] else {
        return Err(fmt_err(format!("expected `n d` header, found {header:?}")));
    };
    if header.split_whitespace().count() != 2 || d == 0 {
        return Err(fmt_err(format!("expected `n d` header, found {header:?}")));
    }
    let mut emb = EmbeddingMatrix::zeros(n, d);
    let mut seen = vec![false; n];
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| fmt_err(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = || fmt_err(format!("line {}: malformed row", i + 2));
        let mut it = line.split_whitespace();
        let idx: usize = it.next().and_then(|x| x.parse().ok()).ok_or_else(bad)?;
        if idx >= n || seen[idx] {
            return Err(bad());
        }
        let values: Vec<f32> = it.map(str::parse).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        if values.len() != d {
            return Err(bad());
        }
        emb.input[idx * d..(idx + 1) * d].copy_from_slice(&values);
        seen[idx] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(fmt_err(format!("row {missing} missing")));
    }
    Ok(emb)
}

pub fn write_embedding_binary(emb: &EmbeddingMatrix<f32>, mut out: impl Write) -> std::io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&(emb.rows() as u64).to_le_bytes())?;
    out.write_all(&(emb.dim as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(emb.input.len() * 4);
    for x in &emb.input {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    out.write_all(&buf)
}

pub fn read_embedding_binary(mut input: impl Read) -> Result<EmbeddingMatrix<f32>> {
    let mut head = [0u8; 24];
    input
        .read_exact(&mut head)
        .map_err(|e| fmt_err(format!("short header: {e}")))?;
    if &head[..8] != MAGIC {
        return Err(fmt_err("bad magic or unsupported version".into()));
    }
    let n = u64::from_le_bytes(head[8..16].try_into().unwrap()) as usize;
    let d = u64::from_le_bytes(head[16..24].try_into().unwrap()) as usize;
    let mut body = Vec::new();
    input.read_to_end(&mut body).map_err(|e| fmt_err(e.to_string()))?;
    if d == 0 || body.len() != n * d * 4 {
        return Err(fmt_err(format!("expected {} bytes of data, found {}", n * d * 4, body.len())));
    }
    let mut emb = EmbeddingMatrix::zeros(n, d);
    for (x, chunk) in emb.input.iter_mut().zip(body.chunks_exact(4)) {
        *x = f32::from_le_bytes(chunk.try_into().unwrap());
    }
    Ok(emb)
}
