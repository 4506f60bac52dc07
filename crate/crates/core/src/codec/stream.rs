//! Multi-block message framing.
//!
//! Message bytes are read as a big-endian bit string and cut into blocks of
//! `k·b` bits; each block becomes `k` symbols, most significant bit first.
//! The last block is zero-padded and the pad length is kept in the header.

use serde::{Deserialize, Serialize};

use super::concat::{ConcatenatedCode, DecodeOutcome};
use crate::words::{ArrayWord, ColumnWord};
use crate::{Error, Result};

pub const STREAM_FORMAT: &str = "cwac-stream/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedStream {
    pub format: String,
    pub m: usize,
    pub n: usize,
    pub w: usize,
    pub k: usize,
    pub b: u32,
    pub message_bytes: usize,
    pub pad_bits: usize,
    /// One entry per block, each a list of `n` hex columns.
    pub blocks: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct DecodedStream {
    pub bytes: Vec<u8>,
    pub blocks: Vec<DecodeOutcome>,
}

impl DecodedStream {
    pub fn failed_blocks(&self) -> Vec<usize> {
        self.blocks.iter().enumerate().filter(|(_, b)| !b.is_decoded()).map(|(i, _)| i).collect()
    }
}

/// Bytes per block when `k·b` is a whole number of bytes.
pub fn block_bytes(k: usize, b: u32) -> usize {
    (k * b as usize).div_ceil(8)
}

/// Packs bytes into symbols of `bits` bits, zero-padding the tail.
pub fn bytes_to_symbols(bytes: &[u8], bits: u32) -> Vec<u16> {
    let total = bytes.len() * 8;
    let bits = bits as usize;
    (0..total.div_ceil(bits))
        .map(|s| {
            (0..bits).fold(0u16, |acc, j| {
                let pos = s * bits + j;
                let bit = pos < total && bytes[pos / 8] >> (7 - pos % 8) & 1 == 1;
                acc << 1 | bit as u16
            })
        })
        .collect()
}

/// Inverse of [`bytes_to_symbols`], keeping the first `len` bytes.
pub fn symbols_to_bytes(symbols: &[u16], bits: u32, len: usize) -> Vec<u8> {
    let bits = bits as usize;
    let mut out = vec![0u8; len];
    for (s, &sym) in symbols.iter().enumerate() {
        for j in 0..bits {
            let pos = s * bits + j;
            if pos >= len * 8 {
                return out;
            }
            if sym >> (bits - 1 - j) & 1 == 1 {
                out[pos / 8] |= 0x80 >> (pos % 8);
            }
        }
    }
    out
}

pub fn encode_stream(code: &ConcatenatedCode, bytes: &[u8]) -> Result<EncodedStream> {
    let k = code.k();
    let mut symbols = bytes_to_symbols(bytes, code.bits());
    let nblocks = symbols.len().div_ceil(k).max(1);
    symbols.resize(nblocks * k, 0);
    let pad_bits = nblocks * k * code.bits() as usize - bytes.len() * 8;
    let blocks = symbols
        .chunks(k)
        .map(|msg| Ok(code.encode(msg)?.to_hex_columns()))
        .collect::<Result<Vec<_>>>()?;
    Ok(EncodedStream {
        format: STREAM_FORMAT.into(),
        m: code.m(),
        n: code.n(),
        w: code.w(),
        k,
        b: code.bits(),
        message_bytes: bytes.len(),
        pad_bits,
        blocks,
    })
}

fn check_header(code: &ConcatenatedCode, s: &EncodedStream) -> Result<()> {
    if s.format != STREAM_FORMAT {
        return Err(Error::param(format!("unknown stream format {:?}", s.format)));
    }
    if (s.m, s.n, s.w, s.k, s.b) != (code.m(), code.n(), code.w(), code.k(), code.bits()) {
        return Err(Error::param("stream header does not match the code".to_string()));
    }
    let bits = s.blocks.len() * s.k * s.b as usize;
    if bits < s.message_bytes * 8 || bits - s.message_bytes * 8 != s.pad_bits {
        return Err(Error::param(format!(
            "{} blocks cannot carry {} bytes with {} pad bits",
            s.blocks.len(),
            s.message_bytes,
            s.pad_bits
        )));
    }
    Ok(())
}

/// Parses the received columns of each block. Columns may have any weight.
pub fn parse_blocks(code: &ConcatenatedCode, s: &EncodedStream) -> Result<Vec<Vec<ColumnWord>>> {
    check_header(code, s)?;
    s.blocks
        .iter()
        .map(|cols| {
            if cols.len() != s.n {
                return Err(Error::param(format!("block with {} columns, expected {}", cols.len(), s.n)));
            }
            cols.iter().map(|h| ColumnWord::from_hex(s.m, h)).collect()
        })
        .collect()
}

/// Decodes every block. Failed blocks contribute zero bytes; the caller
/// decides whether a partial result is acceptable.
pub fn decode_stream(code: &ConcatenatedCode, s: &EncodedStream) -> Result<DecodedStream> {
    let received = parse_blocks(code, s)?;
    let mut symbols = Vec::with_capacity(received.len() * code.k());
    let mut outcomes = Vec::with_capacity(received.len());
    for cols in &received {
        let out = code.decode(cols)?;
        match &out.message {
            Some(msg) => symbols.extend_from_slice(msg),
            None => symbols.extend(std::iter::repeat_n(0, code.k())),
        }
        outcomes.push(out);
    }
    Ok(DecodedStream { bytes: symbols_to_bytes(&symbols, code.bits(), s.message_bytes), blocks: outcomes })
}

/// Convenience for tests: rebuilds an [`EncodedStream`] from arrays.
pub fn with_blocks(template: &EncodedStream, blocks: &[ArrayWord]) -> EncodedStream {
    EncodedStream { blocks: blocks.iter().map(|a| a.to_hex_columns()).collect(), ..template.clone() }
}
