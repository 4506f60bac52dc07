//! Inner constant-weight code: a greedy colex lexicode in `J(m,w)` with
//! minimum Hamming distance `2f`, truncated to a power of two.

use std::collections::HashMap;

use crate::words::{ball_enumerate, enumerate_constant_weight, ColumnWord};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct InnerCode {
    m: usize,
    w: usize,
    f: usize,
    codewords: Vec<ColumnWord>,
    lexicode_size: usize,
    index: HashMap<ColumnWord, usize>,
}

/// Result of decoding one received column.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerDecision {
    /// Unique codeword within distance `f - 1`.
    Symbol { symbol: usize, distance: usize },
    /// No codeword within `f - 1`; `nearest` is the distance to the closest one.
    Erasure { nearest: usize },
}

impl InnerDecision {
    pub fn is_erasure(&self) -> bool {
        matches!(self, InnerDecision::Erasure { .. })
    }
}

/// Greedy lexicode over `J(m,w)` in colex order, cut to `2^⌊log2 size⌋` words.
pub fn build_inner_lexicode(m: usize, w: usize, f: usize) -> Result<InnerCode> {
    if f < 1 || f > w || w > m {
        return Err(Error::param(format!("need 1 <= f <= w <= m, got m = {m}, w = {w}, f = {f}")));
    }
    let mut kept: Vec<ColumnWord> = Vec::new();
    for word in enumerate_constant_weight(m, w)? {
        if kept.iter().all(|c| c.distance_unchecked(&word) >= 2 * f) {
            kept.push(word);
        }
    }
    let lexicode_size = kept.len();
    if lexicode_size < 2 {
        return Err(Error::AlphabetTooSmall { m, w, f, size: lexicode_size });
    }
    let size = 1usize << lexicode_size.ilog2();
    kept.truncate(size);
    InnerCode::from_codewords(m, w, f, kept, lexicode_size)
}

impl InnerCode {
    /// Checks the codewords (weight, distinctness, distance, power-of-two size).
    pub fn from_codewords(m: usize, w: usize, f: usize, codewords: Vec<ColumnWord>, lexicode_size: usize) -> Result<Self> {
        if !codewords.len().is_power_of_two() || codewords.len() < 2 {
            return Err(Error::param(format!("inner code size {} is not a power of two >= 2", codewords.len())));
        }
        if let Some(c) = codewords.iter().find(|c| c.length() != m || c.weight() != w) {
            return Err(Error::param(format!("inner codeword {} is not in J({m},{w})", c.to_hex())));
        }
        for (i, a) in codewords.iter().enumerate() {
            if let Some(b) = codewords[i + 1..].iter().find(|b| a.distance_unchecked(b) < 2 * f) {
                return Err(Error::param(format!(
                    "inner codewords {} and {} are closer than 2f = {}",
                    a.to_hex(),
                    b.to_hex(),
                    2 * f
                )));
            }
        }
        let index = codewords.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        Ok(InnerCode { m, w, f, codewords, lexicode_size, index })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Symbol width `b = log2(size)`.
    pub fn bits(&self) -> u32 {
        self.codewords.len().ilog2()
    }

    /// Size of the greedy lexicode before truncation.
    pub fn lexicode_size(&self) -> usize {
        self.lexicode_size
    }

    pub fn codewords(&self) -> &[ColumnWord] {
        &self.codewords
    }

    pub fn codeword(&self, symbol: usize) -> &ColumnWord {
        &self.codewords[symbol]
    }

    /// Search the radius-`(f-1)` ball of `J(m,w)` around the received column
    /// for a codeword; fall back to an erasure carrying the nearest distance.
    pub fn decode(&self, received: &ColumnWord) -> InnerDecision {
        if received.length() == self.m {
            let ball = ball_enumerate(received, self.w, self.f - 1).expect("w <= m");
            for candidate in ball {
                if let Some(&symbol) = self.index.get(&candidate) {
                    return InnerDecision::Symbol { symbol, distance: received.distance_unchecked(&candidate) };
                }
            }
        }
        let nearest = self.codewords.iter().map(|c| received.distance(c).unwrap_or(usize::MAX)).min().unwrap_or(usize::MAX);
        InnerDecision::Erasure { nearest }
    }
}
