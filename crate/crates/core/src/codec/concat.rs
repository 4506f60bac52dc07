//! Reed–Solomon outer code over an inner constant-weight code, with
//! generalized-minimum-distance decoding.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::gf::Field;
use super::inner::{build_inner_lexicode, InnerCode, InnerDecision};
use super::rs::RsCode;
use crate::words::{ArrayWord, ColumnWord};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct ConcatenatedCode {
    inner: InnerCode,
    outer: RsCode,
}

/// Portable description of a concatenated code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDescription {
    pub m: usize,
    pub w: usize,
    pub f: usize,
    pub b: u32,
    pub n: usize,
    pub k: usize,
    pub primitive_poly_hex: String,
    pub inner_codewords: Vec<String>,
}

/// Feasibility summary from [`plan_params`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Plan {
    pub m: usize,
    pub w: usize,
    pub f: usize,
    pub n: usize,
    pub k: usize,
    pub b: u32,
    pub inner_size: usize,
    pub lexicode_size: usize,
    pub max_n: usize,
    pub outer_distance: usize,
    /// `e·f`: half the designed minimum distance.
    pub designed_half_distance: usize,
    /// Bit flips always corrected, `ef - 1`.
    pub guarantee: usize,
    /// Message bits per transmitted bit, `k·b / (n·m)`.
    pub rate: f64,
    pub rate_fraction: (usize, usize),
    /// `w = 1`: the construction is a lifting of the outer code.
    pub lifting: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeStatus {
    Decoded,
    Failure,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ColumnDiagnostic {
    /// Distance to the decoded inner codeword, or to the nearest one if erased.
    pub distance: usize,
    pub erased: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    pub message: Option<Vec<u16>>,
    pub codeword: Option<ArrayWord>,
    /// Hamming distance from the received array to `codeword`.
    pub distance: Option<usize>,
    /// Decoded, but farther than `ef - 1` from the received array.
    pub beyond_guarantee: bool,
    pub columns: Vec<ColumnDiagnostic>,
    pub trials: usize,
}

impl DecodeOutcome {
    pub fn is_decoded(&self) -> bool {
        self.status == DecodeStatus::Decoded
    }
}

/// Builds the inner lexicode and reports rate, guarantee and feasibility.
pub fn plan_params(m: usize, w: usize, f: usize, n: usize, k: usize) -> Result<Plan> {
    let inner = build_inner_lexicode(m, w, f)?;
    let b = inner.bits();
    let max_n = inner.len() - 1;
    if n > max_n || n == 0 {
        return Err(Error::Infeasible { n, max_n });
    }
    if k == 0 || k > n {
        return Err(Error::param(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let e = n - k + 1;
    Ok(Plan {
        m,
        w,
        f,
        n,
        k,
        b,
        inner_size: inner.len(),
        lexicode_size: inner.lexicode_size(),
        max_n,
        outer_distance: e,
        designed_half_distance: e * f,
        guarantee: e * f - 1,
        rate: (k * b as usize) as f64 / (n * m) as f64,
        rate_fraction: (k * b as usize, n * m),
        lifting: w == 1,
    })
}

impl ConcatenatedCode {
    pub fn new(m: usize, w: usize, f: usize, n: usize, k: usize) -> Result<Self> {
        plan_params(m, w, f, n, k)?;
        let inner = build_inner_lexicode(m, w, f)?;
        Self::from_parts(inner, n, k)
    }

    fn from_parts(inner: InnerCode, n: usize, k: usize) -> Result<Self> {
        let field = Arc::new(Field::new(inner.bits())?);
        if n > field.order() {
            return Err(Error::Infeasible { n, max_n: field.order() });
        }
        let outer = RsCode::new(field, n, k)?;
        Ok(ConcatenatedCode { inner, outer })
    }

    pub fn from_description(desc: &CodeDescription) -> Result<Self> {
        let codewords = desc
            .inner_codewords
            .iter()
            .map(|h| ColumnWord::from_hex(desc.m, h))
            .collect::<Result<Vec<_>>>()?;
        if codewords.len() != 1 << desc.b {
            return Err(Error::param(format!("{} inner codewords for b = {}", codewords.len(), desc.b)));
        }
        let inner = InnerCode::from_codewords(desc.m, desc.w, desc.f, codewords, 1 << desc.b)?;
        let code = Self::from_parts(inner, desc.n, desc.k)?;
        let poly = format!("{:#x}", code.outer.field().poly());
        if !desc.primitive_poly_hex.eq_ignore_ascii_case(&poly) {
            return Err(Error::param(format!("primitive polynomial {} does not match {poly}", desc.primitive_poly_hex)));
        }
        Ok(code)
    }

    pub fn description(&self) -> CodeDescription {
        CodeDescription {
            m: self.m(),
            w: self.w(),
            f: self.f(),
            b: self.bits(),
            n: self.n(),
            k: self.k(),
            primitive_poly_hex: format!("{:#x}", self.outer.field().poly()),
            inner_codewords: self.inner.codewords().iter().map(|c| c.to_hex()).collect(),
        }
    }

    pub fn inner(&self) -> &InnerCode {
        &self.inner
    }

    pub fn outer(&self) -> &RsCode {
        &self.outer
    }

    pub fn m(&self) -> usize {
        self.inner.m()
    }

    pub fn w(&self) -> usize {
        self.inner.w()
    }

    pub fn f(&self) -> usize {
        self.inner.f()
    }

    pub fn n(&self) -> usize {
        self.outer.n()
    }

    pub fn k(&self) -> usize {
        self.outer.k()
    }

    pub fn bits(&self) -> u32 {
        self.inner.bits()
    }

    /// `e·f`, half the designed minimum distance.
    pub fn designed_half_distance(&self) -> usize {
        self.outer.distance() * self.f()
    }

    /// Bit flips always corrected.
    pub fn guarantee(&self) -> usize {
        self.designed_half_distance() - 1
    }

    pub fn encode(&self, message: &[u16]) -> Result<ArrayWord> {
        let symbols = self.outer.encode(message)?;
        ArrayWord::new(symbols.iter().map(|&s| self.inner.codeword(s as usize).clone()).collect())
    }

    /// GMD decoding. Columns are ranked by inner distance; trial `c`
    /// (`c = f, f-1, .., 1`) erases undecoded columns and decoded ones at
    /// distance `>= c`. The first outer decode whose re-encoding lies within
    /// `ef - 1` bits of the received array is returned.
    pub fn decode(&self, received: &[ColumnWord]) -> Result<DecodeOutcome> {
        if received.len() != self.n() {
            return Err(Error::param(format!("received {} columns, expected {}", received.len(), self.n())));
        }
        if let Some(c) = received.iter().find(|c| c.length() != self.m()) {
            return Err(Error::param(format!("column of length {}, expected {}", c.length(), self.m())));
        }
        let decisions: Vec<InnerDecision> = received.iter().map(|c| self.inner.decode(c)).collect();
        let columns: Vec<ColumnDiagnostic> = decisions
            .iter()
            .map(|d| match *d {
                InnerDecision::Symbol { distance, .. } => ColumnDiagnostic { distance, erased: false },
                InnerDecision::Erasure { nearest } => ColumnDiagnostic { distance: nearest, erased: true },
            })
            .collect();
        let symbols: Vec<u16> = decisions
            .iter()
            .map(|d| match *d {
                InnerDecision::Symbol { symbol, .. } => symbol as u16,
                InnerDecision::Erasure { .. } => 0,
            })
            .collect();

        let radius = self.guarantee();
        let mut fallback: Option<(usize, Vec<u16>, ArrayWord)> = None;
        let mut trials = 0;
        let mut last_erasures: Option<Vec<usize>> = None;
        for cut in (1..=self.f()).rev() {
            let erasures: Vec<usize> = decisions
                .iter()
                .enumerate()
                .filter(|(_, d)| match **d {
                    InnerDecision::Symbol { distance, .. } => distance >= cut,
                    InnerDecision::Erasure { .. } => true,
                })
                .map(|(i, _)| i)
                .collect();
            if last_erasures.as_ref() == Some(&erasures) {
                continue;
            }
            last_erasures = Some(erasures.clone());
            trials += 1;
            let Ok(out) = self.outer.decode(&symbols, &erasures) else { continue };
            let word = self.encode(&out.message)?;
            let dist: usize = word.columns().iter().zip(received).map(|(a, b)| a.distance_unchecked(b)).sum();
            if dist <= radius {
                return Ok(DecodeOutcome {
                    status: DecodeStatus::Decoded,
                    message: Some(out.message),
                    codeword: Some(word),
                    distance: Some(dist),
                    beyond_guarantee: false,
                    columns,
                    trials,
                });
            }
            if fallback.as_ref().is_none_or(|(d, _, _)| dist < *d) {
                fallback = Some((dist, out.message, word));
            }
        }
        Ok(match fallback {
            Some((dist, message, word)) => DecodeOutcome {
                status: DecodeStatus::Decoded,
                message: Some(message),
                codeword: Some(word),
                distance: Some(dist),
                beyond_guarantee: true,
                columns,
                trials,
            },
            None => DecodeOutcome {
                status: DecodeStatus::Failure,
                message: None,
                codeword: None,
                distance: None,
                beyond_guarantee: false,
                columns,
                trials,
            },
        })
    }
}
