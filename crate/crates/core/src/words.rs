//! Column words, array words, and the combinatorics of the Johnson space.
//!
//! A [`ColumnWord`] is a binary word of length `m` stored both as its sorted
//! support and as packed bits. Constant-weight columns are the elements of
//! `J(m,w)`; a received (corrupted) column may have any weight. An
//! [`ArrayWord`] is an `n`-tuple of columns sharing `(m, w)`.
//!
//! The canonical order on `J(m,w)` is colexicographic on supports: `S < T`
//! iff the largest element of the symmetric difference lies in `T`. Ranking
//! follows the combinatorial number system, `rank(S) = Σ C(s_i, i+1)`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::counting::binom_u64;
use crate::{Error, Result};

/// A binary word of length `m`, not necessarily constant-weight.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColumnWord {
    length: usize,
    support: Vec<usize>,
    bits: Vec<u64>,
}

impl ColumnWord {
    /// Builds a word from its set of one-positions. Positions may be given
    /// in any order but must be distinct and below `length`.
    pub fn new(length: usize, support: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut support: Vec<usize> = support.into_iter().collect();
        support.sort_unstable();
        if let Some(w) = support.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param(format!("duplicate position {} in support", w[0])));
        }
        if let Some(&p) = support.last() {
            if p >= length {
                return Err(Error::param(format!("position {p} out of range for length {length}")));
            }
        }
        Ok(Self::from_sorted_unchecked(length, support))
    }

    pub(crate) fn from_sorted_unchecked(length: usize, support: Vec<usize>) -> Self {
        let mut bits = vec![0u64; length.div_ceil(64)];
        for &p in &support {
            bits[p / 64] |= 1 << (p % 64);
        }
        Self { length, support, bits }
    }

    pub fn zero(length: usize) -> Self {
        Self::from_sorted_unchecked(length, Vec::new())
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let support = bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        Self::from_sorted_unchecked(bits.len(), support)
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn contains(&self, pos: usize) -> bool {
        pos < self.length && self.bits[pos / 64] >> (pos % 64) & 1 == 1
    }

    /// Hamming distance to a word of the same length.
    pub fn distance(&self, other: &ColumnWord) -> Result<usize> {
        if self.length != other.length {
            return Err(Error::param(format!(
                "column lengths differ: {} vs {}",
                self.length, other.length
            )));
        }
        Ok(self.distance_unchecked(other))
    }

    #[inline]
    pub(crate) fn distance_unchecked(&self, other: &ColumnWord) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// The word with every bit flipped.
    pub fn complement(&self) -> ColumnWord {
        let support = (0..self.length).filter(|&p| !self.contains(p)).collect();
        Self::from_sorted_unchecked(self.length, support)
    }

    /// The word with the bit at `pos` flipped.
    pub fn with_flipped(&self, pos: usize) -> Result<ColumnWord> {
        if pos >= self.length {
            return Err(Error::param(format!("position {pos} out of range for length {}", self.length)));
        }
        let mut support = self.support.clone();
        match support.binary_search(&pos) {
            Ok(i) => {
                support.remove(i);
            }
            Err(i) => support.insert(i, pos),
        }
        Ok(Self::from_sorted_unchecked(self.length, support))
    }

    /// Lowercase hex of the `m`-bit word, position 0 being the most
    /// significant bit, zero-padded to `⌈m/4⌉` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.length.div_ceil(4);
        let mut out = vec![b'0'; digits];
        for &p in &self.support {
            // bit value 2^(m-1-p); digit j from the right holds bits 4j..4j+3
            let shift = self.length - 1 - p;
            let idx = digits - 1 - shift / 4;
            let v = (out[idx] as char).to_digit(16).unwrap() | 1 << (shift % 4);
            out[idx] = std::char::from_digit(v, 16).unwrap() as u8;
        }
        String::from_utf8(out).unwrap()
    }

    pub fn from_hex(length: usize, hex: &str) -> Result<ColumnWord> {
        let digits = length.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::param(format!(
                "hex word {hex:?} has {} digits, expected {digits} for length {length}",
                hex.len()
            )));
        }
        let mut support = Vec::new();
        for (idx, ch) in hex.chars().enumerate() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::param(format!("invalid hex digit {ch:?}")))?;
            for bit in 0..4 {
                if v >> bit & 1 == 1 {
                    let shift = (digits - 1 - idx) * 4 + bit;
                    if shift >= length {
                        return Err(Error::param(format!("hex word {hex:?} exceeds {length} bits")));
                    }
                    support.push(length - 1 - shift);
                }
            }
        }
        support.sort_unstable();
        Ok(Self::from_sorted_unchecked(length, support))
    }
}

impl fmt::Debug for ColumnWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ColumnWord({}, {:?})", self.length, self.support)
    }
}

/// An element of `J(m,w)^n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ArrayWord {
    m: usize,
    w: usize,
    columns: Vec<ColumnWord>,
}

impl ArrayWord {
    pub fn new(columns: Vec<ColumnWord>) -> Result<Self> {
        let first = columns
            .first()
            .ok_or_else(|| Error::param("an array word needs at least one column"))?;
        let (m, w) = (first.length(), first.weight());
        for (j, c) in columns.iter().enumerate() {
            if c.length() != m || c.weight() != w {
                return Err(Error::param(format!(
                    "column {j} is in J({},{}), expected J({m},{w})",
                    c.length(),
                    c.weight()
                )));
            }
        }
        Ok(Self { m, w, columns })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn columns(&self) -> &[ColumnWord] {
        &self.columns
    }

    pub fn into_columns(self) -> Vec<ColumnWord> {
        self.columns
    }

    pub fn distance(&self, other: &ArrayWord) -> Result<usize> {
        hamming_distance(self, other)
    }

    /// Flips every bit; maps `J(m,w)^n` onto `J(m,m-w)^n` preserving distance.
    pub fn complement(&self) -> ArrayWord {
        Self {
            m: self.m,
            w: self.m - self.w,
            columns: self.columns.iter().map(ColumnWord::complement).collect(),
        }
    }

    pub fn to_hex_columns(&self) -> Vec<String> {
        self.columns.iter().map(ColumnWord::to_hex).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct ArrayWordRepr {
    m: usize,
    n: usize,
    w: usize,
    columns: Vec<String>,
}

impl Serialize for ArrayWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ArrayWordRepr { m: self.m, n: self.n(), w: self.w, columns: self.to_hex_columns() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ArrayWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ArrayWordRepr::deserialize(d)?;
        if repr.columns.len() != repr.n {
            return Err(D::Error::custom(format!(
                "n = {} but {} columns given",
                repr.n,
                repr.columns.len()
            )));
        }
        let columns = repr
            .columns
            .iter()
            .map(|h| ColumnWord::from_hex(repr.m, h))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let word = ArrayWord::new(columns).map_err(D::Error::custom)?;
        if word.w != repr.w {
            return Err(D::Error::custom(format!("columns have weight {}, header says {}", word.w, repr.w)));
        }
        Ok(word)
    }
}

/// Parameters of a CWAC: column length `m`, number of columns `n`, column
/// weight `w`, and half minimum distance `d` (minimum Hamming distance `2d`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct CodeParams {
    pub m: u64,
    pub n: u64,
    pub w: u64,
    pub d: u64,
}

impl CodeParams {
    pub fn new(m: u64, n: u64, w: u64, d: u64) -> Result<Self> {
        if w < 1 || w > m || n < 1 || d < 1 {
            return Err(Error::param(format!(
                "need 1 <= w <= m, n >= 1, d >= 1; got m={m}, n={n}, w={w}, d={d}"
            )));
        }
        Ok(Self { m, n, w, d })
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.m, self.n, self.w, self.d)
    }
}

/// Sum of the column-wise Hamming distances.
pub fn hamming_distance(x: &ArrayWord, y: &ArrayWord) -> Result<usize> {
    if x.m != y.m || x.w != y.w || x.n() != y.n() {
        return Err(Error::param(format!(
            "array shapes differ: ({},{},{}) vs ({},{},{})",
            x.m,
            x.n(),
            x.w,
            y.m,
            y.n(),
            y.w
        )));
    }
    Ok(x.columns.iter().zip(&y.columns).map(|(a, b)| a.distance_unchecked(b)).sum())
}

/// The `k`-subsets of `{0, .., n-1}` in colexicographic order.
#[derive(Clone, Debug)]
pub struct Subsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Subsets {
    pub fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Self { n, current }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let k = next.len();
        // smallest i whose element can move up without colliding with i+1
        let i = (0..k).find(|&i| {
            let limit = if i + 1 < k { next[i + 1] } else { self.n };
            next[i] + 1 < limit
        });
        if let Some(i) = i {
            next[i] += 1;
            for (j, slot) in next.iter_mut().enumerate().take(i) {
                *slot = j;
            }
            self.current = Some(next);
        }
        Some(out)
    }
}

/// All words of `J(m,w)` in colex order.
pub fn enumerate_constant_weight(m: usize, w: usize) -> Result<impl Iterator<Item = ColumnWord>> {
    if w > m {
        return Err(Error::param(format!("weight {w} exceeds length {m}")));
    }
    Ok(Subsets::new(m, w).map(move |s| ColumnWord::from_sorted_unchecked(m, s)))
}

/// Colex rank of a word within `J(m, weight)`.
pub fn rank(x: &ColumnWord) -> BigUint {
    x.support
        .iter()
        .enumerate()
        .map(|(i, &c)| crate::counting::binom_big(c as u64, i as u64 + 1))
        .sum()
}

/// Colex rank as a machine integer, for small spaces.
pub fn rank_usize(x: &ColumnWord) -> usize {
    x.support
        .iter()
        .enumerate()
        .map(|(i, &c)| binom_u64(c as u64, i as u64 + 1).expect("rank overflow") as usize)
        .sum()
}

/// Inverse of [`rank`] on `J(m,w)`.
pub fn unrank(m: usize, w: usize, index: &BigUint) -> Result<ColumnWord> {
    if w > m {
        return Err(Error::param(format!("weight {w} exceeds length {m}")));
    }
    let total = crate::counting::binom_big(m as u64, w as u64);
    if index >= &total {
        return Err(Error::param(format!("index {index} out of range for J({m},{w}) of size {total}")));
    }
    let mut r = index.clone();
    let mut support = vec![0usize; w];
    let mut hi = m;
    for i in (1..=w).rev() {
        // largest c < hi with C(c, i) <= r
        let mut c = hi - 1;
        loop {
            let b = crate::counting::binom_big(c as u64, i as u64);
            if b <= r {
                r -= b;
                break;
            }
            c -= 1;
        }
        support[i - 1] = c;
        hi = c;
    }
    debug_assert!(r.is_zero());
    Ok(ColumnWord::from_sorted_unchecked(m, support))
}

/// Machine-integer variant of [`unrank`].
pub fn unrank_usize(m: usize, w: usize, index: usize) -> Result<ColumnWord> {
    unrank(m, w, &BigUint::from(index))
}

/// All weight-`w` words within Hamming distance `r` of `center`, whose own
/// weight is arbitrary. Words are produced by removing `a` ones from and
/// adding `b` ones to the center's support, in increasing order of distance;
/// `J(m,w)` is never scanned.
pub fn ball_enumerate(center: &ColumnWord, w: usize, r: usize) -> Result<impl Iterator<Item = ColumnWord>> {
    let m = center.length();
    if w > m {
        return Err(Error::param(format!("weight {w} exceeds length {m}")));
    }
    let u = center.weight();
    let ones = center.support().to_vec();
    let zeros: Vec<usize> = (0..m).filter(|&p| !center.contains(p)).collect();
    // distance = a + b with w = u - a + b
    let shapes: Vec<(usize, usize)> = (0..=r)
        .flat_map(|dist| {
            (0..=dist).filter_map(move |a| {
                let b = dist - a;
                (a <= u && b <= m - u && u - a + b == w).then_some((a, b))
            })
        })
        .collect();
    Ok(shapes.into_iter().flat_map(move |(a, b)| {
        let ones = ones.clone();
        let zeros = zeros.clone();
        Subsets::new(ones.len(), a).flat_map(move |removed| {
            let ones = ones.clone();
            let zeros = zeros.clone();
            Subsets::new(zeros.len(), b).map(move |added| {
                let mut support: Vec<usize> = ones
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !removed.contains(i))
                    .map(|(_, &p)| p)
                    .chain(added.iter().map(|&i| zeros[i]))
                    .collect();
                support.sort_unstable();
                ColumnWord::from_sorted_unchecked(m, support)
            })
        })
    }))
}

/// Size of `J(m,w)` as a machine integer, when it fits.
pub fn johnson_size(m: usize, w: usize) -> Option<usize> {
    binom_u64(m as u64, w as u64).and_then(|v| v.to_usize())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(m: usize, s: &[usize]) -> ColumnWord {
        ColumnWord::new(m, s.iter().copied()).unwrap()
    }

    fn arr(cols: Vec<ColumnWord>) -> ArrayWord {
        ArrayWord::new(cols).unwrap()
    }

    #[test]
    fn distance_examples() {
        let x = arr(vec![col(4, &[0, 1])]);
        assert_eq!(hamming_distance(&x, &x).unwrap(), 0);
        let y = arr(vec![col(4, &[2, 3])]);
        assert_eq!(hamming_distance(&x, &y).unwrap(), 4);
        let a = arr(vec![col(4, &[0, 1]), col(4, &[0, 1])]);
        let b = arr(vec![col(4, &[0, 2]), col(4, &[0, 1])]);
        assert_eq!(hamming_distance(&a, &b).unwrap(), 2);
    }

    #[test]
    fn distance_shape_mismatch() {
        let a = arr(vec![col(4, &[0, 1])]);
        let b = arr(vec![col(4, &[0, 1]), col(4, &[0, 1])]);
        assert!(hamming_distance(&a, &b).is_err());
        let c = arr(vec![col(5, &[0, 1])]);
        assert!(hamming_distance(&a, &c).is_err());
    }

    #[test]
    fn invalid_supports() {
        assert!(ColumnWord::new(4, [0, 4]).is_err());
        assert!(ColumnWord::new(4, [1, 1]).is_err());
        assert!(ArrayWord::new(vec![]).is_err());
        assert!(ArrayWord::new(vec![col(4, &[0]), col(4, &[0, 1])]).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let v: Vec<_> = enumerate_constant_weight(3, 1).unwrap().map(|c| c.support().to_vec()).collect();
        assert_eq!(v, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(enumerate_constant_weight(4, 2).unwrap().count(), 6);
        let v: Vec<_> = enumerate_constant_weight(4, 0).unwrap().collect();
        assert_eq!(v, vec![ColumnWord::zero(4)]);
        assert!(enumerate_constant_weight(2, 3).is_err());
    }

    #[test]
    fn colex_order() {
        let v: Vec<_> = enumerate_constant_weight(4, 2).unwrap().map(|c| c.support().to_vec()).collect();
        assert_eq!(v, vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn enumeration_counts_are_binomial() {
        for m in 0..=9 {
            for w in 0..=m {
                let words: Vec<_> = enumerate_constant_weight(m, w).unwrap().collect();
                assert_eq!(words.len() as u64, binom_u64(m as u64, w as u64).unwrap());
                let mut dedup = words.clone();
                dedup.sort();
                dedup.dedup();
                assert_eq!(dedup.len(), words.len());
                assert!(words.iter().all(|c| c.weight() == w));
            }
        }
    }

    #[test]
    fn rank_unrank_examples() {
        assert_eq!(unrank_usize(4, 2, 0).unwrap().support(), &[0, 1]);
        assert_eq!(unrank_usize(4, 2, 5).unwrap().support(), &[2, 3]);
        assert!(unrank_usize(4, 2, 6).is_err());
        for k in 0..binom_u64(10, 4).unwrap() as usize {
            assert_eq!(rank_usize(&unrank_usize(10, 4, k).unwrap()), k);
        }
    }

    #[test]
    fn rank_matches_enumeration_order() {
        for (i, c) in enumerate_constant_weight(8, 3).unwrap().enumerate() {
            assert_eq!(rank(&c), BigUint::from(i));
            assert_eq!(unrank_usize(8, 3, i).unwrap(), c);
        }
    }

    #[test]
    fn rank_large_space() {
        let c = col(200, &[3, 77, 150, 199]);
        let r = rank(&c);
        assert_eq!(unrank(200, 4, &r).unwrap(), c);
    }

    fn ball_by_scan(center: &ColumnWord, w: usize, r: usize) -> Vec<ColumnWord> {
        let mut v: Vec<_> = enumerate_constant_weight(center.length(), w)
            .unwrap()
            .filter(|c| c.distance(center).unwrap() <= r)
            .collect();
        v.sort();
        v
    }

    #[test]
    fn ball_examples() {
        let c = col(4, &[0, 1]);
        let v: Vec<_> = ball_enumerate(&c, 2, 0).unwrap().collect();
        assert_eq!(v, vec![c.clone()]);

        let mut v: Vec<_> = ball_enumerate(&c, 2, 2).unwrap().map(|x| x.support().to_vec()).collect();
        v.sort();
        assert_eq!(v, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]]);

        let c1 = col(4, &[0]);
        let mut v: Vec<_> = ball_enumerate(&c1, 2, 1).unwrap().map(|x| x.support().to_vec()).collect();
        v.sort();
        assert_eq!(v, vec![vec![0, 1], vec![0, 2], vec![0, 3]]);
    }

    #[test]
    fn ball_matches_scan_exhaustively() {
        for m in 0..=6 {
            for bits in 0u32..(1 << m) {
                let center = ColumnWord::from_bits(&(0..m).map(|p| bits >> p & 1 == 1).collect::<Vec<_>>());
                for w in 0..=m {
                    for r in 0..=m {
                        let mut got: Vec<_> = ball_enumerate(&center, w, r).unwrap().collect();
                        got.sort();
                        let n = got.len();
                        got.dedup();
                        assert_eq!(got.len(), n, "duplicates");
                        assert_eq!(got, ball_by_scan(&center, w, r));
                    }
                }
            }
        }
    }

    #[test]
    fn parity_of_distances() {
        for m in 0..=6 {
            let all: Vec<_> = (0..=m).flat_map(|w| enumerate_constant_weight(m, w).unwrap()).collect();
            for a in &all {
                for b in &all {
                    let d = a.distance(b).unwrap();
                    assert_eq!(d % 2, (a.weight() + b.weight()) % 2);
                }
            }
        }
    }

    #[test]
    fn complement_preserves_distance() {
        for m in 1..=5 {
            for w in 0..=m {
                let cols: Vec<_> = enumerate_constant_weight(m, w).unwrap().collect();
                for n in 1..=2 {
                    let arrays: Vec<ArrayWord> = if n == 1 {
                        cols.iter().map(|c| arr(vec![c.clone()])).collect()
                    } else {
                        cols.iter()
                            .flat_map(|a| cols.iter().map(move |b| arr(vec![a.clone(), b.clone()])))
                            .collect()
                    };
                    let images: Vec<_> = arrays.iter().map(ArrayWord::complement).collect();
                    let mut distinct = images.clone();
                    distinct.sort_by_key(|a| a.to_hex_columns());
                    distinct.dedup();
                    assert_eq!(distinct.len(), images.len());
                    for (x, cx) in arrays.iter().zip(&images) {
                        assert_eq!(cx.w(), m - w);
                        for (y, cy) in arrays.iter().zip(&images) {
                            assert_eq!(x.distance(y).unwrap(), cx.distance(cy).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hex_format() {
        // m = 6, position 0 is the msb of the 6-bit value: 100000b = 0x20
        assert_eq!(col(6, &[0]).to_hex(), "20");
        assert_eq!(col(6, &[5]).to_hex(), "01");
        assert_eq!(col(8, &[0, 7]).to_hex(), "81");
        assert_eq!(col(4, &[0, 1]).to_hex(), "c");
        assert_eq!(ColumnWord::from_hex(6, "20").unwrap(), col(6, &[0]));
        assert!(ColumnWord::from_hex(6, "40").is_err());
        assert!(ColumnWord::from_hex(6, "2").is_err());
        assert!(ColumnWord::from_hex(6, "2g").is_err());
    }

    #[test]
    fn array_json() {
        let a = arr(vec![col(6, &[0, 1, 2]), col(6, &[3, 4, 5])]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"m":6,"n":2,"w":3,"columns":["38","07"]}"#);
        let back: ArrayWord = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<ArrayWord>(r#"{"m":6,"n":2,"w":2,"columns":["38","07"]}"#).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn array(m: usize, n: usize, w: usize) -> impl Strategy<Value = ArrayWord> {
            let k = binom_u64(m as u64, w as u64).unwrap() as usize;
            proptest::collection::vec(0..k, n).prop_map(move |idx| {
                ArrayWord::new(idx.into_iter().map(|i| unrank_usize(m, w, i).unwrap()).collect()).unwrap()
            })
        }

        fn triple() -> impl Strategy<Value = (ArrayWord, ArrayWord, ArrayWord)> {
            (2usize..12, 1usize..5)
                .prop_flat_map(|(m, n)| (Just(m), Just(n), 0..=m))
                .prop_flat_map(|(m, n, w)| (array(m, n, w), array(m, n, w), array(m, n, w)))
        }

        proptest! {
            #[test]
            fn distance_is_a_metric((x, y, z) in triple()) {
                let dxy = x.distance(&y).unwrap();
                prop_assert_eq!(dxy, y.distance(&x).unwrap());
                prop_assert_eq!(dxy == 0, x == y);
                prop_assert!(x.distance(&z).unwrap() <= dxy + y.distance(&z).unwrap());
            }

            #[test]
            fn hex_round_trip(m in 1usize..80, seed in any::<u64>()) {
                let bits: Vec<bool> = (0..m).map(|p| (seed.rotate_left(p as u32 % 64) ^ p as u64) & 1 == 1).collect();
                let c = ColumnWord::from_bits(&bits);
                prop_assert_eq!(c.to_hex().len(), m.div_ceil(4));
                prop_assert_eq!(ColumnWord::from_hex(m, &c.to_hex()).unwrap(), c);
            }
        }
    }
}
