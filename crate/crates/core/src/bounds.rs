//! Bounds on `A(m,n,w,d)`, the largest constant-weight array code.
//!
//! `B(n,w,d)` and `C(q,n,d)` are evaluated as `A(n,1,w,d)` and `A(q,n,1,d)`,
//! so every relation between the three is a recursion edge of one engine.
//! Each bound is a [`Derivation`]: a rule, its arguments, and the child
//! derivations it consumed. A derivation can be replayed, which recomputes
//! every node from its children and checks the child parameters the rule
//! implies.
//!
//! `d` is half the minimum Hamming distance throughout. For `w = 1` this is
//! the plain Hamming distance of the corresponding q-ary code.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::counting::{binom_big, binom_u64, ceil_nonneg, floor_nonneg, ratio, spherical_max, CountTable};
use crate::oracle;
use crate::words::CodeParams;

pub const DEFAULT_BUDGET: u32 = 4;

/// Largest alphabet the alphabet-reduction and concatenation rules will use.
const ALPHABET_LIMIT: u64 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    Trivial,
    Symmetry,
    Singleton,
    JohnsonII,
    Gilbert,
    Hamming,
    Sandwich,
    PartitionPacking,
    Stacking,
    HighDistance,
    Alphabet,
    BassalygoElias,
    BassalygoLog,
    Spherical,
    Monotonicity,
    QarySingleton,
    Concatenation,
    Oracle,
}

impl RuleId {
    pub fn name(self) -> &'static str {
        match self {
            RuleId::Trivial => "trivial",
            RuleId::Symmetry => "symmetry",
            RuleId::Singleton => "singleton",
            RuleId::JohnsonII => "johnson_ii",
            RuleId::Gilbert => "gilbert",
            RuleId::Hamming => "hamming",
            RuleId::Sandwich => "sandwich",
            RuleId::PartitionPacking => "partition_packing",
            RuleId::Stacking => "stacking",
            RuleId::HighDistance => "high_distance",
            RuleId::Alphabet => "alphabet",
            RuleId::BassalygoElias => "bassalygo_elias",
            RuleId::BassalygoLog => "bassalygo_log",
            RuleId::Spherical => "spherical",
            RuleId::Monotonicity => "monotonicity",
            RuleId::QarySingleton => "qary_singleton",
            RuleId::Concatenation => "concatenation",
            RuleId::Oracle => "oracle",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A rule application with its arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    /// Closed-form value, or the generic `1` / `C(m,w)^n` leaf.
    Trivial,
    /// `A(m,n,w,d) = A(m,n,m-w,d)`.
    Symmetry,
    /// Value inherited from a neighbouring parameter set (larger `d` or
    /// smaller `m`, `n`, `w` for lower bounds; smaller `d` for upper bounds).
    Monotonicity { from: CodeParams },
    /// `A(m,n,w,d) <= A(m,n-1,w,d-w)` for `d > w`.
    Singleton,
    /// Johnson type II with an anticode of the given size in `J(l,v)^{n/l}`.
    JohnsonII { l: u64, v: u64, delta: u64, alpha: BigUint },
    Gilbert,
    /// Sphere packing inside `J(m,u)^n`.
    Hamming { u: u64 },
    Spherical,
    /// `A(q,n,1,d) <= q^{n-d+1}`.
    QarySingleton,
    /// Reed–Solomon over `GF(q)` concatenated with all of `J(m,w)`.
    Concatenation { q: u64 },
    /// `A(m,n,w,d) <= C(C(m,w), n, ⌈d/w⌉)`.
    Alphabet,
    /// `A(m,n,w,d) <= B(mn, nw, d)`.
    SandwichUpper,
    /// Injection of `J(m',w')^{an}` into `J(m,w)^n` by splitting columns.
    SandwichLower { a: u64, m: u64, w: u64 },
    /// `A(m,n,w,d) <= B(m,w,d-(n-1)w)`.
    HighDistance,
    /// Outer q-ary code over `a` blocks per column.
    Stacking { a: u64, additive: bool },
    /// Averaging against `J(m/k, w/k)^{nk}`.
    BassalygoUpper { k: u64 },
    /// Averaging from `J(mk, wk)^{n/k}`.
    BassalygoLower { k: u64 },
    /// Lower bound on `B(M,W,d)` from a chain of column counts
    /// `factor = n_0 > n_1 > ...` with `M = factor·m'`.
    PartitionPacking { factor: u64, chain: Vec<u64> },
    Oracle { cap: u64 },
}

impl Step {
    pub fn rule(&self) -> RuleId {
        match self {
            Step::Trivial => RuleId::Trivial,
            Step::Symmetry => RuleId::Symmetry,
            Step::Monotonicity { .. } => RuleId::Monotonicity,
            Step::Singleton => RuleId::Singleton,
            Step::JohnsonII { .. } => RuleId::JohnsonII,
            Step::Gilbert => RuleId::Gilbert,
            Step::Hamming { .. } => RuleId::Hamming,
            Step::Spherical => RuleId::Spherical,
            Step::QarySingleton => RuleId::QarySingleton,
            Step::Concatenation { .. } => RuleId::Concatenation,
            Step::Alphabet => RuleId::Alphabet,
            Step::SandwichUpper | Step::SandwichLower { .. } => RuleId::Sandwich,
            Step::HighDistance => RuleId::HighDistance,
            Step::Stacking { .. } => RuleId::Stacking,
            Step::BassalygoUpper { .. } | Step::BassalygoLower { .. } => RuleId::BassalygoElias,
            Step::PartitionPacking { .. } => RuleId::PartitionPacking,
            Step::Oracle { .. } => RuleId::Oracle,
        }
    }

    fn args_json(&self) -> Value {
        match self {
            Step::Monotonicity { from } => json!({"from": [from.m, from.n, from.w, from.d]}),
            Step::JohnsonII { l, v, delta, alpha } => {
                json!({"l": l, "v": v, "delta": delta, "alpha": alpha.to_string()})
            }
            Step::Hamming { u } => json!({ "u": u }),
            Step::Concatenation { q } => json!({ "q": q }),
            Step::SandwichLower { a, m, w } => json!({"a": a, "m": m, "w": w}),
            Step::Stacking { a, additive } => json!({"a": a, "additive": additive}),
            Step::BassalygoUpper { k } | Step::BassalygoLower { k } => json!({ "k": k }),
            Step::PartitionPacking { factor, chain } => json!({"factor": factor, "chain": chain}),
            Step::Oracle { cap } => json!({ "cap": cap }),
            _ => json!({}),
        }
    }

    /// Child nodes this step consumes, or `None` when its preconditions fail.
    pub fn children(&self, side: Side, p: &CodeParams) -> Option<Vec<(Side, CodeParams)>> {
        let CodeParams { m, n, w, d } = *p;
        let at = |m, n, w, d| CodeParams { m, n, w, d };
        let kids = match (side, self) {
            (_, Step::Trivial | Step::Gilbert | Step::Hamming { .. }) => vec![],
            (_, Step::Oracle { .. }) => vec![],
            (Side::Upper, Step::Spherical | Step::QarySingleton) => vec![],
            (Side::Lower, Step::Concatenation { .. }) => vec![],
            (_, Step::Symmetry) => {
                if w > m {
                    return None;
                }
                vec![(side, at(m, n, m - w, d))]
            }
            (_, Step::Monotonicity { from }) => {
                let f = *from;
                let ok = match side {
                    Side::Upper => (f.m, f.n, f.w) == (m, n, w) && f.d <= d && f.d >= 1,
                    Side::Lower => {
                        (f.m, f.n, f.w) == (m, n, w) && f.d >= d
                            || (f.m + 1, f.n, f.w, f.d) == (m, n, w, d) && f.w <= f.m
                            || (f.m + 1, f.n, f.w + 1, f.d) == (m, n, w, d) && f.w <= f.m
                            || (f.m, f.n + 1, f.w, f.d) == (m, n, w, d) && f.n >= 1
                    }
                };
                if !ok || f == *p {
                    return None;
                }
                vec![(side, f)]
            }
            (Side::Upper, Step::Singleton) => {
                if d < w + 1 || n < 2 {
                    return None;
                }
                vec![(side, at(m, n - 1, w, d - w))]
            }
            (Side::Upper, Step::JohnsonII { l, v, delta, .. }) => {
                let (l, v, delta) = (*l, *v, *delta);
                if m < 2 || w == 0 || w >= m || l == 0 || n % l != 0 || v > l || delta > d {
                    return None;
                }
                if delta > (n / l) * v.min(l - v) || l * w < v {
                    return None;
                }
                if d > delta {
                    vec![(side, at((m - 1) * l, n / l, l * w - v, d - delta))]
                } else {
                    vec![]
                }
            }
            (Side::Upper, Step::Alphabet) => {
                let q = binom_u64(m, w).filter(|&q| q <= ALPHABET_LIMIT)?;
                if w < 2 || w > m {
                    return None;
                }
                vec![(side, at(q, n, 1, d.div_ceil(w)))]
            }
            (Side::Upper, Step::SandwichUpper) => {
                if n < 2 {
                    return None;
                }
                vec![(side, at(m * n, 1, n * w, d))]
            }
            (Side::Upper, Step::HighDistance) => {
                if n < 2 || d <= (n - 1) * w || d > n * w {
                    return None;
                }
                vec![(side, at(m, 1, w, d - (n - 1) * w))]
            }
            (Side::Upper, Step::BassalygoUpper { k }) => {
                let k = *k;
                if k < 2 || w % k != 0 || m % k != 0 {
                    return None;
                }
                vec![(side, at(m / k, n * k, w / k, d))]
            }
            (Side::Lower, Step::SandwichLower { a, m: m2, w: w2 }) => {
                let (a, m2, w2) = (*a, *m2, *w2);
                if a < 1 || w2 < 1 || a * w2 > w || m2 < w2 || a * m2 + (w - a * w2) > m {
                    return None;
                }
                vec![(side, at(m2, a * n, w2, d))]
            }
            (Side::Lower, Step::Stacking { a, additive }) => {
                let a = *a;
                if a < 2 || m % a != 0 || m / a < w || w == 0 {
                    return None;
                }
                let mut kids = vec![(side, at(a, n, 1, d.div_ceil(w))), (side, at(m / a, n, w, d))];
                if *additive {
                    if w % a != 0 || d * a > n * w * (a - 1) {
                        return None;
                    }
                    kids.push((side, at(m / a, a * n, w / a, d)));
                }
                kids
            }
            (Side::Lower, Step::BassalygoLower { k }) => {
                let k = *k;
                if k < 2 || n % k != 0 {
                    return None;
                }
                vec![(side, at(m * k, n / k, w * k, d))]
            }
            (Side::Lower, Step::PartitionPacking { factor, chain }) => {
                let f = *factor;
                if n != 1 || f < 2 || m % f != 0 || w % f != 0 || d >= w || chain.first() != Some(&f) {
                    return None;
                }
                let m2 = m / f;
                let mut kids = Vec::new();
                for (i, &ni) in chain.iter().enumerate() {
                    if ni == 0 || w % ni != 0 || w > m2 * ni {
                        return None;
                    }
                    if i > 0 && ni * w > (w - d) * chain[i - 1] {
                        return None;
                    }
                    kids.push((side, at(f, 1, ni, d)));
                    kids.push((side, at(m2, ni, w / ni, d)));
                }
                kids
            }
            _ => return None,
        };
        Some(kids)
    }

    /// Value of this step given its children's values.
    pub fn combine(&self, side: Side, p: &CodeParams, kids: &[&BigUint], counts: &CountTable) -> Option<BigUint> {
        let CodeParams { m, n, w, d } = *p;
        let space = || binom_big(m, w).pow(n as u32);
        match (side, self) {
            (_, Step::Trivial) => Some(trivial_value(p).unwrap_or_else(|| match side {
                Side::Lower => BigUint::one(),
                Side::Upper => space(),
            })),
            (_, Step::Symmetry | Step::Monotonicity { .. }) => Some(kids[0].clone()),
            (Side::Upper, Step::Singleton | Step::Alphabet | Step::SandwichUpper | Step::HighDistance) => {
                Some(kids[0].clone())
            }
            (Side::Lower, Step::SandwichLower { .. }) => Some(kids[0].clone()),
            (Side::Upper, Step::JohnsonII { l, v, delta, alpha }) => {
                let (l, v) = (*l, *v);
                if *alpha != counts.alpha_lower(l, n / l, v, *delta) || alpha.is_zero() {
                    return None;
                }
                let inner = match kids.first() {
                    Some(x) => (*x).clone(),
                    None => binom_big((m - 1) * l, l * w - v).pow((n / l) as u32),
                };
                let reps = (n / l) as u32;
                let num = BigUint::from(m).pow(n as u32) * inner;
                let den = alpha * BigUint::from(w).pow(v as u32 * reps) * BigUint::from(m - w).pow((l - v) as u32 * reps);
                Some(num / den)
            }
            (_, Step::Gilbert) if side == Side::Lower => Some(gilbert_lower(p, counts)),
            (_, Step::Hamming { u }) if side == Side::Upper => hamming_term(p, *u, counts),
            (Side::Upper, Step::Spherical) => spherical_upper(p),
            (Side::Upper, Step::QarySingleton) => {
                if w != 1 || d > n {
                    return None;
                }
                Some(BigUint::from(m).pow((n - d + 1) as u32))
            }
            (Side::Lower, Step::Concatenation { q }) => {
                let q = *q;
                if d > n || n > q || !is_prime_power(q) || BigUint::from(q) > binom_big(m, w) {
                    return None;
                }
                Some(BigUint::from(q).pow((n - d + 1) as u32))
            }
            (Side::Upper, Step::BassalygoUpper { k }) => {
                let k = *k;
                let den = binom_big(m / k, w / k).pow((n * k) as u32);
                Some(floor_nonneg(&ratio(space() * kids[0], den)))
            }
            (Side::Lower, Step::BassalygoLower { k }) => {
                let k = *k;
                let den = binom_big(m * k, w * k).pow((n / k) as u32);
                Some(ceil_nonneg(&ratio(space() * kids[0], den)))
            }
            (Side::Lower, Step::Stacking { .. }) => {
                let base = kids[0] * kids[1];
                Some(match kids.get(2) {
                    Some(extra) => base + *extra,
                    None => base,
                })
            }
            (Side::Lower, Step::PartitionPacking { .. }) => {
                Some(kids.chunks(2).map(|pair| pair[0] * pair[1]).sum())
            }
            (_, Step::Oracle { cap }) => {
                let e = oracle::exact_max_code(m as usize, n as usize, w as usize, d as usize, *cap).ok()?;
                Some(e.value)
            }
            _ => None,
        }
    }
}

/// One node of a provenance tree.
#[derive(Debug)]
pub struct Derivation {
    pub side: Side,
    pub params: CodeParams,
    pub value: BigUint,
    pub step: Step,
    pub children: Vec<Arc<Derivation>>,
}

impl Derivation {
    pub fn rule(&self) -> RuleId {
        self.step.rule()
    }

    pub fn to_json(&self) -> Value {
        let (lower, upper) = match self.side {
            Side::Lower => (Value::String(self.value.to_string()), Value::Null),
            Side::Upper => (Value::Null, Value::String(self.value.to_string())),
        };
        json!({
            "m": self.params.m,
            "n": self.params.n,
            "w": self.params.w,
            "d": self.params.d,
            "lower": lower,
            "upper": upper,
            "rule": self.rule().name(),
            "args": self.step.args_json(),
            "children": self.children.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }

    /// Recompute every node from its children; `Err` names the first node
    /// that does not reproduce.
    pub fn replay(&self, counts: &CountTable) -> Result<(), String> {
        let mut seen = HashSet::new();
        self.replay_inner(counts, &mut seen)
    }

    fn replay_inner(&self, counts: &CountTable, seen: &mut HashSet<*const Derivation>) -> Result<(), String> {
        if !seen.insert(self as *const _) {
            return Ok(());
        }
        let here = || format!("{} {:?} at {}", self.rule(), self.side, self.params);
        let expected = self.step.children(self.side, &self.params).ok_or_else(|| format!("{}: not applicable", here()))?;
        let actual: Vec<(Side, CodeParams)> = self.children.iter().map(|c| (c.side, c.params)).collect();
        if expected != actual {
            return Err(format!("{}: children {:?}, expected {:?}", here(), actual, expected));
        }
        let values: Vec<&BigUint> = self.children.iter().map(|c| &c.value).collect();
        match self.step.combine(self.side, &self.params, &values, counts) {
            Some(v) if v == self.value => {}
            other => return Err(format!("{}: recorded {}, recomputed {:?}", here(), self.value, other)),
        }
        self.children.iter().try_for_each(|c| c.replay_inner(counts, seen))
    }

    /// Number of distinct nodes.
    pub fn size(&self) -> usize {
        fn go(d: &Derivation, seen: &mut HashSet<*const Derivation>) {
            if seen.insert(d as *const _) {
                d.children.iter().for_each(|c| go(c, seen));
            }
        }
        let mut seen = HashSet::new();
        go(self, &mut seen);
        seen.len()
    }
}

/// Best known interval for `A(m,n,w,d)` with its two derivations.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub params: CodeParams,
    pub lower: Arc<Derivation>,
    pub upper: Arc<Derivation>,
}

impl BoundReport {
    pub fn lower_value(&self) -> &BigUint {
        &self.lower.value
    }

    pub fn upper_value(&self) -> &BigUint {
        &self.upper.value
    }

    pub fn is_exact(&self) -> bool {
        self.lower.value == self.upper.value
    }

    pub fn to_json(&self) -> Value {
        json!({
            "m": self.params.m,
            "n": self.params.n,
            "w": self.params.w,
            "d": self.params.d,
            "lower": self.lower.value.to_string(),
            "upper": self.upper.value.to_string(),
            "rule": format!("{}/{}", self.lower.rule(), self.upper.rule()),
            "children": [self.lower.to_json(), self.upper.to_json()],
        })
    }

    pub fn replay(&self, counts: &CountTable) -> Result<(), String> {
        self.lower.replay(counts)?;
        self.upper.replay(counts)
    }
}

/// `A` at `d = 1`, `d = nw`, `d > nw` (with `w` replaced by `min(w, m-w)`).
pub fn trivial_value(p: &CodeParams) -> Option<BigUint> {
    let CodeParams { m, n, w, d } = *p;
    if w > m {
        return None;
    }
    let wn = w.min(m - w);
    if wn == 0 || d > n * wn {
        Some(BigUint::one())
    } else if d <= 1 {
        Some(binom_big(m, w).pow(n as u32))
    } else if d == n * wn {
        Some(BigUint::from(m / wn))
    } else {
        None
    }
}

/// `⌈C(m,w)^n / Σ_{i<d} N(m,n,w,w,2i)⌉`.
pub fn gilbert_lower(p: &CodeParams, counts: &CountTable) -> BigUint {
    let CodeParams { m, n, w, d } = *p;
    let dist = counts.n_distribution(m, n, w, w);
    let ball: BigUint = (0..d).filter_map(|i| dist.get(2 * i as usize)).sum();
    ceil_nonneg(&ratio(binom_big(m, w).pow(n as u32), ball))
}

fn hamming_term(p: &CodeParams, u: u64, counts: &CountTable) -> Option<BigUint> {
    let CodeParams { m, n, w, d } = *p;
    if u > m {
        return None;
    }
    let dist = counts.n_distribution(m, n, w, u);
    let ball: BigUint = dist.iter().take(d as usize).sum();
    if ball.is_zero() {
        return None;
    }
    Some(binom_big(m, u).pow(n as u32) / ball)
}

/// Per-column weights `u` for which the packing bound inside `J(m,u)^n` is
/// nontrivial: the radius-`(d-1)` ball must reach that layer.
fn hamming_weights(p: &CodeParams) -> impl Iterator<Item = u64> {
    let reach = (p.d - 1) / p.n;
    p.w.saturating_sub(reach)..=(p.w + reach).min(p.m)
}

/// Hamming bound: min over layers `J(m,u)^n` of `⌊C(m,u)^n / |ball ∩ layer|⌋`,
/// where balls have Hamming radius `d-1`.
pub fn hamming_upper(p: &CodeParams, counts: &CountTable) -> BigUint {
    hamming_weights(p)
        .filter_map(|u| hamming_term(p, u, counts))
        .min()
        .unwrap_or_else(|| binom_big(p.m, p.w).pow(p.n as u32))
}

/// Spherical-code bound `A_S(n(m-1), 1 - d/Δ)` with `Δ = nw(m-w)/m`;
/// `None` when `d < Δ`.
pub fn spherical_upper(p: &CodeParams) -> Option<BigUint> {
    let CodeParams { m, n, w, d } = *p;
    if w == 0 || w >= m {
        return None;
    }
    let s = BigRational::one() - ratio(BigUint::from(d * m), BigUint::from(n * w * (m - w)));
    spherical_max(n * (m - 1), &s)
}

/// Floating-point form of the Bassalygo–Elias lower bound for `2w <= m`:
/// `A >= sqrt(π w n) · 2^{-n(3 + log2 w)/2} · B(mn, nw, d)`.
pub fn bassalygo_log_lower(n: u64, w: u64, b_lower: f64) -> f64 {
    let (n, w) = (n as f64, w as f64);
    (std::f64::consts::PI * w * n).sqrt() * (-(n / 2.0) * (3.0 + w.log2())).exp2() * b_lower
}

fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut r = q;
            while r.is_multiple_of(p) {
                r /= p;
            }
            return r == 1;
        }
        p += 1;
    }
    true
}

/// Largest prime power `q` with `lo <= q <= hi`.
fn largest_prime_power(lo: u64, hi: u64) -> Option<u64> {
    (lo.max(2)..=hi).rev().find(|&q| is_prime_power(q))
}

fn divisors(x: u64) -> Vec<u64> {
    let mut v: Vec<u64> = (1..=x).take_while(|i| i * i <= x).filter(|i| x.is_multiple_of(*i)).flat_map(|i| [i, x / i]).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn normalized(p: &CodeParams) -> (u64, u64, u64, u64) {
    let wn = p.w.min(p.m.saturating_sub(p.w));
    (p.m, p.n, wn, p.d.min(p.n * wn + 1))
}

type ColumnKey = (Side, u64, u64, u64, u32);

/// Memoized bound engine.
pub struct BoundsEngine {
    counts: Arc<CountTable>,
    memo: Mutex<HashMap<ColumnKey, Arc<Vec<Arc<Derivation>>>>>,
    oracle_cap: Option<u64>,
}

impl Default for BoundsEngine {
    fn default() -> Self {
        Self::new()
    }
}

impl BoundsEngine {
    pub fn new() -> Self {
        Self::with_counts(Arc::new(CountTable::new()))
    }

    pub fn with_counts(counts: Arc<CountTable>) -> Self {
        BoundsEngine { counts, memo: Mutex::new(HashMap::new()), oracle_cap: None }
    }

    /// Seed leaves with exact values from the exhaustive search whenever the
    /// universe has at most `cap` words.
    pub fn with_oracle(mut self, cap: u64) -> Self {
        self.oracle_cap = Some(cap);
        self
    }

    pub fn counts(&self) -> &CountTable {
        &self.counts
    }

    fn leaf(side: Side, p: CodeParams, step: Step, value: BigUint) -> Arc<Derivation> {
        Arc::new(Derivation { side, params: p, value, step, children: vec![] })
    }

    /// Bound on `p` (any `w`), at recursion budget `budget`.
    pub fn bound(&self, side: Side, p: CodeParams, budget: u32) -> Arc<Derivation> {
        if let Some(v) = trivial_value(&p) {
            return Self::leaf(side, p, Step::Trivial, v);
        }
        let (m, n, wn, d) = normalized(&p);
        let inner = self.column(side, m, n, wn, budget)[(d - 1) as usize].clone();
        if wn == p.w {
            inner
        } else {
            Arc::new(Derivation { side, params: p, value: inner.value.clone(), step: Step::Symmetry, children: vec![inner] })
        }
    }

    fn column(&self, side: Side, m: u64, n: u64, w: u64, budget: u32) -> Arc<Vec<Arc<Derivation>>> {
        let key = (side, m, n, w, budget);
        if let Some(c) = self.memo.lock().unwrap().get(&key) {
            return c.clone();
        }
        let top = n * w;
        let raw: Vec<Arc<Derivation>> = (1..=top).map(|d| self.raw(side, CodeParams { m, n, w, d }, budget)).collect();
        // monotone closure in d
        let mut closed = raw.clone();
        match side {
            Side::Upper => {
                for i in 1..closed.len() {
                    if closed[i - 1].value < closed[i].value {
                        closed[i] = self.inherit(side, raw[i].params, &closed[i - 1]);
                    }
                }
            }
            Side::Lower => {
                for i in (0..closed.len().saturating_sub(1)).rev() {
                    if closed[i + 1].value > closed[i].value {
                        closed[i] = self.inherit(side, raw[i].params, &closed[i + 1]);
                    }
                }
            }
        }
        let closed = Arc::new(closed);
        self.memo.lock().unwrap().entry(key).or_insert(closed).clone()
    }

    fn inherit(&self, side: Side, p: CodeParams, from: &Arc<Derivation>) -> Arc<Derivation> {
        // chain to the node that actually carries the value
        let source = match &from.step {
            Step::Monotonicity { from: f } if (f.m, f.n, f.w) == (p.m, p.n, p.w) => from.children[0].clone(),
            _ => from.clone(),
        };
        Arc::new(Derivation {
            side,
            params: p,
            value: source.value.clone(),
            step: Step::Monotonicity { from: source.params },
            children: vec![source],
        })
    }

    fn apply(&self, side: Side, p: &CodeParams, step: Step, budget: u32) -> Option<Arc<Derivation>> {
        let kids = step.children(side, p)?;
        if !kids.is_empty() && budget == 0 {
            return None;
        }
        let here = normalized(p);
        if kids.iter().any(|(_, q)| normalized(q) == here) {
            return None;
        }
        let children: Vec<Arc<Derivation>> = kids.iter().map(|&(s, q)| self.bound(s, q, budget - 1)).collect();
        let values: Vec<&BigUint> = children.iter().map(|c| &c.value).collect();
        let value = step.combine(side, p, &values, &self.counts)?;
        Some(Arc::new(Derivation { side, params: *p, value, step, children }))
    }

    fn candidates(&self, side: Side, p: &CodeParams, budget: u32) -> Vec<Step> {
        let CodeParams { m, n, w, d } = *p;
        let mut steps = vec![Step::Trivial];
        match side {
            Side::Upper => {
                steps.extend(hamming_weights(p).map(|u| Step::Hamming { u }));
                steps.push(Step::Spherical);
                steps.push(Step::QarySingleton);
                if budget > 0 {
                    steps.push(Step::Singleton);
                    steps.push(Step::HighDistance);
                    for l in divisors(n).into_iter().filter(|&l| l <= 4) {
                        for v in 0..=l {
                            for delta in 0..=d.min((n / l) * v.min(l - v)) {
                                let alpha = self.counts.alpha_lower(l, n / l, v, delta);
                                steps.push(Step::JohnsonII { l, v, delta, alpha });
                            }
                        }
                    }
                    steps.push(Step::Alphabet);
                    steps.push(Step::SandwichUpper);
                    steps.extend(divisors(w).into_iter().skip(1).map(|k| Step::BassalygoUpper { k }));
                }
            }
            Side::Lower => {
                steps.push(Step::Gilbert);
                if d <= n {
                    let space = binom_u64(m, w).unwrap_or(u64::MAX).min(ALPHABET_LIMIT);
                    if let Some(q) = largest_prime_power(n, space) {
                        steps.push(Step::Concatenation { q });
                    }
                }
                if budget > 0 {
                    for a in 2..=w {
                        for w2 in 1..=w / a {
                            let m2 = (m - w + a * w2) / a;
                            steps.push(Step::SandwichLower { a, m: m2, w: w2 });
                        }
                    }
                    for a in divisors(m).into_iter().filter(|&a| (2..=8).contains(&a)) {
                        steps.push(Step::Stacking { a, additive: false });
                        steps.push(Step::Stacking { a, additive: true });
                    }
                    steps.extend(divisors(n).into_iter().skip(1).map(|k| Step::BassalygoLower { k }));
                    if n == 1 {
                        steps.extend(self.partition_chains(p, budget));
                    }
                    let moves = [(m - 1, n, w, d), (m - 1, n, w.wrapping_sub(1), d), (m, n - 1, w, d)];
                    for (m2, n2, w2, d2) in moves {
                        if m2 >= 1 && n2 >= 1 && w2 >= 1 && w2 <= m2 && w2 != u64::MAX {
                            steps.push(Step::Monotonicity { from: CodeParams { m: m2, n: n2, w: w2, d: d2 } });
                        }
                    }
                }
            }
        }
        if let Some(cap) = self.oracle_cap {
            if binom_big(m, w).pow(n as u32) <= BigUint::from(cap) {
                steps.push(Step::Oracle { cap });
            }
        }
        steps
    }

    /// For `B(M,W,d)`: for each factor `f | gcd(M,W)`, the chain maximizing
    /// the packed sum, chosen by dynamic programming on the divisors of `W`.
    fn partition_chains(&self, p: &CodeParams, budget: u32) -> Vec<Step> {
        let CodeParams { m, w, d, .. } = *p;
        if d >= w || budget == 0 {
            return vec![];
        }
        let mut steps = Vec::new();
        for f in divisors(m.gcd(&w)).into_iter().skip(1) {
            let m2 = m / f;
            let sizes: Vec<u64> = divisors(w).into_iter().filter(|&ni| ni <= f && w <= m2 * ni).collect();
            if sizes.last() != Some(&f) {
                continue;
            }
            let term = |ni: u64| -> BigUint {
                let b = self.bound(Side::Lower, CodeParams { m: f, n: 1, w: ni, d }, budget - 1);
                let a = self.bound(Side::Lower, CodeParams { m: m2, n: ni, w: w / ni, d }, budget - 1);
                &b.value * &a.value
            };
            // best[i]: best sum over chains starting at sizes[i]
            let mut best: Vec<(BigUint, Option<usize>)> = Vec::with_capacity(sizes.len());
            for (i, &ni) in sizes.iter().enumerate() {
                let next = (0..i)
                    .filter(|&j| sizes[j] * w <= (w - d) * ni)
                    .max_by(|&a, &b| best[a].0.cmp(&best[b].0).then(b.cmp(&a)));
                let tail = next.map(|j| best[j].0.clone()).unwrap_or_default();
                best.push((term(ni) + tail, next));
            }
            let mut chain = vec![];
            let mut at = Some(sizes.len() - 1);
            while let Some(i) = at {
                chain.push(sizes[i]);
                at = best[i].1;
            }
            steps.push(Step::PartitionPacking { factor: f, chain });
        }
        steps
    }

    fn raw(&self, side: Side, p: CodeParams, budget: u32) -> Arc<Derivation> {
        let mut best: Option<Arc<Derivation>> = None;
        for step in self.candidates(side, &p, budget) {
            let Some(node) = self.apply(side, &p, step, budget) else { continue };
            let better = match &best {
                None => true,
                Some(b) => match side {
                    Side::Lower => node.value > b.value,
                    Side::Upper => node.value < b.value,
                },
            };
            if better {
                best = Some(node);
            }
        }
        best.expect("the trivial step always applies")
    }

    /// Best interval for `A(m,n,w,d)` within the recursion budget.
    pub fn best_bounds(&self, p: CodeParams, budget: u32) -> BoundReport {
        let lower = self.bound(Side::Lower, p, budget);
        let upper = self.bound(Side::Upper, p, budget);
        debug_assert!(lower.value <= upper.value, "inverted interval at {p}");
        BoundReport { params: p, lower, upper }
    }

    fn rule(&self, side: Side, p: CodeParams, step: Step) -> Option<BigUint> {
        self.apply(side, &p, step, DEFAULT_BUDGET).map(|d| d.value.clone())
    }

    pub fn singleton_upper(&self, p: CodeParams) -> Option<BigUint> {
        self.rule(Side::Upper, p, Step::Singleton)
    }

    pub fn johnson_upper(&self, p: CodeParams, l: u64, v: u64, delta: u64) -> Option<BigUint> {
        if l == 0 || !p.n.is_multiple_of(l) || v > l {
            return None;
        }
        let alpha = self.counts.alpha_lower(l, p.n / l, v, delta);
        let wn = p.w.min(p.m - p.w);
        self.rule(Side::Upper, CodeParams { w: wn, ..p }, Step::JohnsonII { l, v, delta, alpha })
    }

    pub fn high_distance_upper(&self, p: CodeParams) -> Option<BigUint> {
        self.rule(Side::Upper, p, Step::HighDistance)
    }

    pub fn alphabet_upper(&self, p: CodeParams) -> Option<BigUint> {
        if p.w == 1 {
            return Some(self.bound(Side::Upper, p, DEFAULT_BUDGET).value.clone());
        }
        self.rule(Side::Upper, p, Step::Alphabet)
    }

    /// `(lower, upper)` from `C(⌊m/w⌋, nw, d) <= A(m,n,w,d) <= B(mn, nw, d)`
    /// and the column-splitting injections.
    pub fn sandwich_bounds(&self, p: CodeParams) -> (BigUint, BigUint) {
        let b = DEFAULT_BUDGET;
        let CodeParams { m, n, w, d } = p;
        let wn = w.min(m - w);
        let q = CodeParams { m: m / wn, n: n * wn, w: 1, d };
        let mut lower = self.bound(Side::Lower, q, b).value.clone();
        for a in 2..=wn {
            for w2 in 1..=wn / a {
                let step = Step::SandwichLower { a, m: (m - wn + a * w2) / a, w: w2 };
                if let Some(v) = self.rule(Side::Lower, CodeParams { w: wn, ..p }, step) {
                    lower = lower.max(v);
                }
            }
        }
        let upper = self.bound(Side::Upper, CodeParams { m: m * n, n: 1, w: n * w, d }, b).value.clone();
        (lower, upper)
    }

    /// Lower bound on `B(mn, nw, d)` from an explicit chain `n = n_0 > n_1 > ...`.
    pub fn partition_packing_lower_on_b(&self, m: u64, n: u64, w: u64, d: u64, chain: &[u64]) -> crate::Result<BigUint> {
        let total = n * w;
        if chain.first() != Some(&n) {
            return Err(crate::Error::param(format!("chain must start with n = {n}")));
        }
        if n == 1 {
            // a single block: the sum is A(m,1,w,d) itself
            return Ok(self.bound(Side::Lower, CodeParams { m, n: 1, w, d }, DEFAULT_BUDGET).value.clone());
        }
        for (i, &ni) in chain.iter().enumerate() {
            if ni == 0 || !total.is_multiple_of(ni) {
                return Err(crate::Error::param(format!("n_{i} = {ni} does not divide nw = {total}")));
            }
            if total > m * ni {
                return Err(crate::Error::param(format!("n_{i} = {ni} is below nw/m = {total}/{m}")));
            }
            if i > 0 && ni * total > total.saturating_sub(d) * chain[i - 1] {
                return Err(crate::Error::param(format!(
                    "n_{i} = {ni} exceeds (1 - d/(nw))·n_{} = (1 - {d}/{total})·{}",
                    i - 1,
                    chain[i - 1]
                )));
            }
        }
        let p = CodeParams { m: m * n, n: 1, w: total, d };
        let step = Step::PartitionPacking { factor: n, chain: chain.to_vec() };
        self.rule(Side::Lower, p, step)
            .ok_or_else(|| crate::Error::param(format!("partition packing does not apply at {p}")))
    }

    /// Lower bound on `A(am, n, w, d)` by stacking `a` blocks per column.
    pub fn stacking_lower(&self, a: u64, m: u64, n: u64, w: u64, d: u64) -> Option<BigUint> {
        let p = CodeParams { m: a * m, n, w, d };
        if a == 1 {
            return Some(self.bound(Side::Lower, p, DEFAULT_BUDGET).value.clone());
        }
        let plain = self.rule(Side::Lower, p, Step::Stacking { a, additive: false });
        let extra = self.rule(Side::Lower, p, Step::Stacking { a, additive: true });
        plain.into_iter().chain(extra).max()
    }

    /// `(lower, upper)` Bassalygo–Elias: the lower bound transfers from
    /// `B(mn, nw, d)`, the upper from `C(m/w, nw, d)` (needs `w | m`).
    pub fn bassalygo_bounds(&self, p: CodeParams) -> (Option<BigUint>, Option<BigUint>) {
        let lower = if p.n == 1 {
            Some(self.bound(Side::Lower, p, DEFAULT_BUDGET).value.clone())
        } else {
            self.rule(Side::Lower, p, Step::BassalygoLower { k: p.n })
        };
        let upper = if p.w == 1 {
            Some(self.bound(Side::Upper, p, DEFAULT_BUDGET).value.clone())
        } else {
            self.rule(Side::Upper, p, Step::BassalygoUpper { k: p.w })
        };
        (lower, upper)
    }

    /// General transfer: `A(m,n,w,d) >= ⌈C(m,w)^n / C(mk,wk)^{n/k} · A(mk, n/k, wk, d)⌉`.
    pub fn bassalygo_transfer(&self, p: CodeParams, k: u64) -> Option<BigUint> {
        self.rule(Side::Lower, p, Step::BassalygoLower { k })
    }
}


#[cfg(test)]
mod oracle_checks {
    use super::*;
    use crate::oracle::{exact_max_code, DEFAULT_CAP};

    #[test]
    fn brackets_exact_values() {
        let e = BoundsEngine::new();
        for m in 2..=6u64 {
            for n in 1..=2u64 {
                for w in 1..=(m / 2).min(3) {
                    if n == 2 && (m > 5 || w > 2) {
                        continue;
                    }
                    for d in 1..=n * w + 1 {
                        let p = CodeParams { m, n, w, d };
                        let exact = exact_max_code(m as usize, n as usize, w as usize, d as usize, DEFAULT_CAP).unwrap().value;
                        let r = e.best_bounds(p, DEFAULT_BUDGET);
                        assert!(r.lower_value() <= &exact && &exact <= r.upper_value(), "{p}: [{}, {}] vs {exact}", r.lower_value(), r.upper_value());
                        r.replay(e.counts()).unwrap();
                    }
                }
            }
        }
    }
}
