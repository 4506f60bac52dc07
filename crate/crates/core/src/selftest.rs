//! Built-in acceptance checks. Each check is exhaustive or seeded, so a
//! report is reproducible.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{spherical_upper, trivial_value, BoundsEngine, Side, DEFAULT_BUDGET};
use crate::channel::{simulate_with_threads, ChannelSpec};
use crate::codec::{build_inner_lexicode, ConcatenatedCode};
use crate::counting::{beta_lower, binom_big, gamma_exact, CountTable};
use crate::oracle::{exact_gamma, exact_max_anticode, exact_max_code, DEFAULT_CAP};
use crate::words::{enumerate_constant_weight, ArrayWord, CodeParams, ColumnWord, Subsets};

const SEED: u64 = 0x5eed;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    pub checks: u64,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    #[serde(serialize_with = "as_secs")]
    pub elapsed: Duration,
}

fn as_secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {} ({} checks, {:.2}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.checks,
            self.elapsed.as_secs_f64()
        )?;
        for n in &self.notes {
            write!(f, "\n    note: {n}")?;
        }
        for e in self.failures.iter().take(10) {
            write!(f, "\n    fail: {e}")?;
        }
        if self.failures.len() > 10 {
            write!(f, "\n    ... {} more failures", self.failures.len() - 10)?;
        }
        Ok(())
    }
}

struct Tally {
    checks: u64,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { checks: 0, failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self, id: u32, title: &'static str, start: Instant) -> CriterionReport {
        CriterionReport {
            id,
            title,
            passed: self.failures.is_empty() && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            notes: self.notes,
            elapsed: start.elapsed(),
        }
    }
}

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

fn cp(m: u64, n: u64, w: u64, d: u64) -> CodeParams {
    CodeParams { m, n, w, d }
}

fn oracle_code(p: &CodeParams) -> Option<BigUint> {
    exact_max_code(p.m as usize, p.n as usize, p.w as usize, p.d as usize, DEFAULT_CAP).ok().map(|e| e.value)
}

/// Closed-form values at `d = 1`, `d = nw` and `d = nw + 1`.
pub fn criterion_1(engine: &BoundsEngine) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    for m in 1..=6u64 {
        for n in 1..=2u64 {
            for w in 1..=m.min(3) {
                let nw = n * w;
                for (d, expected) in [(1, binom_big(m, w).pow(n as u32)), (nw, big(m / w)), (nw + 1, big(1))] {
                    let p = cp(m, n, w, d);
                    let r = engine.best_bounds(p, DEFAULT_BUDGET);
                    t.check(r.lower_value() == &expected && r.upper_value() == &expected, || {
                        format!("{p}: engine [{}, {}], expected {expected}", r.lower_value(), r.upper_value())
                    });
                    t.check(trivial_value(&p).as_ref() == Some(&expected), || format!("{p}: trivial value"));
                    if let Some(exact) = oracle_code(&p) {
                        t.check(exact == expected, || format!("{p}: oracle {exact}, expected {expected}"));
                    }
                }
            }
        }
    }
    t.finish(1, "closed-form values at d = 1, nw, nw+1", start)
}

/// Engine intervals bracket the exact value.
pub fn criterion_2(engine: &BoundsEngine) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    for m in 1..=5u64 {
        for n in 1..=2u64 {
            for w in 1..=m.min(2) {
                for d in 1..=n * w + 1 {
                    let p = cp(m, n, w, d);
                    let r = engine.best_bounds(p, DEFAULT_BUDGET);
                    let Some(exact) = oracle_code(&p) else {
                        t.check(false, || format!("{p}: oracle refused"));
                        continue;
                    };
                    t.check(r.lower_value() <= &exact && &exact <= r.upper_value(), || {
                        format!("{p}: [{}, {}] misses {exact}", r.lower_value(), r.upper_value())
                    });
                    t.check(r.replay(engine.counts()).is_ok(), || format!("{p}: derivation does not replay"));
                }
            }
        }
    }
    for (p, v) in [(cp(4, 1, 2, 2), 2u64), (cp(4, 2, 2, 1), 36)] {
        let r = engine.best_bounds(p, DEFAULT_BUDGET);
        t.check(r.is_exact() && r.lower_value() == &big(v), || {
            format!("{p}: [{}, {}], expected exactly {v}", r.lower_value(), r.upper_value())
        });
    }
    t.finish(2, "bounds bracket the exact maximum", start)
}

fn count_by_enumeration(m: usize, n: usize, w: usize, u: usize) -> Vec<u64> {
    let mut hist = vec![0u64; 2 * m * n + 1];
    let (Some(center), Ok(layer)) = (enumerate_constant_weight(m, w).ok().and_then(|mut i| i.next()), enumerate_constant_weight(m, u))
    else {
        return hist;
    };
    let layer: Vec<ColumnWord> = layer.collect();
    if layer.is_empty() {
        return hist;
    }
    let mut idx = vec![0usize; n];
    loop {
        let d: usize = idx.iter().map(|&i| layer[i].distance_unchecked(&center)).sum();
        hist[d] += 1;
        let Some(j) = (0..n).find(|&j| idx[j] + 1 < layer.len()) else { break };
        idx[j] += 1;
        idx[..j].iter_mut().for_each(|x| *x = 0);
    }
    hist
}

/// Distance distributions against enumeration, and their totals.
pub fn criterion_3() -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let counts = CountTable::new();
    for m in 1..=5usize {
        for n in 1..=2usize {
            for w in 0..=m {
                for u in 0..=m {
                    for (d, &h) in count_by_enumeration(m, n, w, u).iter().enumerate() {
                        let got = counts.count_n(m as u64, n as u64, w as u64, u as u64, d as u64);
                        t.check(got == big(h), || format!("N({m},{n},{w},{u},{d}) = {got}, enumeration {h}"));
                    }
                }
            }
        }
    }
    for m in 0..=6u64 {
        for n in 1..=3u64 {
            for w in 0..=m {
                for u in 0..=m {
                    let total: BigUint = (0..=2 * m * n).map(|d| counts.count_n(m, n, w, u, d)).sum();
                    let expected = binom_big(m, u).pow(n as u32);
                    t.check(total == expected, || format!("sum_d N({m},{n},{w},{u},d) = {total}, expected {expected}"));
                }
            }
        }
    }
    t.finish(3, "distance counts match enumeration", start)
}

/// Maximum anticodes in `[q]^n` against the oracle and the binary ball formula.
pub fn criterion_4() -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    for q in 2..=3usize {
        for n in 1..=3usize {
            for delta in 0..=n {
                let formula = gamma_exact(&big(q as u64), n as u64, delta as u64);
                let exact = exact_gamma(q, n, delta, DEFAULT_CAP).map(|e| e.value);
                t.check(matches!((&formula, &exact), (Ok(a), Ok(b)) if a == b), || {
                    format!("gamma({q},{n},{delta}): formula {formula:?}, oracle {exact:?}")
                });
            }
        }
    }
    for n in 1..=8u64 {
        for half in 0..=n / 2 {
            let got = gamma_exact(&big(2), n, 2 * half).ok();
            let expected = if 2 * half < n {
                (0..=half).map(|i| binom_big(n, i)).sum()
            } else {
                big(2).pow(n as u32)
            };
            t.check(got.as_ref() == Some(&expected), || format!("gamma(2,{n},{}) = {got:?}, expected {expected}", 2 * half));
        }
    }
    t.notes.push("binary ball formula checked for 2t < n; at 2t = n the whole space 2^n is the answer".into());
    t.finish(4, "anticodes in the Hamming space", start)
}

/// The lower bound on constant-weight anticodes never exceeds the exact value.
pub fn criterion_5() -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let mut equal = Vec::new();
    for n in 1..=6u64 {
        for w in 1..=n.min(3) {
            for delta in 0..=w {
                let lower = beta_lower(n, w, delta);
                match exact_max_anticode(n as usize, 1, w as usize, delta as usize, DEFAULT_CAP) {
                    Ok(e) => {
                        t.check(lower <= e.value, || format!("beta({n},{w},{delta}) = {lower} > exact {}", e.value));
                        if lower == e.value && delta > 0 && delta < w {
                            equal.push(format!("({n},{w},{delta})->{lower}"));
                        }
                    }
                    Err(e) => t.check(false, || format!("beta({n},{w},{delta}): oracle {e}")),
                }
            }
        }
    }
    t.check(beta_lower(4, 2, 1) == big(3) && equal.iter().any(|s| s == "(4,2,1)->3"), || "beta(4,2,1) is not 3".into());
    t.notes.push(format!("tight at {}", equal.join(" ")));
    t.finish(5, "anticode lower bound is sound", start)
}

fn desk_code() -> ConcatenatedCode {
    ConcatenatedCode::new(6, 3, 2, 3, 1).expect("the (6,3,2) inner code carries GF(4)")
}

/// Minimum distances of the desk-scale inner and concatenated codes.
pub fn criterion_6() -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    match build_inner_lexicode(6, 3, 2) {
        Ok(inner) => {
            let words = inner.codewords();
            for (i, a) in words.iter().enumerate() {
                for b in &words[i + 1..] {
                    let d = a.distance_unchecked(b);
                    t.check(d >= 4, || format!("inner words {} {} at distance {d}", a.to_hex(), b.to_hex()));
                }
            }
            t.notes.push(format!("lexicode has {} words, {} used", inner.lexicode_size(), inner.len()));
        }
        Err(e) => t.check(false, || format!("inner code: {e}")),
    }
    let code = desk_code();
    let words: Vec<ArrayWord> = (0..4).map(|s| code.encode(&[s]).expect("symbol in range")).collect();
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            let d = a.distance(b).expect("same shape");
            t.check(d >= 2 * code.designed_half_distance(), || format!("codewords at distance {d}"));
        }
    }
    t.finish(6, "inner and concatenated minimum distances", start)
}

fn flip(word: &ArrayWord, positions: &[usize]) -> Vec<ColumnWord> {
    let m = word.m();
    let mut cols = word.columns().to_vec();
    for &p in positions {
        cols[p / m] = cols[p / m].with_flipped(p % m).expect("position in range");
    }
    cols
}

/// Every pattern of up to three flips, and random ones of weight four and five.
pub fn criterion_7() -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let code = desk_code();
    let bits = code.m() * code.n();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut wrong, mut failed) = (0u64, 0u64);
    for s in 0..4u16 {
        let word = code.encode(&[s]).expect("symbol in range");
        let patterns = (0..=3)
            .flat_map(|k| Subsets::new(bits, k))
            .chain([4, 5].into_iter().flat_map(|k| (0..1000).map(move |_| k)).map(|k| sample(&mut rng, bits, k).into_vec()));
        for pos in patterns {
            let out = code.decode(&flip(&word, &pos)).expect("well-formed input");
            match &out.message {
                Some(msg) if msg == &[s] && !out.beyond_guarantee => t.check(true, String::new),
                Some(_) => {
                    wrong += 1;
                    t.check(false, || format!("symbol {s}, flips {pos:?}: wrong decode"));
                }
                None => {
                    failed += 1;
                    t.check(false, || format!("symbol {s}, flips {pos:?}: decoding failed"));
                }
            }
        }
    }
    t.notes.push(format!("{} patterns, {wrong} wrong, {failed} failed", t.checks));
    t.finish(7, "decoding within the guarantee", start)
}

/// Channel simulation within the guarantee, on 1 and 8 worker threads.
pub fn criterion_8() -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let code = desk_code();
    let trials = 10_000;
    for losses in 0..=5 {
        for injections in 0..=5 - losses {
            let spec = ChannelSpec::new(losses, injections, SEED);
            let one = simulate_with_threads(&code, &spec, trials, 1);
            let eight = simulate_with_threads(&code, &spec, trials, 8);
            match (one, eight) {
                (Ok(a), Ok(b)) => {
                    t.check(a.success == trials && a.success_rate == 1.0 && a.wrong == 0, || {
                        format!("L={losses} I={injections}: {} successes, {} wrong", a.success, a.wrong)
                    });
                    let same = serde_json::to_string(&a).ok() == serde_json::to_string(&b).ok();
                    t.check(same, || format!("L={losses} I={injections}: statistics depend on thread count"));
                }
                (a, b) => t.check(false, || format!("L={losses} I={injections}: {:?} {:?}", a.err(), b.err())),
            }
        }
    }
    t.finish(8, "channel simulation within the guarantee", start)
}

/// Spherical-code reduction at and beyond `d = Δ`.
pub fn criterion_9() -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let p = cp(4, 1, 2, 2);
    t.check(spherical_upper(&p) == Some(big(2)), || format!("spherical bound at {p}: {:?}", spherical_upper(&p)));
    for (m, n, w) in [(4u64, 1u64, 2u64), (4, 2, 2), (4, 3, 2), (6, 2, 3), (8, 1, 4)] {
        let delta = n * w * (m - w) / m;
        let p = cp(m, n, w, delta);
        let expected = big(2 * n * (m - 1));
        let got = spherical_upper(&p);
        t.check(got.as_ref() == Some(&expected), || format!("{p}: spherical bound {got:?}, expected {expected}"));
        match oracle_code(&p) {
            Some(exact) => t.check(exact <= expected, || format!("{p}: exact {exact} above {expected}")),
            None => t.check(false, || format!("{p}: oracle refused")),
        }
    }
    t.finish(9, "spherical-code reduction", start)
}

fn chains(n: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![n]];
    let mut i = 0;
    while i < out.len() {
        let last = *out[i].last().expect("chains are non-empty");
        for next in 1..last {
            let mut c = out[i].clone();
            c.push(next);
            out.push(c);
        }
        i += 1;
    }
    out
}

/// Bassalygo–Elias transfers and partition packings against exact values.
pub fn criterion_10(engine: &BoundsEngine) -> CriterionReport {
    let start = Instant::now();
    let mut t = Tally::new();
    let (mut transfers, mut packings) = (0, 0);
    for m in 1..=5u64 {
        for n in 1..=2u64 {
            for w in 1..=m.min(2) {
                for d in 1..=n * w + 1 {
                    let p = cp(m, n, w, d);
                    let Some(exact) = oracle_code(&p) else {
                        t.check(false, || format!("{p}: oracle refused"));
                        continue;
                    };
                    let (lower, upper) = engine.bassalygo_bounds(p);
                    let transfer = (2..=n).filter(|k| n % k == 0).filter_map(|k| engine.bassalygo_transfer(p, k));
                    for v in lower.into_iter().chain(transfer) {
                        transfers += 1;
                        t.check(v <= exact, || format!("{p}: transferred lower bound {v} above exact {exact}"));
                    }
                    if let Some(v) = upper {
                        t.check(v >= exact, || format!("{p}: transferred upper bound {v} below exact {exact}"));
                    }
                    let b = cp(m * n, 1, n * w, d);
                    let b_upper = engine.bound(Side::Upper, b, DEFAULT_BUDGET).value.clone();
                    // the oracle is only a cheap extra here; large B instances are hard cliques
                    let b_exact = if binom_big(m * n, n * w) <= big(100) { oracle_code(&b) } else { None };
                    for chain in chains(n) {
                        if let Ok(v) = engine.partition_packing_lower_on_b(m, n, w, d, &chain) {
                            packings += 1;
                            t.check(v <= b_upper, || format!("{b} chain {chain:?}: {v} above upper bound {b_upper}"));
                            if let Some(e) = &b_exact {
                                t.check(&v <= e, || format!("{b} chain {chain:?}: {v} above exact {e}"));
                            }
                        }
                    }
                }
            }
        }
    }
    let worked = engine.partition_packing_lower_on_b(4, 2, 1, 1, &[2, 1]);
    t.check(matches!(&worked, Ok(v) if *v == big(28) && *v == binom_big(8, 2)), || format!("B(8,2,1) packing gave {worked:?}"));
    t.notes.push(format!("{transfers} transferred lower bounds, {packings} packings"));
    t.check(transfers > 0 && packings > 0, || "no branch applied".into());
    t.finish(10, "transfer bounds and partition packings", start)
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionReport> {
    let engine = BoundsEngine::new();
    vec![
        criterion_1(&engine),
        criterion_2(&engine),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(&engine),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chains_are_decreasing() {
        assert_eq!(chains(3), vec![vec![3], vec![3, 1], vec![3, 2], vec![3, 2, 1]]);
    }

    #[test]
    fn enumeration_helper() {
        assert_eq!(count_by_enumeration(4, 1, 2, 2), vec![1, 0, 4, 0, 1, 0, 0, 0, 0]);
        assert_eq!(count_by_enumeration(3, 2, 1, 1).iter().sum::<u64>(), 9);
    }
}
