//! Exact counting: binomials, the distance distribution `N(m,n,w,u,d)`, the
//! anticode sizes `β`, `γ`, `α`, and the known values of `A_S(n,s)`.
//!
//! Everything here is exact. Binomials with a negative, non-integer, or
//! too-large lower index are zero; the parity constraints inside the
//! anticode and distance-distribution formulas fall out of that convention.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// `C(n,k)` if it fits in a `u64`.
pub fn binom_u64(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// `C(n,k)` for nonnegative arguments; zero when `k > n`.
pub fn binom_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n,k)` with the zero convention for out-of-range arguments.
pub fn binom(n: i64, k: i64) -> BigUint {
    if n < 0 || k < 0 || k > n {
        BigUint::zero()
    } else {
        binom_big(n as u64, k as u64)
    }
}

/// `C(n,k)` for a rational `k`: zero unless `k` is an integer in `[0, n]`.
pub fn binom_rational(n: i64, k: &Ratio<i64>) -> BigUint {
    if k.is_integer() {
        binom(n, k.to_integer())
    } else {
        BigUint::zero()
    }
}

/// `C(n, k/2)`: zero when `k` is odd.
fn binom_half(n: i64, twice_k: i64) -> BigUint {
    if twice_k.is_odd() {
        BigUint::zero()
    } else {
        binom(n, twice_k / 2)
    }
}

/// Number of weight-`u` words of length `m` at Hamming distance exactly `i`
/// from a fixed weight-`w` word: `C(w, (u+w-i)/2) · C(m-w, (u+i-w)/2)`.
pub fn nu(m: u64, w: u64, u: u64, i: u64) -> BigUint {
    if w > m || u > m {
        return BigUint::zero();
    }
    let (m, w, u, i) = (m as i64, w as i64, u as i64, i as i64);
    binom_half(w, u + w - i) * binom_half(m - w, u + i - w)
}

/// Ahlswede–Khachatrian-type lower bound on the largest anticode in
/// `J(n,w)` with half-diameter `delta`: the best family of `w`-sets meeting a
/// fixed `(w-δ+2i)`-set in at least `w-δ+i` points, counted as
///
/// `max_i Σ_{d=0}^{δ} C(w-δ+2i, i+(d-δ)/2) · C(n-w+δ-2i, (δ+d)/2-i)`.
///
/// Both `w` and its complement `n-w` are tried.
pub fn beta_lower(n: u64, w: u64, delta: u64) -> BigUint {
    if w > n {
        return BigUint::zero();
    }
    let wn = w.min(n - w);
    if delta >= wn {
        return binom_big(n, w);
    }
    let family = |w: u64| -> BigUint {
        if delta > w {
            return BigUint::zero();
        }
        let (n, w, delta) = (n as i64, w as i64, delta as i64);
        (0..=delta)
            .map(|i| {
                (0..=delta)
                    .map(|d| {
                        binom_half(w - delta + 2 * i, 2 * i + d - delta)
                            * binom_half(n - w + delta - 2 * i, delta + d - 2 * i)
                    })
                    .sum::<BigUint>()
            })
            .max()
            .unwrap_or_default()
    };
    family(w).max(family(n - w)).max(BigUint::one())
}

/// Largest `r >= 0` with `2r <= δ` and `r(q-2) < n-δ-1` (the second condition
/// is void for `q = 2`); `0` when no `r` qualifies.
fn gamma_radius(q: &BigUint, n: u64, delta: u64) -> u64 {
    let t = n - delta;
    let two = BigUint::from(2u32);
    let mut r = 0;
    while 2 * (r + 1) <= delta {
        let next = r + 1;
        let ok = *q == two || (q - &two) * next < BigUint::from(t - 1);
        if !ok {
            break;
        }
        r = next;
    }
    r
}

/// Maximum size of an anticode of Hamming diameter `delta` in `[q]^n`
/// (diametric theorem): with `t = n - δ`,
/// `γ = q^{δ-2r} · Σ_{i=0}^{r} C(t+2r, i) (q-1)^i`.
pub fn gamma_exact(q: &BigUint, n: u64, delta: u64) -> Result<BigUint> {
    if *q < BigUint::from(2u32) {
        return Err(Error::param(format!("alphabet size q = {q} must be at least 2")));
    }
    if delta >= n {
        return Ok(q.pow(n as u32));
    }
    let r = gamma_radius(q, n, delta);
    let t = n - delta;
    let qm1 = q - 1u32;
    let ball: BigUint = (0..=r).map(|i| binom_big(t + 2 * r, i) * qm1.pow(i as u32)).sum();
    Ok(q.pow((delta - 2 * r) as u32) * ball)
}

/// `A_S(n_dim, s)` where it is known (`s <= 0`); `None` for `s > 0`.
pub fn spherical_max(n_dim: u64, s: &BigRational) -> Option<BigUint> {
    if n_dim == 0 || s.is_positive() {
        return None;
    }
    if s.is_zero() {
        return Some(BigUint::from(2 * n_dim));
    }
    let threshold = -BigRational::new(BigInt::one(), BigInt::from(n_dim));
    if *s <= threshold {
        let v = (BigRational::one() - s.recip()).floor().to_integer();
        Some(v.to_biguint().unwrap_or_default())
    } else {
        Some(BigUint::from(n_dim + 1))
    }
}

type NKey = (u64, u64, u64); // (m, w, u)

/// Memoized counting functions.
///
/// Entries are inserted only once fully computed; concurrent callers may
/// compute the same entry twice but never observe a partial one.
#[derive(Default)]
pub struct CountTable {
    // (m, w, u) -> distributions for n = 0, 1, 2, ...
    n_dist: RwLock<HashMap<NKey, Vec<Arc<Vec<BigUint>>>>>,
    beta: RwLock<HashMap<(u64, u64, u64), BigUint>>,
    gamma: RwLock<HashMap<(BigUint, u64, u64), BigUint>>,
    alpha: RwLock<HashMap<(u64, u64, u64, u64), BigUint>>,
}

impl CountTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Distribution `d -> N(m,n,w,u,d)` of Hamming distances from a fixed word
    /// of `J(m,w)^n` to all of `J(m,u)^n`, by the convolution
    /// `N(m,a+1,w,u,d) = Σ_e N(m,a,w,u,e) ν(d-e)`.
    pub fn n_distribution(&self, m: u64, n: u64, w: u64, u: u64) -> Arc<Vec<BigUint>> {
        let key = (m, w, u);
        let (start, mut cur) = {
            let map = self.n_dist.read().unwrap();
            match map.get(&key) {
                Some(v) if (v.len() as u64) > n => return v[n as usize].clone(),
                Some(v) => (v.len() as u64 - 1, v.last().unwrap().clone()),
                None => (0, Arc::new(vec![BigUint::one()])),
            }
        };
        let column: Vec<BigUint> = (0..=(w + u).min(m)).map(|i| nu(m, w, u, i)).collect();
        let mut computed = Vec::new();
        for _ in start..n {
            let mut next = vec![BigUint::zero(); cur.len() + column.len() - 1];
            for (e, a) in cur.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
                for (i, b) in column.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
                    next[e + i] += a * b;
                }
            }
            cur = Arc::new(next);
            computed.push(cur.clone());
        }
        let mut map = self.n_dist.write().unwrap();
        let entry = map.entry(key).or_insert_with(|| vec![Arc::new(vec![BigUint::one()])]);
        if entry.len() as u64 == start + 1 {
            entry.extend(computed);
        }
        cur
    }

    /// Number of words of `J(m,u)^n` at Hamming distance `d` from a given word
    /// of `J(m,w)^n`.
    pub fn count_n(&self, m: u64, n: u64, w: u64, u: u64, d: u64) -> BigUint {
        self.n_distribution(m, n, w, u).get(d as usize).cloned().unwrap_or_default()
    }

    pub fn beta_lower(&self, n: u64, w: u64, delta: u64) -> BigUint {
        let key = (n, w, delta);
        if let Some(v) = self.beta.read().unwrap().get(&key) {
            return v.clone();
        }
        let v = beta_lower(n, w, delta);
        self.beta.write().unwrap().entry(key).or_insert(v).clone()
    }

    pub fn gamma(&self, q: &BigUint, n: u64, delta: u64) -> Result<BigUint> {
        let key = (q.clone(), n, delta);
        if let Some(v) = self.gamma.read().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = gamma_exact(q, n, delta)?;
        Ok(self.gamma.write().unwrap().entry(key).or_insert(v).clone())
    }

    /// Lower bound on the largest anticode of half-diameter `delta` in
    /// `J(m,w)^n`, from concatenating an inner `β` anticode of half-diameter
    /// `φ` with an outer `γ` anticode of Hamming diameter `⌊δ/φ⌋`, maximized
    /// over `1 <= φ <= min(δ, w)`.
    pub fn alpha_lower(&self, m: u64, n: u64, w: u64, delta: u64) -> BigUint {
        let key = (m, n, w, delta);
        if let Some(v) = self.alpha.read().unwrap().get(&key) {
            return v.clone();
        }
        let v = self.alpha_uncached(m, n, w, delta);
        self.alpha.write().unwrap().entry(key).or_insert(v).clone()
    }

    fn alpha_uncached(&self, m: u64, n: u64, w: u64, delta: u64) -> BigUint {
        if w > m {
            return BigUint::zero();
        }
        let wn = w.min(m - w);
        if wn == 0 || delta == 0 {
            return BigUint::one();
        }
        if delta >= n * wn {
            return binom_big(m, w).pow(n as u32);
        }
        let two = BigUint::from(2u32);
        (1..=delta.min(wn))
            .filter_map(|phi| {
                let q = self.beta_lower(m, wn, phi);
                (q >= two).then(|| self.gamma(&q, n, delta / phi).expect("q >= 2"))
            })
            .max()
            .unwrap_or_default()
            .max(BigUint::one())
    }
}

/// `⌊x⌋` of a nonnegative rational as a `BigUint`.
pub(crate) fn floor_nonneg(x: &BigRational) -> BigUint {
    x.floor().to_integer().to_biguint().unwrap_or_default()
}

/// `⌈x⌉` of a nonnegative rational as a `BigUint`.
pub(crate) fn ceil_nonneg(x: &BigRational) -> BigUint {
    x.ceil().to_integer().to_biguint().unwrap_or_default()
}

pub(crate) fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
