//! Systematic Reed–Solomon codes over GF(2^b) with errors-and-erasures
//! decoding (Berlekamp–Massey, Chien search, Forney).
//!
//! Codewords are evaluations of polynomials of degree below `k` at the
//! points `α^0, .., α^{n-1}`; the message is the first `k` evaluations.
//! Syndromes use the generalized parity check `Σ_i v_i c_i x_i^j = 0`,
//! `0 <= j < n-k`, with column multipliers `v_i = 1 / Π_{l≠i} (x_i - x_l)`.

use std::sync::Arc;

use super::gf::Field;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct RsCode {
    field: Arc<Field>,
    n: usize,
    k: usize,
    points: Vec<u16>,
    multipliers: Vec<u16>,
    // barycentric weights of the first k points
    weights: Vec<u16>,
}

/// A successful outer decode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsDecoded {
    pub message: Vec<u16>,
    pub codeword: Vec<u16>,
    /// Positions corrected outside the erasure set.
    pub errors: Vec<usize>,
}

impl RsCode {
    pub fn new(field: Arc<Field>, n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::param(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
        }
        if n > field.order() {
            return Err(Error::param(format!("length n = {n} exceeds 2^b - 1 = {}", field.order())));
        }
        let points: Vec<u16> = (0..n).map(|i| field.alpha_pow(i)).collect();
        let product_except = |i: usize, upto: usize| {
            (0..upto).filter(|&l| l != i).fold(1u16, |acc, l| field.mul(acc, points[i] ^ points[l]))
        };
        let multipliers = (0..n).map(|i| field.inv(product_except(i, n))).collect();
        let weights = (0..k).map(|i| field.inv(product_except(i, k))).collect();
        Ok(RsCode { field, n, k, points, multipliers, weights })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Minimum distance `n - k + 1`.
    pub fn distance(&self) -> usize {
        self.n - self.k + 1
    }

    pub fn encode(&self, message: &[u16]) -> Result<Vec<u16>> {
        if message.len() != self.k {
            return Err(Error::param(format!("message has {} symbols, expected {}", message.len(), self.k)));
        }
        let f = &*self.field;
        if let Some(&s) = message.iter().find(|&&s| s as usize >= f.size()) {
            return Err(Error::param(format!("symbol {s} outside GF(2^{})", f.bits())));
        }
        let mut word = message.to_vec();
        for j in self.k..self.n {
            let x = self.points[j];
            let node = (0..self.k).fold(1u16, |acc, l| f.mul(acc, x ^ self.points[l]));
            let sum = (0..self.k).fold(0u16, |acc, i| {
                acc ^ f.div(f.mul(message[i], self.weights[i]), x ^ self.points[i])
            });
            word.push(f.mul(node, sum));
        }
        Ok(word)
    }

    fn syndromes(&self, word: &[u16]) -> Vec<u16> {
        let f = &*self.field;
        (0..self.n - self.k)
            .map(|j| {
                (0..self.n).fold(0u16, |acc, i| acc ^ f.mul(f.mul(self.multipliers[i], word[i]), f.pow(self.points[i], j)))
            })
            .collect()
    }

    pub fn is_codeword(&self, word: &[u16]) -> bool {
        word.len() == self.n && self.syndromes(word).iter().all(|&s| s == 0)
    }

    /// Decode `received` with the given erased positions. Succeeds whenever
    /// `2·errors + erasures < n - k + 1`.
    pub fn decode(&self, received: &[u16], erasures: &[usize]) -> Result<RsDecoded> {
        let f = &*self.field;
        if received.len() != self.n {
            return Err(Error::param(format!("received {} symbols, expected {}", received.len(), self.n)));
        }
        let mut erased = vec![false; self.n];
        for &e in erasures {
            if e >= self.n || erased[e] {
                return Err(Error::param(format!("bad erasure position {e}")));
            }
            erased[e] = true;
        }
        let r = self.n - self.k;
        let rho = erasures.len();
        if rho > r {
            return Err(Error::Decode(format!("{rho} erasures exceed the redundancy {r}")));
        }
        // erased symbols are zeroed; their values are recovered as errors
        let word: Vec<u16> = received.iter().enumerate().map(|(i, &s)| if erased[i] { 0 } else { s }).collect();
        let synd = self.syndromes(&word);
        if synd.iter().all(|&s| s == 0) {
            return Ok(self.finish(word, vec![]));
        }

        // erasure locator Γ(x) = Π (1 - X x)
        let mut gamma = vec![1u16];
        for &e in erasures {
            gamma = poly_mul(f, &gamma, &[1, self.points[e]]);
        }

        // Berlekamp–Massey seeded with Γ
        let mut lambda = gamma.clone();
        let mut b = gamma;
        let mut l = rho;
        for step in rho + 1..=r {
            let delta = lambda
                .iter()
                .enumerate()
                .filter(|&(j, _)| j < step)
                .fold(0u16, |acc, (j, &c)| acc ^ f.mul(c, synd[step - 1 - j]));
            let shifted: Vec<u16> = std::iter::once(0).chain(b.iter().copied()).collect();
            if delta == 0 {
                b = shifted;
                continue;
            }
            let next = poly_add(f, &lambda, &poly_scale(f, &shifted, delta));
            if 2 * l < step + rho {
                b = poly_scale(f, &lambda, f.inv(delta));
                l = step + rho - l;
            } else {
                b = shifted;
            }
            lambda = next;
        }
        trim(&mut lambda);
        if lambda.len() - 1 != l {
            return Err(Error::Decode("locator degree mismatch".into()));
        }

        // Chien search over the evaluation points
        let roots: Vec<usize> = (0..self.n).filter(|&i| f.eval(&lambda, f.inv(self.points[i])) == 0).collect();
        if roots.len() != l {
            return Err(Error::Decode(format!("locator of degree {l} has {} roots among the positions", roots.len())));
        }
        if erasures.iter().any(|e| !roots.contains(e)) {
            return Err(Error::Decode("erasure missing from the locator".into()));
        }

        // Forney: Y = X Ω(X^{-1}) / Λ'(X^{-1}), error value e_i = Y / v_i
        let mut omega = poly_mul(f, &synd, &lambda);
        omega.truncate(r);
        let deriv: Vec<u16> = lambda.iter().enumerate().skip(1).map(|(i, &c)| if i % 2 == 1 { c } else { 0 }).collect();
        let mut fixed = word;
        for &i in &roots {
            let xinv = f.inv(self.points[i]);
            let den = f.eval(&deriv, xinv);
            if den == 0 {
                return Err(Error::Decode("repeated locator root".into()));
            }
            let y = f.div(f.mul(self.points[i], f.eval(&omega, xinv)), den);
            fixed[i] ^= f.div(y, self.multipliers[i]);
        }
        if !self.is_codeword(&fixed) {
            return Err(Error::Decode("correction did not produce a codeword".into()));
        }
        let errors = roots.into_iter().filter(|&i| !erased[i] && fixed[i] != received[i]).collect::<Vec<_>>();
        if 2 * errors.len() + rho > r {
            return Err(Error::Decode("pattern beyond the decoding radius".into()));
        }
        Ok(self.finish(fixed, errors))
    }

    fn finish(&self, codeword: Vec<u16>, errors: Vec<usize>) -> RsDecoded {
        RsDecoded { message: codeword[..self.k].to_vec(), codeword, errors }
    }
}

fn trim(p: &mut Vec<u16>) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

fn poly_add(_f: &Field, a: &[u16], b: &[u16]) -> Vec<u16> {
    let mut out = vec![0u16; a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] ^= c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] ^= c;
    }
    out
}

fn poly_scale(f: &Field, a: &[u16], s: u16) -> Vec<u16> {
    a.iter().map(|&c| f.mul(c, s)).collect()
}

fn poly_mul(f: &Field, a: &[u16], b: &[u16]) -> Vec<u16> {
    let mut out = vec![0u16; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] ^= f.mul(x, y);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn code(b: u32, n: usize, k: usize) -> RsCode {
        RsCode::new(Arc::new(Field::new(b).unwrap()), n, k).unwrap()
    }

    #[test]
    fn parameter_checks() {
        let f = Arc::new(Field::new(2).unwrap());
        assert!(RsCode::new(f.clone(), 3, 0).is_err());
        assert!(RsCode::new(f.clone(), 3, 4).is_err());
        assert!(RsCode::new(f, 4, 1).is_err());
    }

    #[test]
    fn encoding_is_systematic_and_valid() {
        let c = code(4, 15, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let msg: Vec<u16> = (0..9).map(|_| rng.gen_range(0..16)).collect();
            let word = c.encode(&msg).unwrap();
            assert_eq!(&word[..9], &msg[..]);
            assert!(c.is_codeword(&word));
            assert_eq!(c.decode(&word, &[]).unwrap().message, msg);
        }
    }

    #[test]
    fn identity_and_repetition() {
        let c = code(2, 3, 3);
        assert_eq!(c.encode(&[1, 2, 3]).unwrap(), vec![1, 2, 3]);
        let c = code(2, 3, 1);
        for s in 0..4 {
            assert_eq!(c.encode(&[s]).unwrap(), vec![s; 3]);
        }
    }

    #[test]
    fn minimum_distance_exhaustive() {
        let c = code(3, 7, 3);
        let words: Vec<Vec<u16>> = (0..512u16).map(|v| c.encode(&[v & 7, v >> 3 & 7, v >> 6]).unwrap()).collect();
        for (i, a) in words.iter().enumerate() {
            for b in &words[i + 1..] {
                assert!(a.iter().zip(b).filter(|(x, y)| x != y).count() >= c.distance());
            }
        }
    }

    #[test]
    fn single_errors_gf4_length3() {
        let c = code(2, 3, 1);
        for s in 0..4 {
            let word = c.encode(&[s]).unwrap();
            for pos in 0..3 {
                for e in 1..4 {
                    let mut r = word.clone();
                    r[pos] ^= e;
                    let out = c.decode(&r, &[]).unwrap();
                    assert_eq!(out.message, vec![s]);
                    assert_eq!(out.errors, vec![pos]);
                }
            }
        }
    }

    #[test]
    fn double_erasures_gf4_length3() {
        let c = code(2, 3, 1);
        for s in 0..4 {
            let word = c.encode(&[s]).unwrap();
            for er in [[0, 1], [0, 2], [1, 2]] {
                for junk in 0..4 {
                    let mut r = word.clone();
                    r[er[0]] = junk;
                    r[er[1]] = 3 - junk;
                    assert_eq!(c.decode(&r, &er).unwrap().message, vec![s]);
                }
            }
        }
    }

    #[test]
    fn random_patterns_within_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (b, n, k) in [(4, 15, 7), (8, 40, 20), (5, 31, 11), (3, 7, 2)] {
            let c = code(b, n, k);
            let q = 1u32 << b;
            let r = n - k;
            for _ in 0..200 {
                let msg: Vec<u16> = (0..k).map(|_| rng.gen_range(0..q) as u16).collect();
                let word = c.encode(&msg).unwrap();
                let rho = rng.gen_range(0..=r);
                let t = (r - rho) / 2;
                let pos = sample(&mut rng, n, rho + t).into_vec();
                let mut recv = word.clone();
                for &p in &pos {
                    recv[p] ^= rng.gen_range(1..q) as u16;
                }
                let erasures = &pos[..rho];
                let out = c.decode(&recv, erasures).unwrap();
                assert_eq!(out.message, msg);
                assert_eq!(out.codeword, word);
            }
        }
    }

    #[test]
    fn beyond_radius_never_panics() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = code(4, 15, 5);
        for _ in 0..500 {
            let recv: Vec<u16> = (0..15).map(|_| rng.gen_range(0..16)).collect();
            if let Ok(out) = c.decode(&recv, &[]) {
                assert!(c.is_codeword(&out.codeword));
                let dist = out.codeword.iter().zip(&recv).filter(|(a, b)| a != b).count();
                assert!(2 * dist <= 10);
            }
        }
    }
}
