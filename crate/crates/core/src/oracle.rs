//! Exact maxima on tiny instances by exhaustive clique search.
//!
//! The universe `J(m,w)^n` is materialized in colex mixed-radix order
//! (column 0 most significant) and turned into a threshold graph; a code is
//! a clique of the "far apart" graph and an anticode a clique of the "close"
//! graph. Results are deterministic: the size is the clique number and the
//! witness is the lexicographically least maximum clique in vertex order.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::counting::binom_big;
use crate::words::{enumerate_constant_weight, ArrayWord, ColumnWord};
use crate::{Error, Result};

pub const DEFAULT_CAP: u64 = 5000;

/// Undirected graph on `0..len` with bitset adjacency rows.
#[derive(Clone, Debug)]
pub struct Graph {
    len: usize,
    words: usize,
    adj: Vec<Vec<u64>>,
}

type Bits = Vec<u64>;

fn bit_test(b: &[u64], i: usize) -> bool {
    b[i / 64] >> (i % 64) & 1 == 1
}

fn bit_set(b: &mut [u64], i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn bit_clear(b: &mut [u64], i: usize) {
    b[i / 64] &= !(1 << (i % 64));
}

fn bit_count(b: &[u64]) -> usize {
    b.iter().map(|x| x.count_ones() as usize).sum()
}

fn bit_first(b: &[u64]) -> Option<usize> {
    b.iter().enumerate().find(|(_, &x)| x != 0).map(|(i, x)| i * 64 + x.trailing_zeros() as usize)
}

fn bit_and(a: &[u64], b: &[u64]) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bit_iter(b: &[u64]) -> impl Iterator<Item = usize> + '_ {
    b.iter().enumerate().flat_map(|(i, &x)| {
        let mut x = x;
        std::iter::from_fn(move || {
            if x == 0 {
                return None;
            }
            let t = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(i * 64 + t)
        })
    })
}

impl Graph {
    pub fn new(len: usize) -> Self {
        let words = len.div_ceil(64).max(1);
        Graph { len, words, adj: vec![vec![0; words]; len] }
    }

    /// Graph with an edge `{i,j}` (i ≠ j) whenever `edge(i,j)` holds.
    pub fn from_predicate(len: usize, edge: impl Fn(usize, usize) -> bool + Sync) -> Self {
        let words = len.div_ceil(64).max(1);
        let adj = (0..len)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![0u64; words];
                for j in (0..len).filter(|&j| j != i && edge(i, j)) {
                    bit_set(&mut row, j);
                }
                row
            })
            .collect();
        Graph { len, words, adj }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        if i != j {
            bit_set(&mut self.adj[i], j);
            bit_set(&mut self.adj[j], i);
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        bit_test(&self.adj[i], j)
    }

    /// Relabel vertex `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::new(self.len);
        for i in 0..self.len {
            for j in bit_iter(&self.adj[i]) {
                bit_set(&mut g.adj[perm[i]], perm[j]);
            }
        }
        g
    }

    pub fn is_clique(&self, vs: &[usize]) -> bool {
        vs.iter().enumerate().all(|(a, &i)| vs[a + 1..].iter().all(|&j| i != j && self.has_edge(i, j)))
    }

    fn full(&self) -> Bits {
        let mut b = vec![0u64; self.words];
        for i in 0..self.len {
            bit_set(&mut b, i);
        }
        b
    }

    /// Greedy sequential coloring of `p`: vertices grouped by color class,
    /// with the running color number of each.
    fn color(&self, p: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let mut uncolored = p.to_vec();
        let mut order = Vec::new();
        let mut colors = Vec::new();
        let mut k = 0;
        while bit_first(&uncolored).is_some() {
            k += 1;
            let mut q = uncolored.clone();
            while let Some(v) = bit_first(&q) {
                bit_clear(&mut uncolored, v);
                bit_clear(&mut q, v);
                for (x, a) in q.iter_mut().zip(&self.adj[v]) {
                    *x &= !a;
                }
                order.push(v);
                colors.push(k);
            }
        }
        (order, colors)
    }

    fn greedy_clique(&self) -> usize {
        let mut p = self.full();
        let mut size = 0;
        while let Some(v) = bit_iter(&p).max_by_key(|&v| (bit_count(&bit_and(&p, &self.adj[v])), std::cmp::Reverse(v))) {
            size += 1;
            p = bit_and(&p, &self.adj[v]);
        }
        size
    }

    fn expand(&self, size: usize, p: Bits, best: &AtomicUsize) {
        let (order, colors) = self.color(&p);
        let mut p = p;
        for idx in (0..order.len()).rev() {
            if size + colors[idx] <= best.load(Ordering::Relaxed) {
                return;
            }
            let v = order[idx];
            let np = bit_and(&p, &self.adj[v]);
            if bit_first(&np).is_none() {
                best.fetch_max(size + 1, Ordering::Relaxed);
            } else {
                self.expand(size + 1, np, best);
            }
            bit_clear(&mut p, v);
        }
    }

    /// Clique number by branch and bound with a greedy-coloring bound,
    /// branching in parallel over the top-level vertices.
    pub fn clique_number(&self) -> usize {
        if self.len == 0 {
            return 0;
        }
        let best = AtomicUsize::new(self.greedy_clique());
        (0..self.len).into_par_iter().for_each(|v| {
            // cliques whose least vertex is v
            let mut p = self.adj[v].clone();
            for u in 0..=v {
                bit_clear(&mut p, u);
            }
            if bit_count(&p) < best.load(Ordering::Relaxed) {
                return;
            }
            if bit_first(&p).is_none() {
                best.fetch_max(1, Ordering::Relaxed);
            } else {
                self.expand(1, p, &best);
            }
        });
        best.into_inner()
    }

    fn first_clique(&self, clique: &mut Vec<usize>, p: Bits, target: usize) -> bool {
        if clique.len() == target {
            return true;
        }
        if clique.len() + bit_count(&p) < target {
            return false;
        }
        let (_, colors) = self.color(&p);
        if clique.len() + colors.last().copied().unwrap_or(0) < target {
            return false;
        }
        let mut p = p;
        while let Some(v) = bit_first(&p) {
            if clique.len() + bit_count(&p) < target {
                return false;
            }
            clique.push(v);
            if self.first_clique(clique, bit_and(&p, &self.adj[v]), target) {
                return true;
            }
            clique.pop();
            bit_clear(&mut p, v);
        }
        false
    }

    /// The lexicographically least maximum clique (sorted vertex list).
    pub fn max_clique(&self) -> Vec<usize> {
        let omega = self.clique_number();
        let mut clique = Vec::new();
        if omega > 0 {
            let found = self.first_clique(&mut clique, self.full(), omega);
            debug_assert!(found);
        }
        clique
    }

    /// Independent reference search: ordered enumeration with only the
    /// trivial `|C| + |P|` bound. Meant for graphs of a few dozen vertices.
    pub fn max_clique_plain(&self) -> Vec<usize> {
        fn go(g: &Graph, clique: &mut Vec<usize>, cand: &[usize], best: &mut Vec<usize>) {
            if clique.len() > best.len() {
                *best = clique.clone();
            }
            for (i, &v) in cand.iter().enumerate() {
                if clique.len() + cand.len() - i <= best.len() {
                    return;
                }
                let next: Vec<usize> = cand[i + 1..].iter().copied().filter(|&u| g.has_edge(v, u)).collect();
                clique.push(v);
                go(g, clique, &next, best);
                clique.pop();
            }
        }
        let mut best = Vec::new();
        let all: Vec<usize> = (0..self.len).collect();
        go(self, &mut Vec::new(), &all, &mut best);
        best
    }
}

/// Result of an exact search: the maximum and one witness attaining it.
#[derive(Clone, Debug)]
pub struct Exact<T> {
    pub value: BigUint,
    pub witness: Vec<T>,
}

fn check_cap(required: BigUint, cap: u64) -> Result<usize> {
    match required.to_u64() {
        Some(r) if r <= cap => Ok(r as usize),
        _ => Err(Error::CapExceeded { required: required.to_string(), cap }),
    }
}

/// All of `J(m,w)^n` in colex mixed-radix order, column 0 most significant,
/// as column indices into `columns`.
pub struct Universe {
    pub columns: Vec<ColumnWord>,
    pub n: usize,
    dist: Vec<Vec<usize>>,
    size: usize,
}

impl Universe {
    pub fn new(m: usize, n: usize, w: usize, cap: u64) -> Result<Self> {
        if w > m || n == 0 {
            return Err(Error::param(format!("need 0 <= w <= m and n >= 1, got m={m}, n={n}, w={w}")));
        }
        let size = check_cap(binom_big(m as u64, w as u64).pow(n as u32), cap)?;
        let columns: Vec<ColumnWord> = enumerate_constant_weight(m, w)?.collect();
        let dist = columns.iter().map(|a| columns.iter().map(|b| a.distance_unchecked(b)).collect()).collect();
        Ok(Universe { columns, n, dist, size })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Column indices of vertex `v`.
    pub fn digits(&self, mut v: usize) -> Vec<usize> {
        let k = self.columns.len();
        let mut d = vec![0; self.n];
        for slot in d.iter_mut().rev() {
            *slot = v % k;
            v /= k;
        }
        d
    }

    pub fn word(&self, v: usize) -> ArrayWord {
        ArrayWord::new(self.digits(v).into_iter().map(|i| self.columns[i].clone()).collect()).expect("valid universe word")
    }

    pub fn distance(&self, a: &[usize], b: &[usize]) -> usize {
        a.iter().zip(b).map(|(&x, &y)| self.dist[x][y]).sum()
    }

    pub fn graph(&self, edge: impl Fn(usize) -> bool + Sync) -> Graph {
        let digits: Vec<Vec<usize>> = (0..self.size).map(|v| self.digits(v)).collect();
        Graph::from_predicate(self.size, |i, j| edge(self.distance(&digits[i], &digits[j])))
    }
}

fn exact_on(universe: &Universe, edge: impl Fn(usize) -> bool + Sync) -> Exact<ArrayWord> {
    let clique = universe.graph(edge).max_clique();
    Exact { value: BigUint::from(clique.len()), witness: clique.into_iter().map(|v| universe.word(v)).collect() }
}

/// `A(m,n,w,d)`: largest subset of `J(m,w)^n` with pairwise Hamming distance
/// at least `2d`.
pub fn exact_max_code(m: usize, n: usize, w: usize, d: usize, cap: u64) -> Result<Exact<ArrayWord>> {
    let u = Universe::new(m, n, w, cap)?;
    Ok(exact_on(&u, |dist| dist >= 2 * d))
}

/// `α(m,n,w,δ)`: largest subset of `J(m,w)^n` with pairwise Hamming distance
/// at most `2δ`.
pub fn exact_max_anticode(m: usize, n: usize, w: usize, delta: usize, cap: u64) -> Result<Exact<ArrayWord>> {
    let u = Universe::new(m, n, w, cap)?;
    Ok(exact_on(&u, |dist| dist <= 2 * delta))
}

/// `γ(q,n,δ)`: largest subset of `[q]^n` with pairwise Hamming distance at
/// most `δ`. Witness words are listed as symbol vectors.
pub fn exact_gamma(q: usize, n: usize, delta: usize, cap: u64) -> Result<Exact<Vec<usize>>> {
    if q < 2 {
        return Err(Error::param(format!("alphabet size q = {q} must be at least 2")));
    }
    let size = check_cap(BigUint::from(q).pow(n as u32), cap)?;
    let words: Vec<Vec<usize>> = (0..size)
        .map(|mut v| {
            let mut d = vec![0; n];
            for slot in d.iter_mut().rev() {
                *slot = v % q;
                v /= q;
            }
            d
        })
        .collect();
    let g = Graph::from_predicate(size, |i, j| words[i].iter().zip(&words[j]).filter(|(a, b)| a != b).count() <= delta);
    let clique = g.max_clique();
    Ok(Exact { value: BigUint::from(clique.len()), witness: clique.into_iter().map(|v| words[v].clone()).collect() })
}

/// Recheck a witness independently of the search.
pub fn verify_witness(words: &[ArrayWord], ok: impl Fn(usize) -> bool) -> bool {
    words.iter().enumerate().all(|(i, a)| words[i + 1..].iter().all(|b| a.distance(b).map(&ok).unwrap_or(false)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn code(m: usize, n: usize, w: usize, d: usize) -> usize {
        exact_max_code(m, n, w, d, DEFAULT_CAP).unwrap().value.to_usize().unwrap()
    }

    fn anticode(m: usize, n: usize, w: usize, delta: usize) -> usize {
        exact_max_anticode(m, n, w, delta, DEFAULT_CAP).unwrap().value.to_usize().unwrap()
    }

    #[test]
    fn code_examples() {
        assert_eq!(code(4, 1, 2, 1), 6);
        assert_eq!(code(4, 1, 2, 2), 2);
        assert_eq!(code(4, 2, 2, 2), 12);
        assert_eq!(code(4, 2, 1, 2), 4);
        assert_eq!(code(8, 1, 2, 1), 28);
    }

    #[test]
    fn anticode_examples() {
        assert_eq!(anticode(4, 1, 2, 0), 1);
        assert_eq!(anticode(4, 1, 2, 1), 3);
        assert_eq!(anticode(4, 1, 2, 2), 6);
        assert_eq!(anticode(4, 2, 2, 1), 3);
    }

    #[test]
    fn gamma_examples() {
        let g = |q, n, d| exact_gamma(q, n, d, DEFAULT_CAP).unwrap().value.to_usize().unwrap();
        assert_eq!(g(2, 3, 2), 4);
        assert_eq!(g(3, 2, 1), 3);
        assert_eq!(g(4, 2, 0), 1);
    }

    #[test]
    fn cap_is_enforced() {
        match exact_max_code(9, 2, 4, 2, DEFAULT_CAP) {
            Err(Error::CapExceeded { required, cap }) => {
                assert_eq!(required, "15876");
                assert_eq!(cap, 5000);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
        assert!(matches!(exact_max_code(8, 2, 4, 2, 4000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn witnesses_are_valid() {
        for (m, n, w, d) in [(4, 2, 2, 2), (5, 2, 2, 3), (6, 1, 3, 2), (5, 2, 1, 2)] {
            let e = exact_max_code(m, n, w, d, DEFAULT_CAP).unwrap();
            assert_eq!(e.witness.len(), e.value.to_usize().unwrap());
            assert!(verify_witness(&e.witness, |x| x >= 2 * d));
            let a = exact_max_anticode(m, n, w, d - 1, DEFAULT_CAP).unwrap();
            assert!(verify_witness(&a.witness, |x| x <= 2 * (d - 1)));
        }
    }

    #[test]
    fn invariant_under_complement() {
        for m in 2..=5 {
            for w in 1..m {
                for n in 1..=2 {
                    for d in 1..=n * w.min(m - w) + 1 {
                        assert_eq!(code(m, n, w, d), code(m, n, m - w, d), "({m},{n},{w},{d})");
                        assert_eq!(anticode(m, n, w, d - 1), anticode(m, n, m - w, d - 1));
                    }
                }
            }
        }
    }

    #[test]
    fn invariant_under_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (m, w, d) in [(6, 2, 2), (6, 3, 2), (7, 3, 2), (5, 2, 1)] {
            let u = Universe::new(m, 1, w, DEFAULT_CAP).unwrap();
            let g = u.graph(|x| x >= 2 * d);
            let mut perm: Vec<usize> = (0..g.len()).collect();
            perm.shuffle(&mut rng);
            let h = g.permuted(&perm);
            assert_eq!(g.clique_number(), h.clique_number());
            assert!(h.is_clique(&h.max_clique()));
        }
    }

    #[test]
    fn agrees_with_plain_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..200 {
            let len = 1 + trial % 40;
            let p = [0.2, 0.5, 0.8][trial % 3];
            let mut g = Graph::new(len);
            for i in 0..len {
                for j in i + 1..len {
                    if rand::Rng::gen_bool(&mut rng, p) {
                        g.add_edge(i, j);
                    }
                }
            }
            assert_eq!(g.max_clique(), g.max_clique_plain(), "trial {trial}");
        }
    }

    #[test]
    fn witness_is_deterministic() {
        let a = exact_max_code(5, 2, 2, 3, DEFAULT_CAP).unwrap();
        let b = exact_max_code(5, 2, 2, 3, DEFAULT_CAP).unwrap();
        assert_eq!(a.witness, b.witness);
        assert_eq!(a.witness[0].to_hex_columns(), vec!["18".to_string(), "18".to_string()]);
    }
}
