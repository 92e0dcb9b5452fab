//! Deterministic generators for candidate `(n, d, λ)`-graphs.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::rng;

/// Restarts allowed before [`random_regular`] gives up.
pub const MAX_RESTARTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenSpec {
    Complete { n: usize },
    Paley { q: usize },
    Circulant { n: usize, connection_set: Vec<usize> },
    RandomRegular { n: usize, d: usize, seed: u64 },
}

impl GenSpec {
    pub fn generate(&self) -> Result<Graph> {
        match self {
            GenSpec::Complete { n } => complete(*n),
            GenSpec::Paley { q } => paley(*q),
            GenSpec::Circulant { n, connection_set } => circulant(*n, connection_set),
            GenSpec::RandomRegular { n, d, seed } => random_regular(*n, *d, *seed),
        }
    }
}

pub fn complete(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::param("complete graph needs n >= 1"));
    }
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    Ok(Graph::from_canonical(n, edges))
}

/// Petersen graph: outer 5-cycle `0..5`, spokes `i – i+5`, inner pentagram.
pub fn petersen() -> Graph {
    let mut pairs = Vec::with_capacity(15);
    for i in 0..5 {
        pairs.push((i, (i + 1) % 5));
        pairs.push((i, i + 5));
        pairs.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::from_edge_list(10, pairs).expect("static edge list")
}

/// Cycle on `n` vertices (`n >= 3`).
pub fn cycle(n: usize) -> Result<Graph> {
    circulant(n, &[1])
}

fn is_prime(q: usize) -> bool {
    if q < 2 {
        return false;
    }
    let mut i = 2;
    while i * i <= q {
        if q.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

/// Paley graph on `Z_q`: `u ~ v` iff `u − v` is a nonzero square mod `q`.
pub fn paley(q: usize) -> Result<Graph> {
    if !is_prime(q) || q % 4 != 1 {
        return Err(Error::param(format!("Paley graph needs a prime q ≡ 1 (mod 4), got {q}")));
    }
    let mut residue = vec![false; q];
    for x in 1..q {
        residue[(x * x) % q] = true;
    }
    let mut edges = Vec::with_capacity(q * (q - 1) / 4);
    for u in 0..q {
        for v in u + 1..q {
            if residue[v - u] {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_canonical(q, edges))
}

/// Circulant graph: `u ~ u ± s (mod n)` for every offset `s`, `1 <= s <= n/2`.
pub fn circulant(n: usize, offsets: &[usize]) -> Result<Graph> {
    if let Some(&s) = offsets.iter().find(|&&s| s == 0 || 2 * s > n) {
        return Err(Error::param(format!("circulant offset {s} outside 1..={}", n / 2)));
    }
    let mut pairs = Vec::with_capacity(n * offsets.len());
    for u in 0..n {
        for &s in offsets {
            pairs.push((u, (u + s) % n));
        }
    }
    Graph::from_edge_list(n, pairs)
}

/// Random simple `d`-regular graph from the pairing (configuration) model.
///
/// Points are shuffled and paired; pairs that would form a loop or a repeated
/// edge are returned to the pool and re-paired among themselves. If the pool
/// can no longer produce a valid pair, the whole attempt restarts.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d >= n.max(1) {
        return Err(Error::param(format!("random regular graph needs d < n (d = {d}, n = {n})")));
    }
    if (n * d) % 2 == 1 {
        return Err(Error::param(format!("n·d must be even (n = {n}, d = {d})")));
    }
    let mut rng = rng::seeded(seed);
    for _ in 0..MAX_RESTARTS {
        if let Some(mut edges) = try_pairing(n, d, &mut rng) {
            edges.sort_unstable();
            return Ok(Graph::from_canonical(n, edges));
        }
    }
    Err(Error::GenerationFailed {
        restarts: MAX_RESTARTS,
    })
}

fn try_pairing(n: usize, d: usize, rng: &mut rng::Rng) -> Option<Vec<Edge>> {
    let mut present: HashSet<Edge> = HashSet::with_capacity(n * d / 2);
    let mut edges = Vec::with_capacity(n * d / 2);
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    while !points.is_empty() {
        let mut leftover: BTreeMap<usize, usize> = BTreeMap::new();
        points.shuffle(rng);
        for pair in points.chunks_exact(2) {
            let e = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if e.0 != e.1 && present.insert(e) {
                edges.push(e);
            } else {
                *leftover.entry(e.0).or_default() += 1;
                *leftover.entry(e.1).or_default() += 1;
            }
        }
        if !can_pair(&present, &leftover) {
            return None;
        }
        points = leftover
            .iter()
            .flat_map(|(&v, &k)| std::iter::repeat_n(v, k))
            .collect();
    }
    Some(edges)
}

fn can_pair(present: &HashSet<Edge>, leftover: &BTreeMap<usize, usize>) -> bool {
    if leftover.is_empty() {
        return true;
    }
    let keys: Vec<usize> = leftover.keys().copied().collect();
    keys.iter()
        .enumerate()
        .any(|(i, &u)| keys[i + 1..].iter().any(|&v| !present.contains(&(u, v))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangles_brute(g: &Graph) -> usize {
        let n = g.n();
        let mut count = 0;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if g.has_edge(a, b) && g.has_edge(a, c) && g.has_edge(b, c) {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn complete_examples() {
        assert_eq!(complete(6).unwrap().m(), 15);
        assert_eq!(complete(1).unwrap().m(), 0);
        let k12 = complete(12).unwrap();
        assert_eq!(k12.m(), 66);
        assert_eq!(k12.regularity().d, Some(11));
        assert!(complete(0).is_err());
    }

    #[test]
    fn paley_examples() {
        let p5 = paley(5).unwrap();
        assert_eq!(p5.m(), 5);
        assert_eq!(p5.regularity().d, Some(2));
        let p13 = paley(13).unwrap();
        assert_eq!(p13.regularity().d, Some(6));
        assert_eq!(p13.m(), 39);
        assert_eq!(triangles_brute(&p13), 26);
        for q in [3, 7, 9, 15, 1] {
            assert!(paley(q).is_err(), "q = {q}");
        }
    }

    #[test]
    fn paley_edge_count_is_quarter() {
        for q in [5, 13, 17, 29, 37, 41] {
            assert_eq!(paley(q).unwrap().m(), q * (q - 1) / 4);
        }
    }

    #[test]
    fn circulant_examples() {
        let c5 = circulant(5, &[1]).unwrap();
        assert_eq!((c5.m(), c5.regularity().d), (5, Some(2)));
        let g = circulant(8, &[1, 4]).unwrap();
        assert_eq!((g.m(), g.regularity().d), (12, Some(3)));
        assert_eq!(circulant(6, &[1, 2, 3]).unwrap(), complete(6).unwrap());
        assert!(circulant(6, &[4]).is_err());
        assert!(circulant(6, &[0]).is_err());
    }

    #[test]
    fn random_regular_examples() {
        let g = random_regular(10, 3, 1).unwrap();
        assert_eq!(g.regularity().d, Some(3));
        assert_eq!(g.m(), 15);
        for seed in 0..5 {
            assert_eq!(random_regular(4, 3, seed).unwrap(), complete(4).unwrap());
        }
        let a = random_regular(100, 50, 42).unwrap();
        let b = random_regular(100, 50, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.regularity().d, Some(50));
        assert_ne!(a, random_regular(100, 50, 43).unwrap());
    }

    #[test]
    fn random_regular_rejects_bad_parameters() {
        assert!(random_regular(5, 3, 0).is_err());
        assert!(random_regular(4, 4, 0).is_err());
        assert_eq!(random_regular(6, 0, 0).unwrap().m(), 0);
    }

    #[test]
    fn gen_spec_dispatch() {
        let spec = GenSpec::Circulant {
            n: 8,
            connection_set: vec![1, 4],
        };
        assert_eq!(spec.generate().unwrap().m(), 12);
        assert_eq!(petersen().regularity().d, Some(3));
    }
}
