//! `K_t` enumeration and the clique families used as hypotheses by the
//! fractional-factor machinery.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

/// Default cap on the number of cliques an enumeration may produce.
pub const CLIQUE_LIMIT: u64 = 100_000_000;

/// All copies of `K_t` in a host graph, as ascending vertex tuples in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueSet {
    t: usize,
    n: usize,
    members: Vec<usize>,
    by_vertex: Vec<Vec<usize>>,
    by_edge: Vec<Vec<usize>>,
}

impl CliqueSet {
    fn build(g: &Graph, t: usize, members: Vec<usize>) -> CliqueSet {
        let count = members.len().checked_div(t).unwrap_or(0);
        let mut by_vertex = vec![Vec::new(); g.n()];
        let mut by_edge = vec![Vec::new(); g.m()];
        for id in 0..count {
            let c = &members[id * t..(id + 1) * t];
            for (i, &u) in c.iter().enumerate() {
                by_vertex[u].push(id);
                for &v in &c[i + 1..] {
                    let e = g.edge_id(u, v).expect("clique pair is an edge");
                    by_edge[e].push(id);
                }
            }
        }
        CliqueSet {
            t,
            n: g.n(),
            members,
            by_vertex,
            by_edge,
        }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Vertex count of the host graph.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len().checked_div(self.t).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clique(&self, id: usize) -> &[usize] {
        &self.members[id * self.t..(id + 1) * self.t]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.members.chunks_exact(self.t.max(1))
    }

    /// Ids of the cliques containing `v`.
    pub fn containing_vertex(&self, v: usize) -> &[usize] {
        &self.by_vertex[v]
    }

    /// Ids of the cliques containing the host edge with id `edge_id`.
    pub fn containing_edge(&self, edge_id: usize) -> &[usize] {
        &self.by_edge[edge_id]
    }

    /// Id of an ascending tuple, if it is one of the cliques.
    pub fn find(&self, tuple: &[usize]) -> Option<usize> {
        if tuple.len() != self.t {
            return None;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.clique(mid).cmp(tuple) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn higher_neighbors(g: &Graph, v: usize) -> &[usize] {
    let nb = g.neighbors(v);
    let start = nb.partition_point(|&u| u <= v);
    &nb[start..]
}

struct Enumerator<'a> {
    g: &'a Graph,
    k: usize,
    counter: &'a AtomicU64,
    limit: u64,
}

impl Enumerator<'_> {
    /// Visits every `k`-clique that extends `stack` using only `cands`.
    /// Returns `false` once the global limit is hit.
    fn walk(&self, stack: &mut Vec<usize>, cands: &[usize], sink: &mut impl FnMut(&[usize])) -> bool {
        if stack.len() == self.k {
            if self.counter.fetch_add(1, AtomicOrdering::Relaxed) >= self.limit {
                return false;
            }
            sink(stack);
            return true;
        }
        let need = self.k - stack.len();
        for (i, &v) in cands.iter().enumerate() {
            if cands.len() - i < need {
                break;
            }
            stack.push(v);
            let ok = if need == 1 {
                self.walk(stack, &[], sink)
            } else {
                let next = intersect_sorted(&cands[i + 1..], self.g.neighbors(v));
                self.walk(stack, &next, sink)
            };
            stack.pop();
            if !ok {
                return false;
            }
        }
        true
    }
}

/// Visits every `k`-clique of `g` in parallel over root vertices, returning
/// per-root results in root order.
fn for_each_root<T: Send>(
    g: &Graph,
    k: usize,
    limit: u64,
    init: impl Fn() -> T + Sync,
    visit: impl Fn(&mut T, &[usize]) + Sync,
) -> Result<Vec<T>> {
    let counter = AtomicU64::new(0);
    let results: Vec<Option<T>> = (0..g.n())
        .into_par_iter()
        .map(|root| {
            let e = Enumerator {
                g,
                k,
                counter: &counter,
                limit,
            };
            let mut acc = init();
            let mut stack = vec![root];
            let ok = if k == 1 {
                e.walk(&mut stack, &[], &mut |c| visit(&mut acc, c))
            } else {
                e.walk(&mut stack, higher_neighbors(g, root), &mut |c| visit(&mut acc, c))
            };
            ok.then_some(acc)
        })
        .collect();
    if results.iter().any(Option::is_none) {
        return Err(Error::ResourceLimit {
            what: "clique enumeration",
            limit,
            partial: limit,
        });
    }
    Ok(results.into_iter().flatten().collect())
}

pub fn enumerate_cliques(g: &Graph, t: usize) -> Result<CliqueSet> {
    enumerate_cliques_limited(g, t, CLIQUE_LIMIT)
}

pub fn enumerate_cliques_limited(g: &Graph, t: usize, limit: u64) -> Result<CliqueSet> {
    if t < 2 {
        return Err(Error::param("clique order must be at least 2"));
    }
    let chunks = for_each_root(g, t, limit, Vec::new, |acc: &mut Vec<usize>, c| {
        acc.extend_from_slice(c)
    })?;
    Ok(CliqueSet::build(g, t, chunks.concat()))
}

/// Number of `K_k` in `g` without materialising them.
pub fn count_cliques(g: &Graph, k: usize) -> Result<u64> {
    if k == 0 {
        return Ok(1);
    }
    let counts = for_each_root(g, k, CLIQUE_LIMIT, || 0u64, |acc, _| *acc += 1)?;
    Ok(counts.into_iter().sum())
}

/// Lexicographically first `k`-clique whose vertices all come from the
/// ascending list `cands`.
pub fn first_clique_among(g: &Graph, k: usize, cands: &[usize]) -> Option<Vec<usize>> {
    fn go(g: &Graph, k: usize, cands: &[usize], stack: &mut Vec<usize>) -> bool {
        if stack.len() == k {
            return true;
        }
        let need = k - stack.len();
        for (i, &v) in cands.iter().enumerate() {
            if cands.len() - i < need {
                return false;
            }
            stack.push(v);
            let next = intersect_sorted(&cands[i + 1..], g.neighbors(v));
            if go(g, k, &next, stack) {
                return true;
            }
            stack.pop();
        }
        false
    }
    let mut stack = Vec::with_capacity(k);
    go(g, k, cands, &mut stack).then_some(stack)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowCount {
    pub i: usize,
    pub u_size: usize,
    pub count: u64,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
    /// `count / (|U|^i (d/n)^{C(i,2)} / i!)`, for eyeballing how loose the
    /// window is; absent when the centre is zero.
    pub ratio: Option<f64>,
}

/// Counts `K_i` in `(g \ gprime)[U]` and compares against
/// `2^{∓i²} (i!)^{-1} |U|^i (d/n)^{C(i,2)}`.
pub fn count_cliques_window(g: &Graph, gprime: &Graph, subset: &[usize], i: usize) -> Result<WindowCount> {
    if i < 2 {
        return Err(Error::param("window check needs i >= 2"));
    }
    let d = g.regular_degree()?;
    let host = g.difference(gprime)?;
    let (induced, map) = host.induced_subgraph(subset)?;
    let count = count_cliques(&induced, i)?;
    let u = map.len() as f64;
    let factorial: f64 = (1..=i).map(|x| x as f64).product();
    let pairs = (i * (i - 1) / 2) as i32;
    let center = u.powi(i as i32) * (d as f64 / g.n() as f64).powi(pairs) / factorial;
    let spread = 2f64.powi((i * i) as i32);
    let lower = center / spread;
    let upper = center * spread;
    let c = count as f64;
    Ok(WindowCount {
        i,
        u_size: map.len(),
        count,
        lower,
        upper,
        within: lower <= c && c <= upper,
        ratio: (center > 0.0).then(|| c / center),
    })
}

/// Cliques through `v` that pairwise meet only in `v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexFamily {
    pub v: usize,
    pub cliques: Vec<Vec<usize>>,
}

impl VertexFamily {
    pub fn is_valid(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.cliques.iter().all(|c| {
            c.contains(&self.v) && c.iter().filter(|&&u| u != self.v).all(|&u| seen.insert(u))
        })
    }
}

/// Greedily collects up to `target` copies of `K_t` through `v` in
/// `g \ gprime`, each new one drawn from neighbours not used so far.
pub fn vertex_family(g: &Graph, gprime: &Graph, v: usize, t: usize, target: usize) -> Result<VertexFamily> {
    if t < 3 {
        return Err(Error::param("vertex families need t >= 3"));
    }
    let host = g.difference(gprime)?;
    Ok(vertex_family_in(&host, v, t, target))
}

pub(crate) fn vertex_family_in(host: &Graph, v: usize, t: usize, target: usize) -> VertexFamily {
    let mut free: Vec<usize> = host.neighbors(v).to_vec();
    let mut cliques = Vec::new();
    while cliques.len() < target {
        let Some(rest) = first_clique_among(host, t - 1, &free) else {
            break;
        };
        free.retain(|u| !rest.contains(u));
        let mut c = rest;
        c.push(v);
        c.sort_unstable();
        cliques.push(c);
    }
    VertexFamily { v, cliques }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyPWitness {
    pub u: Vec<usize>,
    pub u0: Vec<usize>,
    pub found: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyPReport {
    pub t: usize,
    pub d: usize,
    pub d_prime: usize,
    pub n: usize,
    pub u_size: usize,
    pub u0_size: usize,
    /// Family size demanded per trial, `⌊D′/(t−1)⌋`.
    pub required: usize,
    pub trials: usize,
    pub failures: usize,
    pub witness: Option<PropertyPWitness>,
}

/// Greedy family of cliques meeting `u0` in exactly one vertex, with the
/// remaining vertices drawn from `u \ u0` and used at most once.
fn anchored_family(g: &Graph, t: usize, u: &[usize], u0: &[usize], required: usize) -> usize {
    let mut free = vec![false; g.n()];
    for &x in u {
        free[x] = true;
    }
    for &x in u0 {
        free[x] = false;
    }
    let mut found = 0;
    loop {
        let mut progress = false;
        for &anchor in u0 {
            if found >= required {
                return found;
            }
            let cands: Vec<usize> = g.neighbors(anchor).iter().copied().filter(|&x| free[x]).collect();
            if let Some(rest) = first_clique_among(g, t - 1, &cands) {
                for x in rest {
                    free[x] = false;
                }
                found += 1;
                progress = true;
            }
        }
        if !progress || found >= required {
            return found;
        }
    }
}

/// Randomised audit of property `P(t, D, D′, n)`.
pub fn property_p_audit(
    g: &Graph,
    t: usize,
    d: usize,
    d_prime: usize,
    trials: usize,
    seed: u64,
) -> Result<PropertyPReport> {
    let n = g.n();
    if t < 3 {
        return Err(Error::param("property P needs t >= 3"));
    }
    if d > n {
        return Err(Error::param(format!("D = {d} exceeds n = {n}")));
    }
    let u_size = n - d;
    let u0_size = d / t;
    if u0_size > u_size {
        return Err(Error::param("U_0 does not fit inside U"));
    }
    let required = d_prime / (t - 1);
    let outcomes: Vec<(usize, Option<PropertyPWitness>)> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng::stream(seed, trial);
            let mut u = index::sample(&mut rng, n, u_size).into_vec();
            let mut u0: Vec<usize> = index::sample(&mut rng, u_size, u0_size)
                .into_iter()
                .map(|i| u[i])
                .collect();
            u.sort_unstable();
            u0.sort_unstable();
            let found = anchored_family(g, t, &u, &u0, required);
            if found < required {
                (1, Some(PropertyPWitness { u, u0, found }))
            } else {
                (0, None)
            }
        })
        .collect();
    let failures = outcomes.iter().map(|o| o.0).sum();
    let witness = outcomes.into_iter().find_map(|o| o.1);
    Ok(PropertyPReport {
        t,
        d,
        d_prime,
        n,
        u_size,
        u0_size,
        required,
        trials,
        failures,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanAuditReport {
    pub t: usize,
    pub size: usize,
    pub trials: usize,
    pub failures: usize,
    /// First sampled set spanning no `K_t`.
    pub witness: Option<Vec<usize>>,
}

/// `⌈0.11 n / t⌉`: sets of this size are expected to span a `K_t`.
pub fn default_span_size(n: usize, t: usize) -> usize {
    ((0.11 * n as f64) / t as f64).ceil() as usize
}

/// Samples `trials` uniform `size`-subsets and counts those spanning no `K_t`.
pub fn span_clique_audit(g: &Graph, t: usize, size: usize, trials: usize, seed: u64) -> Result<SpanAuditReport> {
    if size > g.n() {
        return Err(Error::param(format!("subset size {size} exceeds n = {}", g.n())));
    }
    let outcomes: Vec<Option<Vec<usize>>> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng::stream(seed, trial);
            let mut s = index::sample(&mut rng, g.n(), size).into_vec();
            s.sort_unstable();
            if size >= t && first_clique_among(g, t, &s).is_some() {
                None
            } else {
                Some(s)
            }
        })
        .collect();
    let failures = outcomes.iter().filter(|o| o.is_some()).count();
    Ok(SpanAuditReport {
        t,
        size,
        trials,
        failures,
        witness: outcomes.into_iter().flatten().next(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    /// Independent oracle: test every `t`-subset.
    fn brute_cliques(g: &Graph, t: usize) -> Vec<Vec<usize>> {
        fn rec(g: &Graph, t: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == t {
                let ok = cur
                    .iter()
                    .enumerate()
                    .all(|(i, &u)| cur[i + 1..].iter().all(|&v| g.has_edge(u, v)));
                if ok {
                    out.push(cur.clone());
                }
                return;
            }
            for v in start..g.n() {
                cur.push(v);
                rec(g, t, v + 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(g, t, 0, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_cliques(&gen::complete(6).unwrap(), 3).unwrap().len(), 20);
        assert_eq!(enumerate_cliques(&gen::petersen(), 3).unwrap().len(), 0);
        let p13 = gen::paley(13).unwrap();
        assert_eq!(enumerate_cliques(&p13, 3).unwrap().len(), 26);
        assert_eq!(brute_cliques(&p13, 3).len(), 26);
        assert!(enumerate_cliques(&p13, 1).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let graphs = [
            gen::paley(13).unwrap(),
            gen::paley(17).unwrap(),
            gen::random_regular(14, 6, 9).unwrap(),
            gen::circulant(12, &[1, 2, 5]).unwrap(),
            gen::complete(8).unwrap(),
        ];
        for g in &graphs {
            for t in 2..=5 {
                let set = enumerate_cliques(g, t).unwrap();
                let got: Vec<Vec<usize>> = set.iter().map(|c| c.to_vec()).collect();
                assert_eq!(got, brute_cliques(g, t), "t = {t}");
                assert_eq!(count_cliques(g, t).unwrap(), got.len() as u64);
            }
        }
    }

    #[test]
    fn indexes_are_consistent() {
        let g = gen::paley(17).unwrap();
        let set = enumerate_cliques(&g, 3).unwrap();
        let mut total = 0;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            for id in 0..set.len() {
                let c = set.clique(id);
                let listed = set.containing_edge(e).contains(&id);
                assert_eq!(listed, c.contains(&u) && c.contains(&v));
            }
            total += set.containing_edge(e).len();
        }
        assert_eq!(total, 3 * set.len());
        for v in 0..g.n() {
            assert!(set.containing_vertex(v).iter().all(|&id| set.clique(id).contains(&v)));
        }
        for id in 0..set.len() {
            assert_eq!(set.find(set.clique(id)), Some(id));
        }
        assert_eq!(set.find(&[0, 1, 3]), None);
    }

    #[test]
    fn enumeration_limit_is_reported() {
        let k12 = gen::complete(12).unwrap();
        assert!(matches!(
            enumerate_cliques_limited(&k12, 3, 100),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn window_examples() {
        let k6 = gen::complete(6).unwrap();
        let all: Vec<usize> = (0..6).collect();
        let w = count_cliques_window(&k6, &Graph::empty(6), &all, 2).unwrap();
        assert_eq!(w.count, 15);
        assert!((w.lower - 0.9375).abs() < 1e-12 && (w.upper - 240.0).abs() < 1e-9);
        assert!(w.within);

        let rr = gen::random_regular(100, 50, 4).unwrap();
        let all: Vec<usize> = (0..100).collect();
        let w = count_cliques_window(&rr, &Graph::empty(100), &all, 2).unwrap();
        assert_eq!(w.count, 2500);
        assert!((w.lower - 156.25).abs() < 1e-9 && (w.upper - 40000.0).abs() < 1e-6);
        assert!(w.within);

        let pet = gen::petersen();
        let all: Vec<usize> = (0..10).collect();
        let w = count_cliques_window(&pet, &Graph::empty(10), &all, 3).unwrap();
        assert_eq!(w.count, 0);
        assert!(!w.within && w.lower > 0.0);
    }

    #[test]
    fn window_respects_removed_edges() {
        let k6 = gen::complete(6).unwrap();
        let gp = Graph::from_edge_list(6, [(0, 1), (2, 3)]).unwrap();
        let w = count_cliques_window(&k6, &gp, &[0, 1, 2, 3, 4, 5], 2).unwrap();
        assert_eq!(w.count, 13);
    }

    #[test]
    fn vertex_family_examples() {
        let k6 = gen::complete(6).unwrap();
        let fam = vertex_family(&k6, &Graph::empty(6), 0, 3, 2).unwrap();
        assert_eq!(fam.cliques.len(), 2);
        assert!(fam.is_valid());

        let fam = vertex_family(&gen::petersen(), &Graph::empty(10), 4, 3, 1).unwrap();
        assert!(fam.cliques.is_empty());

        let k7 = gen::complete(7).unwrap();
        let fam = vertex_family(&k7, &Graph::empty(7), 0, 3, 3).unwrap();
        assert_eq!(fam.cliques.len(), 3);
        let mut used: Vec<usize> = fam.cliques.iter().flatten().copied().filter(|&u| u != 0).collect();
        used.sort_unstable();
        assert_eq!(used, vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn vertex_family_in_complete_graph_pairs_neighbours() {
        for n in 4..12 {
            let kn = gen::complete(n).unwrap();
            let target = (n - 1) / 2;
            let fam = vertex_family(&kn, &Graph::empty(n), n - 1, 3, target).unwrap();
            assert_eq!(fam.cliques.len(), target);
            assert!(fam.is_valid());
        }
    }

    /// Direct construction: in `K_n`, anchors can take disjoint pairs of free
    /// vertices until either the demand or the free pool runs out.
    fn complete_graph_family_size(u_size: usize, u0_size: usize, t: usize, required: usize) -> usize {
        if u0_size == 0 {
            return 0;
        }
        ((u_size - u0_size) / (t - 1)).min(required)
    }

    #[test]
    fn property_p_examples() {
        let k30 = gen::complete(30).unwrap();
        let r = property_p_audit(&k30, 3, 6, 6, 50, 1).unwrap();
        assert_eq!(complete_graph_family_size(r.u_size, r.u0_size, 3, r.required), r.required);
        assert_eq!((r.failures, r.trials, r.required), (0, 50, 3));

        let r = property_p_audit(&gen::petersen(), 3, 3, 2, 20, 1).unwrap();
        assert_eq!(r.failures, 20);
        assert!(r.witness.is_some());

        let r = property_p_audit(&gen::paley(13).unwrap(), 3, 6, 0, 10, 2).unwrap();
        assert_eq!(r.failures, 0);
        assert!(property_p_audit(&k30, 3, 31, 6, 1, 0).is_err());
    }

    #[test]
    fn property_p_is_deterministic() {
        let g = gen::random_regular(40, 12, 3).unwrap();
        let a = property_p_audit(&g, 3, 12, 8, 30, 77).unwrap();
        let b = property_p_audit(&g, 3, 12, 8, 30, 77).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn span_audit_examples() {
        let k60 = gen::complete(60).unwrap();
        assert_eq!(span_clique_audit(&k60, 3, 3, 40, 0).unwrap().failures, 0);
        let pet = gen::petersen();
        assert_eq!(span_clique_audit(&pet, 3, 10, 15, 0).unwrap().failures, 15);
        let r = span_clique_audit(&k60, 3, 2, 12, 0).unwrap();
        assert_eq!(r.failures, 12);
        assert_eq!(default_span_size(60, 3), 3);
    }
}
