//! Simple undirected graphs on dense vertex ids `0..n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical undirected edge, always stored with `.0 < .1`.
pub type Edge = (usize, usize);

/// Simple undirected graph with sorted adjacency lists.
///
/// Edges are kept in lexicographic order and addressed by their position in
/// that order (the *edge id*). Each adjacency entry carries the id of the
/// corresponding edge so that per-edge data can live in flat vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    adj_edge: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityInfo {
    pub is_regular: bool,
    /// Common degree; `None` unless the graph is regular.
    pub d: Option<usize>,
    pub min_deg: usize,
    pub max_deg: usize,
}

impl Graph {
    /// Builds a graph from unordered pairs, dropping duplicates.
    pub fn from_edge_list<I>(n: usize, pairs: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut edges = Vec::new();
        for (u, v) in pairs {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Graph::from_canonical(n, edges))
    }

    /// `edges` must be sorted, deduplicated, canonical and in range.
    pub(crate) fn from_canonical(n: usize, edges: Vec<Edge>) -> Graph {
        let mut adj = vec![Vec::new(); n];
        let mut adj_edge = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adj[u].push(v);
            adj_edge[u].push(id);
            adj[v].push(u);
            adj_edge[v].push(id);
        }
        // Lexicographic edge order already leaves adj[u] sorted for
        // neighbours above u; neighbours below u arrive in order too, but
        // interleaving the two halves needs a merge.
        for v in 0..n {
            let mut pairs: Vec<(usize, usize)> =
                adj[v].iter().copied().zip(adj_edge[v].iter().copied()).collect();
            pairs.sort_unstable();
            adj[v] = pairs.iter().map(|p| p.0).collect();
            adj_edge[v] = pairs.iter().map(|p| p.1).collect();
        }
        Graph {
            n,
            edges,
            adj,
            adj_edge,
        }
    }

    pub fn empty(n: usize) -> Graph {
        Graph::from_canonical(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Edge ids parallel to [`Graph::neighbors`].
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.adj_edge[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a]
            .binary_search(&b)
            .ok()
            .map(|pos| self.adj_edge[a][pos])
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_id(u, v).is_some()
    }

    pub fn regularity(&self) -> RegularityInfo {
        let min_deg = (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0);
        let max_deg = (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0);
        let is_regular = min_deg == max_deg;
        RegularityInfo {
            is_regular,
            d: is_regular.then_some(min_deg),
            min_deg,
            max_deg,
        }
    }

    /// Common degree, or an error for irregular graphs.
    pub fn regular_degree(&self) -> Result<usize> {
        let info = self.regularity();
        info.d.ok_or(Error::NotRegular {
            min_deg: info.min_deg,
            max_deg: info.max_deg,
        })
    }

    /// Spanning subgraph with edge set `E(self) \ E(other)`.
    pub fn difference(&self, other: &Graph) -> Result<Graph> {
        self.check_same_n(other)?;
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| !other.has_edge(u, v))
            .collect();
        Ok(Graph::from_canonical(self.n, edges))
    }

    /// Spanning subgraph with edge set `E(self) ∩ E(other)`.
    pub fn intersection(&self, other: &Graph) -> Result<Graph> {
        self.check_same_n(other)?;
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| other.has_edge(u, v))
            .collect();
        Ok(Graph::from_canonical(self.n, edges))
    }

    pub fn union(&self, other: &Graph) -> Result<Graph> {
        self.check_same_n(other)?;
        let mut edges: Vec<Edge> = self.edges.iter().chain(other.edges.iter()).copied().collect();
        edges.sort_unstable();
        edges.dedup();
        Ok(Graph::from_canonical(self.n, edges))
    }

    fn check_same_n(&self, other: &Graph) -> Result<()> {
        if self.n != other.n {
            return Err(Error::VertexCountMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Induced subgraph `G[U]`, relabelled to `0..|U|` in ascending order of
    /// the original ids. The returned map sends new ids to original ids.
    ///
    /// Duplicate entries in `subset` are ignored.
    pub fn induced_subgraph(&self, subset: &[usize]) -> Result<(Graph, Vec<usize>)> {
        let mut keep: Vec<usize> = subset.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&bad) = keep.iter().find(|&&v| v >= self.n) {
            return Err(Error::VertexOutOfRange {
                vertex: bad,
                n: self.n,
            });
        }
        let mut new_id = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in keep.iter().enumerate() {
            for &u in &self.adj[v] {
                if u > v && new_id[u] != usize::MAX {
                    edges.push((i, new_id[u]));
                }
            }
        }
        edges.sort_unstable();
        Ok((Graph::from_canonical(keep.len(), edges), keep))
    }

    /// Spanning subgraph keeping the edges whose id satisfies `keep`.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize) -> bool) -> Graph {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(id, _)| keep(*id))
            .map(|(_, &e)| e)
            .collect();
        Graph::from_canonical(self.n, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edge_list(n, pairs).unwrap()
    }

    pub(crate) fn petersen() -> Graph {
        let mut pairs = Vec::new();
        for i in 0..5 {
            pairs.push((i, (i + 1) % 5));
            pairs.push((i, i + 5));
            pairs.push((5 + i, 5 + (i + 2) % 5));
        }
        Graph::from_edge_list(10, pairs).unwrap()
    }

    #[test]
    fn edge_list_examples() {
        let tri = Graph::from_edge_list(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(tri.m(), 3);
        assert_eq!(Graph::from_edge_list(4, []).unwrap().m(), 0);
        let k6 = complete(6);
        assert!((0..6).all(|v| k6.degree(v) == 5));
        assert_eq!(k6.m(), 15);
    }

    #[test]
    fn edge_list_deduplicates_and_sorts() {
        let g = Graph::from_edge_list(4, [(3, 1), (1, 3), (0, 3), (2, 0)]).unwrap();
        assert_eq!(g.edges(), &[(0, 2), (0, 3), (1, 3)]);
        assert_eq!(g.neighbors(3), &[0, 1]);
        assert_eq!(g.edge_id(3, 1), Some(2));
    }

    #[test]
    fn edge_list_rejects_bad_input() {
        assert!(matches!(
            Graph::from_edge_list(3, [(0, 3)]),
            Err(Error::VertexOutOfRange { vertex: 3, n: 3 })
        ));
        assert!(matches!(Graph::from_edge_list(3, [(1, 1)]), Err(Error::SelfLoop(1))));
    }

    #[test]
    fn regularity_examples() {
        let r = complete(6).regularity();
        assert!(r.is_regular);
        assert_eq!(r.d, Some(5));
        let r = petersen().regularity();
        assert_eq!(r.d, Some(3));
        let p3 = Graph::from_edge_list(3, [(0, 1), (1, 2)]).unwrap().regularity();
        assert!(!p3.is_regular);
        assert_eq!((p3.min_deg, p3.max_deg, p3.d), (1, 2, None));
    }

    #[test]
    fn difference_examples() {
        let k4 = complete(4);
        let matching = Graph::from_edge_list(4, [(0, 1), (2, 3)]).unwrap();
        let c4 = k4.difference(&matching).unwrap();
        assert_eq!(c4.m(), 4);
        assert!(c4.regularity().d == Some(2));
        assert_eq!(k4.difference(&Graph::empty(4)).unwrap(), k4);
        assert_eq!(k4.difference(&k4).unwrap().m(), 0);
        assert!(matches!(
            k4.difference(&Graph::empty(5)),
            Err(Error::VertexCountMismatch { .. })
        ));
    }

    #[test]
    fn induced_subgraph_examples() {
        let (k3, map) = complete(6).induced_subgraph(&[5, 1, 3]).unwrap();
        assert_eq!(k3.m(), 3);
        assert_eq!(map, vec![1, 3, 5]);

        let (outer, _) = petersen().induced_subgraph(&[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(outer.m(), 5);
        assert_eq!(outer.regularity().d, Some(2));

        let (empty, map) = petersen().induced_subgraph(&[]).unwrap();
        assert_eq!((empty.n(), empty.m(), map.len()), (0, 0, 0));
    }

    #[test]
    fn difference_plus_intersection_rebuilds_graph() {
        let g = petersen();
        let h = Graph::from_edge_list(10, [(0, 1), (0, 5), (3, 4), (2, 9)]).unwrap();
        let rebuilt = g
            .difference(&h)
            .unwrap()
            .union(&g.intersection(&h).unwrap())
            .unwrap();
        assert_eq!(rebuilt, g);
    }
}
