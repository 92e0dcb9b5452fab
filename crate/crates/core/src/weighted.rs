//! Graphs carrying an edge weight in `[0, 1]`.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// A graph plus one weight per edge, indexed by edge id.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<S> {
    base: Graph,
    w: Vec<S>,
}

impl<S: Scalar> WeightedGraph<S> {
    pub fn new(base: Graph, w: Vec<S>) -> Result<Self> {
        if w.len() != base.m() {
            return Err(Error::param(format!(
                "expected {} edge weights, got {}",
                base.m(),
                w.len()
            )));
        }
        if let Some((id, _)) = w
            .iter()
            .enumerate()
            .find(|(_, x)| **x < S::zero() || **x > S::one())
        {
            let (u, v) = base.edges()[id];
            return Err(Error::param(format!("weight of edge {u}-{v} outside [0,1]")));
        }
        Ok(WeightedGraph { base, w })
    }

    pub fn uniform(base: Graph, value: S) -> Result<Self> {
        let w = vec![value; base.m()];
        WeightedGraph::new(base, w)
    }

    /// `w ≡ 1`, the unweighted case.
    pub fn unit(base: Graph) -> Self {
        let w = vec![S::one(); base.m()];
        WeightedGraph { base, w }
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn weights(&self) -> &[S] {
        &self.w
    }

    pub fn weight_of(&self, edge_id: usize) -> &S {
        &self.w[edge_id]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<&S> {
        self.base.edge_id(u, v).map(|id| &self.w[id])
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// `Σ_{u ∈ N(v)} w(uv)`.
    pub fn weighted_degree(&self, v: usize) -> S {
        self.base
            .incident_edges(v)
            .iter()
            .fold(S::zero(), |acc, &id| acc + self.w[id].clone())
    }

    /// Spanning subgraph of the `alpha`-rich edges, those with `w(uv) ≥ 1 − alpha`.
    pub fn rich_subgraph(&self, alpha: &S) -> Result<Graph> {
        if *alpha < S::zero() || *alpha > S::one() {
            return Err(Error::param("alpha must lie in [0,1]"));
        }
        let threshold = S::one() - alpha.clone();
        Ok(self.base.filter_edges(|id| self.w[id].at_least(&threshold)))
    }

    /// Smallest edge weight inside a vertex set (a clique), `1` when it has no edges.
    pub fn min_weight_on(&self, vertices: &[usize]) -> S {
        let mut best = S::one();
        for (i, &u) in vertices.iter().enumerate() {
            for &v in &vertices[i + 1..] {
                if let Some(x) = self.weight(u, v) {
                    best = S::min_of(best, x.clone());
                }
            }
        }
        best
    }

    pub fn map_weights<T: Scalar>(&self, f: impl Fn(&S) -> T) -> WeightedGraph<T> {
        WeightedGraph {
            base: self.base.clone(),
            w: self.w.iter().map(f).collect(),
        }
    }

    /// Replaces the weights, checking the `[0,1]` range.
    pub fn with_weights(&self, w: Vec<S>) -> Result<Self> {
        WeightedGraph::new(self.base.clone(), w)
    }

    /// Induced weighted subgraph, relabelled as in [`Graph::induced_subgraph`].
    pub fn induced(&self, subset: &[usize]) -> Result<(Self, Vec<usize>)> {
        let (g, map) = self.base.induced_subgraph(subset)?;
        let w = g
            .edges()
            .iter()
            .map(|&(a, b)| self.weight(map[a], map[b]).expect("induced edge").clone())
            .collect();
        Ok((WeightedGraph { base: g, w }, map))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use num_rational::BigRational;

    #[test]
    fn weighted_degree_examples() {
        let k6 = gen::complete(6).unwrap();
        let ones = WeightedGraph::<f64>::unit(k6.clone());
        assert_eq!(ones.weighted_degree(3), 5.0);
        let halves = WeightedGraph::uniform(k6, 0.5).unwrap();
        assert_eq!(halves.weighted_degree(0), 2.5);

        let tri = Graph::from_edge_list(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        // edge ids in lexicographic order: 01, 02, 12
        let wg = WeightedGraph::new(tri, vec![1.0_f64, 0.2, 0.3]).unwrap();
        assert!((wg.weighted_degree(1) - 1.3).abs() < 1e-12);
    }

    #[test]
    fn rich_subgraph_examples() {
        let k6 = gen::complete(6).unwrap();
        let ones = WeightedGraph::<f64>::unit(k6.clone());
        assert_eq!(ones.rich_subgraph(&0.0).unwrap(), k6);
        let halves = WeightedGraph::uniform(k6.clone(), 0.5).unwrap();
        assert_eq!(halves.rich_subgraph(&0.4).unwrap().m(), 0);
        assert_eq!(halves.rich_subgraph(&1.0).unwrap(), k6);

        let tri = Graph::from_edge_list(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let wg = WeightedGraph::new(tri, vec![1.0, 0.95, 0.5]).unwrap();
        assert_eq!(wg.rich_subgraph(&0.1).unwrap().m(), 2);
        assert!(wg.rich_subgraph(&1.5).is_err());
        assert!(wg.rich_subgraph(&-0.1).is_err());
    }

    #[test]
    fn rejects_out_of_range_weights() {
        let tri = Graph::from_edge_list(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(WeightedGraph::new(tri.clone(), vec![1.0, 1.2, 0.0]).is_err());
        assert!(WeightedGraph::new(tri, vec![1.0]).is_err());
    }

    #[test]
    fn exact_weights_compare_exactly() {
        let tri = Graph::from_edge_list(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let w = vec![
            <BigRational as Scalar>::ratio(9, 10),
            <BigRational as Scalar>::ratio(899, 1000),
            <BigRational as Scalar>::ratio(1, 1),
        ];
        let wg = WeightedGraph::new(tri, w).unwrap();
        let h = wg.rich_subgraph(&<BigRational as Scalar>::ratio(1, 10)).unwrap();
        assert_eq!(h.m(), 2);
        assert_eq!(wg.weighted_degree(0), <BigRational as Scalar>::ratio(1799, 1000));
    }
}
