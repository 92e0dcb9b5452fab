use cfl_core::weighted::WeightedGraph;
use cfl_core::{gen, io, Graph};
use proptest::prelude::*;

fn graph_from_mask(n: usize, mask: &[bool]) -> Graph {
    let mut pairs = Vec::new();
    let mut k = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask[k % mask.len()] {
                pairs.push((u, v));
            }
            k += 1;
        }
    }
    Graph::from_edge_list(n, pairs).unwrap()
}

fn arb_graph() -> impl Strategy<Value = Graph> {
    (2usize..14, prop::collection::vec(any::<bool>(), 1..100)).prop_map(|(n, mask)| graph_from_mask(n, &mask))
}

proptest! {
    #[test]
    fn handshake(g in arb_graph()) {
        let total: usize = (0..g.n()).map(|v| g.degree(v)).sum();
        prop_assert_eq!(total, 2 * g.m());
        for v in 0..g.n() {
            for &u in g.neighbors(v) {
                prop_assert!(g.neighbors(u).contains(&v));
            }
        }
    }

    #[test]
    fn file_round_trip(g in arb_graph()) {
        let text = io::write_graph(&g);
        let back = io::parse_graph(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(io::write_graph(&back), text);
    }

    #[test]
    fn weighted_file_round_trip(g in arb_graph(), ks in prop::collection::vec(0u32..=16, 1..100)) {
        let w: Vec<f64> = (0..g.m()).map(|e| ks[e % ks.len()] as f64 / 16.0).collect();
        let wg = WeightedGraph::new(g, w).unwrap();
        let text = io::write_weighted(&wg);
        prop_assert_eq!(io::write_weighted(&io::parse_weighted(&text).unwrap()), text);
    }

    #[test]
    fn difference_plus_intersection_is_identity(a in arb_graph(), mask in prop::collection::vec(any::<bool>(), 1..100)) {
        let b = graph_from_mask(a.n(), &mask);
        let rebuilt = a.difference(&b).unwrap().union(&a.intersection(&b).unwrap()).unwrap();
        prop_assert_eq!(rebuilt, a);
    }

    #[test]
    fn rich_subgraph_at_alpha_one_keeps_every_edge(g in arb_graph(), ks in prop::collection::vec(0u32..=10, 1..50)) {
        let w: Vec<f64> = (0..g.m()).map(|e| ks[e % ks.len()] as f64 / 10.0).collect();
        let wg = WeightedGraph::new(g.clone(), w).unwrap();
        let rich = wg.rich_subgraph(&1.0).unwrap();
        prop_assert_eq!(rich.edges(), g.edges());
    }

    /// A vertex with `deg_w(v) ≥ d(1−α²)` has at least `(1−α)d` α-rich edges.
    #[test]
    fn heavy_vertices_have_many_rich_edges(seed in 0u64..200, alpha in 0.05f64..0.9, spread in 0.0f64..0.6) {
        let g = gen::random_regular(16, 6, seed).unwrap();
        let d = 6.0;
        let w: Vec<f64> = (0..g.m())
            .map(|e| 1.0 - spread * (((e as u64 * 2654435761 + seed) % 97) as f64 / 96.0))
            .collect();
        let wg = WeightedGraph::new(g.clone(), w).unwrap();
        let rich = wg.rich_subgraph(&alpha).unwrap();
        for v in 0..g.n() {
            if wg.weighted_degree(v) >= d * (1.0 - alpha * alpha) {
                prop_assert!(rich.degree(v) as f64 >= (1.0 - alpha) * d - 1e-12);
            }
        }
    }
}

#[test]
fn generators_are_regular_and_seeded() {
    for (g, d) in [
        (gen::paley(13).unwrap(), 6),
        (gen::paley(17).unwrap(), 8),
        (gen::circulant(8, &[1, 4]).unwrap(), 3),
        (gen::random_regular(100, 50, 9).unwrap(), 50),
    ] {
        assert_eq!(g.regular_degree().unwrap(), d);
    }
    assert_eq!(gen::paley(13).unwrap().m(), 13 * 12 / 4);
    assert_eq!(
        gen::random_regular(60, 20, 4).unwrap(),
        gen::random_regular(60, 20, 4).unwrap()
    );
    assert_ne!(
        gen::random_regular(60, 20, 4).unwrap(),
        gen::random_regular(60, 20, 5).unwrap()
    );
}

#[test]
fn parser_reports_line_numbers() {
    let err = io::parse_graph("3 2\n0 1\n1 x\n").unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
    assert!(io::parse_graph("3 1\n0 3\n").is_err());
    assert!(io::parse_graph("3 1\n1 1\n").is_err());
}
