use cfl_core::cliques::{self, CliqueSet};
use cfl_core::lp::{self, DEFAULT_TOL};
use cfl_core::{gen, Graph, Rational, Scalar, WGraph};
use cfl_core::weighted::WeightedGraph;
use proptest::prelude::*;

const TOL: f64 = DEFAULT_TOL;

/// A graph on `n ≤ 9` vertices, dense enough to have triangles, with weights
/// in eighths so that the f64 and rational instances agree exactly.
fn arb_weighted() -> impl Strategy<Value = (Graph, Vec<u32>)> {
    (4usize..10, prop::collection::vec(0u8..4, 36), prop::collection::vec(0u32..=8, 36)).prop_map(|(n, mask, ks)| {
        let mut pairs = Vec::new();
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                if mask[k] != 0 {
                    pairs.push((u, v));
                }
                k += 1;
            }
        }
        let g = Graph::from_edge_list(n, pairs).unwrap();
        let ks = (0..g.m()).map(|e| ks[e]).collect();
        (g, ks)
    })
}

fn eighths(g: &Graph, ks: &[u32]) -> WGraph {
    WGraph::new(g.clone(), ks.iter().map(|&k| k as f64 / 8.0).collect()).unwrap()
}

fn feasible(wg: &WGraph, cl: &CliqueSet, f: &[f64], eq: bool) -> bool {
    let loads = lp::vertex_loads(cl, f);
    let vertex_ok = loads
        .iter()
        .all(|&l| if eq { (l - 1.0).abs() <= 1e-6 } else { l <= 1.0 + 1e-6 });
    let pair = lp::pair_loads(wg.base(), cl, f);
    vertex_ok && f.iter().all(|&x| x >= -1e-9) && pair.iter().zip(wg.weights()).all(|(l, w)| *l <= w + 1e-6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn strong_duality_and_feasibility((g, ks) in arb_weighted()) {
        let wg = eighths(&g, &ks);
        let cl = cliques::enumerate_cliques(&g, 3).unwrap();
        let pair = lp::solve_pair(&wg, &cl, &TOL).unwrap();
        prop_assert!((pair.primal.objective - pair.dual.objective).abs() <= 2e-7);
        prop_assert!(feasible(&wg, &cl, &pair.primal.f, false));
        let n_over_t = g.n() as f64 / 3.0;
        prop_assert!(pair.primal.objective <= n_over_t + 1e-9);
        // both forms reach the same optimum
        for form in [lp::LpForm::Primal, lp::LpForm::Dual] {
            let other = lp::solve_pair_in(&wg, &cl, &TOL, Some(form)).unwrap();
            prop_assert!((other.primal.objective - pair.primal.objective).abs() <= 1e-7);
        }
    }

    #[test]
    fn exact_and_float_agree((g, ks) in arb_weighted()) {
        let wg = eighths(&g, &ks);
        let exact = WeightedGraph::new(g.clone(), ks.iter().map(|&k| Rational::ratio(k as i64, 8)).collect()).unwrap();
        let cl = cliques::enumerate_cliques(&g, 3).unwrap();
        let float = lp::solve_pair(&wg, &cl, &TOL).unwrap().primal.objective;
        let zero = Rational::ratio(0, 1);
        let rational = lp::solve_pair(&exact, &cl, &zero).unwrap();
        prop_assert_eq!(&rational.primal.objective, &rational.dual.objective);
        prop_assert!((rational.primal.objective.to_f64_lossy() - float).abs() <= 1e-9);
    }

    /// Raising weights can only help; scaling them by γ keeps at least γ t*.
    #[test]
    fn monotone_and_scaling((g, ks) in arb_weighted(), bump in 0u32..=8, gamma_k in 1u32..=8) {
        let wg = eighths(&g, &ks);
        let base = lp::t_star(&wg, 3, &TOL).unwrap();
        let raised: Vec<u32> = ks.iter().map(|&k| (k + bump).min(8)).collect();
        prop_assert!(lp::t_star(&eighths(&g, &raised), 3, &TOL).unwrap() >= base - 1e-7);
        let gamma = gamma_k as f64 / 8.0;
        let scaled = WGraph::new(g.clone(), wg.weights().iter().map(|w| w * gamma).collect()).unwrap();
        prop_assert!(lp::t_star(&scaled, 3, &TOL).unwrap() >= gamma * base - 1e-7);
    }

    #[test]
    fn rounded_factor_is_a_factor((g, ks) in arb_weighted()) {
        let wg = eighths(&g, &ks);
        let cl = cliques::enumerate_cliques(&g, 3).unwrap();
        let cert = lp::fractional_factor_in(&wg, &cl, &TOL).unwrap();
        match lp::rounded_factor(&wg, &cl, TOL, 5).unwrap() {
            Some((f, fixed)) => {
                prop_assert!(cert.has_factor);
                prop_assert!(feasible(&wg, &cl, &f, true));
                prop_assert_eq!(f.iter().filter(|&&x| x == 1.0).count() >= fixed, true);
            }
            None => prop_assert!(!cert.has_factor),
        }
    }

    #[test]
    fn integral_value_never_beats_the_relaxation((g, ks) in arb_weighted()) {
        let wg = eighths(&g, &ks);
        let integral = lp::integral_matching_value(&wg, 3).unwrap();
        prop_assert!(integral <= lp::t_star(&wg, 3, &TOL).unwrap() + 1e-7);
    }
}

#[test]
fn complete_graphs_have_factors_exactly_when_t_divides_n() {
    for n in 3..=15 {
        let wg = WGraph::unit(gen::complete(n).unwrap());
        let cert = lp::has_fractional_factor(&wg, 3, &TOL).unwrap();
        assert!((cert.t_star - n as f64 / 3.0).abs() < 1e-7, "K_{n}");
        // K_n always has a fractional factor (uniform weights); integral ones need 3 | n
        assert!(cert.has_factor, "K_{n}");
        let (f, fixed) = lp::rounded_factor(&wg, &cliques::enumerate_cliques(wg.base(), 3).unwrap(), TOL, 5)
            .unwrap()
            .unwrap();
        if n % 3 == 0 {
            assert_eq!(fixed, n / 3);
            assert!(f.iter().all(|&x| x == 0.0 || x == 1.0));
        }
    }
}

#[test]
fn basic_facts_on_small_instances() {
    for g in [gen::paley(13).unwrap(), gen::complete(7).unwrap(), gen::random_regular(24, 8, 2).unwrap()] {
        let r = lp::check_prop3(&WGraph::unit(g), 3, TOL, 3).unwrap();
        assert!(r.all_pass, "{r:?}");
    }
}

#[test]
fn single_precision_instantiation() {
    let g = gen::complete(6).unwrap();
    let wg: WeightedGraph<f32> = WeightedGraph::unit(g.clone());
    let cl = cliques::enumerate_cliques(&g, 3).unwrap();
    let pair = lp::solve_pair(&wg, &cl, &1e-4f32).unwrap();
    assert!((pair.primal.objective - 2.0).abs() < 1e-4);
    let half: WeightedGraph<f32> = WeightedGraph::uniform(g, 0.5).unwrap();
    assert!(lp::fractional_factor_in(&half, &cl, &1e-4f32).unwrap().has_factor);
}
