//! Fixed instance lists used by the acceptance suite.

use cfl_core::{gen, rng, Graph, Result, WGraph};
use rand::Rng as _;

pub struct Instance {
    pub name: String,
    pub wg: WGraph,
}

impl Instance {
    fn unit(name: impl Into<String>, g: Graph) -> Instance {
        Instance {
            name: name.into(),
            wg: WGraph::unit(g),
        }
    }
}

/// Weights uniform in `[0,1]`, with about one edge in ten forced to 1 and
/// one in twenty forced to 0 so that presolve paths get exercised.
pub fn random_weights(g: Graph, seed: u64) -> Result<WGraph> {
    let mut r = rng::seeded(seed);
    let w = (0..g.m())
        .map(|_| {
            let roll: f64 = r.gen();
            if roll < 0.1 {
                1.0
            } else if roll < 0.15 {
                0.0
            } else {
                r.gen()
            }
        })
        .collect();
    WGraph::new(g, w)
}

/// The LP duality corpus: complete graphs, Paley(13), Petersen, random
/// regular graphs up to 60 vertices, and randomly weighted copies.
pub fn lp_corpus() -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for n in 4..=12 {
        out.push(Instance::unit(format!("K_{n}"), gen::complete(n)?));
    }
    out.push(Instance::unit("Paley(13)", gen::paley(13)?));
    out.push(Instance::unit("Petersen", gen::petersen()));
    for (n, d, seed) in [(12, 4, 6), (20, 6, 1), (24, 8, 5), (30, 10, 2), (40, 12, 3), (60, 20, 4)] {
        out.push(Instance::unit(
            format!("random_regular({n},{d},seed={seed})"),
            gen::random_regular(n, d, seed)?,
        ));
    }
    let weighted: [(&str, Graph, u64); 5] = [
        ("K_8", gen::complete(8)?, 1),
        ("K_10", gen::complete(10)?, 2),
        ("K_12", gen::complete(12)?, 7),
        ("Paley(13)", gen::paley(13)?, 3),
        ("random_regular(30,10,seed=2)", gen::random_regular(30, 10, 2)?, 4),
    ];
    for (name, g, seed) in weighted {
        out.push(Instance {
            name: format!("{name} with random weights (seed={seed})"),
            wg: random_weights(g, seed)?,
        });
    }
    Ok(out)
}

/// Unweighted regular graphs for spectral checks.
pub fn spectral_corpus() -> Result<Vec<(String, Graph)>> {
    let mut out: Vec<(String, Graph)> = lp_corpus()?
        .into_iter()
        .filter(|i| i.wg.weights().iter().all(|&w| w == 1.0))
        .map(|i| (i.name, i.wg.base().clone()))
        .collect();
    out.push(("C_5".into(), gen::cycle(5)?));
    out.push(("Paley(17)".into(), gen::paley(17)?));
    out.push(("circulant(8,{1,4})".into(), gen::circulant(8, &[1, 4])?));
    out.push(("random_regular(100,50,seed=1)".into(), gen::random_regular(100, 50, 1)?));
    Ok(out)
}
