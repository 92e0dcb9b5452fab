//! Exact maximum-weight packing of vertex-disjoint `t`-sets by branch and
//! bound, with a node budget.
//!
//! Used for the integral clique-matching value on small instances and for
//! improving hypergraph matchings in the pipeline.

/// Outcome of a packing search. `optimal` is false when the node budget ran
/// out; `chosen` is then the best packing seen so far.
#[derive(Debug, Clone, PartialEq)]
pub struct Packing {
    pub chosen: Vec<usize>,
    pub value: f64,
    pub optimal: bool,
    pub nodes: u64,
}

struct Search<'a> {
    t: usize,
    sets: &'a [usize],
    weights: &'a [f64],
    /// Sets through each vertex, heaviest first.
    through: Vec<Vec<usize>>,
    integral: bool,
    budget: u64,
    nodes: u64,
    free: Vec<bool>,
    current: Vec<usize>,
    best: Vec<usize>,
    best_value: f64,
}

impl Search<'_> {
    fn members(&self, s: usize) -> &[usize] {
        &self.sets[s * self.t..(s + 1) * self.t]
    }

    fn usable(&self, s: usize) -> bool {
        self.weights[s] > 0.0 && self.members(s).iter().all(|&v| self.free[v])
    }

    /// Upper bound on what the free vertices can still add: each packed set
    /// is paid for by its `t` vertices, each at most `best(v)/t`.
    fn bound(&self) -> f64 {
        let mut total = 0.0;
        for (v, sets) in self.through.iter().enumerate() {
            if self.free[v] {
                if let Some(&s) = sets.iter().find(|&&s| self.usable(s)) {
                    total += self.weights[s];
                }
            }
        }
        let b = total / self.t as f64;
        if self.integral {
            (b + 1e-9).floor()
        } else {
            b
        }
    }

    /// Free vertex with the fewest usable sets (at least one).
    fn branch_vertex(&self) -> Option<(usize, Vec<usize>)> {
        let mut pick: Option<(usize, Vec<usize>)> = None;
        for (v, sets) in self.through.iter().enumerate() {
            if !self.free[v] {
                continue;
            }
            let opts: Vec<usize> = sets.iter().copied().filter(|&s| self.usable(s)).collect();
            if opts.is_empty() {
                continue;
            }
            if pick.as_ref().is_none_or(|p| opts.len() < p.1.len()) {
                let single = opts.len() == 1;
                pick = Some((v, opts));
                if single {
                    break;
                }
            }
        }
        pick
    }

    fn run(&mut self, value: f64) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        if value > self.best_value + 1e-12 {
            self.best_value = value;
            self.best = self.current.clone();
        }
        if value + self.bound() <= self.best_value + 1e-12 {
            return true;
        }
        let Some((v, opts)) = self.branch_vertex() else {
            return true;
        };
        for s in opts {
            let members = self.members(s).to_vec();
            for &u in &members {
                self.free[u] = false;
            }
            self.current.push(s);
            let ok = self.run(value + self.weights[s]);
            self.current.pop();
            for &u in &members {
                self.free[u] = true;
            }
            if !ok {
                return false;
            }
        }
        // leave v uncovered
        self.free[v] = false;
        let ok = self.run(value);
        self.free[v] = true;
        ok
    }
}

/// Maximum total weight of pairwise vertex-disjoint sets.
///
/// `sets` is a flat list of `t`-tuples over `0..n`. With `integral`, weights
/// are assumed to be integers and the bound is rounded down. `seed` is an
/// optional feasible packing used as the starting incumbent.
pub fn max_weight_packing(
    n: usize,
    t: usize,
    sets: &[usize],
    weights: &[f64],
    integral: bool,
    seed: Option<&[usize]>,
    budget: u64,
) -> Packing {
    let count = sets.len().checked_div(t).unwrap_or(0);
    let mut through = vec![Vec::new(); n];
    for s in 0..count {
        for &v in &sets[s * t..(s + 1) * t] {
            through[v].push(s);
        }
    }
    for list in &mut through {
        list.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    }
    let (best, best_value) = match seed {
        Some(s) => (s.to_vec(), s.iter().map(|&i| weights[i]).sum()),
        None => (Vec::new(), 0.0),
    };
    let mut search = Search {
        t,
        sets,
        weights,
        through,
        integral,
        budget,
        nodes: 0,
        free: vec![true; n],
        current: Vec::new(),
        best,
        best_value,
    };
    let optimal = search.run(0.0);
    let mut chosen = search.best;
    chosen.sort_unstable();
    Packing {
        chosen,
        value: search.best_value,
        optimal,
        nodes: search.nodes,
    }
}
