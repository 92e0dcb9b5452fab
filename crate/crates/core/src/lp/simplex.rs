//! Two-phase revised simplex over any [`Scalar`].
//!
//! The basis inverse is kept dense and updated with rank-one pivots; float
//! instantiations refactorise it from scratch every [`REFACTOR_EVERY`]
//! pivots. Columns are sparse. Pricing is Dantzig's rule with ties going to
//! the lowest column index, switching to Bland's rule after a run of
//! degenerate pivots so cycling cannot occur.

// the dense linear algebra reads best with explicit indices
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const REFACTOR_EVERY: usize = 100;
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum RowKind {
    Le,
    Ge,
    Eq,
}

/// `max cᵀx` subject to row constraints and `x ≥ 0`. Right-hand sides must
/// be non-negative.
#[derive(Debug, Clone)]
pub(crate) struct LinearProgram<S> {
    pub cols: Vec<Vec<(usize, S)>>,
    pub cost: Vec<S>,
    pub rows: Vec<(RowKind, S)>,
}

#[derive(Debug, Clone)]
pub(crate) struct LpSolution<S> {
    pub x: Vec<S>,
    /// Row duals `c_B B⁻¹` of the maximisation.
    pub y: Vec<S>,
    #[allow(dead_code)] // checked by the tests
    pub objective: S,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
pub(crate) enum LpOutcome<S> {
    Optimal(LpSolution<S>),
    Infeasible,
}

#[derive(Clone, Copy)]
enum Logical {
    Slack { row: usize, sign: i8 },
    Artificial { row: usize },
}

struct Simplex<'a, S> {
    lp: &'a LinearProgram<S>,
    m: usize,
    logical: Vec<Logical>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<S>,
    xb: Vec<S>,
    iterations: usize,
    max_iterations: usize,
    since_refactor: usize,
}

fn eps<S: Scalar>() -> S {
    S::pivot_eps()
}

impl<'a, S: Scalar> Simplex<'a, S> {
    fn new(lp: &'a LinearProgram<S>, max_iterations: usize) -> Self {
        let m = lp.rows.len();
        let nstruct = lp.cols.len();
        let mut logical = Vec::new();
        let mut basis = vec![usize::MAX; m];
        for (row, (kind, _)) in lp.rows.iter().enumerate() {
            match kind {
                RowKind::Le => {
                    basis[row] = nstruct + logical.len();
                    logical.push(Logical::Slack { row, sign: 1 });
                }
                RowKind::Ge => {
                    logical.push(Logical::Slack { row, sign: -1 });
                    basis[row] = nstruct + logical.len();
                    logical.push(Logical::Artificial { row });
                }
                RowKind::Eq => {
                    basis[row] = nstruct + logical.len();
                    logical.push(Logical::Artificial { row });
                }
            }
        }
        let total = nstruct + logical.len();
        let mut is_basic = vec![false; total];
        for &b in &basis {
            is_basic[b] = true;
        }
        let mut binv = vec![S::zero(); m * m];
        for i in 0..m {
            binv[i * m + i] = S::one();
        }
        let xb = lp.rows.iter().map(|(_, b)| b.clone()).collect();
        Simplex {
            lp,
            m,
            logical,
            basis,
            is_basic,
            binv,
            xb,
            iterations: 0,
            max_iterations,
            since_refactor: 0,
        }
    }

    fn ncols(&self) -> usize {
        self.lp.cols.len() + self.logical.len()
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.lp.cols.len() && matches!(self.logical[j - self.lp.cols.len()], Logical::Artificial { .. })
    }

    fn column(&self, j: usize) -> Vec<(usize, S)> {
        if j < self.lp.cols.len() {
            return self.lp.cols[j].clone();
        }
        match self.logical[j - self.lp.cols.len()] {
            Logical::Slack { row, sign } => vec![(row, S::from_i8(sign).expect("sign"))],
            Logical::Artificial { row } => vec![(row, S::one())],
        }
    }

    fn phase_cost(&self, j: usize, phase1: bool) -> S {
        if phase1 {
            if self.is_artificial(j) {
                -S::one()
            } else {
                S::zero()
            }
        } else if j < self.lp.cols.len() {
            self.lp.cost[j].clone()
        } else {
            S::zero()
        }
    }

    fn duals(&self, phase1: bool) -> Vec<S> {
        let m = self.m;
        let mut y = vec![S::zero(); m];
        for i in 0..m {
            let c = self.phase_cost(self.basis[i], phase1);
            if c.is_zero() {
                continue;
            }
            for k in 0..m {
                let a = &self.binv[i * m + k];
                if !a.is_zero() {
                    y[k] = y[k].clone() + c.clone() * a.clone();
                }
            }
        }
        y
    }

    /// `Σ_r v[r]·a_rj` without materialising column `j`.
    fn dot_column(&self, j: usize, v: &[S]) -> S {
        if j < self.lp.cols.len() {
            return self.lp.cols[j]
                .iter()
                .fold(S::zero(), |acc, (r, a)| acc + v[*r].clone() * a.clone());
        }
        match self.logical[j - self.lp.cols.len()] {
            Logical::Slack { row, sign } if sign < 0 => -v[row].clone(),
            Logical::Slack { row, .. } | Logical::Artificial { row } => v[row].clone(),
        }
    }

    fn reduced_cost(&self, j: usize, y: &[S], phase1: bool) -> S {
        self.phase_cost(j, phase1) - self.dot_column(j, y)
    }

    fn ftran(&self, col: &[(usize, S)]) -> Vec<S> {
        let m = self.m;
        let mut u = vec![S::zero(); m];
        for (r, a) in col {
            for (i, ui) in u.iter_mut().enumerate() {
                let b = &self.binv[i * m + r];
                if !b.is_zero() {
                    *ui = ui.clone() + b.clone() * a.clone();
                }
            }
        }
        u
    }

    fn objective(&self, phase1: bool) -> S {
        let mut z = S::zero();
        for i in 0..self.m {
            z = z + self.phase_cost(self.basis[i], phase1) * self.xb[i].clone();
        }
        z
    }

    fn incumbent(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.lp.cols.len()];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < x.len() {
                x[b] = self.xb[i].to_f64_lossy();
            }
        }
        x
    }

    fn pivot(&mut self, r: usize, q: usize, u: &[S]) {
        let m = self.m;
        let piv = u[r].clone();
        let theta = self.xb[r].clone() / piv.clone();
        for i in 0..m {
            if i != r && !u[i].is_zero() {
                let v = self.xb[i].clone() - theta.clone() * u[i].clone();
                self.xb[i] = if !S::is_exact() && v < S::zero() { S::zero() } else { v };
            }
        }
        self.xb[r] = theta;
        for k in 0..m {
            let idx = r * m + k;
            if !self.binv[idx].is_zero() {
                self.binv[idx] = self.binv[idx].clone() / piv.clone();
            }
        }
        let pivot_row: Vec<S> = self.binv[r * m..(r + 1) * m].to_vec();
        for i in 0..m {
            if i == r || u[i].is_zero() {
                continue;
            }
            let f = u[i].clone();
            for k in 0..m {
                if !pivot_row[k].is_zero() {
                    let idx = i * m + k;
                    self.binv[idx] = self.binv[idx].clone() - f.clone() * pivot_row[k].clone();
                }
            }
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
        self.iterations += 1;
        self.since_refactor += 1;
    }

    /// Rebuilds `B⁻¹` and `x_B` by Gauss–Jordan elimination.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut a = vec![S::zero(); m * m];
        for (i, &b) in self.basis.iter().enumerate() {
            for (r, v) in self.column(b) {
                a[r * m + i] = v;
            }
        }
        let mut inv = vec![S::zero(); m * m];
        for i in 0..m {
            inv[i * m + i] = S::one();
        }
        for c in 0..m {
            let mut p = c;
            for r in c + 1..m {
                if a[r * m + c].abs() > a[p * m + c].abs() {
                    p = r;
                }
            }
            if a[p * m + c].abs() <= eps::<S>() {
                return Err(Error::Numerical("basis matrix became singular".into()));
            }
            if p != c {
                for k in 0..m {
                    a.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let d = a[c * m + c].clone();
            for k in 0..m {
                a[c * m + k] = a[c * m + k].clone() / d.clone();
                inv[c * m + k] = inv[c * m + k].clone() / d.clone();
            }
            for r in 0..m {
                if r == c || a[r * m + c].is_zero() {
                    continue;
                }
                let f = a[r * m + c].clone();
                for k in 0..m {
                    if !a[c * m + k].is_zero() {
                        a[r * m + k] = a[r * m + k].clone() - f.clone() * a[c * m + k].clone();
                    }
                    if !inv[c * m + k].is_zero() {
                        inv[r * m + k] = inv[r * m + k].clone() - f.clone() * inv[c * m + k].clone();
                    }
                }
            }
        }
        self.binv = inv;
        let b: Vec<(usize, S)> = self.lp.rows.iter().map(|(_, b)| b.clone()).enumerate().collect();
        let mut xb = self.ftran(&b);
        if !S::is_exact() {
            for x in &mut xb {
                if *x < S::zero() {
                    *x = S::zero();
                }
            }
        }
        self.xb = xb;
        self.since_refactor = 0;
        Ok(())
    }

    /// Runs simplex pivots until optimal for the given phase.
    fn optimise(&mut self, phase1: bool) -> Result<()> {
        let mut degenerate = 0usize;
        loop {
            if !S::is_exact() && self.since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
            }
            if self.iterations >= self.max_iterations {
                return Err(Error::IterationLimit {
                    iterations: self.iterations,
                    objective: self.objective(phase1).to_f64_lossy(),
                    incumbent: self.incumbent(),
                });
            }
            let y = self.duals(phase1);
            let bland = degenerate >= DEGENERATE_RUN;
            let mut entering: Option<(usize, S)> = None;
            for j in 0..self.ncols() {
                if self.is_basic[j] || (!phase1 && self.is_artificial(j)) {
                    continue;
                }
                let d = self.reduced_cost(j, &y, phase1);
                if d <= eps::<S>() {
                    continue;
                }
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.as_ref().is_none_or(|(_, best)| d > *best) {
                    entering = Some((j, d));
                }
            }
            let Some((q, _)) = entering else {
                return Ok(());
            };
            let u = self.ftran(&self.column(q));
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.m {
                if u[i] <= eps::<S>() {
                    continue;
                }
                let ratio = self.xb[i].clone() / u[i].clone();
                let better = match &leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < best.clone() - eps::<S>()
                            || (ratio <= best.clone() + eps::<S>() && self.basis[i] < self.basis[*r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::Numerical("linear programme is unbounded".into()));
            };
            if ratio <= eps::<S>() {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, q, &u);
        }
    }

    /// Pivots artificials that finished phase 1 at zero out of the basis
    /// wherever some other column can replace them.
    fn drive_out_artificials(&mut self) {
        let m = self.m;
        for r in 0..m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let mut best: Option<(usize, S)> = None;
            let row_r: Vec<S> = self.binv[r * m..(r + 1) * m].to_vec();
            for j in 0..self.ncols() {
                if self.is_basic[j] || self.is_artificial(j) {
                    continue;
                }
                let alpha = self.dot_column(j, &row_r);
                let mag = alpha.abs();
                if mag > eps::<S>() && best.as_ref().is_none_or(|(_, b)| mag > b.abs()) {
                    best = Some((j, alpha));
                }
            }
            if let Some((q, _)) = best {
                let u = self.ftran(&self.column(q));
                self.pivot(r, q, &u);
            }
        }
    }
}

/// Solves `lp`. `feas_tol` bounds the phase-1 residual accepted as feasible.
pub(crate) fn solve<S: Scalar>(lp: &LinearProgram<S>, feas_tol: &S, max_iterations: usize) -> Result<LpOutcome<S>> {
    debug_assert!(lp.rows.iter().all(|(_, b)| *b >= S::zero()));
    let mut sx = Simplex::new(lp, max_iterations);
    let needs_phase1 = lp.rows.iter().any(|(k, _)| *k != RowKind::Le);
    if needs_phase1 {
        sx.optimise(true)?;
        if !S::is_exact() {
            sx.refactor()?;
        }
        let infeas = -sx.objective(true);
        if infeas > *feas_tol {
            return Ok(LpOutcome::Infeasible);
        }
        sx.drive_out_artificials();
    }
    sx.optimise(false)?;
    if !S::is_exact() {
        sx.refactor()?;
    }
    let mut x = vec![S::zero(); lp.cols.len()];
    for (i, &b) in sx.basis.iter().enumerate() {
        if b < x.len() {
            x[b] = sx.xb[i].clone();
        }
    }
    let objective = x
        .iter()
        .zip(&lp.cost)
        .fold(S::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
    Ok(LpOutcome::Optimal(LpSolution {
        x,
        y: sx.duals(false),
        objective,
        iterations: sx.iterations,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn lp_from_dense<S: Scalar>(a: &[&[i64]], kinds: &[RowKind], b: &[i64], c: &[i64]) -> LinearProgram<S> {
        let ncols = c.len();
        let mut cols = vec![Vec::new(); ncols];
        for (r, row) in a.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    cols[j].push((r, S::from_i64(v).unwrap()));
                }
            }
        }
        LinearProgram {
            cols,
            cost: c.iter().map(|&v| S::from_i64(v).unwrap()).collect(),
            rows: kinds
                .iter()
                .zip(b)
                .map(|(&k, &v)| (k, S::from_i64(v).unwrap()))
                .collect(),
        }
    }

    fn optimal<S: Scalar>(o: LpOutcome<S>) -> LpSolution<S> {
        match o {
            LpOutcome::Optimal(s) => s,
            LpOutcome::Infeasible => panic!("unexpectedly infeasible"),
        }
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  →  36 at (2, 6)
        let lp = lp_from_dense::<f64>(
            &[&[1, 0], &[0, 2], &[3, 2]],
            &[RowKind::Le; 3],
            &[4, 12, 18],
            &[3, 5],
        );
        let s = optimal(solve(&lp, &1e-9, 1000).unwrap());
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
        // duals (0, 1.5, 1)
        assert!((s.y[1] - 1.5).abs() < 1e-9 && (s.y[2] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_rational_with_equalities() {
        // max x + y + z, x + y = 1, y + z = 1, x + z >= 1/1
        let lp = lp_from_dense::<BigRational>(
            &[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]],
            &[RowKind::Eq, RowKind::Eq, RowKind::Ge],
            &[1, 1, 1],
            &[1, 1, 1],
        );
        let s = optimal(solve(&lp, &BigRational::from_integer(0.into()), 1000).unwrap());
        // y = 0, x = z = 1 → 2
        assert_eq!(s.objective, BigRational::from_integer(2.into()));
    }

    #[test]
    fn detects_infeasibility() {
        // x + y = 1 and x + y >= 2
        let lp = lp_from_dense::<f64>(&[&[1, 1], &[1, 1]], &[RowKind::Eq, RowKind::Ge], &[1, 2], &[1, 1]);
        assert!(matches!(solve(&lp, &1e-9, 1000).unwrap(), LpOutcome::Infeasible));
    }

    #[test]
    fn iteration_cap_reports_incumbent() {
        let lp = lp_from_dense::<f64>(
            &[&[1, 0], &[0, 2], &[3, 2]],
            &[RowKind::Le; 3],
            &[4, 12, 18],
            &[3, 5],
        );
        match solve(&lp, &1e-9, 1) {
            Err(Error::IterationLimit { iterations, incumbent, .. }) => {
                assert_eq!(iterations, 1);
                assert_eq!(incumbent.len(), 2);
            }
            other => panic!("expected iteration limit, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_programme_terminates() {
        // Beale's cycling example under the textbook rule.
        let mut lp = LinearProgram::<BigRational> {
            cols: vec![Vec::new(); 4],
            cost: Vec::new(),
            rows: vec![
                (RowKind::Le, BigRational::from_integer(0.into())),
                (RowKind::Le, BigRational::from_integer(0.into())),
                (RowKind::Le, BigRational::from_integer(1.into())),
            ],
        };
        let r = |n: i64, d: i64| <BigRational as Scalar>::ratio(n, d);
        let a = [
            [r(1, 4), r(-8, 1), r(-1, 1), r(9, 1)],
            [r(1, 2), r(-12, 1), r(-1, 2), r(3, 1)],
            [r(0, 1), r(0, 1), r(1, 1), r(0, 1)],
        ];
        for (i, row) in a.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    lp.cols[j].push((i, v.clone()));
                }
            }
        }
        lp.cost = vec![r(3, 4), r(-20, 1), r(1, 2), r(-6, 1)];
        let s = optimal(solve(&lp, &r(0, 1), 10_000).unwrap());
        assert_eq!(s.objective, r(5, 4));
    }
}
