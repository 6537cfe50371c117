//! Dense two-phase revised simplex for `min cᵀx s.t. A x = b, x ≥ 0`.
//!
//! The basis inverse is stored explicitly and updated by elementary row
//! operations, with a fresh LU factorization every [`REFACTOR_EVERY`] pivots.
//! Pricing is Dantzig's rule; after [`STALL_LIMIT`] consecutive degenerate
//! pivots the solver switches to Bland's rule (smallest entering index,
//! smallest leaving index) until the objective moves again, which rules out
//! cycling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, LuFactorization};

const REFACTOR_EVERY: usize = 50;
const STALL_LIMIT: usize = 20;
const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardFormLP {
    pub a: DenseMatrix,
    pub b: Vec<f64>,
    pub cost: Vec<f64>,
}

impl StandardFormLP {
    pub fn new(a: DenseMatrix, b: Vec<f64>, cost: Vec<f64>) -> Result<Self> {
        if a.rows() != b.len() || a.cols() != cost.len() {
            return Err(Error::DimensionMismatch(format!(
                "LP with {}x{} matrix, {} right-hand sides, {} costs",
                a.rows(),
                a.cols(),
                b.len(),
                cost.len()
            )));
        }
        if let Some(i) = b.iter().chain(&cost).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { a, b, cost })
    }

    /// `min ‖z‖_∞ s.t. A z = y` over `x = (w₊, w₋, u)` with `w₊ = u·1 − z`,
    /// `w₋ = u·1 + z`:
    ///
    /// ```text
    /// (−A | A | 0)·x = 2y        (m rows)
    /// w₊_i + w₋_i − 2u = 0        (n rows)
    /// ```
    ///
    /// and cost `e_{2n+1}`. The coupling rows tie both auxiliary vectors to the
    /// same `u`; without them the block system alone does not bound `|z_i|`.
    pub fn linf(a: &DenseMatrix, y: &[f64]) -> Result<Self> {
        let (m, n) = a.shape();
        if y.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} entries, matrix has {m} rows",
                y.len()
            )));
        }
        let mut big = DenseMatrix::zeros(m + n, 2 * n + 1);
        for i in 0..m {
            for j in 0..n {
                big[(i, j)] = -a[(i, j)];
                big[(i, n + j)] = a[(i, j)];
            }
        }
        for i in 0..n {
            big[(m + i, i)] = 1.0;
            big[(m + i, n + i)] = 1.0;
            big[(m + i, 2 * n)] = -2.0;
        }
        let mut b: Vec<f64> = y.iter().map(|v| 2.0 * v).collect();
        b.resize(m + n, 0.0);
        let mut cost = vec![0.0; 2 * n + 1];
        cost[2 * n] = 1.0;
        Self::new(big, b, cost)
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    /// Largest constraint violation `max(‖A x − b‖_∞, max_j(−x_j))`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let r = self.a.matvec(x);
        let eq = r
            .iter()
            .zip(&self.b)
            .map(|(ri, bi)| (ri - bi).abs())
            .fold(0.0, f64::max);
        let neg = x.iter().map(|v| -v).fold(0.0, f64::max);
        eq.max(neg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

pub fn default_iteration_limit(lp: &StandardFormLP) -> usize {
    50 * (lp.rows() + lp.cols()) + 1000
}

/// Vertex-optimal solution of a standard-form LP.
pub fn lp_solve_standard_form(lp: &StandardFormLP) -> Result<LpSolution> {
    lp_solve_with_limit(lp, default_iteration_limit(lp))
}

pub fn lp_solve_with_limit(lp: &StandardFormLP, max_iterations: usize) -> Result<LpSolution> {
    let mut s = Simplex::new(lp);
    let phase1_cost: Vec<f64> = (0..s.total).map(|j| if j >= s.n { 1.0 } else { 0.0 }).collect();
    s.optimize(&phase1_cost, true, max_iterations)?;
    let infeasibility: f64 = s
        .basis
        .iter()
        .zip(&s.x_b)
        .filter(|(j, _)| **j >= s.n)
        .map(|(_, v)| v.max(0.0))
        .sum();
    let scale = 1.0 + s.b.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if infeasibility > FEAS_TOL * scale {
        return Err(Error::Infeasible);
    }
    s.drive_out_artificials();
    let mut phase2_cost = vec![0.0; s.total];
    phase2_cost[..s.n].copy_from_slice(&lp.cost);
    s.optimize(&phase2_cost, false, max_iterations)?;

    let mut x = vec![0.0; s.n];
    for (&j, &v) in s.basis.iter().zip(&s.x_b) {
        if j < s.n {
            x[j] = v.max(0.0);
        }
    }
    let objective = x.iter().zip(&lp.cost).map(|(a, b)| a * b).sum();
    Ok(LpSolution {
        x,
        objective,
        iterations: s.iterations,
    })
}

struct Simplex {
    /// Row-scaled `[A | I]` with `b ≥ 0`.
    a: DenseMatrix,
    b: Vec<f64>,
    rows: usize,
    n: usize,
    total: usize,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    inv: DenseMatrix,
    x_b: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
}

impl Simplex {
    fn new(lp: &StandardFormLP) -> Self {
        let (rows, n) = lp.a.shape();
        let total = n + rows;
        let mut a = DenseMatrix::zeros(rows, total);
        let mut b = vec![0.0; rows];
        for i in 0..rows {
            let row = lp.a.row(i);
            let scale = row.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
            let mut s = if scale > 0.0 { 1.0 / scale } else { 1.0 };
            if lp.b[i] < 0.0 {
                s = -s;
            }
            for (j, v) in row.iter().enumerate() {
                a[(i, j)] = v * s;
            }
            a[(i, n + i)] = 1.0;
            b[i] = lp.b[i] * s;
        }
        let basis: Vec<usize> = (n..total).collect();
        let mut is_basic = vec![false; total];
        for &j in &basis {
            is_basic[j] = true;
        }
        Self {
            a,
            x_b: b.clone(),
            b,
            rows,
            n,
            total,
            basis,
            is_basic,
            inv: DenseMatrix::identity(rows),
            iterations: 0,
            since_refactor: 0,
        }
    }

    fn column(&self, j: usize) -> Vec<f64> {
        self.a.column(j)
    }

    /// `B⁻¹ a_j`.
    fn direction(&self, j: usize) -> Vec<f64> {
        let col = self.column(j);
        self.inv.matvec(&col)
    }

    fn refactor(&mut self) {
        let cols: Vec<Vec<f64>> = self.basis.iter().map(|&j| self.column(j)).collect();
        let bm = DenseMatrix::from_columns(&cols).expect("basis columns have equal length");
        if let Ok(lu) = LuFactorization::factor(&bm) {
            self.inv = lu.inverse();
            self.x_b = lu.solve(&self.b);
            for v in &mut self.x_b {
                if *v < 0.0 && *v > -FEAS_TOL {
                    *v = 0.0;
                }
            }
        }
        self.since_refactor = 0;
    }

    fn pivot(&mut self, r: usize, entering: usize, d: &[f64]) {
        let t = self.x_b[r] / d[r];
        for (i, xi) in self.x_b.iter_mut().enumerate() {
            if i != r {
                *xi -= t * d[i];
                if *xi < 0.0 && *xi > -FEAS_TOL {
                    *xi = 0.0;
                }
            }
        }
        self.x_b[r] = t.max(0.0);
        let pr = d[r];
        for v in self.inv.row_mut(r) {
            *v /= pr;
        }
        let pivot_row = self.inv.row(r).to_vec();
        for (i, &di) in d.iter().enumerate() {
            if i != r && di != 0.0 {
                for (v, p) in self.inv.row_mut(i).iter_mut().zip(&pivot_row) {
                    *v -= di * p;
                }
            }
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[entering] = true;
        self.basis[r] = entering;
        self.iterations += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor();
        }
    }

    fn optimize(&mut self, cost: &[f64], allow_artificial: bool, max_iterations: usize) -> Result<()> {
        let cost_scale = 1.0 + cost.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let candidates = if allow_artificial { self.total } else { self.n };
        let mut stalled = 0usize;
        loop {
            if self.iterations >= max_iterations {
                return Err(Error::IterationLimit(max_iterations));
            }
            // Simplex multipliers y = c_Bᵀ B⁻¹ and reduced costs c − Aᵀy.
            let mut y = vec![0.0; self.rows];
            for (k, &j) in self.basis.iter().enumerate() {
                let cb = cost[j];
                if cb != 0.0 {
                    for (yi, v) in y.iter_mut().zip(self.inv.row(k)) {
                        *yi += cb * v;
                    }
                }
            }
            let mut reduced = cost[..candidates].to_vec();
            for (i, &yi) in y.iter().enumerate() {
                if yi != 0.0 {
                    for (rj, aij) in reduced.iter_mut().zip(&self.a.row(i)[..candidates]) {
                        *rj -= yi * aij;
                    }
                }
            }
            let bland = stalled >= STALL_LIMIT;
            let mut entering = None;
            let mut best = -COST_TOL * cost_scale;
            for (j, &rj) in reduced.iter().enumerate() {
                if self.is_basic[j] || rj >= -COST_TOL * cost_scale {
                    continue;
                }
                if bland {
                    entering = Some(j);
                    break;
                }
                if rj < best {
                    best = rj;
                    entering = Some(j);
                }
            }
            let Some(e) = entering else {
                return Ok(());
            };
            let d = self.direction(e);
            let mut leave: Option<(usize, f64)> = None;
            for (i, &di) in d.iter().enumerate() {
                if di <= PIVOT_TOL {
                    continue;
                }
                let t = self.x_b[i].max(0.0) / di;
                let better = match leave {
                    None => true,
                    Some((r, tr)) => {
                        t < tr - 1e-12 * (1.0 + tr)
                            || (t <= tr + 1e-12 * (1.0 + tr) && self.basis[i] < self.basis[r])
                    }
                };
                if better {
                    leave = Some((i, t));
                }
            }
            let Some((r, t)) = leave else {
                return Err(Error::Unbounded);
            };
            if t <= 1e-14 {
                stalled += 1;
            } else {
                stalled = 0;
            }
            self.pivot(r, e, &d);
        }
    }

    /// Replaces zero-level artificial basics by original columns where the
    /// corresponding row of `B⁻¹A` allows it; rows where it does not are
    /// redundant and keep their artificial at zero.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows {
            if self.basis[r] < self.n {
                continue;
            }
            let inv_row = self.inv.row(r).to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.n {
                if self.is_basic[j] {
                    continue;
                }
                let v: f64 = (0..self.rows).map(|i| inv_row[i] * self.a[(i, j)]).sum();
                if v.abs() > PIVOT_TOL && best.is_none_or(|(_, bv)| v.abs() > bv) {
                    best = Some((j, v.abs()));
                }
            }
            if let Some((j, _)) = best {
                let d = self.direction(j);
                // Degenerate pivot: x_b[r] is zero (up to tolerance), so no basic value moves.
                self.x_b[r] = 0.0;
                self.pivot_any_sign(r, j, &d);
            }
        }
    }

    fn pivot_any_sign(&mut self, r: usize, entering: usize, d: &[f64]) {
        let pr = d[r];
        for v in self.inv.row_mut(r) {
            *v /= pr;
        }
        let pivot_row = self.inv.row(r).to_vec();
        for (i, &di) in d.iter().enumerate() {
            if i != r && di != 0.0 {
                for (v, p) in self.inv.row_mut(i).iter_mut().zip(&pivot_row) {
                    *v -= di * p;
                }
            }
        }
        self.is_basic[self.basis[r]] = false;
        self.is_basic[entering] = true;
        self.basis[r] = entering;
        self.x_b[r] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    #[test]
    fn single_equation() {
        // min u s.t. z₁ = 1, |z₁| ≤ u.
        let a = DenseMatrix::from_rows(&[[1.0]]).unwrap();
        let s = lp_solve_standard_form(&StandardFormLP::linf(&a, &[1.0]).unwrap()).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_variable_examples() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0]]).unwrap();
        let s = lp_solve_standard_form(&StandardFormLP::linf(&a, &[1.0]).unwrap()).unwrap();
        assert!((s.objective - 0.5).abs() < 1e-12);
        let a = DenseMatrix::from_rows(&[[1.0, 2.0]]).unwrap();
        let s = lp_solve_standard_form(&StandardFormLP::linf(&a, &[3.0]).unwrap()).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x₁ + x₂ = −1 with x ≥ 0.
        let a = DenseMatrix::from_rows(&[[1.0, 1.0]]).unwrap();
        let lp = StandardFormLP::new(a.clone(), vec![-1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(lp_solve_standard_form(&lp), Err(Error::Infeasible));
        // min −x₁ s.t. x₁ − x₂ = 0.
        let a = DenseMatrix::from_rows(&[[1.0, -1.0]]).unwrap();
        let lp = StandardFormLP::new(a, vec![0.0], vec![-1.0, 0.0]).unwrap();
        assert_eq!(lp_solve_standard_form(&lp), Err(Error::Unbounded));
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0, 0.0], [2.0, 2.0, 0.0], [0.0, 1.0, 1.0]]).unwrap();
        let lp = StandardFormLP::new(a, vec![1.0, 2.0, 1.0], vec![1.0, 2.0, 0.5]).unwrap();
        let s = lp_solve_standard_form(&lp).unwrap();
        assert!(lp.violation(&s.x) < 1e-12);
        // x = (1, 0, 1) is optimal with objective 1.5.
        assert!((s.objective - 1.5).abs() < 1e-12);
    }

    #[test]
    fn matches_basis_enumeration() {
        let mut rng = oracle::rng(31);
        for trial in 0..40 {
            let m = 1 + trial % 3;
            let n = m + 2 + trial % 4;
            let a = oracle::gaussian_matrix(&mut rng, m, n);
            // Feasible by construction: b = A x₀ with x₀ ≥ 0.
            let x0 = oracle::uniform_vec(&mut rng, n, 0.0, 1.0);
            let b = a.matvec(&x0);
            let cost = oracle::uniform_vec(&mut rng, n, 0.0, 1.0);
            let lp = StandardFormLP::new(a.clone(), b.clone(), cost.clone()).unwrap();
            let s = lp_solve_standard_form(&lp).unwrap();
            let exact = oracle::standard_form_by_basis_enumeration(&a, &b, &cost).unwrap();
            assert!((s.objective - exact).abs() <= 1e-8 * (1.0 + exact.abs()), "{} vs {exact}", s.objective);
            assert!(lp.violation(&s.x) <= 1e-9);
        }
    }

    #[test]
    fn iteration_limit_is_reported() {
        let mut rng = oracle::rng(32);
        let a = oracle::gaussian_matrix(&mut rng, 3, 8);
        let y = oracle::gaussian_vec(&mut rng, 3);
        let lp = StandardFormLP::linf(&a, &y).unwrap();
        assert_eq!(lp_solve_with_limit(&lp, 1), Err(Error::IterationLimit(1)));
    }
}
