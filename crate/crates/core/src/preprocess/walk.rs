//! The kernel walk shared by the baseline and accelerated pre-processing.
//!
//! Free (unsaturated) coordinates are consumed in natural index order: the
//! working set always holds the first `m + 1` free indices and `pending`
//! holds the rest. Every operation per step touches only the working set, so
//! a step costs `O(m³)` (baseline) or `O(m²)` (accelerated) independent of `n`.

use super::kernel::step_on_working_set;
use super::{StepRecord, SATURATION_RTOL};
use crate::error::{Error, Result};
use crate::linalg::{rank1_inverse_update_in_place, rref_kernel, DenseMatrix, LuFactorization};

/// Re-factorize the working basis from scratch after this many rank-one updates.
pub const REFACTOR_INTERVAL: usize = 64;

/// Sherman–Morrison denominators below this magnitude trigger the alternative
/// column exchange or a fresh factorization.
const SWAP_DENOMINATOR_TOL: f64 = 1e-8;

pub(crate) struct Walk<'a> {
    a: &'a DenseMatrix,
    c: f64,
    pub z: Vec<f64>,
    pub saturated: Vec<bool>,
    working: Vec<usize>,
    pending: Vec<usize>,
    cursor: usize,
    pub iterations: usize,
    pub trace: Option<Vec<StepRecord>>,
    positions: Vec<usize>,
}

impl<'a> Walk<'a> {
    pub fn new(a: &'a DenseMatrix, w: &[f64], c: f64, traced: bool) -> Result<Self> {
        let (m, n) = a.shape();
        if w.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "weight vector has {} entries, data matrix has {n} columns",
                w.len()
            )));
        }
        if m == 0 {
            return Err(Error::DimensionMismatch("data matrix has no rows".into()));
        }
        if let Some(pos) = w.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let linf = crate::linalg::norm_inf(w);
        if !(c >= linf) || !c.is_finite() {
            return Err(Error::CapTooSmall { cap: c, linf });
        }

        let mut z = w.to_vec();
        let mut saturated = vec![false; n];
        // Zero columns: move the entry to +c; this does not change A·z.
        for j in 0..n {
            if (0..m).all(|i| a[(i, j)] == 0.0) {
                z[j] = c;
                saturated[j] = true;
            }
        }
        let threshold = c * (1.0 - SATURATION_RTOL);
        for j in 0..n {
            if !saturated[j] && z[j].abs() >= threshold {
                z[j] = c.copysign(z[j]);
                saturated[j] = true;
            }
        }
        let pending: Vec<usize> = (0..n).filter(|&j| !saturated[j]).collect();
        Ok(Self {
            a,
            c,
            z,
            saturated,
            working: Vec::with_capacity(m + 2),
            pending,
            cursor: 0,
            iterations: 0,
            trace: traced.then(Vec::new),
            positions: Vec::with_capacity(m + 1),
        })
    }

    fn m(&self) -> usize {
        self.a.rows()
    }

    fn next_pending(&mut self) -> Option<usize> {
        let next = self.pending.get(self.cursor).copied();
        if next.is_some() {
            self.cursor += 1;
        }
        next
    }

    fn fill_working(&mut self, size: usize) {
        while self.working.len() < size {
            match self.next_pending() {
                Some(j) => self.working.push(j),
                None => break,
            }
        }
    }

    fn record(&mut self) {
        if let Some(trace) = self.trace.as_mut() {
            let saturated_count = self.saturated.iter().filter(|s| **s).count();
            let linf = crate::linalg::norm_inf(&self.z);
            trace.push(StepRecord {
                saturated_count,
                linf,
            });
        }
    }

    /// One walk step along `b` (given on `cols`); leaves the indices that
    /// saturated in `hit`.
    fn advance(&mut self, cols: &[usize], b: &[f64], hit: &mut Vec<usize>) -> Result<()> {
        step_on_working_set(&mut self.z, cols, b, self.c, &mut self.positions)?;
        hit.clear();
        hit.extend(self.positions.iter().map(|&k| cols[k]));
        for &i in hit.iter() {
            self.saturated[i] = true;
        }
        self.iterations += 1;
        self.record();
        Ok(())
    }

    /// The kernel walk, with the kernel vector recomputed by row reduction each step.
    pub fn run_baseline(&mut self) -> Result<()> {
        let m = self.m();
        loop {
            self.fill_working(m + 1);
            if self.working.len() <= m {
                return Ok(());
            }
            let b = loop {
                let sub = self.a.select_columns(&self.working);
                if let Some(b) = rref_kernel(&sub) {
                    break b;
                }
                let before = self.working.len();
                self.fill_working(before + 1);
                if self.working.len() == before {
                    return Err(Error::NoKernelVector);
                }
            };
            let cols = self.working.clone();
            let mut hit = Vec::new();
            self.advance(&cols, &b, &mut hit)?;
            let saturated = &self.saturated;
            self.working.retain(|&j| !saturated[j]);
        }
    }

    /// Accelerated walk: keeps `A[:, basis]⁻¹` for an `m`-column basis plus one
    /// extra column, exchanging columns by Sherman–Morrison updates.
    ///
    /// Returns `Ok(true)` when it finished on its own and `Ok(false)` when it
    /// handed the remainder to the baseline walk after a breakdown.
    pub fn run_accelerated(&mut self) -> Result<bool> {
        let m = self.m();
        self.fill_working(m + 1);
        if self.working.len() <= m {
            return Ok(true);
        }
        let mut basis: Vec<usize> = self.working[..m].to_vec();
        let mut extra = self.working[m];
        self.working.clear();

        let Some(mut inv) = self.factor_basis(&mut basis, &mut extra) else {
            self.working = basis.iter().copied().chain([extra]).collect();
            self.working.sort_unstable();
            self.run_baseline()?;
            return Ok(false);
        };
        // Columns of A as contiguous rows.
        let at = self.a.transpose();
        let mut updates = 0usize;
        let mut b = vec![0.0; m + 1];
        let mut cols = Vec::with_capacity(m + 1);
        let mut hit = Vec::with_capacity(m + 1);
        let mut u = vec![0.0; m];
        let mut scratch = Vec::with_capacity(2 * m);

        loop {
            let col = at.row(extra);
            for k in 0..m {
                b[k] = -inv.row(k).iter().zip(col).map(|(x, y)| x * y).sum::<f64>();
            }
            b[m] = 1.0;
            cols.clear();
            cols.extend(basis.iter().copied().chain([extra]));
            self.advance(&cols, &b, &mut hit)?;
            // Handle the extra column first so an alternative exchange never
            // promotes a column that has just saturated.
            hit.sort_by_key(|&i| (i != extra, i));

            let mut extra_slot = Some(extra);
            for &leaving in &hit {
                if Some(leaving) == extra_slot {
                    extra_slot = self.next_pending();
                    continue;
                }
                let j = basis
                    .iter()
                    .position(|&i| i == leaving)
                    .expect("saturated index belongs to the working set");
                let Some(incoming) = self.next_pending() else {
                    // Fewer than m + 1 free columns remain: done.
                    return Ok(true);
                };
                let Some(current_extra) = extra_slot else {
                    return Ok(true);
                };
                match exchange(&at, &mut inv, &basis, j, incoming, current_extra, &mut u, &mut scratch) {
                    Some(promoted_extra) => {
                        if promoted_extra {
                            basis[j] = current_extra;
                            extra_slot = Some(incoming);
                        } else {
                            basis[j] = incoming;
                        }
                        updates += 1;
                    }
                    None => {
                        basis[j] = incoming;
                        let mut e = current_extra;
                        match self.factor_basis(&mut basis, &mut e) {
                            Some(fresh) => {
                                inv = fresh;
                                extra_slot = Some(e);
                                updates = 0;
                            }
                            None => {
                                self.working = basis.iter().copied().chain([e]).collect();
                                self.working.retain(|&i| !self.saturated[i]);
                                self.working.sort_unstable();
                                self.run_baseline()?;
                                return Ok(false);
                            }
                        }
                    }
                }
            }
            let Some(e) = extra_slot else {
                return Ok(true);
            };
            extra = e;
            if updates >= REFACTOR_INTERVAL {
                match self.factor_basis(&mut basis, &mut extra) {
                    Some(fresh) => {
                        inv = fresh;
                        updates = 0;
                    }
                    None => {
                        self.working = basis.iter().copied().chain([extra]).collect();
                        self.working.sort_unstable();
                        self.run_baseline()?;
                        return Ok(false);
                    }
                }
            }
        }
    }

    /// Fresh inverse of `A[:, basis]`. When singular, tries exchanging the
    /// extra column into each basis slot before giving up.
    fn factor_basis(&self, basis: &mut [usize], extra: &mut usize) -> Option<DenseMatrix> {
        if let Ok(lu) = LuFactorization::factor(&self.a.select_columns(basis)) {
            return Some(lu.inverse());
        }
        for j in 0..basis.len() {
            std::mem::swap(&mut basis[j], extra);
            if let Ok(lu) = LuFactorization::factor(&self.a.select_columns(basis)) {
                return Some(lu.inverse());
            }
            std::mem::swap(&mut basis[j], extra);
        }
        None
    }
}

/// Replaces `basis[j]` by `incoming` (or, failing that, by the extra column),
/// updating `inv` in place. Returns whether the extra column was promoted
/// into the basis; `None` leaves `inv` unchanged.
#[allow(clippy::too_many_arguments)]
fn exchange(
    at: &DenseMatrix,
    inv: &mut DenseMatrix,
    basis: &[usize],
    j: usize,
    incoming: usize,
    extra: usize,
    u: &mut [f64],
    scratch: &mut Vec<f64>,
) -> Option<bool> {
    let leaving = at.row(basis[j]);
    for (cand, promoted) in [(incoming, false), (extra, true)] {
        for ((ui, a), l) in u.iter_mut().zip(at.row(cand)).zip(leaving) {
            *ui = a - l;
        }
        if rank1_inverse_update_in_place(inv, u, j, SWAP_DENOMINATOR_TOL, scratch).is_ok() {
            return Some(promoted);
        }
    }
    None
}
