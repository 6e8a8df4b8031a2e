//! Minimum infinity-norm preimage: `min ||y||_inf  s.t.  Bᵀ y = z`.
//!
//! The solver works on the scaled program
//!
//! ```text
//!     max λ   s.t.   Bᵀ w − λ z = 0,   −1 ≤ w_i ≤ 1,   λ ≥ 0
//! ```
//!
//! whose optimum is `λ* = 1 / min ||y||_inf` with `y = w / λ`. This is the
//! epigraph program after the change of variables `y = t w`, `λ = 1/t`; it has
//! only `d` equality rows, so the simplex basis is `d × d` no matter how many
//! generators there are. The method is a dense bounded-variable revised
//! simplex with Dantzig pricing that falls back to Bland's rule after a run
//! of degenerate pivots. The origin `w = 0, λ = 0` is always feasible, so
//! there is no phase one. Solves start from the scaled least-squares
//! preimage when it is feasible, or from the previous optimal basis. Nonbasic
//! `w_i` may sit strictly inside their box until they are first moved.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::{dot, norm2, norm_inf, Cholesky, Lu, Matrix};

const PRICE_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-11;
const BOUND_EPS: f64 = 1e-12;
const REFACTOR_EVERY: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InfNormSolution {
    pub y: Vec<f64>,
    pub value: f64,
    pub status: LpStatus,
    pub iterations: usize,
}

#[derive(Debug, Clone)]
struct WarmStart {
    basis: Vec<usize>,
    x: Vec<f64>,
}

/// Stateful solver for a fixed generator matrix `B` (m × d). Caches the last
/// optimal basis and tries it first on the next right-hand side.
#[derive(Debug, Clone)]
pub struct InfNormSolver {
    b: Matrix,
    m: usize,
    d: usize,
    warm: Option<WarmStart>,
    warm_hits: usize,
    gram: Option<Cholesky>,
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Gen,
    Lambda,
    Artificial,
}

impl InfNormSolver {
    pub fn new(b: &Matrix) -> Result<Self> {
        let (m, d) = b.shape();
        if m == 0 || d == 0 {
            return Err(Error::InvalidInput("empty generator matrix".into()));
        }
        if !b.is_finite() {
            return Err(Error::InvalidInput("non-finite generator entry".into()));
        }
        Ok(Self {
            b: b.clone(),
            m,
            d,
            warm: None,
            warm_hits: 0,
            gram: Cholesky::factor(&b.gram(), &Tolerances::default()).ok(),
        })
    }

    pub fn generators(&self) -> &Matrix {
        &self.b
    }

    /// How many solves started from the cached basis.
    pub fn warm_start_hits(&self) -> usize {
        self.warm_hits
    }

    pub fn clear_cache(&mut self) {
        self.warm = None;
    }

    fn kind(&self, j: usize) -> Kind {
        if j < self.m {
            Kind::Gen
        } else if j == self.m {
            Kind::Lambda
        } else {
            Kind::Artificial
        }
    }

    fn bounds(&self, j: usize) -> (f64, f64) {
        match self.kind(j) {
            Kind::Gen => (-1.0, 1.0),
            Kind::Lambda => (0.0, f64::INFINITY),
            Kind::Artificial => (0.0, 0.0),
        }
    }

    fn column(&self, j: usize, z: &[f64]) -> Vec<f64> {
        match self.kind(j) {
            Kind::Gen => self.b.row(j).to_vec(),
            Kind::Lambda => z.iter().map(|v| -v).collect(),
            Kind::Artificial => {
                let mut e = vec![0.0; self.d];
                e[j - self.m - 1] = 1.0;
                e
            }
        }
    }

    fn column_dot(&self, j: usize, z: &[f64], p: &[f64]) -> f64 {
        match self.kind(j) {
            Kind::Gen => dot(self.b.row(j), p),
            Kind::Lambda => -dot(z, p),
            Kind::Artificial => p[j - self.m - 1],
        }
    }

    fn basis_matrix(&self, basis: &[usize], z: &[f64]) -> Matrix {
        let cols: Vec<Vec<f64>> = basis.iter().map(|&j| self.column(j, z)).collect();
        Matrix::from_columns(&cols).expect("basis columns have length d")
    }

    /// Greedy crash basis: independent generator rows, topped up with
    /// artificial unit columns when `B` is rank deficient.
    fn crash_basis(&self) -> Vec<usize> {
        let mut chosen = Vec::with_capacity(self.d);
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(self.d);
        let scale = self.b.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..self.m {
            if chosen.len() == self.d {
                break;
            }
            let mut v = self.b.row(i).to_vec();
            for _ in 0..2 {
                for u in &q {
                    let c = dot(u, &v);
                    v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
                }
            }
            let nrm = norm2(&v);
            if nrm > 1e-8 * scale {
                q.push(v.into_iter().map(|a| a / nrm).collect());
                chosen.push(i);
            }
        }
        let mut k = 0;
        while chosen.len() < self.d {
            // unit vector not yet spanned
            let j = self.m + 1 + k;
            let mut v = vec![0.0; self.d];
            v[k] = 1.0;
            for _ in 0..2 {
                for u in &q {
                    let c = dot(u, &v);
                    v.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
                }
            }
            let nrm = norm2(&v);
            if nrm > 1e-8 {
                q.push(v.into_iter().map(|a| a / nrm).collect());
                chosen.push(j);
            }
            k += 1;
        }
        chosen
    }

    /// Feasible start `w = y/‖y‖_∞, λ = 1/‖y‖_∞` from the least-squares
    /// preimage `y = B(BᵀB)⁻¹z`, with basic values re-solved from the
    /// equations. Falls back to the origin if that leaves the box.
    fn least_squares_start(
        &self,
        z: &[f64],
        basis: &[usize],
        binv: &Matrix,
        n_vars: usize,
    ) -> Vec<f64> {
        let origin = vec![0.0; n_vars];
        let Some(chol) = &self.gram else {
            return origin;
        };
        let y = self.b.mul_vec(&chol.solve(z));
        let big = norm_inf(&y);
        if !(big > 0.0 && big.is_finite()) {
            return origin;
        }
        let mut x = origin.clone();
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / big;
        }
        x[self.m] = 1.0 / big;
        for &j in basis {
            x[j] = 0.0;
        }
        let mut rhs = vec![0.0; self.d];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                let c = self.column(j, z);
                rhs.iter_mut().zip(&c).for_each(|(r, cj)| *r -= xj * cj);
            }
        }
        let xb = binv.mul_vec(&rhs);
        for (&j, &v) in basis.iter().zip(&xb) {
            let (lo, hi) = self.bounds(j);
            if v < lo - 1e-9 || v > hi + 1e-9 {
                return origin;
            }
            x[j] = v.clamp(lo, hi);
        }
        x
    }

    fn try_warm(&self, z: &[f64]) -> Option<(Vec<usize>, Vec<f64>, Matrix)> {
        let warm = self.warm.as_ref()?;
        let bm = self.basis_matrix(&warm.basis, z);
        let lu = Lu::factor(&bm, 1e-12).ok()?;
        let mut x = warm.x.clone();
        for &j in &warm.basis {
            x[j] = 0.0;
        }
        let mut rhs = vec![0.0; self.d];
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                let c = self.column(j, z);
                rhs.iter_mut().zip(&c).for_each(|(r, cj)| *r -= xj * cj);
            }
        }
        let xb = lu.solve(&rhs);
        for (&j, &v) in warm.basis.iter().zip(&xb) {
            let (lo, hi) = self.bounds(j);
            if v < lo - 1e-9 || v > hi + 1e-9 {
                return None;
            }
            x[j] = v.clamp(lo, hi);
        }
        Some((warm.basis.clone(), x, lu.inverse()))
    }

    /// Solves for the right-hand side `z`.
    pub fn solve(&mut self, z: &[f64]) -> Result<InfNormSolution> {
        if z.len() != self.d {
            return Err(crate::error::dim_mismatch(self.d, z.len()));
        }
        if !z.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("non-finite right-hand side".into()));
        }
        if z.iter().all(|&v| v == 0.0) {
            return Ok(InfNormSolution {
                y: vec![0.0; self.m],
                value: 0.0,
                status: LpStatus::Optimal,
                iterations: 0,
            });
        }
        // the optimum is 1-homogeneous in z; solve at unit scale so the
        // absolute pivot tolerances are meaningful
        let zscale = norm_inf(z);
        let z: Vec<f64> = z.iter().map(|v| v / zscale).collect();
        let z = z.as_slice();
        let n_vars = self.m + 1 + self.d;
        let (mut basis, mut x, mut binv) = match self.try_warm(z) {
            Some(w) => {
                self.warm_hits += 1;
                w
            }
            None => {
                let basis = self.crash_basis();
                let bm = self.basis_matrix(&basis, z);
                let binv = Lu::factor(&bm, 1e-14)
                    .map_err(|_| Error::NumericalFailure("singular crash basis".into()))?
                    .inverse();
                let x = self.least_squares_start(z, &basis, &binv, n_vars);
                (basis, x, binv)
            }
        };
        let mut in_basis = vec![usize::MAX; n_vars];
        for (pos, &j) in basis.iter().enumerate() {
            in_basis[j] = pos;
        }

        let cap = 50 * (self.m + self.d);
        let mut iterations = 0;
        let mut since_refactor = 0;
        let mut degenerate_run = 0;
        // reduced costs; valid until the basis changes
        let mut reduced = vec![0.0; self.m + 1];
        let mut priced = false;
        loop {
            if iterations >= cap {
                return Err(Error::NumericalFailure(format!(
                    "simplex exceeded {cap} iterations"
                )));
            }
            if !priced {
                // duals: π = B⁻ᵀ c_B with c = −1 on λ
                let mut pi = vec![0.0; self.d];
                if in_basis[self.m] != usize::MAX {
                    let pos = in_basis[self.m];
                    for (k, p) in pi.iter_mut().enumerate() {
                        *p = -binv[(pos, k)];
                    }
                }
                for (j, r) in reduced.iter_mut().enumerate() {
                    let c = if j == self.m { -1.0 } else { 0.0 };
                    *r = c - self.column_dot(j, z, &pi);
                }
                priced = true;
            }
            // Dantzig's rule; Bland's (lowest index) after a run of
            // degenerate steps, which rules out cycling
            let bland = degenerate_run > 2 * self.d;
            let mut entering: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for (j, &r) in reduced.iter().enumerate() {
                if in_basis[j] != usize::MAX {
                    continue;
                }
                let (lo, hi) = self.bounds(j);
                let dir = if r < -PRICE_TOL && x[j] < hi - BOUND_EPS {
                    1.0
                } else if r > PRICE_TOL && x[j] > lo + BOUND_EPS {
                    -1.0
                } else {
                    continue;
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                if r.abs() > best {
                    best = r.abs();
                    entering = Some((j, dir));
                }
            }
            let Some((j, dir)) = entering else { break };

            let col = self.column(j, z);
            let alpha = binv.mul_vec(&col);
            // basic values move by −dir·α per unit step
            let (lo_j, hi_j) = self.bounds(j);
            let mut theta = if dir > 0.0 { hi_j - x[j] } else { x[j] - lo_j };
            let mut leave: Option<usize> = None;
            for (pos, &bj) in basis.iter().enumerate() {
                let delta = -dir * alpha[pos];
                if delta.abs() <= PIVOT_TOL {
                    continue;
                }
                let (lo, hi) = self.bounds(bj);
                let room = if delta > 0.0 {
                    (hi - x[bj]) / delta
                } else {
                    (lo - x[bj]) / delta
                };
                let room = room.max(0.0);
                let better = match leave {
                    _ if room < theta - 1e-15 => true,
                    Some(prev) if (room - theta).abs() <= 1e-15 => bj < basis[prev],
                    _ => false,
                };
                if better {
                    theta = room;
                    leave = Some(pos);
                }
            }
            if !theta.is_finite() {
                return Err(Error::NumericalFailure("unbounded direction".into()));
            }
            if theta <= 1e-15 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            x[j] += dir * theta;
            for (pos, &bj) in basis.iter().enumerate() {
                x[bj] -= dir * theta * alpha[pos];
            }
            iterations += 1;
            match leave {
                None => {
                    // bound flip: basis and duals unchanged
                    x[j] = if dir > 0.0 { hi_j } else { lo_j };
                }
                Some(r) => {
                    let out = basis[r];
                    let (lo, hi) = self.bounds(out);
                    let delta = -dir * alpha[r];
                    x[out] = if delta > 0.0 { hi } else { lo };
                    basis[r] = j;
                    in_basis[out] = usize::MAX;
                    in_basis[j] = r;
                    priced = false;
                    since_refactor += 1;
                    if since_refactor >= REFACTOR_EVERY {
                        let bm = self.basis_matrix(&basis, z);
                        binv = Lu::factor(&bm, 1e-14)
                            .map_err(|_| Error::NumericalFailure("singular basis".into()))?
                            .inverse();
                        since_refactor = 0;
                    } else {
                        let piv = alpha[r];
                        for k in 0..self.d {
                            binv[(r, k)] /= piv;
                        }
                        for i in 0..self.d {
                            if i != r && alpha[i] != 0.0 {
                                let f = alpha[i];
                                for k in 0..self.d {
                                    binv[(i, k)] -= f * binv[(r, k)];
                                }
                            }
                        }
                    }
                }
            }
        }

        // recompute basic values from a fresh factorization for accuracy
        let bm = self.basis_matrix(&basis, z);
        if let Ok(lu) = Lu::factor(&bm, 1e-14) {
            let mut rhs = vec![0.0; self.d];
            for (j, &xj) in x.iter().enumerate() {
                if in_basis[j] == usize::MAX && xj != 0.0 {
                    let c = self.column(j, z);
                    rhs.iter_mut().zip(&c).for_each(|(r, cj)| *r -= xj * cj);
                }
            }
            for (&bj, v) in basis.iter().zip(lu.solve(&rhs)) {
                x[bj] = v;
            }
        }

        let lambda = x[self.m];
        if !(lambda > 1e-300) || lambda * self.b.max_abs() * (self.m as f64) < 1e-13 {
            return Ok(InfNormSolution {
                y: vec![0.0; self.m],
                value: f64::INFINITY,
                status: LpStatus::Infeasible,
                iterations,
            });
        }
        self.warm = Some(WarmStart {
            basis: basis.clone(),
            x: x.clone(),
        });
        let y: Vec<f64> = x[..self.m]
            .iter()
            .map(|w| w.clamp(-1.0, 1.0) / lambda * zscale)
            .collect();
        Ok(InfNormSolution {
            value: norm_inf(&y),
            y,
            status: LpStatus::Optimal,
            iterations,
        })
    }
}

/// One-shot solve of `min ||y||_inf s.t. Bᵀ y = z`.
pub fn solve_inf_norm_min(b: &Matrix, z: &[f64]) -> Result<InfNormSolution> {
    InfNormSolver::new(b)?.solve(z)
}
