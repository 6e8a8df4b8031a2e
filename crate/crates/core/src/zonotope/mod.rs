//! Zonotopes `K = s·AᵀB∞ᵐ`: support function, gauge, membership,
//! Lewis-weight normalization, sparsification and instance generators.

mod instances;
mod lewis;

pub use instances::{
    make_hadamard_instance, random_normalized_zonotope, random_vertices, HadamardInstance,
};
pub use lewis::{
    lewis_weights, lewis_weights_from, normalize, sparsify, sparsify_rows, CopyKind, LewisWeights,
    NormalizationResult, RowSource,
};

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::lp::{InfNormSolution, InfNormSolver, LpStatus};
use crate::numerics::io::{format_matrix, parse_matrix};
use crate::numerics::{check_finite, check_len, column_basis, dot, norm_inf, Cholesky, Matrix};

/// The zonotope `s·AᵀB∞ᵐ` with generator rows `Aᵢ ∈ ℝᵈ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zonotope {
    a: Matrix,
    s: f64,
}

impl Zonotope {
    /// Validates `m ≥ d`, finite entries, `s > 0` and full column rank.
    pub fn new(a: Matrix, s: f64) -> Result<Self> {
        let (m, d) = a.shape();
        if m == 0 || d == 0 {
            return Err(Error::InvalidInput(
                "zonotope needs at least one generator".into(),
            ));
        }
        if m < d {
            return Err(Error::InvalidInput(format!(
                "need at least as many generators as dimensions (m={m}, d={d})"
            )));
        }
        check_finite(a.as_slice())?;
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidInput(format!(
                "scale must be positive, got {s}"
            )));
        }
        let rank = column_basis(&a, &Tolerances::default()).cols();
        if rank < d {
            return Err(Error::RankDeficient { pivot: 0.0 });
        }
        Ok(Self { a, s })
    }

    /// The cube `B∞ᵈ`.
    pub fn cube(d: usize) -> Self {
        Self {
            a: Matrix::identity(d),
            s: 1.0,
        }
    }

    pub fn generators(&self) -> &Matrix {
        &self.a
    }

    pub fn scale(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn segments(&self) -> usize {
        self.a.rows()
    }

    /// `s·A`, so that `K = (sA)ᵀB∞ᵐ`.
    pub fn effective_generators(&self) -> Matrix {
        self.a.scaled(self.s)
    }

    /// `h_K(θ) = s·Σᵢ|⟨Aᵢ,θ⟩|`.
    pub fn support(&self, theta: &[f64]) -> f64 {
        debug_assert_eq!(theta.len(), self.dim());
        self.s * self.a.row_iter().map(|r| dot(r, theta).abs()).sum::<f64>()
    }

    /// `s·Aᵀy`, the point of `K` with cube coordinates `y`.
    pub fn point(&self, y: &[f64]) -> Vec<f64> {
        let mut p = self.a.tr_mul_vec(y);
        p.iter_mut().for_each(|v| *v *= self.s);
        p
    }

    /// Minimal-infinity-norm cube coordinates of `x`.
    pub fn preimage(&self, x: &[f64]) -> Result<InfNormSolution> {
        check_len(x, self.dim())?;
        InfNormSolver::new(&self.effective_generators())?.solve(x)
    }

    /// Gauge `‖x‖_K = min{t ≥ 0 : x ∈ tK}`.
    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        let sol = self.preimage(x)?;
        match sol.status {
            LpStatus::Optimal => Ok(sol.value),
            LpStatus::Infeasible => Err(Error::Infeasible),
        }
    }

    /// `x ∈ tK` up to relative slack `1e−7`.
    pub fn member(&self, x: &[f64], t: f64) -> Result<bool> {
        MembershipOracle::new(self, Tolerances::default().membership)?.member(x, t)
    }

    /// Writes the matrix text format with a `# scale <s>` header.
    pub fn to_text(&self) -> String {
        format_matrix(&self.a, &[format!("scale {:?}", self.s)])
    }

    /// Reads the matrix text format; a missing scale header means `s = 1`.
    pub fn from_text(text: &str) -> Result<Self> {
        let file = parse_matrix(text)?;
        let mut s = 1.0;
        for c in &file.comments {
            if let Some(rest) = c.strip_prefix("scale") {
                s = rest.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: 0,
                    msg: format!("bad scale header `{c}`: {e}"),
                })?;
            }
        }
        Self::new(file.matrix, s)
    }
}

/// Membership and gauge evaluation with cached factorizations.
///
/// `member` first tries two certificates that need no LP. The least-squares
/// preimage `A(AᵀA)⁻¹x/s` is a feasible preimage, so a small infinity norm
/// proves membership. The support function in direction `x` lower-bounds the
/// gauge, so `‖x‖² > t·h_K(x)` proves non-membership. Only undecided points go
/// to the warm-started simplex.
#[derive(Debug, Clone)]
pub struct MembershipOracle {
    k: Zonotope,
    tol: f64,
    solver: InfNormSolver,
    gram: Cholesky,
}

impl MembershipOracle {
    pub fn new(k: &Zonotope, tol: f64) -> Result<Self> {
        let gram = Cholesky::factor(&k.a.gram(), &Tolerances::default())?;
        Ok(Self {
            k: k.clone(),
            tol,
            solver: InfNormSolver::new(&k.effective_generators())?,
            gram,
        })
    }

    pub fn zonotope(&self) -> &Zonotope {
        &self.k
    }

    fn least_squares_bound(&self, x: &[f64]) -> f64 {
        let c = self.gram.solve(x);
        let y = self.k.a.mul_vec(&c);
        norm_inf(&y) / self.k.s
    }

    pub fn member(&mut self, x: &[f64], t: f64) -> Result<bool> {
        check_len(x, self.k.dim())?;
        if t < 0.0 {
            return Err(Error::InvalidInput(
                "membership radius must be nonnegative".into(),
            ));
        }
        let slack = t * (1.0 + self.tol);
        if self.least_squares_bound(x) <= slack {
            return Ok(true);
        }
        let h = self.k.support(x);
        let lower = if h > 0.0 { dot(x, x) / h } else { 0.0 };
        if lower > slack * (1.0 + 1e-12) {
            return Ok(false);
        }
        Ok(self.norm(x)? <= slack)
    }

    pub fn norm(&mut self, x: &[f64]) -> Result<f64> {
        check_len(x, self.k.dim())?;
        let sol = self.solver.solve(x)?;
        match sol.status {
            LpStatus::Optimal => Ok(sol.value),
            LpStatus::Infeasible => Err(Error::Infeasible),
        }
    }
}

/// Approximate-regularity diagnostics for a generator matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub column_gram_error: f64,
    pub max_row_norm: f64,
    pub bound: f64,
    pub is_regular: bool,
}

/// Checks `AᵀA = I` and `‖Aᵢ‖₂ ≤ 2√(d/m)`. The scale is not part of the
/// definition and is accepted only for symmetry with `Zonotope`.
pub fn regularity_report(a: &Matrix, _s: f64) -> RegularityReport {
    let (m, d) = a.shape();
    let g = a.gram();
    let mut err: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((g[(i, j)] - target).abs());
        }
    }
    let max_row_norm = a.row_iter().map(|r| dot(r, r).sqrt()).fold(0.0, f64::max);
    let bound = 2.0 * (d as f64 / m.max(1) as f64).sqrt();
    let err = if err.is_nan() { f64::INFINITY } else { err };
    RegularityReport {
        column_gram_error: err,
        max_row_norm,
        bound,
        is_regular: err <= 1e-7 && max_row_norm <= bound + 1e-9,
    }
}
