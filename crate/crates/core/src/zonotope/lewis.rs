use serde::{Deserialize, Serialize};

use super::Zonotope;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::{dot, spd_power, Cholesky, Matrix, Rng};

const MAX_ITERATIONS: usize = 10_000;

/// ℓ₁ Lewis weights: the positive fixed point `w̄ᵢ² = Aᵢᵀ(AᵀW̄⁻¹A)⁻¹Aᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LewisWeights {
    pub w_bar: Vec<f64>,
    /// `max(1, 1/min w̄ᵢ)`, the smallest scaling with every `D·w̄ᵢ ≥ 1`.
    #[serde(rename = "D")]
    pub d_scale: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Lewis weights by the fixed-point iteration `wᵢ ← (Aᵢᵀ(AᵀW⁻¹A)⁻¹Aᵢ)^{1/2}`
/// started from the uniform vector `d/m`.
pub fn lewis_weights(a: &Matrix, tol: f64) -> Result<LewisWeights> {
    let (m, d) = a.shape();
    lewis_weights_from(a, &vec![d as f64 / m.max(1) as f64; m], tol)
}

/// Same iteration from a caller-supplied positive start.
pub fn lewis_weights_from(a: &Matrix, init: &[f64], tol: f64) -> Result<LewisWeights> {
    let (m, d) = a.shape();
    if init.len() != m {
        return Err(crate::error::dim_mismatch(m, init.len()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if init.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidInput(
            "initial weights must be positive".into(),
        ));
    }
    let live: Vec<bool> = a.row_iter().map(|r| r.iter().any(|&v| v != 0.0)).collect();
    let mut w: Vec<f64> = init
        .iter()
        .zip(&live)
        .map(|(&w, &l)| if l { w } else { 0.0 })
        .collect();
    let tols = Tolerances::default();
    let mut residual = f64::INFINITY;
    for it in 0..=MAX_ITERATIONS {
        let mut g = Matrix::zeros(d, d);
        for (i, r) in a.row_iter().enumerate() {
            if !live[i] {
                continue;
            }
            for p in 0..d {
                let f = r[p] / w[i];
                for q in 0..d {
                    g[(p, q)] += f * r[q];
                }
            }
        }
        let chol = Cholesky::factor(&g, &tols).map_err(|e| match e {
            Error::NotPositiveDefinite { pivot } => Error::RankDeficient { pivot },
            other => other,
        })?;
        let tau: Vec<f64> = a
            .row_iter()
            .enumerate()
            .map(|(i, r)| if live[i] { dot(r, &chol.solve(r)) } else { 0.0 })
            .collect();
        residual = (0..m)
            .filter(|&i| live[i])
            .map(|i| (tau[i] / (w[i] * w[i]) - 1.0).abs())
            .fold(0.0, f64::max);
        if residual <= tol {
            let min_w = (0..m)
                .filter(|&i| live[i])
                .map(|i| w[i])
                .fold(f64::INFINITY, f64::min);
            return Ok(LewisWeights {
                d_scale: (1.0 / min_w).max(1.0),
                w_bar: w,
                residual,
                iterations: it,
            });
        }
        if it == MAX_ITERATIONS {
            break;
        }
        for i in 0..m {
            if live[i] {
                w[i] = tau[i].sqrt();
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CopyKind {
    Whole,
    FractionalTail,
}

/// Provenance of one row of the normalized generator matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowSource {
    pub source: usize,
    pub kind: CopyKind,
}

/// A normalized zonotope `K̃` with `T(K) ⊆ K̃ ⊆ (5/4)·T(K)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalizationResult {
    /// Invertible `d × d` map `T = √(d/m')·(AᵀW⁻¹A)^{−1/2}` (with `A` the
    /// effective generators `s·A`).
    pub t: Matrix,
    pub k_tilde: Zonotope,
    pub row_map: Vec<RowSource>,
    pub weights: LewisWeights,
    /// Scaled weights `wᵢ = D·w̄ᵢ`, snapped to integers when within `1e−9`.
    pub w: Vec<f64>,
}

impl NormalizationResult {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.t.mul_vec(x)
    }

    /// `h_{T(K)}(θ) = h_K(Tᵀθ)`.
    pub fn mapped_support(&self, k: &Zonotope, theta: &[f64]) -> f64 {
        k.support(&self.t.tr_mul_vec(theta))
    }
}

/// Lewis-weight normalization: every row `Bᵢ` of `B = A(AᵀW⁻¹A)^{−1/2}` is
/// replaced by `⌊wᵢ⌋` copies of `Bᵢ/wᵢ` and, for fractional `wᵢ`, a tail row
/// `frac(wᵢ)^{1/2}·Bᵢ/wᵢ`. Then `ÃᵀÃ = BᵀW⁻¹B = I` and every row has squared
/// norm at most `1/D ≤ 2d/m'`.
pub fn normalize(k: &Zonotope, tol: &Tolerances) -> Result<NormalizationResult> {
    let a = k.effective_generators();
    let d = k.dim();
    let weights = lewis_weights(&a, 1e-10)?;
    let w: Vec<f64> = weights
        .w_bar
        .iter()
        .map(|&wb| {
            let v = wb * weights.d_scale;
            let r = v.round();
            if (v - r).abs() <= 1e-9 * r.max(1.0) {
                r
            } else {
                v
            }
        })
        .collect();
    let mut g = Matrix::zeros(d, d);
    for (r, &wi) in a.row_iter().zip(&w) {
        if wi == 0.0 {
            continue;
        }
        for p in 0..d {
            for q in 0..d {
                g[(p, q)] += r[p] * r[q] / wi;
            }
        }
    }
    let g_inv_sqrt = spd_power(&g, -0.5, tol)?;
    let b = a.matmul(&g_inv_sqrt)?;

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut row_map = Vec::new();
    for (i, &wi) in w.iter().enumerate() {
        if wi == 0.0 {
            continue;
        }
        let bi: Vec<f64> = b.row(i).iter().map(|v| v / wi).collect();
        let whole = wi.floor();
        let frac = wi - whole;
        for _ in 0..whole as usize {
            rows.push(bi.clone());
            row_map.push(RowSource {
                source: i,
                kind: CopyKind::Whole,
            });
        }
        if frac >= tol.fractional_row {
            let f = frac.sqrt();
            rows.push(bi.iter().map(|v| v * f).collect());
            row_map.push(RowSource {
                source: i,
                kind: CopyKind::FractionalTail,
            });
        }
    }
    let m_prime = rows.len();
    let s_tilde = (d as f64 / m_prime as f64).sqrt();
    let a_tilde = Matrix::from_rows(&rows)?;
    Ok(NormalizationResult {
        t: g_inv_sqrt.scaled(s_tilde),
        k_tilde: Zonotope::new(a_tilde, s_tilde)?,
        row_map,
        weights,
        w,
    })
}

/// Sample count `⌈c₀·d·ln(d+1)/ε²⌉`.
pub fn sparsify_rows(d: usize, epsilon: f64, c0: f64) -> usize {
    (c0 * d as f64 * ((d + 1) as f64).ln() / (epsilon * epsilon)).ceil() as usize
}

/// Lewis-weight importance sampling: `N` rows drawn i.i.d. with probability
/// `pᵢ = w̄ᵢ/Σw̄`, each emitted as `Aᵢ/(N·pᵢ)` under the same scale, so the
/// support function is preserved in expectation.
pub fn sparsify(k: &Zonotope, epsilon: f64, c0: f64, rng: &mut Rng) -> Result<Zonotope> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::InvalidInput(format!(
            "epsilon must lie in (0, 1/2], got {epsilon}"
        )));
    }
    if !(c0 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "oversampling constant must be positive, got {c0}"
        )));
    }
    let a = k.generators();
    let weights = lewis_weights(a, 1e-10)?;
    let total: f64 = weights.w_bar.iter().sum();
    let mut cdf = Vec::with_capacity(a.rows());
    let mut acc = 0.0;
    for &w in &weights.w_bar {
        acc += w / total;
        cdf.push(acc);
    }
    let n = sparsify_rows(k.dim(), epsilon, c0);
    let mut out = Matrix::zeros(n, k.dim());
    for j in 0..n {
        let u = rng.uniform() * acc;
        let i = cdf.partition_point(|&c| c <= u).min(a.rows() - 1);
        // zero-weight rows have zero width in the cdf and are never drawn
        let p = weights.w_bar[i] / total;
        let f = 1.0 / (n as f64 * p);
        for (o, &v) in out.row_mut(j).iter_mut().zip(a.row(i)) {
            *o = v * f;
        }
    }
    Zonotope::new(out, k.scale())
}
