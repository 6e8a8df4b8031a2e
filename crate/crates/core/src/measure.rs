//! Gaussian measure of zonotope sections: Monte Carlo estimators, the strip
//! tail bound in closed form, and the covariance comparison inequality.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::{lambda_min, psd_sqrt, sym_eig, Matrix, Rng};
use crate::par::{self, Exec};
use crate::zonotope::{MembershipOracle, Zonotope};

/// Samples per independent substream. Fixed so estimates do not depend on
/// the thread count.
const CHUNK: usize = 2048;

/// Relative membership slack inside the sampling loop.
const MEMBER_TOL: f64 = 1e-9;

/// Largest eigenvalue deficit tolerated in covariance ordering checks.
const ORDER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub p_hat: f64,
    pub samples: usize,
    pub hits: usize,
    /// Three-sigma Wald radius `3·√(p̂(1−p̂)/N)`.
    pub ci_radius: f64,
    /// `exp(−e^{−t²/2}·n)`.
    pub bound: f64,
}

impl MeasureEstimate {
    fn new(hits: usize, samples: usize, bound: f64) -> Self {
        let p = if samples == 0 {
            1.0
        } else {
            hits as f64 / samples as f64
        };
        Self {
            p_hat: p,
            samples,
            hits,
            ci_radius: wald_radius(p, samples),
            bound,
        }
    }

    /// One-sided check `p̂ + ci ≥ bound`.
    pub fn meets_bound(&self) -> bool {
        self.p_hat + self.ci_radius >= self.bound
    }
}

/// `3·√(p(1−p)/N)`, zero for `N = 0`.
pub fn wald_radius(p: f64, samples: usize) -> f64 {
    if samples == 0 {
        return 0.0;
    }
    3.0 * (p * (1.0 - p) / samples as f64).max(0.0).sqrt()
}

/// `exp(−e^{−t²/2}·n)`.
pub fn section_bound(t: f64, n: usize) -> f64 {
    (-(-t * t / 2.0).exp() * n as f64).exp()
}

/// Estimates `γ_H(tC·K ∩ H)` where `H` is spanned by the orthonormal columns
/// of `h_basis`: the fraction of `y ∼ N(0, Iₙ)` with `Uy/(tC) ∈ K`.
pub fn estimate_section_measure(
    k: &Zonotope,
    h_basis: &Matrix,
    t: f64,
    c: f64,
    samples: usize,
    rng: &Rng,
) -> Result<MeasureEstimate> {
    estimate_section_measure_with(Exec::default(), k, h_basis, t, c, samples, rng)
}

pub fn estimate_section_measure_with(
    exec: Exec,
    k: &Zonotope,
    h_basis: &Matrix,
    t: f64,
    c: f64,
    samples: usize,
    rng: &Rng,
) -> Result<MeasureEstimate> {
    check_basis(k, h_basis)?;
    if !(t >= 1.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "t must be at least 1, got {t}"
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput(format!("C must be positive, got {c}")));
    }
    let n = h_basis.cols();
    let bound = section_bound(t, n);
    if n == 0 {
        return Ok(MeasureEstimate::new(samples, samples, bound));
    }
    let scale = 1.0 / (t * c);
    let hits = count_hits(exec, k, samples, rng, |r| {
        let y = r.gaussian_vector(n);
        let mut x = h_basis.mul_vec(&y);
        x.iter_mut().for_each(|v| *v *= scale);
        x
    })?;
    Ok(MeasureEstimate::new(hits, samples, bound))
}

/// Estimates `γ_H((t/√α)·K ∩ H)` for `K = AᵀB∞ᵐ` with `AᵀA ⪰ αI`. The bound
/// field is the same `exp(−e^{−t²/2}·n)` as for a normalized body.
pub fn rescaled_section_measure(
    a: &Matrix,
    alpha: f64,
    h_basis: &Matrix,
    t: f64,
    samples: usize,
    rng: &Rng,
) -> Result<MeasureEstimate> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let low = lambda_min(&a.gram(), &Tolerances::default())?;
    if low < alpha - ORDER_TOL {
        return Err(Error::InvalidInput(format!(
            "smallest eigenvalue {low:.6e} of AᵀA is below alpha = {alpha}"
        )));
    }
    let k = Zonotope::new(a.clone(), 1.0)?;
    estimate_section_measure(&k, h_basis, t, 1.0 / alpha.sqrt(), samples, rng)
}

/// Monte Carlo estimates of `Pr[y ∈ K]` under two centered Gaussians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub p_a: f64,
    pub p_b: f64,
    pub ci_a: f64,
    pub ci_b: f64,
    pub samples: usize,
}

impl Comparison {
    /// `p_A ≥ p_B − (ci_A + ci_B)`.
    pub fn ordered(&self) -> bool {
        self.p_a >= self.p_b - (self.ci_a + self.ci_b)
    }
}

/// Estimates `Pr_{N(0,A)}[y ∈ K]` and `Pr_{N(0,B)}[y ∈ K]` for `0 ⪯ A ⪯ B`.
pub fn comparison_check(
    k: &Zonotope,
    a_cov: &Matrix,
    b_cov: &Matrix,
    samples: usize,
    rng: &Rng,
) -> Result<Comparison> {
    let d = k.dim();
    for cov in [a_cov, b_cov] {
        if cov.shape() != (d, d) {
            return Err(crate::error::dim_mismatch(
                format!("{d}x{d}"),
                format!("{:?}", cov.shape()),
            ));
        }
    }
    let tol = Tolerances::default();
    for (name, cov) in [("A", a_cov), ("B", b_cov)] {
        let low = sym_eig(cov, &tol)?.min();
        if low < -ORDER_TOL {
            return Err(Error::InvalidInput(format!(
                "covariance {name} is not positive semidefinite (eigenvalue {low:.3e})"
            )));
        }
    }
    let gap = sym_eig(&b_cov.sub(a_cov)?, &tol)?.min();
    if gap < -ORDER_TOL {
        return Err(Error::NotOrdered { min_eig: gap });
    }
    let root_a = psd_sqrt(a_cov, &tol)?;
    let root_b = psd_sqrt(b_cov, &tol)?;
    let exec = Exec::default();
    let hits_a = count_hits(exec, k, samples, &rng.split("cov-a"), |r| {
        root_a.mul_vec(&r.gaussian_vector(d))
    })?;
    let hits_b = count_hits(exec, k, samples, &rng.split("cov-b"), |r| {
        root_b.mul_vec(&r.gaussian_vector(d))
    })?;
    let a = MeasureEstimate::new(hits_a, samples, 0.0);
    let b = MeasureEstimate::new(hits_b, samples, 0.0);
    Ok(Comparison {
        p_a: a.p_hat,
        p_b: b.p_hat,
        ci_a: a.ci_radius,
        ci_b: b.ci_radius,
        samples,
    })
}

/// Counts draws landing in `K`. Chunk `i` draws from `rng.split_index(i)`
/// with its own warm-started oracle; counts are summed in chunk order.
fn count_hits<F>(exec: Exec, k: &Zonotope, samples: usize, rng: &Rng, draw: F) -> Result<usize>
where
    F: Fn(&mut Rng) -> Vec<f64> + Send + Sync,
{
    let chunks = par::chunks(samples, CHUNK);
    let oracle = MembershipOracle::new(k, MEMBER_TOL)?;
    let counts = par::map_indexed(exec, chunks.len(), |ci| -> Result<usize> {
        let (_, len) = chunks[ci];
        let mut r = rng.split_index(ci as u64);
        let mut o = oracle.clone();
        let mut hits = 0;
        for _ in 0..len {
            if o.member(&draw(&mut r), 1.0)? {
                hits += 1;
            }
        }
        Ok(hits)
    });
    counts.into_iter().sum()
}

fn check_basis(k: &Zonotope, h: &Matrix) -> Result<()> {
    let d = k.dim();
    if h.rows() != d {
        return Err(crate::error::dim_mismatch(d, h.rows()));
    }
    let g = h.gram();
    let n = h.cols();
    let mut err: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((g[(i, j)] - target).abs());
        }
    }
    if !(err <= 1e-8) {
        return Err(Error::InvalidInput(format!(
            "subspace basis is not orthonormal (error {err:.3e})"
        )));
    }
    Ok(())
}

/// `Pr[|⟨a,y⟩| ≤ t]` for `y ∼ N(0, I)` against `exp(−e^{−t²/2}·‖a‖²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripCheck {
    pub a_norm: f64,
    pub t: f64,
    /// `erf(t/(‖a‖√2))`.
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs ≥ rhs − 1e−12`.
    pub ok: bool,
}

/// Expects `0 < a_norm ≤ 1` and `t ≥ 1`; outside that range `ok` reports
/// whatever the comparison gives.
pub fn strip_bound_check(a_norm: f64, t: f64) -> StripCheck {
    let lhs = libm::erf(t / (a_norm * std::f64::consts::SQRT_2));
    let rhs = (-(-t * t / 2.0).exp() * a_norm * a_norm).exp();
    StripCheck {
        a_norm,
        t,
        lhs,
        rhs,
        ok: lhs >= rhs - 1e-12,
    }
}

/// `t ∈ {1, 1.5, …, 5}` × `‖a‖ ∈ {0.1, 0.2, …, 1.0}`, 90 points.
pub fn strip_grid() -> Vec<StripCheck> {
    let mut out = Vec::with_capacity(90);
    for ti in 0..9 {
        let t = 1.0 + 0.5 * ti as f64;
        for ai in 1..=10 {
            out.push(strip_bound_check(ai as f64 / 10.0, t));
        }
    }
    out
}

/// The four quantities of the strip tail argument at `s = t/‖a‖`, which must
/// be nonincreasing:
///
/// 0. `erf(s/√2)`,
/// 1. `1 − (4/(3√(2π)))·e^{−s²/2}` (tail inequality for `s ≥ 1`),
/// 2. `exp(−(2/3)·e^{−s²/2})` (convexity of `z ↦ e^{−2z/3}`),
/// 3. `exp(−e^{−t²/2}·‖a‖²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripChain {
    pub a_norm: f64,
    pub t: f64,
    pub links: [f64; 4],
    pub holds: bool,
}

pub fn strip_chain(a_norm: f64, t: f64) -> StripChain {
    let s = t / a_norm;
    let tail = (-s * s / 2.0).exp();
    let links = [
        libm::erf(s / std::f64::consts::SQRT_2),
        1.0 - 4.0 / (3.0 * (2.0 * std::f64::consts::PI).sqrt()) * tail,
        (-2.0 / 3.0 * tail).exp(),
        (-(-t * t / 2.0).exp() * a_norm * a_norm).exp(),
    ];
    let holds = links.windows(2).all(|w| w[0] >= w[1] - 1e-12);
    StripChain {
        a_norm,
        t,
        links,
        holds,
    }
}
