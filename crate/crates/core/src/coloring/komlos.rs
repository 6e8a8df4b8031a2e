use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::numerics::{column_basis, sym_eig, Matrix, Rng};
use crate::zonotope::{regularity_report, Zonotope};

use super::walk::{partial_coloring_walk, StripSystem};
use super::{columns_matrix, signed_sum, PartialColoring};

/// Spectral restriction for vectors `v₁..vₙ`: `sigma` holds the eigenvalues of
/// the Gram matrix `VᵀV` (equivalently of `Σvⱼvⱼᵀ`, padded with zeros),
/// `v_basis` spans the bottom `⌈2n/3⌉` eigenvectors of `VᵀV` in coloring space,
/// and `f_basis` spans their image `{Σgⱼvⱼ}` in `ℝᵈ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KomlosRestriction {
    pub f_basis: Matrix,
    pub v_basis: Matrix,
    pub sigma: Vec<f64>,
}

impl KomlosRestriction {
    /// Index `⌈2n/3⌉` of the restriction (1-based), i.e. the subspace dimension.
    pub fn cutoff(&self) -> usize {
        (2 * self.sigma.len()).div_ceil(3)
    }

    /// `σ` at the cutoff, the largest eigenvalue kept.
    pub fn sigma_at_cutoff(&self) -> f64 {
        match self.cutoff() {
            0 => 0.0,
            k => self.sigma[k - 1],
        }
    }
}

/// Splits the coloring space by the spectrum of `VᵀV`. On `v_basis` the map
/// `g ↦ Σgⱼvⱼ` has operator norm at most `√σ_k`, where `k = ⌈2n/3⌉` and
/// `σ_k ≤ Σ‖vⱼ‖²/(n−k+1)`.
pub fn komlos_restrict(v: &[Vec<f64>], cfg: &Config) -> Result<KomlosRestriction> {
    let n = v.len();
    if n == 0 {
        return Err(Error::InvalidInput("no vectors".into()));
    }
    let d = v[0].len();
    if v.iter().any(|c| c.len() != d) {
        return Err(Error::InvalidInput("vectors differ in length".into()));
    }
    let vm = columns_matrix(v, d);
    let g = vm.gram();
    let eig = sym_eig(&g, &cfg.tol)?;
    let k = (2 * n).div_ceil(3);
    let idx: Vec<usize> = (0..k).collect();
    let v_basis = eig.vectors.select_cols(&idx);
    let f_basis = column_basis(&vm.matmul(&v_basis)?, &cfg.tol);
    let sigma = eig.values.iter().map(|&s| s.max(0.0)).collect();
    Ok(KomlosRestriction {
        f_basis,
        v_basis,
        sigma,
    })
}

/// Strips certifying `‖Σxⱼvⱼ‖_K ≤ c·√d` for a normalized `K = s·AᵀB∞ᵐ`:
/// normals `aᵢ = VᵀAᵢ/(√d·s)` at width 1. Since `AᵀA = I`, any `z ∈ ℝᵈ`
/// equals `Σ Aᵢ⟨Aᵢ,z⟩`, so `|⟨aᵢ,x⟩| ≤ c` for all `i` puts `Vx` in `c√d·K`.
pub fn komlos_strips(v: &[Vec<f64>], k: &Zonotope) -> Result<StripSystem> {
    let d = k.dim();
    let rep = regularity_report(k.generators(), k.scale());
    if rep.column_gram_error > 1e-7 {
        return Err(Error::InvalidInput(format!(
            "zonotope generators are not orthonormal (error {:.2e})",
            rep.column_gram_error
        )));
    }
    let vm = columns_matrix(v, d);
    let normals = k
        .generators()
        .matmul(&vm)?
        .scaled(1.0 / ((d as f64).sqrt() * k.scale()));
    StripSystem::new(normals, 1.0)
}

/// Good partial coloring `x + y` with `‖Σxⱼvⱼ‖_K ≤ c_strip·√d`, found by the
/// strip-constrained walk on the low-spectrum subspace of `v/√d`. The
/// returned point is `x + y`. The strip certificate is re-checked against the
/// LP gauge on every call.
pub fn komlos_partial_coloring(
    v: &[Vec<f64>],
    k: &Zonotope,
    shift: &[f64],
    cfg: &Config,
    rng: &mut Rng,
) -> Result<PartialColoring> {
    let n = v.len();
    if shift.len() != n {
        return Err(crate::error::dim_mismatch(n, shift.len()));
    }
    let d = k.dim();
    if v.iter().any(|c| c.len() != d) {
        return Err(crate::error::dim_mismatch(d, "vector of other length"));
    }
    let root_d = (d as f64).sqrt();
    let scaled: Vec<Vec<f64>> = v
        .iter()
        .map(|c| c.iter().map(|a| a / root_d).collect())
        .collect();
    let restriction = komlos_restrict(&scaled, cfg)?;
    let strips = komlos_strips(v, k)?;
    let c = cfg.constants.c_strip;
    let pc = partial_coloring_walk(&strips, shift, &restriction.v_basis, c, cfg, rng)?;

    let inc: Vec<f64> = pc.x.iter().zip(shift).map(|(a, b)| a - b).collect();
    let z = signed_sum(v, &inc);
    if strips.max_violation(&inc, c) > 1e-9 * c {
        return Err(Error::NumericalFailure(
            "walk left its strip polytope".into(),
        ));
    }
    if !k.member(&z, c * root_d * (1.0 + 1e-9))? {
        return Err(Error::NumericalFailure(
            "strip certificate disagrees with the zonotope gauge".into(),
        ));
    }
    Ok(pc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zonotope::{make_hadamard_instance, random_normalized_zonotope, random_vertices};

    fn unit(n: usize, i: usize) -> Vec<f64> {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        e
    }

    #[test]
    fn basis_vectors_have_unit_spectrum() {
        let v: Vec<Vec<f64>> = (0..6).map(|i| unit(6, i)).collect();
        let r = komlos_restrict(&v, &Config::default()).unwrap();
        assert!(r.sigma.iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert_eq!(r.v_basis.cols(), 4);
        assert_eq!(r.f_basis.cols(), 4);
    }

    #[test]
    fn repeated_vector_spectrum() {
        let v = vec![unit(2, 0), unit(2, 0)];
        let r = komlos_restrict(&v, &Config::default()).unwrap();
        assert!(r.sigma[0].abs() < 1e-12 && (r.sigma[1] - 2.0).abs() < 1e-12);
        // the kept direction is the kernel (1,-1)/√2, mapping to zero in ℝ²
        assert_eq!(r.cutoff(), 2);
        let k0 = r.v_basis.col(0);
        assert!((k0[0] + k0[1]).abs() < 1e-12);
    }

    #[test]
    fn low_rank_cutoff_is_zero() {
        let mut rng = Rng::new(40);
        let v: Vec<Vec<f64>> = (0..12).map(|_| rng.unit_vector(4)).collect();
        let r = komlos_restrict(&v, &Config::default()).unwrap();
        assert!(r.sigma_at_cutoff() < 1e-9);
        assert_eq!(r.cutoff(), 8);
    }

    #[test]
    fn single_vector_colors_fully() {
        let cfg = Config::default();
        let mut rng = Rng::new(1);
        let k = random_normalized_zonotope(3, 12, &mut rng).unwrap();
        let v = random_vertices(&k, 1, &mut rng);
        let pc = komlos_partial_coloring(&v, &k, &[0.0], &cfg, &mut rng).unwrap();
        assert_eq!(pc.x[0].abs(), 1.0);
    }

    #[test]
    fn partial_colorings_meet_envelope() {
        let cfg = Config::default();
        let mut rng = Rng::new(19);
        let k = random_normalized_zonotope(8, 32, &mut rng).unwrap();
        for seed in 0..10 {
            let mut r = Rng::new(seed);
            let v = random_vertices(&k, 8, &mut r);
            let pc = komlos_partial_coloring(&v, &k, &[0.0; 8], &cfg, &mut r).unwrap();
            assert!(pc.is_good());
            let norm = k.norm(&signed_sum(&v, &pc.x)).unwrap();
            assert!(norm <= cfg.constants.c_strip * 8f64.sqrt() * (1.0 + 1e-7));
        }
    }

    #[test]
    fn near_boundary_shift_freezes() {
        let cfg = Config::default();
        let h = make_hadamard_instance(4).unwrap();
        let shift = [0.999, 0.0, 0.0, 0.0];
        let pc = komlos_partial_coloring(&h.vectors, &h.k, &shift, &cfg, &mut Rng::new(5)).unwrap();
        assert!(pc.in_box(0.0));
        assert!(pc.frozen.len() >= 2);
    }
}
