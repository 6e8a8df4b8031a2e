use super::Zonotope;
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::{orthonormalize, Matrix, Rng};

const MAX_ATTEMPTS: usize = 100;

/// The rotated-cube instance: `K = (1/√d)HᵀB∞ᵈ` for a Sylvester Hadamard
/// matrix `H`, vectors `vᵢ = √d·eᵢ ∈ K`, and `Q = B∞ᵈ`.
#[derive(Debug, Clone)]
pub struct HadamardInstance {
    pub k: Zonotope,
    pub vectors: Vec<Vec<f64>>,
    pub q: Zonotope,
    pub h: Matrix,
}

pub fn make_hadamard_instance(d: usize) -> Result<HadamardInstance> {
    if !d.is_power_of_two() || d > 64 {
        return Err(Error::UnsupportedDimension(d));
    }
    let mut h = Matrix::identity(1);
    while h.rows() < d {
        let n = h.rows();
        let mut next = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let v = h[(i, j)];
                next[(i, j)] = v;
                next[(i, j + n)] = v;
                next[(i + n, j)] = v;
                next[(i + n, j + n)] = -v;
            }
        }
        h = next;
    }
    let root = (d as f64).sqrt();
    let a = h.scaled(1.0 / root);
    let vectors = (0..d)
        .map(|i| {
            let mut v = vec![0.0; d];
            v[i] = root;
            v
        })
        .collect();
    Ok(HadamardInstance {
        k: Zonotope::new(a, 1.0)?,
        vectors,
        q: Zonotope::cube(d),
        h,
    })
}

/// Gaussian `m × d` draw with orthonormalized columns, redrawn until every
/// row satisfies `‖Aᵢ‖₂ ≤ 2√(d/m)`. Scale `√(d/m)`.
pub fn random_normalized_zonotope(d: usize, m: usize, rng: &mut Rng) -> Result<Zonotope> {
    if d == 0 || m < d {
        return Err(Error::InvalidInput(format!(
            "need 1 <= d <= m, got d={d}, m={m}"
        )));
    }
    let bound = 2.0 * (d as f64 / m as f64).sqrt();
    let tol = Tolerances::default();
    for _ in 0..MAX_ATTEMPTS {
        let g = Matrix::from_vec(m, d, rng.gaussian_vector(m * d))?;
        let Ok(a) = orthonormalize(&g, &tol) else {
            continue;
        };
        if a.row_iter().all(|r| crate::numerics::norm2(r) <= bound) {
            return Zonotope::new(a, (d as f64 / m as f64).sqrt());
        }
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
    })
}

/// `n` uniformly random vertices `s·Aᵀσ`, `σ ∈ {−1,1}ᵐ`, of `K`.
pub fn random_vertices(k: &Zonotope, n: usize, rng: &mut Rng) -> Vec<Vec<f64>> {
    (0..n).map(|_| k.point(&rng.signs(k.segments()))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zonotope::regularity_report;

    #[test]
    fn hadamard_small_cases() {
        let h1 = make_hadamard_instance(1).unwrap();
        assert_eq!(h1.vectors, vec![vec![1.0]]);
        assert_eq!(h1.k, Zonotope::cube(1));
        let h2 = make_hadamard_instance(2).unwrap();
        assert_eq!(h2.h, Matrix::from_rows(&[[1.0, 1.0], [1.0, -1.0]]).unwrap());
        assert_eq!(h2.vectors[0], vec![2f64.sqrt(), 0.0]);
        assert_eq!(h2.vectors[1], vec![0.0, 2f64.sqrt()]);
        assert!(matches!(
            make_hadamard_instance(6),
            Err(Error::UnsupportedDimension(6))
        ));
        assert!(make_hadamard_instance(128).is_err());
    }

    #[test]
    fn hadamard_vectors_are_unit_vertices() {
        for d in [4, 8, 16] {
            let inst = make_hadamard_instance(d).unwrap();
            for v in &inst.vectors {
                assert!(inst.k.member(v, 1.0).unwrap());
                assert!((inst.k.norm(v).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hadamard_norm_matches_support_duality() {
        // max over θ of ⟨θ,x⟩/h_K(θ) is attained at a vertex of the polar;
        // for the rotated cube these are the rows ±Hᵢ/√d.
        let inst = make_hadamard_instance(4).unwrap();
        let x = &inst.vectors[0];
        let mut best: f64 = 0.0;
        for pattern in 0..16u32 {
            let th: Vec<f64> = (0..4)
                .map(|i| if pattern >> i & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            let h = inst.k.support(&th);
            best = best.max(crate::numerics::dot(&th, x) / h);
        }
        for i in 0..4 {
            let th = inst.h.row(i).to_vec();
            best = best.max(crate::numerics::dot(&th, x) / inst.k.support(&th));
        }
        assert!((best - 1.0).abs() < 1e-12);
        assert!((inst.k.norm(x).unwrap() - best).abs() < 1e-12);
    }

    #[test]
    fn random_normalized_is_regular_and_deterministic() {
        let k = random_normalized_zonotope(4, 32, &mut Rng::new(2)).unwrap();
        assert!(regularity_report(k.generators(), k.scale()).is_regular);
        let again = random_normalized_zonotope(4, 32, &mut Rng::new(2)).unwrap();
        assert_eq!(k, again);
        let sq = random_normalized_zonotope(5, 5, &mut Rng::new(3)).unwrap();
        assert!(regularity_report(sq.generators(), sq.scale()).is_regular);
    }
}
