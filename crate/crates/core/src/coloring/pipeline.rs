use std::time::Instant;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::lp::{InfNormSolver, LpStatus};
use crate::numerics::{Matrix, Rng};
use crate::zonotope::{normalize, sparsify, sparsify_rows, MembershipOracle, Zonotope};

use super::gsw::gram_schmidt_walk;
use super::komlos::komlos_partial_coloring;
use super::lsv::lsv_reduce;
use super::spencer::spencer;
use super::{signed_sum, ColoringReport};

/// Sparsification accuracy used inside the pipeline.
const PIPELINE_EPSILON: f64 = 0.5;

/// A pipeline run together with the normalized body and mapped vectors the
/// reported norms refer to.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub report: ColoringReport,
    pub k_tilde: Zonotope,
    pub mapped: Vec<Vec<f64>>,
    /// Whether the input was sparsified first.
    pub sparsified: bool,
}

/// `max(1, ⌈log₂ log₂(2m/n)⌉)`.
pub fn komlos_rounds(m: usize, n: usize) -> usize {
    let r = 2.0 * m as f64 / n.max(1) as f64;
    let ll = r.log2().log2();
    if ll.is_finite() && ll > 1.0 {
        ll.ceil() as usize
    } else {
        1
    }
}

/// Full `K → K` balancing; see [`vb_kk_pipeline_detailed`].
pub fn vb_kk_pipeline(
    k_raw: &Zonotope,
    v: &[Vec<f64>],
    cfg: &Config,
    seed: u64,
    instance_id: &str,
) -> Result<ColoringReport> {
    vb_kk_pipeline_detailed(k_raw, v, cfg, seed, instance_id).map(|r| r.report)
}

/// Sparsify (when `m` exceeds the sample count at `ε = 1/2`), normalize, map
/// `v` through `T`, reduce to at most `d` fractional coordinates, run
/// `max(1, ⌈log₂log₂(2m'/n)⌉)` rounds of zonotope partial coloring, then round
/// the rest with Spencer's walk on minimal cube preimages. Stage norms are the
/// gauges of the per-stage increments in normalized coordinates, so the final
/// norm is at most their sum.
pub fn vb_kk_pipeline_detailed(
    k_raw: &Zonotope,
    v: &[Vec<f64>],
    cfg: &Config,
    seed: u64,
    instance_id: &str,
) -> Result<PipelineRun> {
    let start = Instant::now();
    let n = v.len();
    let d = k_raw.dim();
    if n == 0 {
        return Err(Error::InvalidInput("no vectors to balance".into()));
    }
    if v.iter().any(|c| c.len() != d) {
        return Err(crate::error::dim_mismatch(d, "vector of other length"));
    }
    let mut raw_oracle = MembershipOracle::new(k_raw, 1e-6)?;
    for (j, vj) in v.iter().enumerate() {
        if !raw_oracle.member(vj, 1.0)? {
            return Err(Error::InvalidInput(format!("vector {j} is not in K")));
        }
    }
    let rng = Rng::new(seed);

    let sparsified =
        k_raw.segments() > sparsify_rows(d, PIPELINE_EPSILON, cfg.constants.c0_sparsify);
    let k1 = if sparsified {
        sparsify(
            k_raw,
            PIPELINE_EPSILON,
            cfg.constants.c0_sparsify,
            &mut rng.split("sparsify"),
        )?
    } else {
        k_raw.clone()
    };
    let norm = normalize(&k1, &cfg.tol)?;
    let kt = norm.k_tilde.clone();
    let w: Vec<Vec<f64>> = v.iter().map(|vj| norm.apply(vj)).collect();
    let mut gauge = MembershipOracle::new(&kt, cfg.tol.membership)?;
    let mut stage_norms = Vec::new();

    let mut x = lsv_reduce(&w).x;
    if n > d {
        stage_norms.push(gauge.norm(&signed_sum(&w, &x))?);
    }

    let rounds = komlos_rounds(kt.segments(), n);
    let mut done_rounds = 0;
    for r in 0..rounds {
        let frac: Vec<usize> = (0..n).filter(|&j| x[j].abs() != 1.0).collect();
        if frac.is_empty() {
            break;
        }
        let sub: Vec<Vec<f64>> = frac.iter().map(|&j| w[j].clone()).collect();
        let shift: Vec<f64> = frac.iter().map(|&j| x[j]).collect();
        let pc = komlos_partial_coloring(&sub, &kt, &shift, cfg, &mut rng.split_index(r as u64))?;
        let inc: Vec<f64> = pc.x.iter().zip(&shift).map(|(a, b)| a - b).collect();
        stage_norms.push(gauge.norm(&signed_sum(&sub, &inc))?);
        for (&j, &val) in frac.iter().zip(&pc.x) {
            x[j] = val;
        }
        done_rounds += 1;
    }

    let frac: Vec<usize> = (0..n).filter(|&j| x[j].abs() != 1.0).collect();
    if !frac.is_empty() {
        let mut solver = InfNormSolver::new(&kt.effective_generators())?;
        let mut cols = Vec::with_capacity(frac.len());
        for &j in &frac {
            let sol = solver.solve(&w[j])?;
            if sol.status != LpStatus::Optimal {
                return Err(Error::Infeasible);
            }
            cols.push(sol.y);
        }
        let mut m = Matrix::from_columns(&cols)?;
        // the sparsified body only contains v up to a constant factor
        let big = m.max_abs();
        if big > 1.0 {
            m = m.scaled(1.0 / big);
        }
        let shift: Vec<f64> = frac.iter().map(|&j| x[j]).collect();
        let out = spencer(&m, &shift, cfg, &mut rng.split("spencer"))?;
        let sub: Vec<Vec<f64>> = frac.iter().map(|&j| w[j].clone()).collect();
        stage_norms.push(gauge.norm(&signed_sum(&sub, &out.x))?);
        for (&j, &c) in frac.iter().zip(&out.coloring) {
            x[j] = c;
        }
    }
    debug_assert!(x.iter().all(|v| v.abs() == 1.0));
    let final_norm = gauge.norm(&signed_sum(&w, &x))?;

    Ok(PipelineRun {
        report: ColoringReport {
            instance_id: instance_id.to_string(),
            seed,
            n,
            d,
            m: k_raw.segments(),
            stage_norms,
            final_norm_K: final_norm,
            final_norm_Q: None,
            rounds: done_rounds,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            x,
        },
        k_tilde: kt,
        mapped: w,
        sparsified,
    })
}

/// `K → Q` balancing: Gram-Schmidt walk on `vⱼ/√d` (which lie in the unit
/// ball when `K` is normalized), reporting `‖Σxⱼvⱼ‖_Q` and `‖Σxⱼvⱼ‖_K`.
pub fn vb_kq(
    k: &Zonotope,
    q: &Zonotope,
    v: &[Vec<f64>],
    seed: u64,
    instance_id: &str,
) -> Result<ColoringReport> {
    let start = Instant::now();
    let d = k.dim();
    if q.dim() != d {
        return Err(crate::error::dim_mismatch(d, q.dim()));
    }
    if v.is_empty() {
        return Err(Error::InvalidInput("no vectors to balance".into()));
    }
    if v.iter().any(|c| c.len() != d) {
        return Err(crate::error::dim_mismatch(d, "vector of other length"));
    }
    let root_d = (d as f64).sqrt();
    let u: Vec<Vec<f64>> = v
        .iter()
        .map(|c| c.iter().map(|a| a / root_d).collect())
        .collect();
    let x = gram_schmidt_walk(&u, &mut Rng::new(seed).split("gram-schmidt"));
    let sum = signed_sum(v, &x);
    let norm_q = q.norm(&sum)?;
    let norm_k = k.norm(&sum)?;
    Ok(ColoringReport {
        instance_id: instance_id.to_string(),
        seed,
        n: v.len(),
        d,
        m: k.segments(),
        stage_norms: vec![norm_q],
        final_norm_K: norm_k,
        final_norm_Q: Some(norm_q),
        rounds: 1,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
        x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{brute_force_optimal, ZonotopeGauge};
    use crate::zonotope::{make_hadamard_instance, random_normalized_zonotope, random_vertices};

    #[test]
    fn round_count() {
        assert_eq!(komlos_rounds(4, 4), 1);
        assert_eq!(komlos_rounds(64, 8), 2);
        assert_eq!(komlos_rounds(1 << 16, 2), 4);
    }

    #[test]
    fn one_vector() {
        let mut rng = Rng::new(2);
        let k = random_normalized_zonotope(3, 12, &mut rng).unwrap();
        let v = random_vertices(&k, 1, &mut rng);
        let rep = vb_kk_pipeline(&k, &v, &Config::default(), 1, "one").unwrap();
        assert_eq!(rep.x[0].abs(), 1.0);
        assert!(rep.final_norm_K <= 1.0 + 1e-7);
    }

    #[test]
    fn hadamard_against_oracle() {
        let h = make_hadamard_instance(4).unwrap();
        let cfg = Config::default();
        for seed in 0..5 {
            let run = vb_kk_pipeline_detailed(&h.k, &h.vectors, &cfg, seed, "h4").unwrap();
            let mut g = ZonotopeGauge::new(&run.k_tilde).unwrap();
            let (opt, _) = brute_force_optimal(&run.mapped, &mut g).unwrap();
            assert!(run.report.final_norm_K >= opt - 1e-9);
            assert!(run.report.final_norm_K <= cfg.constants.c_pipeline * 2.0);
        }
    }

    #[test]
    fn stage_budget_bounds_final_norm() {
        let mut rng = Rng::new(8);
        let k = random_normalized_zonotope(8, 64, &mut rng).unwrap();
        let v = random_vertices(&k, 8, &mut rng);
        let rep = vb_kk_pipeline(&k, &v, &Config::default(), 3, "r8").unwrap();
        assert!(rep.x.iter().all(|s| s.abs() == 1.0));
        let budget: f64 = rep.stage_norms.iter().sum();
        assert!(rep.final_norm_K <= budget * (1.0 + 1e-7) + 1e-9);
    }

    #[test]
    fn more_vectors_than_dimensions() {
        let mut rng = Rng::new(9);
        let k = random_normalized_zonotope(4, 16, &mut rng).unwrap();
        let v = random_vertices(&k, 11, &mut rng);
        let rep = vb_kk_pipeline(&k, &v, &Config::default(), 4, "wide").unwrap();
        assert_eq!(rep.x.len(), 11);
        assert!(rep.stage_norms[0] < 1e-6);
    }

    #[test]
    fn kq_on_hadamard_is_forced() {
        let h = make_hadamard_instance(4).unwrap();
        let rep = vb_kq(&h.k, &h.q, &h.vectors, 3, "h4").unwrap();
        assert!((rep.final_norm_Q.unwrap() - 2.0).abs() < 1e-12);
        let one = Zonotope::cube(1);
        let rep = vb_kq(&one, &one, &[vec![1.0]], 0, "unit").unwrap();
        assert!((rep.final_norm_Q.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn report_json_has_exact_fields() {
        let h = make_hadamard_instance(2).unwrap();
        let rep = vb_kq(&h.k, &h.q, &h.vectors, 1, "h2").unwrap();
        let json = serde_json::to_value(&rep).unwrap();
        let mut keys: Vec<&str> = json
            .as_object()
            .unwrap()
            .keys()
            .map(|s| s.as_str())
            .collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "d",
                "final_norm_K",
                "final_norm_Q",
                "instance_id",
                "m",
                "n",
                "rounds",
                "seed",
                "stage_norms",
                "wall_ms"
            ]
        );
    }
}
