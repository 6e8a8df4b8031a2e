//! Spectral two-way splits of rank-one sums and the halving decomposition of
//! approximately regular matrices into well-conditioned row blocks.

use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::numerics::{lambda_min, Matrix, Rng};
use crate::par::{self, Exec};
use crate::zonotope::regularity_report;

/// Largest vector count accepted by [`partition_once_exact`].
pub const EXACT_LIMIT: usize = 16;

/// Up to this many vectors the local search tries every swap; above it, a
/// random sample of `m` swaps per scan.
const FULL_SWAP_LIMIT: usize = 64;

/// Masks per parallel work unit in the exhaustive search.
const MASK_CHUNK: usize = 1024;

/// A two-way split `S₁ ∪̇ S₂` scored by `min(λ_min(S₁), λ_min(S₂))`, where
/// `λ_min(S)` is the least eigenvalue of `Σ_{i∈S} vᵢvᵢᵀ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub achieved: f64,
}

/// `Σ_{i∈S} vᵢvᵢᵀ`, summed in increasing index order.
pub fn outer_sum(v: &[Vec<f64>], idx: &[usize], d: usize) -> Matrix {
    let mut m = Matrix::zeros(d, d);
    for &i in idx {
        add_outer(&mut m, &v[i], 1.0);
    }
    m
}

fn add_outer(m: &mut Matrix, x: &[f64], sign: f64) {
    let d = x.len();
    for r in 0..d {
        let xr = sign * x[r];
        let row = m.row_mut(r);
        for c in 0..d {
            row[c] += xr * x[c];
        }
    }
}

fn check_vectors(v: &[Vec<f64>]) -> Result<usize> {
    let d = v.first().map_or(0, |x| x.len());
    if d == 0 {
        return Err(Error::InvalidInput(
            "need at least one nonempty vector".into(),
        ));
    }
    if v.iter().any(|x| x.len() != d) {
        return Err(crate::error::dim_mismatch(d, "vector of other length"));
    }
    Ok(d)
}

fn score(v: &[Vec<f64>], s1: &[usize], s2: &[usize], d: usize, tol: &Tolerances) -> Result<f64> {
    let a = lambda_min(&outer_sum(v, s1, d), tol)?;
    let b = lambda_min(&outer_sum(v, s2, d), tol)?;
    Ok(a.min(b))
}

/// Splits encoded by `mask`: index 0 is always in `S₁`, index `i ≥ 1` joins
/// it when bit `i − 1` is set.
fn mask_split(m: usize, mask: u64) -> (Vec<usize>, Vec<usize>) {
    let mut s1 = vec![0];
    let mut s2 = Vec::new();
    for i in 1..m {
        if mask >> (i - 1) & 1 == 1 {
            s1.push(i);
        } else {
            s2.push(i);
        }
    }
    (s1, s2)
}

/// Exhaustive search over all `2^{m−1}` splits (`S₂` may be empty). Ties go to
/// the smallest mask, so the result does not depend on the execution mode.
pub fn partition_once_exact(v: &[Vec<f64>]) -> Result<Split> {
    partition_once_exact_with(Exec::default(), v)
}

pub fn partition_once_exact_with(exec: Exec, v: &[Vec<f64>]) -> Result<Split> {
    let m = v.len();
    if m > EXACT_LIMIT {
        return Err(Error::TooLarge {
            size: m,
            limit: EXACT_LIMIT,
        });
    }
    let d = check_vectors(v)?;
    let tol = Tolerances::default();
    let total = 1usize << (m - 1);
    let ranges = par::chunks(total, MASK_CHUNK);
    let best = par::map_slice(exec, &ranges, |&(start, len)| -> Result<(f64, u64)> {
        let mut best = (f64::NEG_INFINITY, 0u64);
        for mask in start..start + len {
            let (s1, s2) = mask_split(m, mask as u64);
            let val = score(v, &s1, &s2, d, &tol)?;
            if val > best.0 {
                best = (val, mask as u64);
            }
        }
        Ok(best)
    });
    let mut overall = (f64::NEG_INFINITY, 0u64);
    for b in best {
        let b = b?;
        if b.0 > overall.0 {
            overall = b;
        }
    }
    let (s1, s2) = mask_split(m, overall.1);
    Ok(Split {
        s1,
        s2,
        achieved: overall.0,
    })
}

/// Randomized local search: start from a balanced random split and apply
/// improving single moves or swaps until none is found among all moves and
/// all swaps (or `m` random swaps when `m > 64`), or `200·m` improvements
/// were made. Improvement is
/// lexicographic in `(min side, max side)`. Makes no promise about the
/// achieved value.
pub fn partition_once_heuristic(v: &[Vec<f64>], rng: &mut Rng) -> Result<Split> {
    let m = v.len();
    if m < 2 {
        return Err(Error::InvalidInput(
            "need at least two vectors to split".into(),
        ));
    }
    let d = check_vectors(v)?;
    let tol = Tolerances::default();
    let mut order: Vec<usize> = (0..m).collect();
    rng.shuffle(&mut order);
    let mut side = vec![false; m];
    for &i in &order[m / 2..] {
        side[i] = true;
    }
    let mut sums = [Matrix::zeros(d, d), Matrix::zeros(d, d)];
    for i in 0..m {
        add_outer(&mut sums[side[i] as usize], &v[i], 1.0);
    }
    let eval = |sums: &[Matrix; 2]| -> Result<(f64, f64)> {
        let a = lambda_min(&sums[0], &tol)?;
        let b = lambda_min(&sums[1], &tol)?;
        Ok((a.min(b), a.max(b)))
    };
    let better = |a: (f64, f64), b: (f64, f64)| {
        a.0 > b.0 + 1e-12 || (a.0 >= b.0 - 1e-15 && a.1 > b.1 + 1e-12)
    };
    let mut cur = eval(&sums)?;
    let cap = 200 * m;
    let mut steps = 0;
    'search: while steps < cap {
        let mut candidates: Vec<(usize, Option<usize>)> = (0..m).map(|i| (i, None)).collect();
        if m <= FULL_SWAP_LIMIT {
            for i in 0..m {
                for j in i + 1..m {
                    if side[i] != side[j] {
                        candidates.push((i, Some(j)));
                    }
                }
            }
        } else {
            for _ in 0..m {
                let i = rng.below(m);
                let j = rng.below(m);
                if side[i] != side[j] {
                    candidates.push((i, Some(j)));
                }
            }
        }
        rng.shuffle(&mut candidates);
        for (i, j) in candidates {
            let mut trial = sums.clone();
            let from = side[i] as usize;
            add_outer(&mut trial[from], &v[i], -1.0);
            add_outer(&mut trial[1 - from], &v[i], 1.0);
            if let Some(j) = j {
                add_outer(&mut trial[1 - from], &v[j], -1.0);
                add_outer(&mut trial[from], &v[j], 1.0);
            }
            let val = eval(&trial)?;
            if better(val, cur) {
                side[i] = !side[i];
                if let Some(j) = j {
                    side[j] = !side[j];
                }
                sums = trial;
                cur = val;
                steps += 1;
                continue 'search;
            }
        }
        break;
    }
    let s1: Vec<usize> = (0..m).filter(|&i| !side[i]).collect();
    let s2: Vec<usize> = (0..m).filter(|&i| side[i]).collect();
    // rescore from canonical sums so reported values do not carry update drift
    let achieved = score(v, &s1, &s2, d, &tol)?;
    Ok(Split { s1, s2, achieved })
}

/// `L`, `ε` and the guaranteed split level `L/2 − 3√(Lε)` for a set of
/// vectors, where `L = λ_min(Σvᵢvᵢᵀ)` and `ε = max‖vᵢ‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitBound {
    pub l: f64,
    pub eps: f64,
    pub bound: f64,
}

pub fn split_bound(v: &[Vec<f64>]) -> Result<SplitBound> {
    let d = check_vectors(v)?;
    let idx: Vec<usize> = (0..v.len()).collect();
    let l = lambda_min(&outer_sum(v, &idx, d), &Tolerances::default())?;
    let eps = v
        .iter()
        .map(|x| x.iter().map(|a| a * a).sum::<f64>())
        .fold(0.0, f64::max);
    let bound = l / 2.0 - 3.0 * (l.max(0.0) * eps).sqrt();
    Ok(SplitBound { l, eps, bound })
}

/// `L_s = 2^{−s} − 15·√(2^{−s}·ε)`.
pub fn level(s: u32, eps: f64) -> f64 {
    let a = 0.5f64.powi(s as i32);
    a - 15.0 * (a * eps).sqrt()
}

/// `L_s/2 − 3√(L_s·ε) ≥ L_{s+1}`. Only meaningful for `L_s ≥ 0`; returns
/// `None` otherwise.
pub fn level_step(s: u32, eps: f64) -> Option<bool> {
    let ls = level(s, eps);
    if ls < 0.0 {
        return None;
    }
    Some(ls / 2.0 - 3.0 * (ls * eps).sqrt() >= level(s + 1, eps))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionResult {
    pub blocks: Vec<Vec<usize>>,
    /// `λ_min(Σ_{i∈J} AᵢAᵢᵀ)` per block.
    pub block_lambda_min: Vec<f64>,
    /// Number of halving rounds `t`.
    pub levels: u32,
    pub k: usize,
    pub c: f64,
    /// `1/(Ck)` for every block.
    pub targets: Vec<f64>,
    /// `L_s` for `s = 0..=t` with `ε = 4d/m`.
    pub level_bounds: Vec<f64>,
    /// Smallest block `λ_min` observed at each level `s = 0..=t`.
    pub level_lambda_min: Vec<f64>,
}

/// Halves the row set `t` times, where `m/(2Cd) < 2^t ≤ m/(Cd)`, splitting
/// each block exactly when it has at most 16 rows and by local search
/// otherwise, then keeps the final blocks of at most `4Cd` rows. When
/// `m ≤ Cd` the whole row set is the single block.
pub fn decompose_regular(a: &Matrix, c: f64, rng: &mut Rng) -> Result<PartitionResult> {
    let (m, d) = a.shape();
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "block constant must be positive, got {c}"
        )));
    }
    let rep = regularity_report(a, 1.0);
    if !rep.is_regular {
        return Err(Error::InvalidInput(format!(
            "matrix is not approximately regular (gram error {:.2e}, row norm {:.4} > {:.4})",
            rep.column_gram_error, rep.max_row_norm, rep.bound
        )));
    }
    let tol = Tolerances::default();
    let rows: Vec<Vec<f64>> = a.row_iter().map(|r| r.to_vec()).collect();
    let cd = c * d as f64;
    let ratio = m as f64 / cd;
    let t = if ratio <= 1.0 {
        0
    } else {
        ratio.log2().floor() as u32
    };
    let eps = 4.0 * d as f64 / m as f64;

    let block_min = |blocks: &[Vec<usize>]| -> Result<f64> {
        let mut low = f64::INFINITY;
        for b in blocks {
            low = low.min(lambda_min(&outer_sum(&rows, b, d), &tol)?);
        }
        Ok(low)
    };
    let mut blocks: Vec<Vec<usize>> = vec![(0..m).collect()];
    let mut level_lambda_min = vec![block_min(&blocks)?];
    for s in 0..t {
        let round = rng.split_index(s as u64);
        let splits = par::map_indexed(Exec::default(), blocks.len(), |bi| -> Result<Split> {
            let block = &blocks[bi];
            let sub: Vec<Vec<f64>> = block.iter().map(|&i| rows[i].clone()).collect();
            let sp = if sub.len() <= EXACT_LIMIT {
                partition_once_exact_with(Exec::Sequential, &sub)?
            } else {
                partition_once_heuristic(&sub, &mut round.split_index(bi as u64))?
            };
            Ok(Split {
                s1: sp.s1.iter().map(|&i| block[i]).collect(),
                s2: sp.s2.iter().map(|&i| block[i]).collect(),
                achieved: sp.achieved,
            })
        });
        let mut next = Vec::with_capacity(2 * blocks.len());
        for sp in splits {
            let sp = sp?;
            next.push(sp.s1);
            next.push(sp.s2);
        }
        blocks = next;
        level_lambda_min.push(block_min(&blocks)?);
    }

    let limit = 4.0 * cd;
    blocks.retain(|b| b.len() as f64 <= limit);
    let k = blocks.len();
    let block_lambda_min = blocks
        .iter()
        .map(|b| lambda_min(&outer_sum(&rows, b, d), &tol))
        .collect::<Result<Vec<_>>>()?;
    let target = if k == 0 { 0.0 } else { 1.0 / (c * k as f64) };
    Ok(PartitionResult {
        blocks,
        block_lambda_min,
        levels: t,
        k,
        c,
        targets: vec![target; k],
        level_bounds: (0..=t).map(|s| level(s, eps)).collect(),
        level_lambda_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zonotope::random_normalized_zonotope;

    fn half(v: [f64; 2]) -> Vec<f64> {
        v.iter()
            .map(|a| a * std::f64::consts::FRAC_1_SQRT_2)
            .collect()
    }

    fn four() -> Vec<Vec<f64>> {
        vec![
            half([1.0, 0.0]),
            half([1.0, 0.0]),
            half([0.0, 1.0]),
            half([0.0, 1.0]),
        ]
    }

    fn sorted(mut a: Vec<usize>, mut b: Vec<usize>) -> (Vec<usize>, Vec<usize>) {
        a.sort();
        b.sort();
        if a > b {
            (b, a)
        } else {
            (a, b)
        }
    }

    #[test]
    fn four_vector_split() {
        let sp = partition_once_exact(&four()).unwrap();
        assert!((sp.achieved - 0.5).abs() < 1e-12);
        assert_eq!(sorted(sp.s1, sp.s2), (vec![0, 2], vec![1, 3]));
        let h = partition_once_heuristic(&four(), &mut Rng::new(1)).unwrap();
        assert!((h.achieved - 0.5).abs() < 1e-12);
    }

    #[test]
    fn two_basis_vectors() {
        let v = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let sp = partition_once_exact(&v).unwrap();
        assert_eq!(sp.achieved, 0.0);
        let b = split_bound(&v).unwrap();
        assert!(b.bound <= 0.0);
    }

    #[test]
    fn too_large() {
        let v = vec![vec![1.0]; 17];
        assert!(matches!(
            partition_once_exact(&v),
            Err(Error::TooLarge {
                size: 17,
                limit: 16
            })
        ));
    }

    #[test]
    fn exact_is_mode_independent() {
        let mut rng = Rng::new(3);
        let v: Vec<Vec<f64>> = (0..13).map(|_| rng.gaussian_vector(3)).collect();
        let a = partition_once_exact_with(Exec::Sequential, &v).unwrap();
        let b = partition_once_exact_with(Exec::Parallel, &v).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn recursion_step_holds_where_defined() {
        for &eps in &[1e-4, 1e-3, 0.01, 0.05] {
            for s in 0..=20 {
                if let Some(ok) = level_step(s, eps) {
                    assert!(ok, "s = {s}, eps = {eps}");
                }
            }
        }
        assert_eq!(level_step(0, 1.0), None);
    }

    #[test]
    fn small_matrix_is_one_block() {
        let mut rng = Rng::new(4);
        let k = random_normalized_zonotope(2, 64, &mut rng).unwrap();
        let r = decompose_regular(k.generators(), 64.0, &mut rng).unwrap();
        assert_eq!(r.k, 1);
        assert_eq!(r.blocks[0], (0..64).collect::<Vec<_>>());
        assert_eq!(r.levels, 0);
        assert!((r.block_lambda_min[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn stacked_identities_pair_up() {
        let s = 1.0 / 8f64.sqrt();
        let mut a = Matrix::zeros(16, 2);
        for i in 0..16 {
            a[(i, i % 2)] = s;
        }
        let r = decompose_regular(&a, 2.0, &mut Rng::new(0)).unwrap();
        assert_eq!(r.levels, 2);
        assert_eq!(r.k, 4);
        for (b, &l) in r.blocks.iter().zip(&r.block_lambda_min) {
            assert_eq!(b.len(), 4);
            assert_eq!(b.iter().filter(|&&i| i % 2 == 0).count(), 2);
            assert!((l - 0.25).abs() < 1e-12);
            assert!(l >= r.targets[0]);
        }
        let mut all: Vec<usize> = r.blocks.concat();
        all.sort();
        assert_eq!(all, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn irregular_input_rejected() {
        let a = Matrix::identity(2).scaled(2.0);
        assert!(decompose_regular(&a, 64.0, &mut Rng::new(0)).is_err());
    }
}
