use crate::config::Tolerances;
use crate::numerics::{sym_eig, Matrix, Rng};

const FREEZE_TOL: f64 = 1e-9;

/// Gram-Schmidt walk. Returns signs whose signed sum `Σxⱼvⱼ` is
/// sub-gaussian with variance proxy 1 in every unit direction, for
/// `‖vⱼ‖₂ ≤ 1`.
///
/// Each step takes the pivot (largest alive index), the direction `u` with
/// `u_p = 1`, zeros on frozen coordinates, and on the other alive coordinates
/// the minimum-norm least-squares solution of `min ‖v_p + Σ uⱼvⱼ‖`. The walk
/// moves to one of the two boundary points along `±u` with probabilities that
/// keep `x` a martingale.
pub fn gram_schmidt_walk(v: &[Vec<f64>], rng: &mut Rng) -> Vec<f64> {
    let n = v.len();
    let d = v.first().map_or(0, |c| c.len());
    let tol = Tolerances::default();
    let mut x = vec![0.0; n];
    let mut alive: Vec<bool> = vec![true; n];
    let mut pivot = n;
    loop {
        if pivot >= n || !alive[pivot] {
            match (0..n).rev().find(|&j| alive[j]) {
                Some(p) => pivot = p,
                None => break,
            }
        }
        let others: Vec<usize> = (0..n).filter(|&j| alive[j] && j != pivot).collect();
        let mut u = vec![0.0; n];
        u[pivot] = 1.0;
        if !others.is_empty() && d > 0 {
            // u_S = −W_Sᵀ (W_S W_Sᵀ)⁺ v_p
            let mut ww = Matrix::zeros(d, d);
            for &j in &others {
                for a in 0..d {
                    for b in 0..d {
                        ww[(a, b)] += v[j][a] * v[j][b];
                    }
                }
            }
            let eig = sym_eig(&ww, &tol).expect("Gram matrices are symmetric");
            let cutoff = 1e-12 * eig.max().max(1e-300);
            let pinv = eig.map_values(|s| if s > cutoff { 1.0 / s } else { 0.0 });
            let c = pinv.mul_vec(&v[pivot]);
            for &j in &others {
                u[j] = -crate::numerics::dot(&v[j], &c);
            }
        }
        let mut plus = f64::INFINITY;
        let mut minus = f64::INFINITY;
        for j in 0..n {
            if !alive[j] || u[j] == 0.0 {
                continue;
            }
            let (up, down) = ((1.0 - x[j]) / u[j].abs(), (1.0 + x[j]) / u[j].abs());
            if u[j] > 0.0 {
                plus = plus.min(up);
                minus = minus.min(down);
            } else {
                plus = plus.min(down);
                minus = minus.min(up);
            }
        }
        let step = if rng.uniform() * (plus + minus) < minus {
            plus
        } else {
            -minus
        };
        for j in 0..n {
            if alive[j] {
                x[j] += step * u[j];
                if (x[j].abs() - 1.0).abs() <= FREEZE_TOL || x[j].abs() > 1.0 {
                    x[j] = x[j].signum();
                    alive[j] = false;
                }
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::signed_sum;
    use crate::numerics::{dot, norm2};

    #[test]
    fn single_vector() {
        let x = gram_schmidt_walk(&[vec![0.3, 0.4]], &mut Rng::new(2));
        assert_eq!(x.len(), 1);
        assert_eq!(x[0].abs(), 1.0);
    }

    #[test]
    fn orthonormal_inputs() {
        let v: Vec<Vec<f64>> = (0..5)
            .map(|i| {
                let mut e = vec![0.0; 5];
                e[i] = 1.0;
                e
            })
            .collect();
        let x = gram_schmidt_walk(&v, &mut Rng::new(3));
        assert!((norm2(&signed_sum(&v, &x)) - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn deterministic_and_exact() {
        let mut rng = Rng::new(4);
        let v: Vec<Vec<f64>> = (0..30).map(|_| rng.unit_vector(6)).collect();
        let a = gram_schmidt_walk(&v, &mut Rng::new(99));
        let b = gram_schmidt_walk(&v, &mut Rng::new(99));
        assert_eq!(a, b);
        assert!(a.iter().all(|s| s.abs() == 1.0));
    }

    #[test]
    fn signed_sum_is_short() {
        let mut rng = Rng::new(5);
        let v: Vec<Vec<f64>> = (0..64).map(|_| rng.unit_vector(8)).collect();
        let theta = rng.unit_vector(8);
        let mut second = 0.0;
        for seed in 0..200 {
            let x = gram_schmidt_walk(&v, &mut Rng::new(seed));
            second += dot(&theta, &signed_sum(&v, &x)).powi(2);
        }
        assert!(second / 200.0 <= 1.3);
    }
}
