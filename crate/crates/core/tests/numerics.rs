#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use zonobal::numerics::{orthonormalize, solve_spd, sym_eig, Matrix, Rng};
use zonobal::Tolerances;

/// Least-squares residual of `target` against the columns of `m`, by
/// Gaussian elimination on the normal equations.
fn ls_residual(m: &Matrix, target: &[f64]) -> f64 {
    let (r, c) = m.shape();
    let mut a = vec![vec![0.0; c + 1]; c];
    for i in 0..c {
        for j in 0..c {
            a[i][j] = (0..r).map(|k| m[(k, i)] * m[(k, j)]).sum();
        }
        a[i][c] = (0..r).map(|k| m[(k, i)] * target[k]).sum();
    }
    for p in 0..c {
        let piv = (p..c)
            .max_by(|&x, &y| a[x][p].abs().total_cmp(&a[y][p].abs()))
            .unwrap();
        a.swap(p, piv);
        for i in p + 1..c {
            let f = a[i][p] / a[p][p];
            for j in p..=c {
                a[i][j] -= f * a[p][j];
            }
        }
    }
    let mut x = vec![0.0; c];
    for i in (0..c).rev() {
        let s: f64 = (i + 1..c).map(|j| a[i][j] * x[j]).sum();
        x[i] = (a[i][c] - s) / a[i][i];
    }
    (0..r)
        .map(|k| {
            let fit: f64 = (0..c).map(|j| m[(k, j)] * x[j]).sum();
            (target[k] - fit).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

fn gaussian(rows: usize, cols: usize, seed: u64) -> Matrix {
    Matrix::from_vec(rows, cols, Rng::new(seed).gaussian_vector(rows * cols)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn orthonormalize_keeps_span(seed in any::<u64>(), cols in 1usize..6, extra in 0usize..6) {
        let m = gaussian(cols + extra, cols, seed);
        let q = orthonormalize(&m, &Tolerances::default()).unwrap();
        for j in 0..cols {
            prop_assert!(ls_residual(&q, &m.col(j)) <= 1e-8 * (1.0 + m.frobenius()));
            prop_assert!(ls_residual(&m, &q.col(j)) <= 1e-8);
        }
    }

    #[test]
    fn eigen_reconstruction(seed in any::<u64>(), n in 1usize..=32) {
        let g = gaussian(n, n, seed);
        let sym = Matrix::from_vec(n, n, (0..n * n).map(|k| {
            let (i, j) = (k / n, k % n);
            g[(i, j)] + g[(j, i)]
        }).collect()).unwrap();
        let eig = sym_eig(&sym, &Tolerances::default()).unwrap();
        let err = eig.reconstruct().sub(&sym).unwrap().max_abs();
        prop_assert!(err <= 1e-8 * sym.max_abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn spd_solve_inverts(seed in any::<u64>(), n in 1usize..=16) {
        let mut spd = gaussian(n, n, seed).gram();
        for i in 0..n {
            spd[(i, i)] += 1.0;
        }
        let b = Rng::new(seed ^ 1).gaussian_vector(n);
        let x = solve_spd(&spd, &b, &Tolerances::default()).unwrap();
        let r = spd.mul_vec(&x);
        let res: f64 = r.iter().zip(&b).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
        let bn: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(res <= 1e-9 * (1.0 + bn) * spd.max_abs());
    }
}
