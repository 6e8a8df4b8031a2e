//! Dense kernels: Gram-Schmidt, Jacobi eigen-solver, Cholesky, LU and a
//! row-echelon kernel finder. Sizes here stay small (d <= 64), so everything
//! is written for clarity over blocking.

use serde::{Deserialize, Serialize};

use super::matrix::{axpy, dot, norm2, Matrix};
use crate::config::Tolerances;
use crate::error::{dim_mismatch, Error, Result};

const MAX_JACOBI_SWEEPS: usize = 100;

/// Orthonormalizes the columns of `m` with modified Gram-Schmidt plus one
/// reorthogonalization pass. Fails on the first column whose residual norm
/// drops below `tol.rank` (relative to the column's original norm when that
/// exceeds one).
pub fn orthonormalize(m: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    let (rows, cols) = m.shape();
    if cols > rows {
        return Err(Error::RankDeficient { pivot: 0.0 });
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let col = m.col(j);
        let scale = norm2(&col).max(1.0);
        let q = project_out(col, &basis);
        let nrm = norm2(&q);
        if nrm < tol.rank * scale {
            return Err(Error::RankDeficient { pivot: nrm });
        }
        basis.push(q.into_iter().map(|v| v / nrm).collect());
    }
    Matrix::from_columns(&basis)
}

/// Orthonormal basis for the column span of `m`, skipping columns that are
/// numerically dependent on earlier ones. May return zero columns.
pub fn column_basis(m: &Matrix, tol: &Tolerances) -> Matrix {
    let rows = m.rows();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let scale = (0..m.cols()).map(|j| norm2(&m.col(j))).fold(0.0, f64::max);
    let cutoff = tol.rank.max(1e-9) * scale.max(1e-300);
    for j in 0..m.cols() {
        if basis.len() == rows {
            break;
        }
        let q = project_out(m.col(j), &basis);
        let nrm = norm2(&q);
        if nrm > cutoff {
            basis.push(q.into_iter().map(|v| v / nrm).collect());
        }
    }
    if basis.is_empty() {
        return Matrix::zeros(rows, 0);
    }
    Matrix::from_columns(&basis).expect("columns share a length")
}

fn project_out(mut v: Vec<f64>, basis: &[Vec<f64>]) -> Vec<f64> {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, &v);
            axpy(-c, q, &mut v);
        }
    }
    v
}

/// Symmetric eigen-decomposition with eigenvalues in ascending order and
/// eigenvectors stored as the columns of `vectors`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymEig {
    pub fn reconstruct(&self) -> Matrix {
        let n = self.values.len();
        let mut out = Matrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            for i in 0..n {
                let vik = self.vectors[(i, k)] * lam;
                if vik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)];
                }
            }
        }
        out
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `V diag(f(λ)) Vᵀ`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Matrix {
        SymEig {
            values: self.values.iter().map(|&l| f(l)).collect(),
            vectors: self.vectors.clone(),
        }
        .reconstruct()
    }
}

/// Cyclic Jacobi eigen-solver.
pub fn sym_eig(m: &Matrix, tol: &Tolerances) -> Result<SymEig> {
    if !m.is_square() {
        return Err(dim_mismatch("square", format!("{:?}", m.shape())));
    }
    let asym = m.max_asymmetry();
    if asym > tol.symmetry * m.max_abs().max(1.0) {
        return Err(Error::NotSymmetric { max_asym: asym });
    }
    let n = m.rows();
    let mut a = m.clone();
    // symmetrize exactly so rotations act on a symmetric matrix
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = avg;
            a[(j, i)] = avg;
        }
    }
    let mut v = Matrix::identity(n);
    let total = a.frobenius();
    let target = tol.jacobi_offdiag * total.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_JACOBI_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                a[(p, p)] -= t * apq;
                a[(q, q)] += t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        let np = c * arp - s * arq;
                        let nq = s * arp + c * arq;
                        a[(r, p)] = np;
                        a[(p, r)] = np;
                        a[(r, q)] = nq;
                        a[(q, r)] = nq;
                    }
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }
    if off_diagonal_norm(&a) > target.max(1e-10 * total) {
        return Err(Error::NoConvergence {
            iterations: MAX_JACOBI_SWEEPS,
            residual: off_diagonal_norm(&a),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = v.select_cols(&order);
    Ok(SymEig { values, vectors })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn lambda_min(m: &Matrix, tol: &Tolerances) -> Result<f64> {
    Ok(sym_eig(m, tol)?.min())
}

/// Lower-triangular Cholesky factor.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn factor(m: &Matrix, tol: &Tolerances) -> Result<Self> {
        if !m.is_square() {
            return Err(dim_mismatch("square", format!("{:?}", m.shape())));
        }
        let n = m.rows();
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = m[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if d <= tol.cholesky_pivot || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: d });
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let mut s = m[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Self { l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.rows();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    pub fn factor_matrix(&self) -> &Matrix {
        &self.l
    }
}

/// Solves `M x = b` for symmetric positive definite `M`.
pub fn solve_spd(m: &Matrix, b: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    if b.len() != m.rows() {
        return Err(dim_mismatch(m.rows(), b.len()));
    }
    Ok(Cholesky::factor(m, tol)?.solve(b))
}

/// `M^p` for symmetric positive definite `M`, through the eigen-decomposition.
/// Eigenvalues below `tol.eig_floor` (relative to the largest) are rejected.
pub fn spd_power(m: &Matrix, p: f64, tol: &Tolerances) -> Result<Matrix> {
    let eig = sym_eig(m, tol)?;
    let floor = tol.eig_floor * eig.max().abs().max(1.0);
    if eig.min() < floor {
        return Err(Error::RankDeficient { pivot: eig.min() });
    }
    Ok(eig.map_values(|l| l.powf(p)))
}

/// Square root of a positive semidefinite matrix; small negative eigenvalues
/// (round-off) are clipped to zero.
pub fn psd_sqrt(m: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    let eig = sym_eig(m, tol)?;
    Ok(eig.map_values(|l| l.max(0.0).sqrt()))
}

/// LU factorization with partial pivoting of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(m: &Matrix, pivot_tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(dim_mismatch("square", format!("{:?}", m.shape())));
        }
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= pivot_tol * scale {
                return Err(Error::RankDeficient { pivot: best });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        lu[(i, j)] -= f * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] -= self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] -= self.lu[(i, k)] * x[k];
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.perm.len();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            inv.set_col(j, &self.solve(&e));
        }
        inv
    }
}

/// A nonzero vector `u` with `M u = 0`, found by Gaussian elimination with
/// partial pivoting. `None` when `M` has full column rank. The returned vector
/// has unit Euclidean norm and a positive first nonzero entry.
pub fn null_vector(m: &Matrix, pivot_tol: f64) -> Option<Vec<f64>> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut free_col = None;
    for (r, c) in (0..cols).enumerate() {
        if r == rows {
            free_col.get_or_insert(c);
            break;
        }
        let (p, best) = (r..rows)
            .map(|i| (i, a[(i, c)].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= pivot_tol * scale {
            free_col.get_or_insert(c);
            break;
        }
        if p != r {
            for j in 0..cols {
                let tmp = a[(r, j)];
                a[(r, j)] = a[(p, j)];
                a[(p, j)] = tmp;
            }
        }
        let piv = a[(r, c)];
        for j in c..cols {
            a[(r, j)] /= piv;
        }
        for i in 0..rows {
            if i != r {
                let f = a[(i, c)];
                if f != 0.0 {
                    for j in c..cols {
                        a[(i, j)] -= f * a[(r, j)];
                    }
                }
            }
        }
        pivot_cols.push(c);
    }
    let free = free_col?;
    // Pivot columns before `free` form an identity block in reduced form.
    let mut u = vec![0.0; cols];
    u[free] = 1.0;
    for (row, &pc) in pivot_cols.iter().enumerate() {
        u[pc] = -a[(row, free)];
    }
    let nrm = norm2(&u);
    u.iter_mut().for_each(|v| *v /= nrm);
    if let Some(first) = u.iter().find(|v| v.abs() > 1e-14) {
        if *first < 0.0 {
            u.iter_mut().for_each(|v| *v = -*v);
        }
    }
    Some(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn random_matrix(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
        Matrix::from_vec(rows, cols, rng.gaussian_vector(rows * cols)).unwrap()
    }

    fn random_symmetric(n: usize, rng: &mut Rng) -> Matrix {
        let a = random_matrix(n, n, rng);
        let mut s = a.clone();
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] = 0.5 * (a[(i, j)] + a[(j, i)]);
            }
        }
        s
    }

    #[test]
    fn orthonormalize_examples() {
        let q = orthonormalize(&Matrix::identity(3), &tol()).unwrap();
        assert_eq!(q, Matrix::identity(3));

        let q = orthonormalize(&Matrix::from_columns(&[[3.0, 4.0]]).unwrap(), &tol()).unwrap();
        assert!((q[(0, 0)] - 0.6).abs() < 1e-15 && (q[(1, 0)] - 0.8).abs() < 1e-15);

        let mut rng = Rng::new(7);
        let m = random_matrix(5, 2, &mut rng);
        let q = orthonormalize(&m, &tol()).unwrap();
        let g = q.gram().sub(&Matrix::identity(2)).unwrap();
        assert!(g.max_abs() <= 1e-10);
    }

    #[test]
    fn orthonormalize_rejects_dependent_columns() {
        let m = Matrix::from_columns(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]]).unwrap();
        assert!(matches!(
            orthonormalize(&m, &tol()),
            Err(Error::RankDeficient { .. })
        ));
        assert_eq!(column_basis(&m, &tol()).cols(), 1);
    }

    #[test]
    fn span_is_preserved() {
        let mut rng = Rng::new(31);
        for trial in 0..20 {
            let cols = 1 + trial % 4;
            let m = random_matrix(6, cols, &mut rng);
            let q = orthonormalize(&m, &tol()).unwrap();
            // every column of m is reproduced by projecting onto q, and vice versa
            for j in 0..cols {
                let c = m.col(j);
                let coeff = q.tr_mul_vec(&c);
                let back = q.mul_vec(&coeff);
                let res: f64 = c
                    .iter()
                    .zip(&back)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(res <= 1e-8);
            }
            let coef = Lu::factor(&m.gram(), 1e-14).unwrap();
            for j in 0..cols {
                let qc = q.col(j);
                let y = coef.solve(&m.tr_mul_vec(&qc));
                let back = m.mul_vec(&y);
                let res: f64 = qc
                    .iter()
                    .zip(&back)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(res <= 1e-8);
            }
        }
    }

    #[test]
    fn sym_eig_examples() {
        let e = sym_eig(&Matrix::identity(2), &tol()).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0]);

        let e = sym_eig(&Matrix::from_diag(&[3.0, -1.0]), &tol()).unwrap();
        assert_eq!(e.values, vec![-1.0, 3.0]);
        assert!((e.vectors[(1, 0)].abs() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(0, 1)].abs() - 1.0).abs() < 1e-15);

        // characteristic polynomial (2-λ)² - 1 has roots 1 and 3
        let m = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let e = sym_eig(&m, &tol()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-13);
        assert!((e.values[1] - 3.0).abs() < 1e-13);
    }

    #[test]
    fn sym_eig_rejects_asymmetric() {
        let m = Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(
            sym_eig(&m, &tol()),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn sym_eig_reconstructs_random_matrices() {
        let mut rng = Rng::new(101);
        for trial in 0..100 {
            let n = 1 + trial % 32;
            let m = random_symmetric(n, &mut rng);
            let e = sym_eig(&m, &tol()).unwrap();
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            let err = e.reconstruct().sub(&m).unwrap().max_abs();
            assert!(err <= 1e-8 * m.max_abs(), "n={n} err={err}");
            let gram_err = e
                .vectors
                .gram()
                .sub(&Matrix::identity(n))
                .unwrap()
                .max_abs();
            assert!(gram_err <= 1e-8);
        }
    }

    #[test]
    fn solve_spd_examples() {
        let x = solve_spd(&Matrix::identity(3), &[1.0, 2.0, 3.0], &tol()).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
        let x = solve_spd(&Matrix::from_diag(&[2.0, 4.0]), &[2.0, 4.0], &tol()).unwrap();
        assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-15));
        let m = Matrix::from_diag(&[1.0, -1.0]);
        assert!(matches!(
            solve_spd(&m, &[1.0, 1.0], &tol()),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn solve_spd_residuals_on_random_instances() {
        let mut rng = Rng::new(11);
        for trial in 0..100 {
            let n = 1 + trial % 12;
            let a = random_matrix(n + 2, n, &mut rng);
            let mut m = a.gram();
            for i in 0..n {
                m[(i, i)] += 1e-3;
            }
            let b = rng.gaussian_vector(n);
            let x = solve_spd(&m, &b, &tol()).unwrap();
            let r: Vec<f64> = m.mul_vec(&x).iter().zip(&b).map(|(u, v)| u - v).collect();
            let op = sym_eig(&m, &tol()).unwrap().max();
            assert!(norm2(&r) <= 1e-8 * (op * norm2(&x) + norm2(&b)));
        }
    }

    #[test]
    fn null_vector_hand_example() {
        // e1, e2, e1+e2 as columns: kernel spanned by (1, 1, -1)
        let m = Matrix::from_columns(&[[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).unwrap();
        let u = null_vector(&m, 1e-12).unwrap();
        let s = 1.0 / 3f64.sqrt();
        for (a, b) in u.iter().zip([s, s, -s]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(null_vector(&Matrix::identity(3), 1e-12).is_none());
    }

    #[test]
    fn lu_inverse_round_trip() {
        let mut rng = Rng::new(5);
        let m = random_matrix(6, 6, &mut rng);
        let inv = Lu::factor(&m, 1e-14).unwrap().inverse();
        let err = m
            .matmul(&inv)
            .unwrap()
            .sub(&Matrix::identity(6))
            .unwrap()
            .max_abs();
        assert!(err < 1e-10);
    }
}
