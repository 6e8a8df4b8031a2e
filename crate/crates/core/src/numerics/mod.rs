//! Dense linear algebra kernels and seeded randomness.

pub mod io;
pub mod linalg;
mod matrix;
pub mod rng;

pub use linalg::{
    column_basis, lambda_min, null_vector, orthonormalize, psd_sqrt, solve_spd, spd_power, sym_eig,
    Cholesky, Lu, SymEig,
};
pub use matrix::{axpy, dot, norm2, norm_inf, scale, sub, Matrix};
pub(crate) use matrix::{check_finite, check_len};
pub use rng::{gaussian_vector, Rng};
