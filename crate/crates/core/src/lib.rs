//! Constructive vector balancing in zonotope norms.
//!
//! The crate is organised bottom-up: dense numerics, a minimum
//! infinity-norm LP used as the zonotope gauge, zonotope normalization and
//! sparsification, coloring algorithms, Gaussian section-measure estimators,
//! and spectral block decomposition.

// `!(x <= bound)` rejects NaN on purpose; dense kernels index by position.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod coloring;
pub mod config;
pub mod decompose;
pub mod error;
pub mod lp;
pub mod measure;
pub mod numerics;
pub mod par;
pub mod suite;
pub mod zonotope;

pub use config::{Config, Constants, Tolerances};
pub use error::{Error, Result};
pub use numerics::{Matrix, Rng};
pub use par::Exec;
pub use zonotope::Zonotope;
