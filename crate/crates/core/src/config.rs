//! Numerical tolerances and calibration constants in one place.
//!
//! The calibration constants stand in for universal constants that are only
//! known to exist. Every report that depends on them carries a copy of the
//! values used.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Column norm below which orthonormalization reports rank deficiency.
    pub rank: f64,
    /// Jacobi stops once the off-diagonal Frobenius mass falls below this
    /// fraction of the total Frobenius norm.
    pub jacobi_offdiag: f64,
    /// Entrywise symmetry tolerance for `sym_eig`.
    pub symmetry: f64,
    /// Smallest admissible Cholesky pivot.
    pub cholesky_pivot: f64,
    /// Eigenvalue floor for matrix square roots.
    pub eig_floor: f64,
    /// Relative slack in zonotope membership.
    pub membership: f64,
    /// A coordinate counts as frozen once within this distance of +-1.
    pub freeze: f64,
    /// A strip constraint activates within this relative distance of its width.
    pub strip_active: f64,
    /// Fractional parts below this are treated as zero during normalization.
    pub fractional_row: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-10,
            jacobi_offdiag: 1e-12,
            symmetry: 1e-9,
            cholesky_pivot: 1e-12,
            eig_floor: 1e-12,
            membership: 1e-7,
            freeze: 1e-9,
            strip_active: 1e-6,
            fractional_row: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    /// Strip width multiplier for the partial-coloring walk.
    pub c_strip: f64,
    /// Step size of the discrete Gaussian walk.
    pub walk_step: f64,
    /// Per-round width multiplier of the Spencer walk, in units of
    /// `sqrt(n log(2m/n))`.
    pub c_spencer_round: f64,
    /// Envelope asserted on Spencer outputs, in the same units.
    pub c_spencer: f64,
    /// Envelope for a single Komlos-setting partial coloring, in units of `sqrt(d)`.
    pub c_partial: f64,
    /// Envelope for the full K-to-K pipeline, in units of `sqrt(d)`.
    pub c_pipeline: f64,
    /// Envelope for K-to-Q balancing, in units of `sqrt(d log min(d, n))`.
    pub c_kq: f64,
    /// Scale constant C of the section-measure lower bound.
    pub c_measure: f64,
    /// Oversampling constant of the Lewis-weight sparsifier.
    pub c0_sparsify: f64,
    /// Block-size constant C of the row decomposition.
    pub c_decompose: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            c_strip: 6.0,
            walk_step: 0.05,
            c_spencer_round: 1.5,
            c_spencer: 8.0,
            c_partial: 10.0,
            c_pipeline: 10.0,
            c_kq: 10.0,
            c_measure: 8.0,
            c0_sparsify: 40.0,
            c_decompose: 64.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Config {
    pub tol: Tolerances,
    pub constants: Constants,
}
