//! Balancing algorithms: the constrained partial-coloring walk, its
//! Komlos-setting restriction, Spencer-style rounding with shifts, the
//! Gram-Schmidt walk, the linear-algebraic `n → d` reduction, the two
//! end-to-end pipelines, and an exhaustive oracle.

mod brute;
mod gsw;
mod komlos;
mod lsv;
mod pipeline;
mod spencer;
mod walk;

pub use brute::{brute_force_gray, brute_force_optimal, Gauge, LinfGauge, ZonotopeGauge};
pub use gsw::gram_schmidt_walk;
pub use komlos::{komlos_partial_coloring, komlos_restrict, komlos_strips, KomlosRestriction};
pub use lsv::lsv_reduce;
pub use pipeline::{komlos_rounds, vb_kk_pipeline, vb_kk_pipeline_detailed, vb_kq, PipelineRun};
pub use spencer::{spencer, spencer_bound, SpencerOutcome};
pub use walk::{partial_coloring_walk, StripSystem};

use serde::{Deserialize, Serialize};

use crate::numerics::Matrix;

/// A point of `[−1,1]ⁿ` with the indices already at `±1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialColoring {
    pub x: Vec<f64>,
    pub frozen: Vec<usize>,
}

impl PartialColoring {
    /// Builds the frozen set from `x`, snapping entries within `tol` of `±1`.
    pub fn from_point(mut x: Vec<f64>, tol: f64) -> Self {
        let mut frozen = Vec::new();
        for (j, v) in x.iter_mut().enumerate() {
            if (v.abs() - 1.0).abs() <= tol {
                *v = v.signum();
                frozen.push(j);
            }
        }
        Self { x, frozen }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn fractional(&self) -> Vec<usize> {
        (0..self.x.len())
            .filter(|&j| self.x[j].abs() != 1.0)
            .collect()
    }

    /// At least half the coordinates frozen and the point inside the box.
    pub fn is_good(&self) -> bool {
        self.in_box(0.0) && 2 * self.frozen.len() >= self.x.len()
    }

    pub fn in_box(&self, tol: f64) -> bool {
        self.x.iter().all(|v| v.abs() <= 1.0 + tol)
    }
}

/// Result of a full coloring run. `x` is carried along but is not part of
/// the serialized record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ColoringReport {
    pub instance_id: String,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub stage_norms: Vec<f64>,
    pub final_norm_K: f64,
    pub final_norm_Q: Option<f64>,
    pub rounds: usize,
    pub wall_ms: f64,
    #[serde(skip)]
    pub x: Vec<f64>,
}

/// `Σⱼ xⱼvⱼ`, summed in index order.
pub fn signed_sum(v: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let d = v.first().map_or(0, |c| c.len());
    let mut out = vec![0.0; d];
    for (vj, &xj) in v.iter().zip(x) {
        if xj != 0.0 {
            crate::numerics::axpy(xj, vj, &mut out);
        }
    }
    out
}

/// The `d × n` matrix with columns `vⱼ`.
pub(crate) fn columns_matrix(v: &[Vec<f64>], d: usize) -> Matrix {
    let mut m = Matrix::zeros(d, v.len());
    for (j, c) in v.iter().enumerate() {
        m.set_col(j, c);
    }
    m
}
