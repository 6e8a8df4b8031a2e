use crate::config::Config;
use crate::error::{Error, Result};
use crate::numerics::{norm_inf, Matrix, Rng};

use super::walk::{partial_coloring_walk, StripSystem};

const MAX_WIDENINGS: u64 = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SpencerOutcome {
    /// Increment `x` with `x + x₀` at `±1` up to rounding.
    pub x: Vec<f64>,
    /// The exact signs `x + x₀`.
    pub coloring: Vec<f64>,
    pub rounds: usize,
    /// Per-round walk widths; their sum bounds `‖Mx‖_∞`.
    pub widths: Vec<f64>,
}

/// `√(n·ln(2·max(m,n)/n))`, the discrepancy scale for `m` rows and `n` columns.
pub fn spencer_bound(m: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    (n * (2.0 * (m as f64).max(n) / n).ln()).sqrt()
}

/// Rounds the shift `x₀ ∈ [−1,1]ⁿ` to signs by repeated partial coloring with
/// the rows of `M` as strips. Each round walks on the still-fractional
/// coordinates with strip width `c·√(n_f·ln(2m/n_f))` and freezes at least
/// half of them, so `‖Mx‖_∞` is at most the sum of the round widths. A round
/// whose walk stalls is rerun at twice the width.
pub fn spencer(m: &Matrix, x0: &[f64], cfg: &Config, rng: &mut Rng) -> Result<SpencerOutcome> {
    let (rows, n) = m.shape();
    if x0.len() != n {
        return Err(crate::error::dim_mismatch(n, x0.len()));
    }
    if m.max_abs() > 1.0 + 1e-9 {
        return Err(Error::InvalidInput(format!(
            "matrix entries must lie in [-1, 1], found {}",
            m.max_abs()
        )));
    }
    if norm_inf(x0) > 1.0 + 1e-9 {
        return Err(Error::InvalidInput("shift must lie in [-1, 1]^n".into()));
    }
    let tol = cfg.tol.freeze;
    let mut p: Vec<f64> = x0.iter().map(|v| v.clamp(-1.0, 1.0)).collect();
    let mut widths = Vec::new();
    let mut rounds = 0;
    loop {
        for v in p.iter_mut() {
            if (v.abs() - 1.0).abs() <= tol {
                *v = v.signum();
            }
        }
        let frac: Vec<usize> = (0..n).filter(|&j| p[j].abs() != 1.0).collect();
        if frac.is_empty() {
            break;
        }
        let nf = frac.len();
        let mut width = cfg.constants.c_spencer_round * spencer_bound(rows, nf);
        let shift: Vec<f64> = frac.iter().map(|&j| p[j]).collect();
        let normals = m.select_cols(&frac);
        let round_rng = rng.split_index(rounds as u64);
        let mut attempt = 0;
        let pc = loop {
            let strips = StripSystem::new(normals.clone(), width.max(f64::MIN_POSITIVE))?;
            let mut r = round_rng.split_index(attempt);
            match partial_coloring_walk(&strips, &shift, &Matrix::identity(nf), 1.0, cfg, &mut r) {
                // few fractional coordinates can need more room than the
                // round width allows; widen and record the width used
                Err(Error::WalkStalled { .. }) if attempt < MAX_WIDENINGS => {
                    width *= 2.0;
                    attempt += 1;
                }
                other => break other?,
            }
        };
        for (&j, &v) in frac.iter().zip(&pc.x) {
            p[j] = v;
        }
        widths.push(width);
        rounds += 1;
    }
    let x = p.iter().zip(x0).map(|(a, b)| a - b).collect();
    Ok(SpencerOutcome {
        x,
        coloring: p,
        rounds,
        widths,
    })
}
