use crate::numerics::{null_vector, Matrix};

use super::{columns_matrix, PartialColoring};

const FREEZE_TOL: f64 = 1e-9;

/// Moves `x = 0` along kernel directions of the fractional columns until at
/// most `d` coordinates are fractional. Every move keeps `Σⱼxⱼvⱼ = 0` and
/// freezes at least one coordinate. Deterministic.
pub fn lsv_reduce(v: &[Vec<f64>]) -> PartialColoring {
    let n = v.len();
    let d = v.first().map_or(0, |c| c.len());
    let mut x = vec![0.0; n];
    if n <= d {
        return PartialColoring::from_point(x, 0.0);
    }
    let full = columns_matrix(v, d);
    let scale = full.max_abs().max(f64::MIN_POSITIVE);
    loop {
        let frac: Vec<usize> = (0..n).filter(|&j| x[j].abs() != 1.0).collect();
        if frac.len() <= d {
            break;
        }
        let sub: Matrix = full.select_cols(&frac).scaled(1.0 / scale);
        let Some(z) = null_vector(&sub, 1e-12) else {
            // unreachable for more columns than rows; keep the current point
            break;
        };
        let mut alpha = f64::INFINITY;
        for (&j, &zj) in frac.iter().zip(&z) {
            if zj > 0.0 {
                alpha = alpha.min((1.0 - x[j]) / zj);
            } else if zj < 0.0 {
                alpha = alpha.min((-1.0 - x[j]) / zj);
            }
        }
        let mut froze = false;
        for (&j, &zj) in frac.iter().zip(&z) {
            x[j] += alpha * zj;
            if (x[j].abs() - 1.0).abs() <= FREEZE_TOL || x[j].abs() > 1.0 {
                x[j] = x[j].signum();
                froze = true;
            }
        }
        debug_assert!(froze);
    }
    PartialColoring::from_point(x, 0.0)
}
