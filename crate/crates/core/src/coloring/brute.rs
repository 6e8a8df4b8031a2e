use crate::error::{Error, Result};
use crate::numerics::norm_inf;
use crate::zonotope::{MembershipOracle, Zonotope};

use super::signed_sum;

const MAX_VECTORS: usize = 20;

/// A norm to be minimized over sign patterns.
pub trait Gauge {
    fn eval(&mut self, x: &[f64]) -> Result<f64>;
}

/// `‖·‖_∞`, the gauge of the cube.
#[derive(Debug, Clone, Copy, Default)]
pub struct LinfGauge;

impl Gauge for LinfGauge {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        Ok(norm_inf(x))
    }
}

/// `‖·‖_K` of a zonotope, via the warm-started LP.
#[derive(Debug, Clone)]
pub struct ZonotopeGauge {
    oracle: MembershipOracle,
}

impl ZonotopeGauge {
    pub fn new(k: &Zonotope) -> Result<Self> {
        Ok(Self {
            oracle: MembershipOracle::new(k, 1e-7)?,
        })
    }
}

impl Gauge for ZonotopeGauge {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        self.oracle.norm(x)
    }
}

fn check(v: &[Vec<f64>]) -> Result<()> {
    if v.len() > MAX_VECTORS {
        return Err(Error::TooLarge {
            size: v.len(),
            limit: MAX_VECTORS,
        });
    }
    if v.is_empty() {
        return Err(Error::InvalidInput("no vectors to balance".into()));
    }
    Ok(())
}

fn signs_from_bits(n: usize, bits: u64) -> Vec<f64> {
    let mut x = vec![1.0; n];
    for (j, xj) in x.iter_mut().enumerate().skip(1) {
        if bits >> (j - 1) & 1 == 1 {
            *xj = -1.0;
        }
    }
    x
}

/// Exact `min ‖Σⱼxⱼvⱼ‖` over sign patterns with `x₀ = +1` (the gauge is
/// symmetric, so this covers all `2ⁿ`). Ties keep the first pattern in
/// binary counting order.
pub fn brute_force_optimal(v: &[Vec<f64>], gauge: &mut dyn Gauge) -> Result<(f64, Vec<f64>)> {
    check(v)?;
    let n = v.len();
    let mut best = (f64::INFINITY, Vec::new());
    for bits in 0..(1u64 << (n - 1)) {
        let x = signs_from_bits(n, bits);
        let val = gauge.eval(&signed_sum(v, &x))?;
        if val < best.0 {
            best = (val, x);
        }
    }
    Ok(best)
}

/// Second enumeration visiting patterns in reflected Gray-code order. Each
/// sum is recomputed in index order, so values match `brute_force_optimal`
/// bit for bit.
pub fn brute_force_gray(v: &[Vec<f64>], gauge: &mut dyn Gauge) -> Result<(f64, Vec<f64>)> {
    check(v)?;
    let n = v.len();
    let mut x = vec![1.0; n];
    let mut best = (gauge.eval(&signed_sum(v, &x))?, x.clone());
    for i in 1..(1u64 << (n - 1)) {
        let flip = i.trailing_zeros() as usize + 1;
        x[flip] = -x[flip];
        let val = gauge.eval(&signed_sum(v, &x))?;
        if val < best.0 {
            best = (val, x.clone());
        }
    }
    Ok(best)
}
