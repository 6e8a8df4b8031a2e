use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::numerics::{column_basis, dot, Matrix, Rng};
use crate::zonotope::Zonotope;

use super::PartialColoring;

/// Symmetric slabs `|⟨aᵢ, x⟩| ≤ width`, one normal per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StripSystem {
    pub normals: Matrix,
    pub width: f64,
}

impl StripSystem {
    pub fn new(normals: Matrix, width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "strip width must be positive, got {width}"
            )));
        }
        Ok(Self { normals, width })
    }

    /// Strips `UᵀAᵢ` for a zonotope `AᵀB∞ᵐ` (scale ignored) and an
    /// orthonormal basis `U` of a subspace `H`. If every strip holds at `s`,
    /// then `Uy ∈ s·AᵀB∞ᵐ`.
    pub fn from_section(k: &Zonotope, u: &Matrix) -> Result<Self> {
        let normals = k.generators().matmul(u)?;
        Self::new(normals, 1.0)
    }

    pub fn len(&self) -> usize {
        self.normals.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.normals.cols()
    }

    pub fn max_violation(&self, y: &[f64], scale: f64) -> f64 {
        self.normals
            .row_iter()
            .map(|a| dot(a, y).abs() - scale * self.width)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Discrete Gaussian walk inside `{x : |xⱼ+yⱼ| ≤ 1, |⟨aᵢ,x⟩| ≤ c_strip·width}
/// ∩ span(F)`, run until `⌈n/2⌉` coordinates of `x + y` sit at `±1`.
///
/// Each step is `δ·g` with `g` a standard Gaussian in the current subspace:
/// `F` intersected with the orthogonal complement of frozen coordinates and of
/// active strips. A step that would leave the polytope is shortened to the
/// first boundary it meets, and that constraint then becomes tight. Tight
/// constraints stay tight. A stalled walk is retried once on a fresh stream.
pub fn partial_coloring_walk(
    strips: &StripSystem,
    shift: &[f64],
    subspace: &Matrix,
    c_strip: f64,
    cfg: &Config,
    rng: &mut Rng,
) -> Result<PartialColoring> {
    let n = shift.len();
    if strips.dim() != n && !strips.is_empty() {
        return Err(crate::error::dim_mismatch(n, strips.dim()));
    }
    if subspace.rows() != n {
        return Err(crate::error::dim_mismatch(n, subspace.rows()));
    }
    if shift.iter().any(|v| !(v.abs() <= 1.0)) {
        return Err(Error::InvalidInput("shift must lie in [-1, 1]^n".into()));
    }
    match run(
        strips,
        shift,
        subspace,
        c_strip,
        cfg,
        &mut rng.split_index(0),
    ) {
        Err(Error::WalkStalled { .. }) => run(
            strips,
            shift,
            subspace,
            c_strip,
            cfg,
            &mut rng.split_index(1),
        ),
        other => other,
    }
}

fn run(
    strips: &StripSystem,
    shift: &[f64],
    subspace: &Matrix,
    c_strip: f64,
    cfg: &Config,
    rng: &mut Rng,
) -> Result<PartialColoring> {
    let n = shift.len();
    let k = subspace.cols();
    let tol = &cfg.tol;
    let delta = cfg.constants.walk_step;
    let width = c_strip * strips.width;
    let required = n.div_ceil(2);
    let cap = (64.0 * n as f64 / (delta * delta)).ceil() as usize;

    let mut p = shift.to_vec();
    let mut frozen = vec![false; n];
    for j in 0..n {
        if (p[j].abs() - 1.0).abs() <= tol.freeze {
            p[j] = p[j].signum();
            frozen[j] = true;
        }
    }
    let m = strips.len();
    let mut active = vec![false; m];
    let mut strip_val = vec![0.0; m];
    let mut n_frozen = frozen.iter().filter(|&&f| f).count();
    let mut dirty = true;
    let mut proj = Matrix::zeros(0, 0);
    let mut steps = 0;

    while n_frozen < required {
        if dirty {
            proj = walk_basis(strips, subspace, &frozen, &active, tol);
            dirty = false;
        }
        if proj.cols() == 0 || k == 0 || steps >= cap {
            return Err(Error::WalkStalled {
                frozen: n_frozen,
                required,
                steps,
            });
        }
        steps += 1;
        let g = rng.gaussian_vector(proj.cols());
        let mut step = proj.mul_vec(&g);
        step.iter_mut().for_each(|s| *s *= delta);
        for j in 0..n {
            if frozen[j] {
                step[j] = 0.0;
            }
        }

        // shorten to the first boundary
        let mut alpha = 1.0;
        let mut hit: Option<Hit> = None;
        for j in 0..n {
            if frozen[j] || step[j] == 0.0 {
                continue;
            }
            let room = if step[j] > 0.0 {
                (1.0 - p[j]) / step[j]
            } else {
                (-1.0 - p[j]) / step[j]
            };
            if room < alpha {
                alpha = room.max(0.0);
                hit = Some(Hit::Coord(j));
            }
        }
        let mut strip_step = vec![0.0; m];
        for i in 0..m {
            if active[i] {
                continue;
            }
            let ds = dot(strips.normals.row(i), &step);
            strip_step[i] = ds;
            if ds == 0.0 {
                continue;
            }
            let room = if ds > 0.0 {
                (width - strip_val[i]) / ds
            } else {
                (-width - strip_val[i]) / ds
            };
            if room < alpha {
                alpha = room.max(0.0);
                hit = Some(Hit::Strip(i));
            }
        }
        for j in 0..n {
            p[j] += alpha * step[j];
        }
        for i in 0..m {
            if !active[i] {
                strip_val[i] += alpha * strip_step[i];
            }
        }

        match hit {
            Some(Hit::Coord(j)) => {
                p[j] = p[j].signum();
                frozen[j] = true;
                n_frozen += 1;
                dirty = true;
            }
            Some(Hit::Strip(i)) => {
                active[i] = true;
                dirty = true;
            }
            None => {}
        }
        for j in 0..n {
            if !frozen[j] && (p[j].abs() - 1.0).abs() <= tol.freeze {
                p[j] = p[j].signum();
                frozen[j] = true;
                n_frozen += 1;
                dirty = true;
            }
        }
        for i in 0..m {
            if !active[i] && strip_val[i].abs() >= width * (1.0 - tol.strip_active) {
                active[i] = true;
                dirty = true;
            }
        }
        if dirty {
            // resync strip values against drift
            let x: Vec<f64> = p.iter().zip(shift).map(|(a, b)| a - b).collect();
            for (i, sv) in strip_val.iter_mut().enumerate() {
                *sv = dot(strips.normals.row(i), &x);
            }
        }
    }
    Ok(PartialColoring::from_point(p, 0.0))
}

enum Hit {
    Coord(usize),
    Strip(usize),
}

/// Orthonormal basis (as columns of an `n × r` matrix) of the walk subspace:
/// vectors of span(F) orthogonal to frozen coordinates and active strips.
fn walk_basis(
    strips: &StripSystem,
    subspace: &Matrix,
    frozen: &[bool],
    active: &[bool],
    tol: &crate::config::Tolerances,
) -> Matrix {
    let n = subspace.rows();
    let k = subspace.cols();
    // constraint rows expressed in subspace coordinates: c ↦ Fᵀc
    let mut cons: Vec<Vec<f64>> = Vec::new();
    for j in 0..n {
        if frozen[j] {
            cons.push(subspace.row(j).to_vec());
        }
    }
    for (i, &a) in active.iter().enumerate() {
        if a {
            cons.push(subspace.tr_mul_vec(strips.normals.row(i)));
        }
    }
    if cons.is_empty() {
        return subspace.clone();
    }
    let c = Matrix::from_columns(&cons).expect("constraint rows share length k");
    let r = column_basis(&c, tol);
    if r.cols() >= k {
        return Matrix::zeros(n, 0);
    }
    // complement of span(r) inside ℝᵏ, then lift back through F
    let mut comp: Vec<Vec<f64>> = Vec::with_capacity(k - r.cols());
    let basis_r = r.columns();
    for e in 0..k {
        if comp.len() + basis_r.len() == k {
            break;
        }
        let mut v = vec![0.0; k];
        v[e] = 1.0;
        for _ in 0..2 {
            for q in basis_r.iter().chain(comp.iter()) {
                let c = dot(q, &v);
                crate::numerics::axpy(-c, q, &mut v);
            }
        }
        let nrm = crate::numerics::norm2(&v);
        if nrm > 1e-6 {
            comp.push(v.into_iter().map(|a| a / nrm).collect());
        }
    }
    let comp = Matrix::from_columns(&comp).expect("complement vectors share length k");
    subspace.matmul(&comp).expect("n × k times k × r")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zonotope::random_normalized_zonotope;

    #[test]
    fn unconstrained_walk_freezes() {
        let cfg = Config::default();
        let strips = StripSystem::new(Matrix::zeros(0, 2), 1.0).unwrap();
        for seed in 0..20 {
            let pc = partial_coloring_walk(
                &strips,
                &[0.0, 0.0],
                &Matrix::identity(2),
                6.0,
                &cfg,
                &mut Rng::new(seed),
            )
            .unwrap();
            assert!(pc.is_good());
            assert!(!pc.frozen.is_empty());
        }
    }

    #[test]
    fn random_strips_respected() {
        let cfg = Config::default();
        let mut rng = Rng::new(31);
        let k = random_normalized_zonotope(4, 16, &mut rng).unwrap();
        let u = crate::numerics::orthonormalize(
            &Matrix::from_vec(4, 3, rng.gaussian_vector(12)).unwrap(),
            &cfg.tol,
        )
        .unwrap();
        let s = StripSystem::from_section(&k, &u).unwrap();
        let trace: f64 = s.normals.row_iter().map(|r| dot(r, r)).sum();
        assert!((trace - 3.0).abs() < 1e-9);
        assert!(s.normals.row_iter().all(|r| dot(r, r).sqrt() <= 1.0 + 1e-9));
        for seed in 0..10 {
            let n = 3;
            let pc = partial_coloring_walk(
                &s,
                &vec![0.0; n],
                &Matrix::identity(n),
                1.0,
                &cfg,
                &mut Rng::new(seed),
            )
            .unwrap();
            assert!(pc.frozen.len() >= 2);
            assert!(s.max_violation(&pc.x, 1.0) <= 1e-9);
            // strips at width 1 certify membership of Ux in K's unscaled body
            let ux = u.mul_vec(&pc.x);
            assert!(k.member(&ux, 1.0 / k.scale()).unwrap());
        }
    }

    #[test]
    fn shifted_walk_stays_in_box() {
        let cfg = Config::default();
        let strips = StripSystem::new(Matrix::zeros(0, 4), 1.0).unwrap();
        let shift = [0.999, -0.5, 0.2, 0.0];
        let pc = partial_coloring_walk(
            &strips,
            &shift,
            &Matrix::identity(4),
            6.0,
            &cfg,
            &mut Rng::new(3),
        )
        .unwrap();
        assert!(pc.in_box(0.0));
        assert!(pc.frozen.len() >= 2);
    }
}
