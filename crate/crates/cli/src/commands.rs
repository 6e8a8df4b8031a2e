//! One function per subcommand. Each returns an [`Outcome`]; a
//! [`ConfigError`] means the invocation itself was unusable.

use std::path::Path;

use serde_json::{json, Value};
use zonobal::coloring::{
    brute_force_gray, brute_force_optimal, vb_kk_pipeline_detailed, vb_kq, ColoringReport, Gauge,
    LinfGauge, ZonotopeGauge,
};
use zonobal::decompose::decompose_regular;
use zonobal::measure::{estimate_section_measure, strip_grid};
use zonobal::numerics::io::parse_matrix;
use zonobal::numerics::{orthonormalize, Matrix};
use zonobal::par::{self, Exec};
use zonobal::suite;
use zonobal::zonotope::{
    make_hadamard_instance, normalize, random_normalized_zonotope, random_vertices,
    regularity_report, sparsify, sparsify_rows,
};
use zonobal::{Rng, Zonotope};

use crate::args::{GaugeKind, Instance, Shape};
use crate::output::{num, Failure, Outcome, Table};
use crate::params::{ConfigError, Params};

/// Largest `n` handed to the exhaustive oracle.
const ORACLE_LIMIT: usize = 20;
/// Largest `n` for which `balance-kk` also runs the oracle.
const KK_ORACLE_LIMIT: usize = 16;
const DEFAULT_SAMPLES: usize = 20_000;
const PROBES: usize = 256;

fn read_zonotope(path: &Path) -> Result<Zonotope, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    Zonotope::from_text(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

fn read_vectors(path: &Path, d: usize) -> Result<Vec<Vec<f64>>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let m = parse_matrix(&text)
        .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?
        .matrix;
    if m.cols() != d {
        return Err(ConfigError(format!(
            "{}: vectors have length {}, zonotope dimension is {d}",
            path.display(),
            m.cols()
        )));
    }
    Ok(m.row_iter().map(|r| r.to_vec()).collect())
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "input".into())
}

fn failure(
    command: &str,
    id: &str,
    seed: u64,
    property: &str,
    detail: impl Into<String>,
) -> Failure {
    Failure {
        command: command.into(),
        instance_id: id.into(),
        seed,
        property: property.into(),
        detail: detail.into(),
    }
}

/// How a job obtains its body and vectors.
#[derive(Debug, Clone)]
enum Source {
    Hadamard(usize),
    Given {
        k: Zonotope,
        v: Vec<Vec<f64>>,
        q: Option<Zonotope>,
    },
    Random {
        d: usize,
        m: usize,
        n: usize,
    },
}

#[derive(Debug, Clone)]
struct Job {
    id: String,
    seed: u64,
    source: Source,
}

/// `K`, the vectors, and `Q` when the instance defines one.
type Built = (Zonotope, Vec<Vec<f64>>, Option<Zonotope>);

impl Job {
    /// Random instances draw from the `instance` substream of the seed, so
    /// the algorithm's own randomness is untouched by instance generation.
    fn build(&self) -> zonobal::Result<Built> {
        match &self.source {
            Source::Hadamard(d) => {
                let h = make_hadamard_instance(*d)?;
                Ok((h.k, h.vectors, Some(h.q)))
            }
            Source::Given { k, v, q } => Ok((k.clone(), v.clone(), q.clone())),
            Source::Random { d, m, n } => {
                let mut rng = Rng::new(self.seed).split("instance");
                let k = random_normalized_zonotope(*d, *m, &mut rng)?;
                let v = random_vertices(&k, *n, &mut rng);
                let q = random_normalized_zonotope(*d, *m, &mut rng.split("q"))?;
                Ok((k, v, Some(q)))
            }
        }
    }
}

fn jobs(
    shape: &Shape,
    inst: &Instance,
    q_path: Option<&Path>,
    p: &Params,
) -> Result<Vec<Job>, ConfigError> {
    let mut out = Vec::new();
    if inst.hadamard {
        let ds = if p.d.is_empty() { vec![4] } else { p.d.clone() };
        for &d in &ds {
            if !d.is_power_of_two() {
                return Err(ConfigError(format!(
                    "--hadamard needs a power of two, got d={d}"
                )));
            }
            for &seed in &p.seeds {
                out.push(Job {
                    id: format!("hadamard-d{d}"),
                    seed,
                    source: Source::Hadamard(d),
                });
            }
        }
        return Ok(out);
    }
    if let (Some(kp), Some(vp)) = (&inst.zonotope, &inst.vectors) {
        let k = read_zonotope(kp)?;
        let v = read_vectors(vp, k.dim())?;
        if v.is_empty() {
            return Err(ConfigError(format!("{}: no vectors", vp.display())));
        }
        let q = match q_path {
            Some(qp) => {
                let q = read_zonotope(qp)?;
                if q.dim() != k.dim() {
                    return Err(ConfigError(format!(
                        "{}: dimension {} differs from K",
                        qp.display(),
                        q.dim()
                    )));
                }
                Some(q)
            }
            None => Some(Zonotope::cube(k.dim())),
        };
        let id = stem(vp);
        for &seed in &p.seeds {
            out.push(Job {
                id: id.clone(),
                seed,
                source: Source::Given {
                    k: k.clone(),
                    v: v.clone(),
                    q: q.clone(),
                },
            });
        }
        return Ok(out);
    }
    let _ = shape;
    let ds = if p.d.is_empty() { vec![4] } else { p.d.clone() };
    for &d in &ds {
        let ms = if p.m.is_empty() {
            vec![4 * d]
        } else {
            p.m.clone()
        };
        let ns = if p.n.is_empty() { vec![d] } else { p.n.clone() };
        for &m in &ms {
            if m < d {
                return Err(ConfigError(format!("need m >= d, got d={d}, m={m}")));
            }
            for &n in &ns {
                if n == 0 {
                    return Err(ConfigError("n must be at least 1".into()));
                }
                for &seed in &p.seeds {
                    out.push(Job {
                        id: format!("random-d{d}-m{m}-n{n}"),
                        seed,
                        source: Source::Random { d, m, n },
                    });
                }
            }
        }
    }
    Ok(out)
}

fn run_jobs<T: Send>(jobs: &[Job], f: impl Fn(&Job) -> T + Sync + Send) -> Vec<T> {
    par::map_slice(Exec::Parallel, jobs, f)
}

fn joined(v: &[f64]) -> String {
    v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(";")
}

fn report_row(r: &ColoringReport, oracle: Option<f64>, pass: bool) -> Vec<String> {
    vec![
        r.instance_id.clone(),
        r.seed.to_string(),
        r.n.to_string(),
        r.d.to_string(),
        r.m.to_string(),
        num(r.final_norm_K),
        r.final_norm_Q.map(num).unwrap_or_default(),
        r.rounds.to_string(),
        joined(&r.stage_norms),
        oracle.map(num).unwrap_or_default(),
        pass.to_string(),
        num(r.wall_ms),
    ]
}

const REPORT_HEADER: [&str; 12] = [
    "instance_id",
    "seed",
    "n",
    "d",
    "m",
    "final_norm_K",
    "final_norm_Q",
    "rounds",
    "stage_norms",
    "oracle_optimum",
    "pass",
    "wall_ms",
];

pub fn balance_kk(shape: &Shape, inst: &Instance, p: &Params) -> Result<Outcome, ConfigError> {
    const CMD: &str = "balance-kk";
    let jobs = jobs(shape, inst, None, p)?;
    let cfg = p.cfg;
    let results = run_jobs(
        &jobs,
        |job| -> zonobal::Result<(ColoringReport, Option<f64>, bool)> {
            let (k, v, _) = job.build()?;
            let run = vb_kk_pipeline_detailed(&k, &v, &cfg, job.seed, &job.id)?;
            let oracle = if v.len() <= KK_ORACLE_LIMIT {
                let mut g = ZonotopeGauge::new(&run.k_tilde)?;
                Some(brute_force_optimal(&run.mapped, &mut g)?.0)
            } else {
                None
            };
            Ok((run.report, oracle, run.sparsified))
        },
    );
    let mut out = Outcome {
        table: Table::new(&REPORT_HEADER),
        ..Outcome::default()
    };
    for (job, res) in jobs.iter().zip(results) {
        let (rep, oracle, sparsified) = match res {
            Ok(r) => r,
            Err(e) => {
                out.failures
                    .push(failure(CMD, &job.id, job.seed, "run", e.to_string()));
                continue;
            }
        };
        let before = out.failures.len();
        if rep.x.iter().any(|s| s.abs() != 1.0) {
            out.failures.push(failure(
                CMD,
                &rep.instance_id,
                rep.seed,
                "full-coloring",
                "output has non-sign entries",
            ));
        }
        let budget: f64 = rep.stage_norms.iter().sum();
        if rep.final_norm_K > budget * (1.0 + 1e-7) + 1e-9 {
            out.failures.push(failure(
                CMD,
                &rep.instance_id,
                rep.seed,
                "stage-budget",
                format!("final norm {} exceeds stage sum {budget}", rep.final_norm_K),
            ));
        }
        let envelope = cfg.constants.c_pipeline * (rep.d as f64).sqrt();
        if rep.final_norm_K > envelope {
            out.failures.push(failure(
                CMD,
                &rep.instance_id,
                rep.seed,
                "envelope",
                format!("final norm {} exceeds {envelope}", rep.final_norm_K),
            ));
        }
        if let Some(opt) = oracle {
            if rep.final_norm_K < opt - 1e-9 {
                out.failures.push(failure(
                    CMD,
                    &rep.instance_id,
                    rep.seed,
                    "above-optimum",
                    format!(
                        "final norm {} below exhaustive optimum {opt}",
                        rep.final_norm_K
                    ),
                ));
            }
        }
        let pass = out.failures.len() == before;
        out.table.push(report_row(&rep, oracle, pass));
        out.details.push(json!({
            "instance_id": rep.instance_id,
            "seed": rep.seed,
            "coloring": rep.x,
            "oracle_optimum": oracle,
            "sparsified": sparsified,
        }));
        out.reports
            .push(serde_json::to_value(&rep).expect("report serializes"));
    }
    Ok(out)
}

pub fn balance_kq(
    shape: &Shape,
    inst: &Instance,
    q: Option<&Path>,
    p: &Params,
) -> Result<Outcome, ConfigError> {
    const CMD: &str = "balance-kq";
    let jobs = jobs(shape, inst, q, p)?;
    let c_kq = p.cfg.constants.c_kq;
    let results = run_jobs(&jobs, |job| -> zonobal::Result<ColoringReport> {
        let (k, v, q) = job.build()?;
        let q = q.unwrap_or_else(|| Zonotope::cube(k.dim()));
        vb_kq(&k, &q, &v, job.seed, &job.id)
    });
    let mut out = Outcome {
        table: Table::new(&REPORT_HEADER),
        ..Outcome::default()
    };
    for (job, res) in jobs.iter().zip(results) {
        let rep = match res {
            Ok(r) => r,
            Err(e) => {
                out.failures
                    .push(failure(CMD, &job.id, job.seed, "run", e.to_string()));
                continue;
            }
        };
        let before = out.failures.len();
        if rep.x.iter().any(|s| s.abs() != 1.0) {
            out.failures.push(failure(
                CMD,
                &rep.instance_id,
                rep.seed,
                "full-coloring",
                "output has non-sign entries",
            ));
        }
        let d = rep.d as f64;
        let log = (rep.d.min(rep.n).max(2) as f64).ln();
        let envelope = c_kq * (d * log).sqrt();
        let norm_q = rep.final_norm_Q.unwrap_or(f64::INFINITY);
        if norm_q > envelope {
            out.failures.push(failure(
                CMD,
                &rep.instance_id,
                rep.seed,
                "envelope",
                format!("Q-norm {norm_q} exceeds {envelope}"),
            ));
        }
        let pass = out.failures.len() == before;
        out.table.push(report_row(&rep, None, pass));
        out.details.push(json!({
            "instance_id": rep.instance_id,
            "seed": rep.seed,
            "coloring": rep.x,
        }));
        out.reports
            .push(serde_json::to_value(&rep).expect("report serializes"));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    d: usize,
    m: usize,
    n: usize,
    t: f64,
    seed: u64,
}

pub fn measure(cube: bool, p: &Params) -> Result<Outcome, ConfigError> {
    const CMD: &str = "measure";
    let c = p.cfg.constants.c_measure;
    let samples = p.samples.unwrap_or(DEFAULT_SAMPLES);
    let ds = if p.d.is_empty() { vec![4] } else { p.d.clone() };
    let ts = if p.t.is_empty() {
        vec![1.0, 2.0, 3.0]
    } else {
        p.t.clone()
    };
    let mut cells = Vec::new();
    for &d in &ds {
        let ms = if cube {
            if p.m.iter().any(|&m| m != d) {
                return Err(ConfigError("--cube fixes m = d".into()));
            }
            vec![d]
        } else if p.m.is_empty() {
            vec![4 * d]
        } else {
            p.m.clone()
        };
        let ns = if p.n.is_empty() { vec![d] } else { p.n.clone() };
        for &m in &ms {
            if m < d {
                return Err(ConfigError(format!("need m >= d, got d={d}, m={m}")));
            }
            for &n in &ns {
                if n > d {
                    return Err(ConfigError(format!(
                        "subspace dimension n={n} exceeds d={d}"
                    )));
                }
                for &t in &ts {
                    for &seed in &p.seeds {
                        cells.push(Cell { d, m, n, t, seed });
                    }
                }
            }
        }
    }
    let results = par::map_slice(Exec::Parallel, &cells, |cell| {
        let rng = Rng::new(cell.seed);
        let k = if cube {
            Zonotope::cube(cell.d)
        } else {
            random_normalized_zonotope(cell.d, cell.m, &mut rng.split("zonotope"))?
        };
        let basis = if cell.n == cell.d {
            Matrix::identity(cell.d)
        } else {
            let mut r = rng.split("subspace");
            let g = Matrix::from_vec(cell.d, cell.n, r.gaussian_vector(cell.d * cell.n))?;
            orthonormalize(&g, &p.cfg.tol)?
        };
        estimate_section_measure(&k, &basis, cell.t, c, samples, &rng.split("samples"))
    });
    let mut out = Outcome {
        table: Table::new(&["d", "m", "n", "t", "C", "N", "p_hat", "ci", "bound", "pass"]),
        ..Outcome::default()
    };
    for (cell, res) in cells.iter().zip(results) {
        let id = format!(
            "{}-d{}-m{}-n{}-t{}",
            if cube { "cube" } else { "random" },
            cell.d,
            cell.m,
            cell.n,
            cell.t
        );
        let est = match res {
            Ok(e) => e,
            Err(e) => {
                out.failures
                    .push(failure(CMD, &id, cell.seed, "run", e.to_string()));
                continue;
            }
        };
        let pass = est.meets_bound();
        if !pass {
            out.failures.push(failure(
                CMD,
                &id,
                cell.seed,
                "section-bound",
                format!(
                    "p_hat {} + ci {} below bound {}",
                    est.p_hat, est.ci_radius, est.bound
                ),
            ));
        }
        out.table.push(vec![
            cell.d.to_string(),
            cell.m.to_string(),
            cell.n.to_string(),
            num(cell.t),
            num(c),
            samples.to_string(),
            num(est.p_hat),
            num(est.ci_radius),
            num(est.bound),
            pass.to_string(),
        ]);
        out.reports.push(json!({
            "instance_id": id,
            "seed": cell.seed,
            "d": cell.d,
            "m": cell.m,
            "n": cell.n,
            "t": cell.t,
            "C": c,
            "N": samples,
            "hits": est.hits,
            "p_hat": est.p_hat,
            "ci": est.ci_radius,
            "bound": est.bound,
            "pass": pass,
        }));
    }
    Ok(out)
}

pub fn strip_check() -> Outcome {
    let mut out = Outcome {
        table: Table::new(&["a_norm", "t", "lhs", "rhs", "pass"]),
        ..Outcome::default()
    };
    for s in strip_grid() {
        if !s.ok {
            out.failures.push(failure(
                "strip-check",
                &format!("a{}-t{}", s.a_norm, s.t),
                0,
                "strip-bound",
                format!("erf side {} below {}", s.lhs, s.rhs),
            ));
        }
        out.table.push(vec![
            num(s.a_norm),
            num(s.t),
            num(s.lhs),
            num(s.rhs),
            s.ok.to_string(),
        ]);
        out.reports
            .push(serde_json::to_value(s).expect("strip check serializes"));
    }
    out
}

pub fn normalize_cmd(input: &Path, p: &Params) -> Result<Outcome, ConfigError> {
    const CMD: &str = "normalize";
    let k = read_zonotope(input)?;
    let id = stem(input);
    let mut out = Outcome {
        table: Table::new(&[
            "instance_id",
            "d",
            "m",
            "m_prime",
            "scale",
            "gram_error",
            "max_row_norm",
            "row_bound",
            "sandwich_low_slack",
            "sandwich_high_slack",
            "pass",
        ]),
        ..Outcome::default()
    };
    for &seed in &p.seeds {
        let res = normalize(&k, &p.cfg.tol);
        let norm = match res {
            Ok(n) => n,
            Err(e) => {
                out.failures
                    .push(failure(CMD, &id, seed, "run", e.to_string()));
                continue;
            }
        };
        let kt = &norm.k_tilde;
        let (d, m_prime) = (kt.dim(), kt.segments());
        let reg = regularity_report(kt.generators(), kt.scale());
        let row_bound = (2.0 * d as f64 / m_prime as f64).sqrt();
        let before = out.failures.len();
        if reg.column_gram_error > 1e-7 {
            out.failures.push(failure(
                CMD,
                &id,
                seed,
                "isotropic",
                format!("gram error {}", reg.column_gram_error),
            ));
        }
        if reg.max_row_norm > row_bound + 1e-9 {
            out.failures.push(failure(
                CMD,
                &id,
                seed,
                "row-norms",
                format!("row norm {} exceeds {row_bound}", reg.max_row_norm),
            ));
        }
        // (4/5)·K̃ ⊆ T(K) ⊆ K̃ on random probe directions
        let mut rng = Rng::new(seed).split("probes");
        let (mut low, mut high) = (f64::INFINITY, f64::INFINITY);
        for _ in 0..PROBES {
            let theta = rng.unit_vector(d);
            let h_t = norm.mapped_support(&k, &theta);
            let h_kt = kt.support(&theta);
            low = low.min((h_t - 0.8 * h_kt) / h_kt);
            high = high.min((h_kt - h_t) / h_kt);
        }
        if low < -1e-7 || high < -1e-7 {
            out.failures.push(failure(
                CMD,
                &id,
                seed,
                "sandwich",
                format!("support slack {low} (lower), {high} (upper)"),
            ));
        }
        let pass = out.failures.len() == before;
        out.table.push(vec![
            id.clone(),
            d.to_string(),
            k.segments().to_string(),
            m_prime.to_string(),
            num(kt.scale()),
            num(reg.column_gram_error),
            num(reg.max_row_norm),
            num(row_bound),
            num(low),
            num(high),
            pass.to_string(),
        ]);
        let t_rows: Vec<Vec<f64>> = norm.t.row_iter().map(|r| r.to_vec()).collect();
        out.reports.push(json!({
            "instance_id": id,
            "seed": seed,
            "d": d,
            "m": k.segments(),
            "m_prime": m_prime,
            "gram_error": reg.column_gram_error,
            "max_row_norm": reg.max_row_norm,
            "row_bound": row_bound,
            "sandwich_low_slack": low,
            "sandwich_high_slack": high,
            "pass": pass,
            "t": t_rows,
            "weights": norm.w,
            "k_tilde": kt.to_text(),
        }));
    }
    Ok(out)
}

pub fn sparsify_cmd(input: &Path, p: &Params) -> Result<Outcome, ConfigError> {
    const CMD: &str = "sparsify";
    let k = read_zonotope(input)?;
    let id = stem(input);
    let eps = p.epsilon.unwrap_or(0.5);
    let c0 = p.cfg.constants.c0_sparsify;
    let rows = sparsify_rows(k.dim(), eps, c0);
    let mut out = Outcome {
        table: Table::new(&[
            "instance_id",
            "seed",
            "d",
            "m",
            "epsilon",
            "c0",
            "N",
            "scale",
            "min_support_ratio",
            "max_support_ratio",
            "pass",
        ]),
        ..Outcome::default()
    };
    for &seed in &p.seeds {
        let rng = Rng::new(seed);
        let q = match sparsify(&k, eps, c0, &mut rng.split("sparsify")) {
            Ok(q) => q,
            Err(e) => {
                out.failures
                    .push(failure(CMD, &id, seed, "run", e.to_string()));
                continue;
            }
        };
        let before = out.failures.len();
        if q.segments() != rows || q.scale() != k.scale() {
            out.failures.push(failure(
                CMD,
                &id,
                seed,
                "shape",
                format!(
                    "{} rows at scale {}, expected {rows} at {}",
                    q.segments(),
                    q.scale(),
                    k.scale()
                ),
            ));
        }
        let mut probes = rng.split("probes");
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for _ in 0..PROBES {
            let theta = probes.unit_vector(k.dim());
            let r = q.support(&theta) / k.support(&theta);
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if lo < 1.0 - eps || hi > 1.0 + eps {
            out.failures.push(failure(
                CMD,
                &id,
                seed,
                "support-distortion",
                format!(
                    "support ratios in [{lo}, {hi}], allowed [{}, {}]",
                    1.0 - eps,
                    1.0 + eps
                ),
            ));
        }
        let pass = out.failures.len() == before;
        out.table.push(vec![
            id.clone(),
            seed.to_string(),
            k.dim().to_string(),
            k.segments().to_string(),
            num(eps),
            num(c0),
            q.segments().to_string(),
            num(q.scale()),
            num(lo),
            num(hi),
            pass.to_string(),
        ]);
        out.reports.push(json!({
            "instance_id": id,
            "seed": seed,
            "d": k.dim(),
            "m": k.segments(),
            "epsilon": eps,
            "c0": c0,
            "N": q.segments(),
            "min_support_ratio": lo,
            "max_support_ratio": hi,
            "pass": pass,
            "zonotope": q.to_text(),
        }));
    }
    Ok(out)
}

pub fn decompose(input: Option<&Path>, p: &Params) -> Result<Outcome, ConfigError> {
    const CMD: &str = "decompose";
    let c = p.cfg.constants.c_decompose;
    let given = match input {
        Some(path) => Some((stem(path), read_zonotope(path)?.generators().clone())),
        None => None,
    };
    let d = p.d.first().copied().unwrap_or(2);
    let m = p.m.first().copied().unwrap_or(512);
    if given.is_none() && m < d {
        return Err(ConfigError(format!("need m >= d, got d={d}, m={m}")));
    }
    let mut out = Outcome {
        table: Table::new(&[
            "instance_id",
            "seed",
            "d",
            "m",
            "C",
            "levels",
            "blocks",
            "target",
            "min_block_lambda_min",
            "max_block_size",
            "pass",
        ]),
        ..Outcome::default()
    };
    for &seed in &p.seeds {
        let rng = Rng::new(seed);
        // a Gaussian body after Lewis normalization is regular by construction
        let built = match &given {
            Some((id, a)) => Ok((id.clone(), a.clone())),
            None => (|| {
                let mut r = rng.split("instance");
                let g = Matrix::from_vec(m, d, r.gaussian_vector(m * d))?;
                let norm = normalize(&Zonotope::new(g, 1.0)?, &p.cfg.tol)?;
                Ok::<_, zonobal::Error>((
                    format!("gaussian-d{d}-m{m}"),
                    norm.k_tilde.generators().clone(),
                ))
            })(),
        };
        let (id, a) = match built {
            Ok(x) => x,
            Err(e) => {
                out.failures.push(failure(
                    CMD,
                    &format!("gaussian-d{d}-m{m}"),
                    seed,
                    "run",
                    e.to_string(),
                ));
                continue;
            }
        };
        let res = match decompose_regular(&a, c, &mut rng.split("decompose")) {
            Ok(r) => r,
            Err(e @ zonobal::Error::InvalidInput(_)) if given.is_some() => {
                return Err(ConfigError(e.to_string()));
            }
            Err(e) => {
                out.failures
                    .push(failure(CMD, &id, seed, "run", e.to_string()));
                continue;
            }
        };
        let before = out.failures.len();
        let mut seen = vec![false; a.rows()];
        let mut overlap = false;
        for b in &res.blocks {
            for &i in b {
                overlap |= std::mem::replace(&mut seen[i], true);
            }
        }
        if overlap {
            out.failures
                .push(failure(CMD, &id, seed, "disjoint", "blocks share a row"));
        }
        let limit = 4.0 * c * a.cols() as f64;
        let max_size = res.blocks.iter().map(Vec::len).max().unwrap_or(0);
        if max_size as f64 > limit {
            out.failures.push(failure(
                CMD,
                &id,
                seed,
                "block-size",
                format!("block of {max_size} rows exceeds {limit}"),
            ));
        }
        let pass = out.failures.len() == before;
        let min_lambda = res
            .block_lambda_min
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        out.table.push(vec![
            id.clone(),
            seed.to_string(),
            a.cols().to_string(),
            a.rows().to_string(),
            num(c),
            res.levels.to_string(),
            res.k.to_string(),
            res.targets.first().copied().map(num).unwrap_or_default(),
            num(min_lambda),
            max_size.to_string(),
            pass.to_string(),
        ]);
        let mut rep = serde_json::to_value(&res).expect("partition serializes");
        if let Value::Object(map) = &mut rep {
            map.insert("instance_id".into(), json!(id));
            map.insert("seed".into(), json!(seed));
            map.insert("pass".into(), json!(pass));
        }
        out.reports.push(rep);
    }
    Ok(out)
}

pub fn oracle(
    shape: &Shape,
    inst: &Instance,
    gauge: GaugeKind,
    p: &Params,
) -> Result<Outcome, ConfigError> {
    const CMD: &str = "oracle";
    let mut p = p.clone();
    if !inst.hadamard && inst.zonotope.is_none() && p.n.is_empty() {
        p.n = vec![8];
    }
    let jobs = jobs(shape, inst, None, &p)?;
    if let Some(&n) = p.n.iter().find(|&&n| n > ORACLE_LIMIT) {
        return Err(ConfigError(format!(
            "oracle handles at most {ORACLE_LIMIT} vectors, got n={n}"
        )));
    }
    type Found = (usize, usize, (f64, Vec<f64>), (f64, Vec<f64>));
    let results = run_jobs(&jobs, |job| -> zonobal::Result<Found> {
        let (k, v, _) = job.build()?;
        let mut g: Box<dyn Gauge> = match gauge {
            GaugeKind::Linf => Box::new(LinfGauge),
            GaugeKind::Zonotope => Box::new(ZonotopeGauge::new(&k)?),
        };
        let a = brute_force_optimal(&v, g.as_mut())?;
        let b = brute_force_gray(&v, g.as_mut())?;
        Ok((v.len(), k.dim(), a, b))
    });
    let mut out = Outcome {
        table: Table::new(&[
            "instance_id",
            "seed",
            "n",
            "d",
            "gauge",
            "optimum",
            "gray_optimum",
            "agree",
            "coloring",
        ]),
        ..Outcome::default()
    };
    let gauge_name = match gauge {
        GaugeKind::Linf => "linf",
        GaugeKind::Zonotope => "zonotope",
    };
    for (job, res) in jobs.iter().zip(results) {
        let (n, d, (opt, x), (gray, _)) = match res {
            Ok(r) => r,
            Err(zonobal::Error::TooLarge { size, limit }) => {
                return Err(ConfigError(format!(
                    "oracle handles at most {limit} vectors, got {size}"
                )));
            }
            Err(e) => {
                out.failures
                    .push(failure(CMD, &job.id, job.seed, "run", e.to_string()));
                continue;
            }
        };
        let agree = opt.to_bits() == gray.to_bits();
        if !agree {
            out.failures.push(failure(
                CMD,
                &job.id,
                job.seed,
                "enumerations-agree",
                format!("binary order {opt}, Gray order {gray}"),
            ));
        }
        let signs: String = x.iter().map(|&s| if s > 0.0 { '+' } else { '-' }).collect();
        out.table.push(vec![
            job.id.clone(),
            job.seed.to_string(),
            n.to_string(),
            d.to_string(),
            gauge_name.into(),
            num(opt),
            num(gray),
            agree.to_string(),
            signs,
        ]);
        out.reports.push(json!({
            "instance_id": job.id,
            "seed": job.seed,
            "n": n,
            "d": d,
            "gauge": gauge_name,
            "optimum": opt,
            "gray_optimum": gray,
            "agree": agree,
            "coloring": x,
        }));
    }
    Ok(out)
}

pub fn suite_cmd(only: &[u32], p: &Params) -> Result<Outcome, ConfigError> {
    let ids = if only.is_empty() {
        suite::criterion_ids()
    } else {
        only.to_vec()
    };
    if let Some(bad) = ids.iter().find(|&&id| suite::criterion_name(id).is_none()) {
        return Err(ConfigError(format!("unknown criterion id {bad}")));
    }
    let mut out = Outcome {
        table: Table::new(&["id", "name", "passed", "elapsed_ms", "budget_ms", "detail"]),
        ..Outcome::default()
    };
    for id in ids {
        let r = suite::run_criterion(id, &p.cfg).expect("id checked above");
        eprintln!("{}", r.line());
        if !r.passed {
            out.failures.push(failure(
                "suite",
                &format!("criterion-{id}"),
                suite::SUITE_SEED,
                &r.name,
                r.detail.clone(),
            ));
        }
        out.table.push(vec![
            r.id.to_string(),
            r.name.clone(),
            r.passed.to_string(),
            num(r.elapsed_ms.round()),
            num(r.budget_ms),
            r.detail.clone(),
        ]);
        out.reports
            .push(serde_json::to_value(&r).expect("criterion result serializes"));
    }
    Ok(out)
}
