//! Merges the optional JSON experiment config with command-line flags and
//! validates the result.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use zonobal::{Config, Constants};

use crate::args::{Common, Format};

/// A scalar or a list in the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<String>,
    pub d: Option<OneOrMany<usize>>,
    pub m: Option<OneOrMany<usize>>,
    pub n: Option<OneOrMany<usize>>,
    pub t: Option<OneOrMany<f64>>,
    pub epsilon: Option<f64>,
    pub seeds: Option<Vec<u64>>,
    pub n_samples: Option<usize>,
    pub c_strip: Option<f64>,
    pub c_measure: Option<f64>,
    pub c0_sparsify: Option<f64>,
    pub c_decompose: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub const MAX_DIM: usize = 64;
pub const MAX_ROWS: usize = 10_000;
pub const MAX_VECTORS: usize = 4096;
pub const MAX_SAMPLES: usize = 100_000_000;

/// Fully resolved parameters of one invocation.
#[derive(Debug, Clone)]
pub struct Params {
    pub d: Vec<usize>,
    pub m: Vec<usize>,
    pub n: Vec<usize>,
    pub t: Vec<f64>,
    pub epsilon: Option<f64>,
    pub seeds: Vec<u64>,
    pub samples: Option<usize>,
    pub cfg: Config,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub jobs: Option<usize>,
}

pub fn parse_seeds(s: &str) -> Result<Vec<u64>, ConfigError> {
    let bad = || ConfigError(format!("cannot parse seed list `{s}`"));
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b <= a {
            return Err(ConfigError(format!("empty seed range `{s}`")));
        }
        if b - a > 100_000 {
            return Err(ConfigError(format!("seed range `{s}` is too long")));
        }
        return Ok((a..b).collect());
    }
    s.split(',')
        .map(|p| p.trim().parse().map_err(|_| bad()))
        .collect()
}

pub struct Overrides<'a> {
    pub command: &'a str,
    pub default_format: Format,
    pub d: &'a [usize],
    pub m: &'a [usize],
    pub n: &'a [usize],
    pub t: &'a [f64],
    pub epsilon: Option<f64>,
    pub samples: Option<usize>,
}

fn pick<T: Clone>(flag: &[T], file: Option<OneOrMany<T>>) -> Vec<T> {
    if !flag.is_empty() {
        flag.to_vec()
    } else {
        file.map(OneOrMany::into_vec).unwrap_or_default()
    }
}

fn positive(name: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

pub fn resolve(common: &Common, o: Overrides<'_>) -> Result<Params, ConfigError> {
    let file: ExperimentConfig = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| ConfigError(format!("invalid config {}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(cmd) = &file.command {
        if cmd != o.command {
            return Err(ConfigError(format!(
                "config is for command `{cmd}`, but `{}` was invoked",
                o.command
            )));
        }
    }

    let seeds = match (&common.seed, &common.seeds) {
        (Some(s), _) => vec![*s],
        (None, Some(list)) => parse_seeds(list)?,
        (None, None) => file.seeds.clone().unwrap_or_else(|| vec![0]),
    };
    if seeds.is_empty() {
        return Err(ConfigError("seed list is empty".into()));
    }

    let defaults = Constants::default();
    let mut cfg = Config::default();
    cfg.constants.c_strip = positive(
        "c_strip",
        common.c_strip.or(file.c_strip).unwrap_or(defaults.c_strip),
    )?;
    cfg.constants.c_measure = positive(
        "c_measure",
        common
            .c_measure
            .or(file.c_measure)
            .unwrap_or(defaults.c_measure),
    )?;
    cfg.constants.c0_sparsify = positive(
        "c0_sparsify",
        common
            .c0_sparsify
            .or(file.c0_sparsify)
            .unwrap_or(defaults.c0_sparsify),
    )?;
    cfg.constants.c_decompose = positive(
        "c_decompose",
        common
            .c_decompose
            .or(file.c_decompose)
            .unwrap_or(defaults.c_decompose),
    )?;

    let d = pick(o.d, file.d);
    let m = pick(o.m, file.m);
    let n = pick(o.n, file.n);
    let t = pick(o.t, file.t);
    if let Some(&bad) = d.iter().find(|&&v| v == 0 || v > MAX_DIM) {
        return Err(ConfigError(format!(
            "d must lie in 1..={MAX_DIM}, got {bad}"
        )));
    }
    if let Some(&bad) = m.iter().find(|&&v| v == 0 || v > MAX_ROWS) {
        return Err(ConfigError(format!(
            "m must lie in 1..={MAX_ROWS}, got {bad}"
        )));
    }
    if let Some(&bad) = n.iter().find(|&&v| v > MAX_VECTORS) {
        return Err(ConfigError(format!(
            "n must be at most {MAX_VECTORS}, got {bad}"
        )));
    }
    if let Some(&bad) = t.iter().find(|&&v| !(v >= 1.0 && v.is_finite())) {
        return Err(ConfigError(format!("t must be at least 1, got {bad}")));
    }
    let epsilon = o.epsilon.or(file.epsilon);
    if let Some(e) = epsilon {
        if !(e > 0.0 && e <= 0.5) {
            return Err(ConfigError(format!(
                "epsilon must lie in (0, 1/2], got {e}"
            )));
        }
    }
    let samples = o.samples.or(file.n_samples);
    if let Some(s) = samples {
        if s == 0 || s > MAX_SAMPLES {
            return Err(ConfigError(format!(
                "sample count must lie in 1..={MAX_SAMPLES}, got {s}"
            )));
        }
    }
    if let Some(0) = common.jobs {
        return Err(ConfigError("--jobs must be at least 1".into()));
    }
    Ok(Params {
        d,
        m,
        n,
        t,
        epsilon,
        seeds,
        samples,
        cfg,
        out: common.out.clone().or(file.out),
        format: common.format.or(file.format).unwrap_or(o.default_format),
        jobs: common.jobs,
    })
}
