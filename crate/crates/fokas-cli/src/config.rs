//! Flat `key=value` run configuration with command-line overrides.

use std::path::{Path, PathBuf};

use fokas_core::formats::read_file;
use fokas_core::{Error, IntegratorOptions, OracleParams, Report, Result, Scheme};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Oracle domain [0, x_max].
    pub x_max: f64,
    /// Final time of the oracle and of the boundary data.
    pub length: f64,
    pub truncation_radius: f64,
    pub nodes_per_ray: usize,
    pub rtol: f64,
    pub atol: f64,
    /// Largest accepted max |u0| for oracle runs.
    pub amplitude_guard: f64,
    pub out_dir: PathBuf,
    /// Seed for the randomized parity samples in `validate`.
    pub seed: u64,
    pub random_samples: usize,
    pub hx: f64,
    pub hy: f64,
    pub x_left: f64,
    pub store_every: usize,
    pub scheme: Scheme,
    pub relation_radii: Vec<f64>,
    pub zero_radius: f64,
    pub residual_tol: f64,
    /// Where the config came from, echoed into reports.
    pub source: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let o = OracleParams::default();
        Self {
            x_max: o.x_max,
            length: 0.5,
            truncation_radius: 5.0,
            nodes_per_ray: 96,
            rtol: 1e-10,
            atol: 1e-12,
            amplitude_guard: 0.5,
            out_dir: PathBuf::from("."),
            seed: 0,
            random_samples: 64,
            hx: o.hx,
            hy: o.hy,
            x_left: o.x_left,
            store_every: o.store_every,
            scheme: o.scheme,
            relation_radii: vec![2.0, 4.0, 8.0],
            zero_radius: 2.0,
            residual_tol: 1e-6,
            source: None,
        }
    }
}

fn bad(key: &str, value: &str) -> Error {
    Error::Validation(format!("bad value `{value}` for config key `{key}`"))
}

fn positive(key: &str, value: &str) -> Result<f64> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        _ => Err(Error::Validation(format!("config key `{key}` must be a positive number, got `{value}`"))),
    }
}

fn count(key: &str, value: &str) -> Result<usize> {
    match value.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(Error::Validation(format!("config key `{key}` must be a positive integer, got `{value}`"))),
    }
}

impl RunConfig {
    /// Defaults, then the file, then each `key=value` override in order.
    pub fn load(file: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = file {
            let text = read_file(path)?;
            for (n, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                    path: path.display().to_string(),
                    line: n + 1,
                    msg: format!("expected `key=value`, got `{line}`"),
                })?;
                cfg.set(k.trim(), v.trim())?;
            }
            cfg.source = Some(path.to_path_buf());
        }
        for o in overrides {
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::Validation(format!("override `{o}` is not `key=value`")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "x_max" => self.x_max = positive(key, value)?,
            "L" | "length" => self.length = positive(key, value)?,
            "truncation_radius" => self.truncation_radius = positive(key, value)?,
            "nodes_per_ray" => self.nodes_per_ray = count(key, value)?,
            "rtol" => self.rtol = positive(key, value)?,
            "atol" => self.atol = positive(key, value)?,
            "amplitude_guard" => {
                let v = positive(key, value)?;
                if v > 0.5 {
                    return Err(Error::Validation(format!("amplitude_guard must not exceed 0.5, got {v}")));
                }
                self.amplitude_guard = v;
            }
            "out_dir" => {
                if value.is_empty() {
                    return Err(bad(key, value));
                }
                self.out_dir = PathBuf::from(value);
            }
            "seed" => self.seed = value.parse().map_err(|_| bad(key, value))?,
            "random_samples" => self.random_samples = value.parse().map_err(|_| bad(key, value))?,
            "hx" => self.hx = positive(key, value)?,
            "hy" => self.hy = positive(key, value)?,
            "x_left" => {
                self.x_left = match value.parse::<f64>() {
                    Ok(v) if v.is_finite() && v >= 0.0 => v,
                    _ => return Err(bad(key, value)),
                }
            }
            "store_every" => self.store_every = count(key, value)?,
            "scheme" => self.scheme = Scheme::parse(value).ok_or_else(|| bad(key, value))?,
            "relation_radii" => {
                let radii = value
                    .split(',')
                    .map(|s| positive(key, s.trim()))
                    .collect::<Result<Vec<f64>>>()?;
                if radii.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Validation("relation_radii must increase".into()));
                }
                self.relation_radii = radii;
            }
            "zero_radius" => self.zero_radius = positive(key, value)?,
            "residual_tol" => self.residual_tol = positive(key, value)?,
            _ => return Err(Error::Validation(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    pub fn integrator(&self) -> IntegratorOptions {
        IntegratorOptions {
            rtol: self.rtol,
            atol: self.atol,
            ..IntegratorOptions::default()
        }
    }

    pub fn oracle(&self) -> OracleParams {
        OracleParams {
            hx: self.hx,
            hy: self.hy,
            x_max: self.x_max,
            x_left: self.x_left,
            store_every: self.store_every,
            scheme: self.scheme,
        }
    }

    /// `config.*` lines for reproducibility.
    pub fn report(&self) -> Report {
        let mut r = Report::new();
        let src = self.source.as_ref().map_or_else(|| "defaults".to_string(), |p| p.display().to_string());
        r.push("config.source", src)
            .push("config.x_max", self.x_max)
            .push("config.L", self.length)
            .push("config.truncation_radius", self.truncation_radius)
            .push("config.nodes_per_ray", self.nodes_per_ray)
            .push("config.rtol", self.rtol)
            .push("config.atol", self.atol)
            .push("config.amplitude_guard", self.amplitude_guard)
            .push("config.out_dir", self.out_dir.display())
            .push("config.seed", self.seed)
            .push("config.random_samples", self.random_samples)
            .push("config.hx", self.hx)
            .push("config.hy", self.hy)
            .push("config.x_left", self.x_left)
            .push("config.store_every", self.store_every)
            .push("config.scheme", self.scheme.name())
            .push(
                "config.relation_radii",
                self.relation_radii.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
            )
            .push("config.zero_radius", self.zero_radius)
            .push("config.residual_tol", self.residual_tol);
        r
    }
}
