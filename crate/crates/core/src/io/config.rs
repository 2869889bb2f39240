//! Flat `key = value` configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Lists are comma separated.
//! Lengths accept a `pi` suffix (`16pi`). Later assignments win, which is how
//! command-line overrides are layered on a file.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{ModelParams, Scheme};
use crate::entropy::MonitorSpec;
use crate::error::{Error, Result};
use crate::experiments::DataKind;

/// Environment variable that overrides the output root.
pub const OUTPUT_ENV: &str = "BF_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Half-period `L` of the box `[-L, L)`.
    pub half_length: f64,
    pub n_modes: usize,
    /// `None` selects `0.5 dx / max(1, |u|_inf + 1)`.
    pub dt: Option<f64>,
    pub t_final: f64,
    pub sample_interval: f64,
    pub s: f64,
    pub eps: f64,
    pub lambda: f64,
    pub mu: f64,
    pub scheme: Scheme,
    pub monitors: Vec<MonitorSpec>,
    pub seed: u64,
    pub output: PathBuf,
    /// Repeat studies at `2 n_modes` and require agreement.
    pub resolution_pair: bool,

    pub data: DataKind,
    pub amplitude: f64,
    /// `min(1 + zeta0)` for near-cavitation data.
    pub floor: f64,
    /// Highest wavenumber of the rough and random generators.
    pub data_cutoff: f64,

    pub eps_list: Vec<f64>,
    pub n_list: Vec<u32>,
    pub widths: Vec<u32>,
    pub deltas: Vec<f64>,
    pub eps_grid: Vec<f64>,
    pub lambda_grid: Vec<f64>,
    pub weak_dt: f64,
    pub refinements: usize,
    pub trials: usize,
    /// Kernel time.
    pub t: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            half_length: 16.0 * PI,
            n_modes: 512,
            dt: None,
            t_final: 2.0,
            sample_interval: 0.02,
            s: 0.75,
            eps: 0.0,
            lambda: 1.0,
            mu: 0.0,
            scheme: Scheme::Ifrk4,
            monitors: vec![MonitorSpec::Entropy, MonitorSpec::MinPrinciple, MonitorSpec::Mass],
            seed: 7,
            output: PathBuf::from("out"),
            resolution_pair: true,
            data: DataKind::SmoothBump,
            amplitude: 0.3,
            floor: 0.1,
            data_cutoff: 6.0,
            eps_list: vec![0.1, 0.05, 0.025, 0.0125],
            n_list: vec![4, 8, 16, 32],
            widths: vec![1, 2, 4, 8, 16],
            deltas: vec![0.04, 0.02, 0.01, 0.005],
            eps_grid: vec![0.0, 0.05, 0.1],
            lambda_grid: vec![0.5, 1.0, 2.0],
            weak_dt: 0.1,
            refinements: 3,
            trials: 100,
            t: 1.0,
        }
    }
}

pub const KEYS: &[&str] = &[
    "L",
    "n",
    "dt",
    "T",
    "sample_interval",
    "s",
    "eps",
    "lambda",
    "mu",
    "scheme",
    "monitors",
    "seed",
    "output",
    "resolution_pair",
    "data",
    "amplitude",
    "floor",
    "data_cutoff",
    "eps_list",
    "n_list",
    "widths",
    "deltas",
    "eps_grid",
    "lambda_grid",
    "weak_dt",
    "refinements",
    "trials",
    "t",
];

fn bad(key: &str, value: &str, expected: &str) -> Error {
    Error::Config(format!("`{key}` = `{value}`: expected {expected}"))
}

fn real(key: &str, v: &str) -> Result<f64> {
    let v = v.trim();
    let parsed = match v.strip_suffix("pi") {
        Some("") => Ok(PI),
        Some(head) => head.trim_end_matches('*').trim().parse::<f64>().map(|x| x * PI),
        None => v.parse::<f64>(),
    };
    parsed.map_err(|_| bad(key, v, "a real number"))
}

fn list<T>(key: &str, v: &str, item: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| item(key, s.trim())).collect()
}

fn uint<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim().parse::<T>().map_err(|_| bad(key, v, "a non-negative integer"))
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, v, "true or false")),
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl SolverConfig {
    /// Parses a config text on top of the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = SolverConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{line}`", i + 1)))?;
            c.set(k.trim(), v.trim())?;
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "L" => self.half_length = real(key, v)?,
            "n" => self.n_modes = uint(key, v)?,
            "dt" => self.dt = if v == "auto" { None } else { Some(real(key, v)?) },
            "T" => self.t_final = real(key, v)?,
            "sample_interval" => self.sample_interval = real(key, v)?,
            "s" => self.s = real(key, v)?,
            "eps" => self.eps = real(key, v)?,
            "lambda" => self.lambda = real(key, v)?,
            "mu" => self.mu = real(key, v)?,
            "scheme" => self.scheme = Scheme::parse(v).ok_or_else(|| bad(key, v, "ifrk4 or rk4"))?,
            "monitors" => self.monitors = list(key, v, |_, s| MonitorSpec::parse(s))?,
            "seed" => self.seed = uint(key, v)?,
            "output" => self.output = PathBuf::from(v),
            "resolution_pair" => self.resolution_pair = boolean(key, v)?,
            "data" => self.data = DataKind::parse(v).ok_or_else(|| bad(key, v, DataKind::EXPECTED))?,
            "amplitude" => self.amplitude = real(key, v)?,
            "floor" => self.floor = real(key, v)?,
            "data_cutoff" => self.data_cutoff = real(key, v)?,
            "eps_list" => self.eps_list = list(key, v, real)?,
            "n_list" => self.n_list = list(key, v, uint)?,
            "widths" => self.widths = list(key, v, uint)?,
            "deltas" => self.deltas = list(key, v, real)?,
            "eps_grid" => self.eps_grid = list(key, v, real)?,
            "lambda_grid" => self.lambda_grid = list(key, v, real)?,
            "weak_dt" => self.weak_dt = real(key, v)?,
            "refinements" => self.refinements = uint(key, v)?,
            "trials" => self.trials = uint(key, v)?,
            "t" => self.t = real(key, v)?,
            _ => {
                return Err(Error::Config(format!(
                    "unknown key `{key}`; known keys: {}",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies `key=value` overrides in order.
    pub fn apply<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (k, v) = o
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{o}` is not of the form key=value")))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// Every key with its current value, in `KEYS` order semantics but sorted
    /// for a stable echo.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("L", format!("{:?}", self.half_length));
        put("n", self.n_modes.to_string());
        put("dt", self.dt.map_or("auto".into(), |d| format!("{d:?}")));
        put("T", format!("{:?}", self.t_final));
        put("sample_interval", format!("{:?}", self.sample_interval));
        put("s", format!("{:?}", self.s));
        put("eps", format!("{:?}", self.eps));
        put("lambda", format!("{:?}", self.lambda));
        put("mu", format!("{:?}", self.mu));
        put("scheme", self.scheme.as_str().into());
        put("monitors", self.monitors.iter().map(|m| m.tag()).collect::<Vec<_>>().join(","));
        put("seed", self.seed.to_string());
        put("output", self.output.display().to_string());
        put("resolution_pair", self.resolution_pair.to_string());
        put("data", self.data.as_str().into());
        put("amplitude", format!("{:?}", self.amplitude));
        put("floor", format!("{:?}", self.floor));
        put("data_cutoff", format!("{:?}", self.data_cutoff));
        put("eps_list", join(&self.eps_list));
        put("n_list", join(&self.n_list));
        put("widths", join(&self.widths));
        put("deltas", join(&self.deltas));
        put("eps_grid", join(&self.eps_grid));
        put("lambda_grid", join(&self.lambda_grid));
        put("weak_dt", format!("{:?}", self.weak_dt));
        put("refinements", self.refinements.to_string());
        put("trials", self.trials.to_string());
        put("t", format!("{:?}", self.t));
        m
    }

    /// Renders the config in the file format; `parse(to_text())` reproduces it.
    pub fn to_text(&self) -> String {
        self.echo().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            eps: self.eps,
            lambda: self.lambda,
            mu: self.mu,
        }
    }

    /// Output root: `BF_OUTPUT_DIR` if set, else `output`.
    pub fn output_root(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ENV) {
            Some(p) if !p.is_empty() => PathBuf::from(p),
            _ => self.output.clone(),
        }
    }

    /// Range checks; each failure names the field and the legal range.
    pub fn validate(&self) -> Result<()> {
        fn pos(name: &'static str, v: f64) -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, v, "a finite positive real"))
            }
        }
        fn sorted_desc(name: &'static str, v: &[f64]) -> Result<()> {
            if v.is_empty() || v.windows(2).any(|w| !(w[0] > w[1])) {
                return Err(Error::param(name, join(v), "a nonempty strictly decreasing list"));
            }
            Ok(())
        }
        pos("L", self.half_length)?;
        if self.n_modes < 8 || !self.n_modes.is_power_of_two() {
            return Err(Error::param("n", self.n_modes, "a power of two >= 8"));
        }
        if let Some(dt) = self.dt {
            pos("dt", dt)?;
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::param("T", self.t_final, "a finite real >= 0"));
        }
        pos("sample_interval", self.sample_interval)?;
        if !(self.s > 0.5 && self.s.is_finite()) {
            return Err(Error::param("s", self.s, "a finite real > 1/2"));
        }
        self.params().validate()?;
        pos("amplitude", self.amplitude)?;
        if !(self.floor > 0.0 && self.floor < 1.0) {
            return Err(Error::param("floor", self.floor, "in (0, 1)"));
        }
        pos("data_cutoff", self.data_cutoff)?;
        sorted_desc("eps_list", &self.eps_list)?;
        if self.eps_list.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::param("eps_list", join(&self.eps_list), "positive entries"));
        }
        if self.n_list.is_empty() || self.n_list.windows(2).any(|w| w[0] >= w[1]) || self.n_list[0] == 0 {
            return Err(Error::param("n_list", join(&self.n_list), "a nonempty strictly increasing list of positive integers"));
        }
        if self.widths.is_empty() || self.widths.windows(2).any(|w| w[0] >= w[1]) || self.widths[0] == 0 {
            return Err(Error::param("widths", join(&self.widths), "a nonempty strictly increasing list of positive integers"));
        }
        sorted_desc("deltas", &self.deltas)?;
        if self.deltas.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::param("deltas", join(&self.deltas), "positive entries"));
        }
        if self.eps_grid.is_empty() || self.eps_grid.iter().any(|&e| !(e >= 0.0 && e.is_finite())) {
            return Err(Error::param("eps_grid", join(&self.eps_grid), "a nonempty list of finite reals >= 0"));
        }
        if self.lambda_grid.is_empty() || self.lambda_grid.iter().any(|&l| !(l > 0.0 && l <= 2.0)) {
            return Err(Error::param("lambda_grid", join(&self.lambda_grid), "a nonempty list in (0, 2]"));
        }
        pos("weak_dt", self.weak_dt)?;
        if self.refinements < 2 {
            return Err(Error::param("refinements", self.refinements, "an integer >= 2"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", self.trials, "a positive integer"));
        }
        pos("t", self.t)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut c = SolverConfig::default();
        c.apply(&["eps=0.05", "n_list=2,4", "dt=0.01", "monitors=entropy,moment:3", "L=8pi"]).unwrap();
        assert_eq!(SolverConfig::parse(&c.to_text()).unwrap(), c);
        assert_eq!(c.half_length, 8.0 * PI);
    }

    #[test]
    fn rejects_out_of_range() {
        for (k, v, field) in [
            ("lambda", "2.5", "lambda"),
            ("eps", "-1", "eps"),
            ("n", "100", "n"),
            ("s", "0.4", "s"),
            ("eps_list", "0.1,0.2", "eps_list"),
        ] {
            let mut c = SolverConfig::default();
            c.set(k, v).unwrap();
            let msg = c.validate().unwrap_err().to_string();
            assert!(msg.contains(field), "{msg}");
            assert!(msg.contains("must be"), "{msg}");
        }
        assert!(SolverConfig::parse("bogus = 1").is_err());
        assert!(SolverConfig::parse("eps 1").is_err());
    }
}
