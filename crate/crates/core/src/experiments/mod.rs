//! Scripted studies: `eps -> 0`, Bona-Smith
//! regularization, entropy construction from mollified data, weak-form
//! residuals, continuity of the flow and the estimate suite.
//!
//! Every study runs at `n` and, unless disabled, `2n`; each check is
//! reported per resolution and the study passes only when all of them do.

mod bona_smith;
mod construction;
pub mod data;
mod eps;
mod estimates;
mod flow;
mod weak;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, EvolveOptions, Model, ModelParams, State, Trajectory};
use crate::entropy::Verdict;
use crate::error::{Error, Result};
use crate::io::SolverConfig;
use crate::num_serde;
use crate::spectral::Grid;

pub use bona_smith::bona_smith_study;
pub use construction::entropy_construction;
pub use data::{mollifier, mollify, DataKind, InitialData};
pub use eps::eps_convergence;
pub use estimates::{estimate_suite, DRIFT_TOL};
pub use flow::flow_continuity;
pub use weak::{weak_residual, weak_residual_of, Mms, TestFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    EpsConvergence,
    BonaSmith,
    EntropyConstruction,
    WeakResidual,
    FlowContinuity,
    EstimateFuzz,
}

impl StudyKind {
    pub const ALL: [StudyKind; 6] = [
        StudyKind::EpsConvergence,
        StudyKind::BonaSmith,
        StudyKind::EntropyConstruction,
        StudyKind::WeakResidual,
        StudyKind::FlowContinuity,
        StudyKind::EstimateFuzz,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            StudyKind::EpsConvergence => "eps-convergence",
            StudyKind::BonaSmith => "bona-smith",
            StudyKind::EntropyConstruction => "entropy-construction",
            StudyKind::WeakResidual => "weak-residual",
            StudyKind::FlowContinuity => "flow-continuity",
            StudyKind::EstimateFuzz => "estimate-fuzz",
        }
    }

    /// Name of the CLI subcommand running this study.
    pub fn command(&self) -> &'static str {
        match self {
            StudyKind::EpsConvergence => "converge-eps",
            StudyKind::BonaSmith => "bona-smith",
            StudyKind::EntropyConstruction => "entropy-construct",
            StudyKind::WeakResidual => "weak-residual",
            StudyKind::FlowContinuity => "flow-continuity",
            StudyKind::EstimateFuzz => "verify-estimates",
        }
    }

    /// Accepts the study name or its subcommand name.
    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s || k.command() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySpec {
    pub kind: StudyKind,
    pub config: SolverConfig,
}

/// One table plus verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub study: String,
    pub columns: Vec<String>,
    #[serde(with = "num_serde::real_rows")]
    pub rows: Vec<Vec<f64>>,
    pub verdicts: Vec<Verdict>,
    /// Scalars reported for context, not checked.
    #[serde(with = "num_serde::real_map")]
    pub info: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    /// Study-specific structured output.
    #[serde(default)]
    pub details: serde_json::Value,
}

impl StudyReport {
    pub fn new(study: StudyKind, columns: &[&str]) -> Self {
        StudyReport {
            study: study.as_str().to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            verdicts: Vec::new(),
            info: BTreeMap::new(),
            warnings: Vec::new(),
            details: serde_json::Value::Null,
        }
    }

    pub fn pass(&self) -> bool {
        !self.verdicts.is_empty() && self.verdicts.iter().all(|v| v.pass)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.monitor == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Appends a verdict comparing check outcomes across resolutions. Checks
    /// are matched by the part of their name before `@`.
    fn firewall(&mut self) {
        let mut by_check: BTreeMap<String, Vec<bool>> = BTreeMap::new();
        for v in &self.verdicts {
            if let Some((check, _)) = v.monitor.split_once('@') {
                by_check.entry(check.to_string()).or_default().push(v.pass);
            }
        }
        let split: Vec<&String> = by_check
            .iter()
            .filter(|(_, o)| o.iter().any(|&p| p) && o.iter().any(|&p| !p))
            .map(|(k, _)| k)
            .collect();
        let detail = if split.is_empty() {
            "every check has the same outcome at all resolutions".to_string()
        } else {
            format!("outcome differs across resolutions for: {}", split.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "))
        };
        self.verdicts.push(Verdict::check("firewall", split.len() as f64, 0.0, detail));
    }
}

pub fn run_study(spec: &StudySpec) -> Result<StudyReport> {
    spec.config.validate()?;
    let c = &spec.config;
    match spec.kind {
        StudyKind::EpsConvergence => eps_convergence(c),
        StudyKind::BonaSmith => bona_smith_study(c),
        StudyKind::EntropyConstruction => entropy_construction(c),
        StudyKind::WeakResidual => weak_residual(c),
        StudyKind::FlowContinuity => flow_continuity(c),
        StudyKind::EstimateFuzz => estimate_suite(c),
    }
}

/// `n` and, with `resolution_pair`, `2n`.
pub(crate) fn grids(c: &SolverConfig) -> Result<Vec<Arc<Grid>>> {
    let mut out = vec![Grid::new(c.half_length, c.n_modes)?];
    if c.resolution_pair {
        out.push(Grid::new(c.half_length, 2 * c.n_modes)?);
    }
    Ok(out)
}

pub fn data_of(c: &SolverConfig, kind: DataKind) -> InitialData {
    InitialData {
        kind,
        amplitude: c.amplitude,
        floor: c.floor,
        cutoff: c.data_cutoff,
        s: c.s,
        seed: c.seed,
    }
}

/// Evolution to `T` with snapshots at every sample.
pub(crate) fn run_snapshots(c: &SolverConfig, state0: &State, params: ModelParams) -> Result<Trajectory> {
    let mut opts = EvolveOptions::new(c.t_final)
        .scheme(c.scheme)
        .sample_interval(c.sample_interval)
        .sobolev_index(c.s)
        .keep_snapshots();
    if let Some(dt) = c.dt {
        opts = opts.dt(dt);
    }
    evolve(state0, &Model::new(params), &opts, &mut [])
}

/// `sup_t (|zeta_a - zeta_b|_{H^sz} + |u_a - u_b|_{H^su})` over matching snapshots.
pub(crate) fn sup_distance(a: &Trajectory, b: &Trajectory, sz: f64, su: f64) -> Result<f64> {
    if a.snapshots.len() != b.snapshots.len() {
        return Err(Error::Config("trajectories sampled at different times".into()));
    }
    let mut worst: f64 = 0.0;
    for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
        worst = worst.max(x.distance(y, sz, su)?);
    }
    Ok(worst)
}

/// Verdict that every run of a study completed without blow-up.
pub(crate) fn completion(trajs: &[&Trajectory], label: &str) -> Verdict {
    let failed: Vec<String> = trajs
        .iter()
        .filter_map(|t| match &t.status {
            crate::dynamics::RunStatus::Completed => None,
            crate::dynamics::RunStatus::BlowUp { t, detail } => Some(format!("t = {t}: {detail}")),
        })
        .collect();
    let detail = if failed.is_empty() {
        format!("{} runs completed", trajs.len())
    } else {
        format!("blow-up in {} of {} runs; first {}", failed.len(), trajs.len(), failed[0])
    };
    Verdict::check(&format!("completed@{label}"), failed.len() as f64, 0.0, detail)
}

/// Strict decrease of a positive sequence: value is the largest successive
/// ratio, pass iff below 1.
pub(crate) fn decreasing(name: &str, values: &[f64]) -> Verdict {
    let worst = values.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    let worst = if values.iter().any(|v| !v.is_finite()) { f64::NAN } else { worst };
    Verdict {
        monitor: name.to_string(),
        pass: worst < 1.0,
        value: worst,
        tolerance: 1.0,
        detail: "largest ratio of successive entries (strictly decreasing iff < 1)".into(),
        warning: None,
    }
}

/// Local orders `ln(d_i/d_{i+1}) / ln(h_i/h_{i+1})`.
pub(crate) fn orders(h: &[f64], d: &[f64]) -> Vec<f64> {
    h.windows(2)
        .zip(d.windows(2))
        .map(|(h, d)| (d[0] / d[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decreasing_verdict() {
        assert!(decreasing("x", &[4.0, 2.0, 1.0]).pass);
        assert!(!decreasing("x", &[4.0, 4.0, 1.0]).pass);
        assert!(!decreasing("x", &[4.0, f64::NAN]).pass);
        assert!((orders(&[0.1, 0.05], &[1.0, 0.25])[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn firewall_flags_disagreement() {
        let mut r = StudyReport::new(StudyKind::EpsConvergence, &[]);
        r.verdicts.push(Verdict::check("mono@n=8", 0.0, 1.0, String::new()));
        r.verdicts.push(Verdict::check("mono@n=16", 2.0, 1.0, String::new()));
        r.firewall();
        assert!(!r.verdict("firewall").unwrap().pass);
    }
}
