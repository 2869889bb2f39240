use serde::{Deserialize, Serialize};

use super::integrator::{auto_dt, stability_bound, Stepper};
use super::{Model, Scheme, State};
use crate::entropy::{entropy_total, Monitor, Verdict};
use crate::error::{Error, Result};

/// Columns recorded for every run, before monitor columns.
pub const BASE_COLUMNS: [&str; 7] = ["t", "mass_zeta", "mass_u", "hs_zeta", "hs1_u", "entropy", "min_w"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    BlowUp { t: f64, detail: String },
}

#[derive(Debug, Clone)]
pub struct EvolveOptions {
    pub t_final: f64,
    /// Requested step; `None` uses `auto_dt`. The effective step divides
    /// the sampling interval exactly.
    pub dt: Option<f64>,
    pub scheme: Scheme,
    /// Time between recorded samples; `None` records every step.
    pub sample_interval: Option<f64>,
    pub keep_snapshots: bool,
    /// Sobolev index of the base diagnostics (`|zeta|_{H^s}`, `|u|_{H^{s+1}}`).
    pub s: f64,
}

impl EvolveOptions {
    pub fn new(t_final: f64) -> Self {
        EvolveOptions {
            t_final,
            dt: None,
            scheme: Scheme::Ifrk4,
            sample_interval: None,
            keep_snapshots: false,
            s: 0.75,
        }
    }

    pub fn dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn sample_interval(mut self, h: f64) -> Self {
        self.sample_interval = Some(h);
        self
    }

    pub fn keep_snapshots(mut self) -> Self {
        self.keep_snapshots = true;
        self
    }

    pub fn sobolev_index(mut self, s: f64) -> Self {
        self.s = s;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub status: RunStatus,
    pub dt: f64,
    pub steps: usize,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub verdicts: Vec<Verdict>,
    /// States at the sample times, when requested.
    pub snapshots: Vec<State>,
    pub final_state: State,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.status == RunStatus::Completed
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn verdict(&self, monitor: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.monitor == monitor)
    }

    pub fn all_pass(&self) -> bool {
        self.completed() && self.verdicts.iter().all(|v| v.pass)
    }
}

fn base_row(s: &State, sob: f64) -> Vec<f64> {
    vec![
        s.t,
        s.zeta.integral(),
        s.u.integral(),
        s.zeta.sobolev_norm(sob),
        s.u.sobolev_norm(sob + 1.0),
        entropy_total(s),
        s.min_depth(),
    ]
}

/// Fixed-step evolution to `t_final` with monitors sampled on a uniform grid
/// of times. Blow-up ends the run early with a `BlowUp` status.
pub fn evolve(
    state0: &State,
    model: &Model,
    opts: &EvolveOptions,
    monitors: &mut [Box<dyn Monitor>],
) -> Result<Trajectory> {
    model.params.validate()?;
    if !(opts.t_final >= 0.0 && opts.t_final.is_finite()) {
        return Err(Error::param("T", opts.t_final, "a finite real >= 0"));
    }
    let mut state = state0.dealias();
    let dt_req = opts.dt.unwrap_or_else(|| auto_dt(&state));
    if !(dt_req > 0.0 && dt_req.is_finite()) {
        return Err(Error::param("dt", dt_req, "a finite positive real"));
    }
    let bound = stability_bound(&state, model, opts.scheme);
    if dt_req > bound {
        return Err(Error::Config(format!(
            "dt = {dt_req} exceeds the stability bound {bound:.6e} for this initial state"
        )));
    }
    let (intervals, per) = if opts.t_final == 0.0 {
        (0, 1)
    } else {
        let h = opts.sample_interval.unwrap_or(dt_req).min(opts.t_final);
        if !(h > 0.0) {
            return Err(Error::param("sample_interval", h, "a positive real"));
        }
        let m = (opts.t_final / h - 1e-9).ceil().max(1.0) as usize;
        let k = ((opts.t_final / m as f64) / dt_req - 1e-9).ceil().max(1.0) as usize;
        (m, k)
    };
    let steps = intervals * per;
    let dt = if steps == 0 { dt_req } else { opts.t_final / steps as f64 };

    let mut columns: Vec<String> = BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
    for m in monitors.iter() {
        columns.extend(m.columns());
    }
    let mut rows = Vec::with_capacity(intervals + 1);
    let mut snapshots = Vec::new();
    let t0 = state.t;
    let mut record = |s: &State, monitors: &mut [Box<dyn Monitor>]| -> Result<()> {
        let mut row = base_row(s, opts.s);
        for m in monitors.iter_mut() {
            row.extend(m.observe(s)?);
        }
        rows.push(row);
        if opts.keep_snapshots {
            snapshots.push(s.clone());
        }
        Ok(())
    };
    record(&state, monitors)?;

    let mut status = RunStatus::Completed;
    if steps > 0 {
        let stepper = Stepper::new(state.grid(), model, opts.scheme, dt)?;
        'outer: for i in 0..intervals {
            for j in 0..per {
                match stepper.step(&state) {
                    Ok(mut next) => {
                        next.t = t0 + (i * per + j + 1) as f64 * dt;
                        state = next;
                    }
                    Err(Error::BlowUp { t, detail }) => {
                        status = RunStatus::BlowUp { t, detail };
                        break 'outer;
                    }
                    Err(e) => return Err(e),
                }
            }
            if state.zeta.max().abs().max(state.zeta.min().abs()) > super::integrator::BLOWUP_LIMIT
                || !state.zeta.all_finite()
                || !state.u.all_finite()
            {
                status = RunStatus::BlowUp {
                    t: state.t,
                    detail: "sample magnitude above the blow-up limit".into(),
                };
                break;
            }
            record(&state, monitors)?;
        }
    }
    let verdicts = monitors.iter().map(|m| m.verdict()).collect();
    Ok(Trajectory {
        status,
        dt,
        steps,
        columns,
        rows,
        verdicts,
        snapshots,
        final_state: state,
    })
}
