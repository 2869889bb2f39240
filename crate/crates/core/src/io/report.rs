//! Run reports and their CSV / JSON forms.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::SolverConfig;
use crate::dynamics::{RunStatus, State, Trajectory};
use crate::entropy::Verdict;
use crate::error::{Error, Result};
use crate::experiments::StudyReport;
use crate::num_serde;

pub const SCHEMA_VERSION: u32 = 1;

/// `|c_k|` of the final state for `k = 0 .. n/2 - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectra {
    #[serde(with = "num_serde::real_vec")]
    pub xi: Vec<f64>,
    #[serde(with = "num_serde::real_vec")]
    pub zeta: Vec<f64>,
    #[serde(with = "num_serde::real_vec")]
    pub u: Vec<f64>,
}

impl Spectra {
    pub fn of(state: &State) -> Self {
        let g = state.grid();
        let half = g.len() / 2;
        Spectra {
            xi: (0..half).map(|i| g.xi()[i]).collect(),
            zeta: state.zeta.coeffs()[..half].iter().map(|c| c.norm()).collect(),
            u: state.u.coeffs()[..half].iter().map(|c| c.norm()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub kind: String,
    pub config: BTreeMap<String, String>,
    pub columns: Vec<String>,
    #[serde(with = "num_serde::real_rows")]
    pub rows: Vec<Vec<f64>>,
    pub verdicts: Vec<Verdict>,
    pub pass: bool,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_spectra: Option<Spectra>,
    #[serde(with = "num_serde::real_map")]
    pub info: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    #[serde(default)]
    pub details: serde_json::Value,
    pub metadata: BTreeMap<String, String>,
}

fn metadata(c: &SolverConfig) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    m.insert("seed".into(), c.seed.to_string());
    m
}

impl RunReport {
    pub fn new(kind: &str, c: &SolverConfig) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            kind: kind.to_string(),
            config: c.echo(),
            columns: Vec::new(),
            rows: Vec::new(),
            verdicts: Vec::new(),
            pass: true,
            status: "completed".into(),
            final_spectra: None,
            info: BTreeMap::new(),
            warnings: Vec::new(),
            details: serde_json::Value::Null,
            metadata: metadata(c),
        }
    }

    pub fn from_trajectory(kind: &str, c: &SolverConfig, t: &Trajectory) -> Self {
        let mut r = RunReport::new(kind, c);
        r.columns = t.columns.clone();
        r.rows = t.rows.clone();
        r.verdicts = t.verdicts.clone();
        r.final_spectra = Some(Spectra::of(&t.final_state));
        r.info.insert("dt".into(), t.dt);
        r.info.insert("steps".into(), t.steps as f64);
        if let RunStatus::BlowUp { t, detail } = &t.status {
            r.status = format!("blow-up at t = {t}: {detail}");
            r.verdicts.push(Verdict::check("completed", 1.0, 0.0, r.status.clone()));
        }
        r.finish()
    }

    pub fn from_study(c: &SolverConfig, s: StudyReport) -> Self {
        let mut r = RunReport::new(&s.study, c);
        r.columns = s.columns;
        r.rows = s.rows;
        r.verdicts = s.verdicts;
        r.info = s.info;
        r.warnings = s.warnings;
        r.details = s.details;
        r.finish()
    }

    /// Sets `pass` from the verdicts; a report without verdicts passes.
    pub fn finish(mut self) -> Self {
        self.pass = self.verdicts.iter().all(|v| v.pass);
        self
    }

    /// Header plus one row per sample; reals with 17 significant digits.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| fmt_real(*v)))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv buffer: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is ascii"))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Writes `<dir>/<stem>.csv` and/or `<dir>/<stem>.json`.
    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut out = Vec::new();
        if matches!(format, Format::Csv | Format::Both) {
            let p = dir.join(format!("{stem}.csv"));
            std::fs::write(&p, self.to_csv()?).map_err(|e| Error::io(&p, e))?;
            out.push(p);
        }
        if matches!(format, Format::Json | Format::Both) {
            let p = dir.join(format!("{stem}.json"));
            std::fs::write(&p, self.to_json()?).map_err(|e| Error::io(&p, e))?;
            out.push(p);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

/// `{:.16e}`, or `NaN` / `inf` / `-inf`.
pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_series_is_header_only() {
        let mut r = RunReport::new("simulate", &SolverConfig::default());
        r.columns = vec!["t".into(), "a,b".into()];
        assert_eq!(r.to_csv().unwrap(), "t,\"a,b\"\r\n");
    }

    #[test]
    fn json_round_trip() {
        let mut r = RunReport::new("simulate", &SolverConfig::default());
        r.columns = vec!["t".into(), "x".into()];
        r.rows = vec![vec![0.0, f64::NAN], vec![0.1, 1.0 / 3.0]];
        r.info.insert("k".into(), f64::INFINITY);
        r.verdicts.push(Verdict::check("m", 1e-12, 1e-10, "d".into()));
        let back = RunReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back.rows[1], r.rows[1]);
        assert!(back.rows[0][1].is_nan());
        assert_eq!(back.verdicts, r.verdicts);
        assert_eq!(back.config, r.config);
        assert_eq!(back.to_json().unwrap(), r.to_json().unwrap());
    }

    #[test]
    fn seventeen_digits() {
        let v = 0.1f64 + 0.2;
        assert_eq!(fmt_real(v).parse::<f64>().unwrap(), v);
        assert_eq!(fmt_real(-f64::INFINITY), "-inf");
    }
}
