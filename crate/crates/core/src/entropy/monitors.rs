use serde::{Deserialize, Serialize};

use super::functionals::{dissipation, entropy_total};
use crate::dynamics::{ModelParams, State};
use crate::error::{Error, Result};
use crate::num_serde;

/// Outcome of one monitor over a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub monitor: String,
    pub pass: bool,
    /// The monitored worst-case quantity.
    #[serde(with = "num_serde::real")]
    pub value: f64,
    #[serde(with = "num_serde::real")]
    pub tolerance: f64,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl Verdict {
    /// Passing iff `value <= tolerance`.
    pub fn check(monitor: &str, value: f64, tolerance: f64, detail: String) -> Self {
        Verdict {
            monitor: monitor.to_string(),
            pass: value <= tolerance,
            value,
            tolerance,
            detail,
            warning: None,
        }
    }
}

/// A fold over the sampled states of a run.
pub trait Monitor: Send {
    fn name(&self) -> String;
    /// Extra columns this monitor contributes to the time series.
    fn columns(&self) -> Vec<String>;
    fn observe(&mut self, state: &State) -> Result<Vec<f64>>;
    fn verdict(&self) -> Verdict;
}

/// What monitors may know about the run they watch.
#[derive(Debug, Clone)]
pub struct MonitorContext {
    pub params: ModelParams,
    /// Sobolev index of the base diagnostics.
    pub s: f64,
}

/// Catalog names: `entropy`, `min-principle`, `mass`, `sobolev:S`,
/// `moment:N`, `flux-balance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MonitorSpec {
    Entropy,
    MinPrinciple,
    Mass,
    Sobolev(f64),
    Moment(u32),
    FluxBalance,
}

impl MonitorSpec {
    pub fn parse(tag: &str) -> Result<Self> {
        let tag = tag.trim();
        let (head, arg) = match tag.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (tag, None),
        };
        let bad = || Error::Config(format!("unknown monitor `{tag}`: expected entropy, min-principle, mass, sobolev:S, moment:N or flux-balance"));
        match (head, arg) {
            ("entropy", None) => Ok(MonitorSpec::Entropy),
            ("min-principle", None) => Ok(MonitorSpec::MinPrinciple),
            ("mass", None) => Ok(MonitorSpec::Mass),
            ("flux-balance", None) => Ok(MonitorSpec::FluxBalance),
            ("sobolev", Some(a)) => a
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(MonitorSpec::Sobolev)
                .ok_or_else(|| Error::Config(format!("monitor `{tag}`: S must be a real number"))),
            ("moment", Some(a)) => match a.parse::<u32>() {
                Ok(n) if n % 2 == 1 && n + 1 <= 12 => Ok(MonitorSpec::Moment(n)),
                _ => Err(Error::Config(format!(
                    "monitor `{tag}`: N must be an odd integer with N + 1 <= 12"
                ))),
            },
            _ => Err(bad()),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            MonitorSpec::Entropy => "entropy".into(),
            MonitorSpec::MinPrinciple => "min-principle".into(),
            MonitorSpec::Mass => "mass".into(),
            MonitorSpec::Sobolev(s) => format!("sobolev:{s}"),
            MonitorSpec::Moment(n) => format!("moment:{n}"),
            MonitorSpec::FluxBalance => "flux-balance".into(),
        }
    }

    pub fn build(&self, ctx: &MonitorContext) -> Box<dyn Monitor> {
        match *self {
            MonitorSpec::Entropy => Box::new(EntropyMonitor::new(ctx.params.eps)),
            MonitorSpec::MinPrinciple => Box::new(MinPrinciple::new(ctx.s)),
            MonitorSpec::Mass => Box::new(MassMonitor::default()),
            MonitorSpec::Sobolev(s) => Box::new(SobolevMonitor::new(s)),
            MonitorSpec::Moment(n) => Box::new(MomentTracker::new(n)),
            MonitorSpec::FluxBalance => Box::new(FluxBalance::new(ctx.params)),
        }
    }
}

pub fn build_monitors(specs: &[MonitorSpec], ctx: &MonitorContext) -> Vec<Box<dyn Monitor>> {
    specs.iter().map(|s| s.build(ctx)).collect()
}

/// Entropy decay (`eps > 0`) or conservation (`eps = 0`), both at
/// `ENTROPY_RATE_TOL` per unit time.
pub struct EntropyMonitor {
    eps: f64,
    series: Vec<(f64, f64)>,
}

pub const ENTROPY_RATE_TOL: f64 = 1e-6;

impl EntropyMonitor {
    pub fn new(eps: f64) -> Self {
        EntropyMonitor { eps, series: Vec::new() }
    }
}

impl Monitor for EntropyMonitor {
    fn name(&self) -> String {
        "entropy".into()
    }

    fn columns(&self) -> Vec<String> {
        Vec::new()
    }

    fn observe(&mut self, state: &State) -> Result<Vec<f64>> {
        self.series.push((state.t, entropy_total(state)));
        Ok(Vec::new())
    }

    fn verdict(&self) -> Verdict {
        let Some(&(t0, e0)) = self.series.first() else {
            return Verdict::check("entropy", 0.0, ENTROPY_RATE_TOL, "no samples".into());
        };
        if self.eps > 0.0 {
            // worst growth rate between consecutive samples
            let worst = self
                .series
                .windows(2)
                .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
                .fold(f64::NEG_INFINITY, f64::max)
                .max(0.0);
            Verdict::check(
                "entropy",
                worst,
                ENTROPY_RATE_TOL,
                format!("max growth rate of the entropy; E(0) = {e0:.6e}"),
            )
        } else {
            let span = self.series.last().map(|s| s.0 - t0).unwrap_or(0.0).max(1.0);
            let worst = self.series.iter().map(|s| (s.1 - e0).abs()).fold(0.0, f64::max);
            Verdict::check(
                "entropy",
                worst / span,
                ENTROPY_RATE_TOL,
                format!("max |E(t) - E(0)| per unit time; E(0) = {e0:.6e}"),
            )
        }
    }
}

/// `min(1 + zeta)` against its initial value, with the grid allowance
/// `1e-6 + |zeta_0|_{H^s} dx^s`.
pub struct MinPrinciple {
    s: f64,
    m0: f64,
    tol: f64,
    worst: f64,
    min_seen: f64,
    t_worst: f64,
}

impl MinPrinciple {
    pub fn new(s: f64) -> Self {
        MinPrinciple {
            s,
            m0: f64::NAN,
            tol: 0.0,
            worst: 0.0,
            min_seen: f64::INFINITY,
            t_worst: 0.0,
        }
    }

    pub fn tolerance(state: &State, s: f64) -> f64 {
        1e-6 + state.zeta.sobolev_norm(s) * state.grid().dx().powf(s)
    }
}

impl Monitor for MinPrinciple {
    fn name(&self) -> String {
        "min-principle".into()
    }

    fn columns(&self) -> Vec<String> {
        Vec::new()
    }

    fn observe(&mut self, state: &State) -> Result<Vec<f64>> {
        let m = state.min_depth();
        if self.m0.is_nan() {
            self.m0 = m;
            self.tol = Self::tolerance(state, self.s);
        }
        self.min_seen = self.min_seen.min(m);
        let under = self.m0 - m;
        if under > self.worst {
            self.worst = under;
            self.t_worst = state.t;
        }
        Ok(Vec::new())
    }

    fn verdict(&self) -> Verdict {
        Verdict::check(
            "min-principle",
            self.worst,
            self.tol,
            format!(
                "largest undershoot of min(1+zeta) below m(0) = {:.6e} (at t = {:.4}); min seen {:.6e}",
                self.m0, self.t_worst, self.min_seen
            ),
        )
    }
}

pub const MASS_TOL: f64 = 1e-10;

#[derive(Default)]
pub struct MassMonitor {
    first: Option<(f64, f64)>,
    worst: f64,
}

impl Monitor for MassMonitor {
    fn name(&self) -> String {
        "mass".into()
    }

    fn columns(&self) -> Vec<String> {
        Vec::new()
    }

    fn observe(&mut self, state: &State) -> Result<Vec<f64>> {
        let m = (state.zeta.integral(), state.u.integral());
        let (a, b) = *self.first.get_or_insert(m);
        self.worst = self.worst.max((m.0 - a).abs()).max((m.1 - b).abs());
        Ok(Vec::new())
    }

    fn verdict(&self) -> Verdict {
        Verdict::check(
            "mass",
            self.worst,
            MASS_TOL,
            "max drift of int zeta and int u".into(),
        )
    }
}

/// Tracks `|zeta|_{H^s}` and `|u|_{H^{s+1}}`.
pub struct SobolevMonitor {
    s: f64,
    max: f64,
}

impl SobolevMonitor {
    pub fn new(s: f64) -> Self {
        SobolevMonitor { s, max: 0.0 }
    }
}

impl Monitor for SobolevMonitor {
    fn name(&self) -> String {
        format!("sobolev:{}", self.s)
    }

    fn columns(&self) -> Vec<String> {
        vec![format!("h{}_zeta", self.s), format!("h{}_u", self.s + 1.0)]
    }

    fn observe(&mut self, state: &State) -> Result<Vec<f64>> {
        let a = state.zeta.sobolev_norm(self.s);
        let b = state.u.sobolev_norm(self.s + 1.0);
        self.max = self.max.max(a + b);
        Ok(vec![a, b])
    }

    fn verdict(&self) -> Verdict {
        let mut v = Verdict::check(
            &self.name(),
            self.max,
            f64::INFINITY,
            "sup over samples of |zeta|_{H^s} + |u|_{H^{s+1}}".into(),
        );
        v.pass = self.max.is_finite();
        v
    }
}

/// `|zeta|_{L^{N+1}}` and the pieces of `u_x = zeta + f1 + f2 + f3` with
/// `f1 = -(1 - d_xx)^{-1} zeta`, `f2 = u^2/2`, `f3 = -(1 - d_xx)^{-1} u^2 / 2`.
pub struct MomentTracker {
    n: u32,
    worst: f64,
}

impl MomentTracker {
    pub fn new(n: u32) -> Self {
        MomentTracker { n, worst: f64::NEG_INFINITY }
    }

    /// `(|zeta|_{L^{N+1}}, |f1|_inf, |f2 + f3|_inf, |u|^2_{H^1})`.
    pub fn measure(state: &State, n: u32) -> Result<[f64; 4]> {
        let lp = state.zeta.lp_norm((n + 1) as f64)?;
        let f1 = state.zeta.helmholtz_inverse(1.0)?.scale(-1.0);
        let usq = state.u.map_samples(|v| v * v);
        let f23 = usq.sub(&usq.helmholtz_inverse(1.0)?).scale(0.5);
        Ok([lp, f1.linf_norm(), f23.linf_norm(), state.u.sobolev_norm(1.0).powi(2)])
    }
}

impl Monitor for MomentTracker {
    fn name(&self) -> String {
        format!("moment:{}", self.n)
    }

    fn columns(&self) -> Vec<String> {
        vec![
            format!("l{}_zeta", self.n + 1),
            "f1_inf".into(),
            "f23_inf".into(),
            "u_h1_sq".into(),
        ]
    }

    fn observe(&mut self, state: &State) -> Result<Vec<f64>> {
        let m = Self::measure(state, self.n)?;
        self.worst = self.worst.max(m[2] - m[3]);
        Ok(m.to_vec())
    }

    fn verdict(&self) -> Verdict {
        Verdict::check(
            &self.name(),
            if self.worst.is_finite() { self.worst } else { 0.0 },
            0.0,
            "max of |f2+f3|_inf - |u|^2_{H^1}".into(),
        )
    }
}

pub const FLUX_BALANCE_TOL: f64 = 1e-6;

/// `dE/dt + eps int ln(1+zeta) g_lambda(zeta)`, with `E` the entropy total and
/// the time derivative from fourth-order central differences of the samples.
pub struct FluxBalance {
    params: ModelParams,
    series: Vec<(f64, f64, f64)>,
}

impl FluxBalance {
    pub fn new(params: ModelParams) -> Self {
        FluxBalance {
            params,
            series: Vec::new(),
        }
    }

    /// Residual at each interior sample `i` in `2..len-2`.
    pub fn residuals(series: &[(f64, f64, f64)]) -> std::result::Result<Vec<(f64, f64)>, String> {
        if series.len() < 5 {
            return Err(format!("{} samples; at least 5 are needed", series.len()));
        }
        let h = series[1].0 - series[0].0;
        let uniform = series.windows(2).all(|w| ((w[1].0 - w[0].0) - h).abs() <= 1e-9 * h.abs().max(1.0));
        if !uniform {
            return Err("sample times are not uniform".into());
        }
        let mut out = Vec::with_capacity(series.len() - 4);
        for i in 2..series.len() - 2 {
            let e = |k: usize| series[k].1;
            let d = (e(i - 2) - 8.0 * e(i - 1) + 8.0 * e(i + 1) - e(i + 2)) / (12.0 * h);
            out.push((series[i].0, d + series[i].2));
        }
        Ok(out)
    }
}

impl Monitor for FluxBalance {
    fn name(&self) -> String {
        "flux-balance".into()
    }

    fn columns(&self) -> Vec<String> {
        vec!["dissipation".into()]
    }

    fn observe(&mut self, state: &State) -> Result<Vec<f64>> {
        let e = entropy_total(state);
        let d = dissipation(state, self.params.eps, self.params.lambda)?;
        self.series.push((state.t, e, d));
        Ok(vec![d])
    }

    fn verdict(&self) -> Verdict {
        match Self::residuals(&self.series) {
            Ok(r) => {
                let worst = r.iter().map(|x| x.1.abs()).fold(0.0, f64::max);
                Verdict::check(
                    "flux-balance",
                    worst,
                    FLUX_BALANCE_TOL,
                    "max |dE/dt + eps int ln(w) g_lambda(zeta)| over interior samples".into(),
                )
            }
            Err(why) => {
                let mut v = Verdict::check("flux-balance", 0.0, FLUX_BALANCE_TOL, "not evaluated".into());
                v.warning = Some(format!("accuracy warning: {why}"));
                v
            }
        }
    }
}
