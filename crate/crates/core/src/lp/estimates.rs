use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{apply, commutator, scales, Projection};
use crate::error::{Error, Result};
use crate::num_serde;
use crate::rng::SeedStream;
use crate::spectral::{random_field, Grid, RandomFieldSpec, SpectralField};

/// Default resolution of the stand-alone `verify_*` entry points.
pub const DEFAULT_MODES: usize = 512;

/// Tolerance for inequalities that hold exactly (coercivity, Cordoba).
pub const EXACT_TOL: f64 = 1e-10;

/// Ratio caps, calibrated with 100 trials of seed 7 at n = 512 and 1024
/// (s = 0.75) and frozen at twice the larger observed maximum.
pub mod caps {
    /// Observed 1.0739.
    pub const CM1: f64 = 2.15;
    /// Observed 0.4562.
    pub const PROD3: f64 = 0.92;
    /// Observed 0.7484.
    pub const PRO_N1: f64 = 1.50;
    /// Observed 0.2168.
    pub const PRO_N2: f64 = 0.44;
    /// Per triple of `prod2_triples`; observed 0.5118, 0.4244, 0.4375.
    pub const PROD2: [f64; 3] = [1.03, 0.85, 0.88];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub name: String,
    pub trials: usize,
    /// Trials with both sides zero.
    pub skipped: usize,
    #[serde(with = "num_serde::real")]
    pub max_ratio: f64,
    #[serde(with = "num_serde::real")]
    pub cap: f64,
    #[serde(with = "num_serde::real_opt")]
    pub min_slack: Option<f64>,
    #[serde(with = "num_serde::real_map")]
    pub params: BTreeMap<String, f64>,
    pub n_modes: usize,
    pub pass: bool,
}

impl EstimateReport {
    fn new(name: &str, n_modes: usize, cap: f64, params: &[(&str, f64)]) -> Self {
        EstimateReport {
            name: name.to_string(),
            trials: 0,
            skipped: 0,
            max_ratio: 0.0,
            cap,
            min_slack: None,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            n_modes,
            pass: true,
        }
    }

    fn fold(mut self, outcomes: Vec<Option<f64>>) -> Self {
        self.trials = outcomes.len();
        for o in outcomes {
            match o {
                Some(r) => self.max_ratio = self.max_ratio.max(r),
                None => self.skipped += 1,
            }
        }
        self.pass = self.max_ratio.is_finite() && self.max_ratio <= self.cap;
        self
    }

    /// A failing report for a run that produced a counterexample.
    pub fn failed(name: &str, n_modes: usize, cap: f64) -> Self {
        let mut r = EstimateReport::new(name, n_modes, cap, &[]);
        r.max_ratio = f64::INFINITY;
        r.pass = false;
        r
    }

    pub fn verdict(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

/// Relative change of `max_ratio` between two resolutions.
///
/// Values within `EXACT_TOL` of zero are round-off on an identity and count
/// as equal.
pub fn refinement_drift(coarse: &EstimateReport, fine: &EstimateReport) -> f64 {
    let a = coarse.max_ratio;
    let b = fine.max_ratio;
    let d = a.abs().max(b.abs());
    if d <= EXACT_TOL {
        0.0
    } else {
        (a - b).abs() / d
    }
}

/// Convex test functions for the pointwise Cordoba-Cordoba check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Convex {
    Linear,
    Square,
    Quartic,
    Exp,
    /// `sigma_0(1 + x) = (1+x) ln(1+x) - x`, for `x > -1`.
    Sigma0Shift,
    /// `min(0, .)^2 / 2` convolved with a centred Gaussian of width `delta`.
    MollifiedNegSquare { delta: f64 },
}

impl Convex {
    pub const CATALOG: [Convex; 6] = [
        Convex::Linear,
        Convex::Square,
        Convex::Quartic,
        Convex::Exp,
        Convex::Sigma0Shift,
        Convex::MollifiedNegSquare { delta: 0.1 },
    ];

    pub fn name(&self) -> String {
        match self {
            Convex::Linear => "x".into(),
            Convex::Square => "x^2".into(),
            Convex::Quartic => "x^4".into(),
            Convex::Exp => "exp".into(),
            Convex::Sigma0Shift => "sigma0(1+x)".into(),
            Convex::MollifiedNegSquare { delta } => format!("min(0,x)^2 mollified (delta={delta})"),
        }
    }

    pub fn from_tag(tag: &str) -> Option<Convex> {
        match tag {
            "x" | "linear" => Some(Convex::Linear),
            "x2" | "square" => Some(Convex::Square),
            "x4" | "quartic" => Some(Convex::Quartic),
            "exp" => Some(Convex::Exp),
            "sigma0" => Some(Convex::Sigma0Shift),
            "negsq" => Some(Convex::MollifiedNegSquare { delta: 0.1 }),
            _ => None,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Convex::Linear => x,
            Convex::Square => x * x,
            Convex::Quartic => x.powi(4),
            Convex::Exp => x.exp(),
            Convex::Sigma0Shift => (1.0 + x) * x.ln_1p() - x,
            Convex::MollifiedNegSquare { delta } => {
                let z = x / delta;
                0.5 * ((x * x + delta * delta) * normal_cdf(-z) - x * delta * normal_pdf(z))
            }
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match *self {
            Convex::Linear => 1.0,
            Convex::Square => 2.0 * x,
            Convex::Quartic => 4.0 * x.powi(3),
            Convex::Exp => x.exp(),
            Convex::Sigma0Shift => x.ln_1p(),
            Convex::MollifiedNegSquare { delta } => {
                let z = x / delta;
                x * normal_cdf(-z) - delta * normal_pdf(z)
            }
        }
    }
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Runs seeded trials of the estimates on one grid.
#[derive(Debug, Clone)]
pub struct Verifier {
    grid: Arc<Grid>,
    seeds: SeedStream,
}

impl Verifier {
    /// Verifier on `[-pi, pi)` with `n` nodes.
    pub fn new(n: usize, seed: u64) -> Result<Self> {
        Ok(Verifier {
            grid: Grid::new(PI, n)?,
            seeds: SeedStream::new(seed),
        })
    }

    pub fn with_grid(grid: Arc<Grid>, seed: u64) -> Self {
        Verifier {
            grid,
            seeds: SeedStream::new(seed),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Band for trial fields: half the dealiased band, so every product
    /// below is computed without truncation.
    fn kmax(&self) -> usize {
        self.grid.dealias_kmax() / 2
    }

    fn field(&self, label: &str, trial: u64, regularity: f64) -> SpectralField {
        let spec = RandomFieldSpec::new(regularity).kmax(self.kmax());
        random_field(&self.grid, &spec, &mut self.seeds.rng(label, trial))
    }

    fn run<T, F>(&self, trials: usize, f: F) -> Result<Vec<Option<T>>>
    where
        T: Send,
        F: Fn(u64) -> Result<Option<T>> + Sync + Send,
    {
        if trials == 0 {
            return Err(Error::param("trials", trials, ">= 1"));
        }
        (0..trials as u64).into_par_iter().map(f).collect()
    }

    /// Largest `|[P_N, P_<<N f] g_x|_2 / (|f_x|_inf |P~_N g|_2)` over scales.
    pub fn cm1_ratio(&self, f: &SpectralField, g: &SpectralField) -> Result<Option<f64>> {
        let fx = f.dx().linf_norm();
        let gscale = g.dx().l2_norm() * (1.0 + f.linf_norm());
        let mut best: Option<f64> = None;
        for n in scales(f) {
            let lhs = commutator(f, g, n)?.l2_norm();
            let rhs = fx * apply(g, n, Projection::Wide).l2_norm();
            match ratio(lhs, rhs, 1e-12 * gscale.max(1e-300)) {
                Ratio::Value(r) => best = Some(best.map_or(r, |b: f64| b.max(r))),
                Ratio::Skip => {}
                Ratio::Counter => {
                    return Err(Error::Counterexample {
                        estimate: "cm1".into(),
                        detail: format!("N = {n}: lhs = {lhs:e} with vanishing right side"),
                    })
                }
            }
        }
        Ok(best)
    }

    pub fn cm1(&self, trials: usize) -> Result<EstimateReport> {
        let out = self.run(trials, |i| {
            let f = self.field("cm1.f", i, 2.0);
            let g = self.field("cm1.g", i, 1.0);
            self.cm1_ratio(&f, &g)
        })?;
        Ok(EstimateReport::new("cm1", self.grid.len(), caps::CM1, &[]).fold(out))
    }

    /// Constant `f` in every trial: all trials are skipped as 0/0.
    pub fn cm1_constant_f(&self, trials: usize) -> Result<EstimateReport> {
        let out = self.run(trials, |i| {
            let f = SpectralField::constant(&self.grid, 1.0 + i as f64);
            let g = self.field("cm1.g", i, 1.0);
            self.cm1_ratio(&f, &g)
        })?;
        Ok(EstimateReport::new("cm1", self.grid.len(), caps::CM1, &[]).fold(out))
    }

    /// Low-frequency chirp `f` against a single high mode `g`.
    pub fn cm1_adversarial(&self) -> Result<EstimateReport> {
        let km = self.kmax();
        let f = SpectralField::from_fn(&self.grid, |x| (2.0 * x + 3.0 * x.sin()).cos())
            .map_coeffs(|xi, c| if xi.abs() <= 16.0 { c } else { c * 0.0 });
        let k = (3 * km / 4) as f64;
        let g = SpectralField::from_fn(&self.grid, move |x| (k * x).cos());
        let r = self.cm1_ratio(&f, &g)?;
        Ok(EstimateReport::new("cm1-adversarial", self.grid.len(), caps::CM1, &[("k", k)]).fold(vec![r]))
    }

    /// Reports for (prod2) over a fixed triple family, (prod3), (proN1), (proN2).
    pub fn products(&self, trials: usize, s: f64) -> Result<Vec<EstimateReport>> {
        if !(s > 0.5) {
            return Err(Error::param("s", s, "> 1/2"));
        }
        let reg = s + 2.0;
        let pair = |i: u64| (self.field("prod.f", i, reg), self.field("prod.g", i, reg));
        let mut out = Vec::new();
        for ((p, r, t), cap) in prod2_triples(s).into_iter().zip(caps::PROD2) {
            let res = self.run(trials, |i| {
                let (f, g) = pair(i);
                Ok(prod2_ratio(&f, &g, p, r, t))
            })?;
            out.push(
                EstimateReport::new("prod2", self.grid.len(), cap, &[("p", p), ("r", r), ("t", t)])
                    .fold(res),
            );
        }
        let res = self.run(trials, |i| {
            let (f, g) = pair(i);
            Ok(prod3_ratio(&f, &g, s))
        })?;
        out.push(EstimateReport::new("prod3", self.grid.len(), caps::PROD3, &[("s", s)]).fold(res));
        let res = self.run(trials, |i| {
            let (f, g) = pair(i);
            pro_n_norm(&f, &g, s, false)
        })?;
        out.push(EstimateReport::new("proN1", self.grid.len(), caps::PRO_N1, &[("s", s)]).fold(res));
        let res = self.run(trials, |i| {
            let (f, g) = pair(i);
            pro_n_norm(&f, &g, s, true)
        })?;
        out.push(EstimateReport::new("proN2", self.grid.len(), caps::PRO_N2, &[("s", s)]).fold(res));
        Ok(out)
    }

    /// `|f_x|^2_{H^{lambda/2-1+s}} / (g_lambda Lambda^s f, Lambda^s f)`; must be `<= 1`.
    pub fn coercivity(&self, trials: usize, s: f64, lambda: f64) -> Result<EstimateReport> {
        if !(lambda > 0.0 && lambda <= 2.0) {
            return Err(Error::param("lambda", lambda, "in (0, 2]"));
        }
        if !(s >= 0.0) {
            return Err(Error::param("s", s, ">= 0"));
        }
        let out = self.run(trials, |i| {
            let f = self.field("gl1.f", i, s + 0.5 * lambda + 1.0);
            coercivity_terms(&f, s, lambda)
        })?;
        let mut slack: Option<f64> = None;
        let mut ratios = Vec::with_capacity(out.len());
        for o in out {
            ratios.push(o.map(|(lhs, rhs)| rhs / lhs));
            if let Some((lhs, rhs)) = o {
                let sl = (lhs - rhs) / lhs;
                slack = Some(slack.map_or(sl, |m: f64| m.min(sl)));
            }
        }
        if let Some(m) = slack {
            if m < -EXACT_TOL {
                return Err(Error::Counterexample {
                    estimate: "gl1".into(),
                    detail: format!("relative slack {m:e}"),
                });
            }
        }
        let mut rep = EstimateReport::new("gl1", self.grid.len(), 1.0 + EXACT_TOL, &[("s", s), ("lambda", lambda)])
            .fold(ratios);
        rep.min_slack = slack;
        Ok(rep)
    }

    /// Normalised worst pointwise defect `g_lambda(alpha(phi)) - alpha'(phi) g_lambda(phi)`.
    pub fn cordoba(&self, trials: usize, lambda: f64, alpha: Convex) -> Result<EstimateReport> {
        if !(lambda > 0.0 && lambda <= 2.0) {
            return Err(Error::param("lambda", lambda, "in (0, 2]"));
        }
        let kmax = self.grid.len() / 16;
        let out = self.run(trials, |i| {
            let spec = RandomFieldSpec::new(3.0).kmax(kmax);
            let raw = random_field(&self.grid, &spec, &mut self.seeds.rng("lem1.phi", i));
            let m = raw.linf_norm();
            if m == 0.0 {
                return Ok(None);
            }
            let phi = raw.scale(0.5 / m);
            Ok(Some(cordoba_defect(&phi, lambda, alpha)?))
        })?;
        let worst = out.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
        if worst > EXACT_TOL {
            return Err(Error::Counterexample {
                estimate: format!("lem1[{}]", alpha.name()),
                detail: format!("normalised defect {worst:e}"),
            });
        }
        let mut rep = EstimateReport::new(
            &format!("lem1[{}]", alpha.name()),
            self.grid.len(),
            EXACT_TOL,
            &[("lambda", lambda)],
        );
        rep.max_ratio = f64::NEG_INFINITY;
        let mut rep = rep.fold(out);
        rep.min_slack = Some(-rep.max_ratio);
        Ok(rep)
    }
}

enum Ratio {
    Value(f64),
    Skip,
    Counter,
}

fn ratio(lhs: f64, rhs: f64, tol: f64) -> Ratio {
    if rhs > 0.0 {
        Ratio::Value(lhs / rhs)
    } else if lhs <= tol {
        Ratio::Skip
    } else {
        Ratio::Counter
    }
}

fn prod2_triples(s: f64) -> Vec<(f64, f64, f64)> {
    vec![(s, s, s), (s + 1.0, s - 1.0, s - 1.0), (1.0, 0.6, 0.0)]
}

pub(crate) fn prod2_ratio(f: &SpectralField, g: &SpectralField, p: f64, r: f64, t: f64) -> Option<f64> {
    let rhs = f.sobolev_norm(p) * g.sobolev_norm(r);
    (rhs > 0.0).then(|| f.mul(g).sobolev_norm(t) / rhs)
}

pub(crate) fn prod3_ratio(f: &SpectralField, g: &SpectralField, s: f64) -> Option<f64> {
    let rhs = f.linf_norm() * g.sobolev_norm(s) + f.sobolev_norm(s) * g.linf_norm();
    (rhs > 0.0).then(|| f.mul(g).sobolev_norm(s) / rhs)
}

/// `l^2` norm of the sequence `delta_N` of (proN1) or, with `second`, (proN2).
pub(crate) fn pro_n_norm(f: &SpectralField, g: &SpectralField, s: f64, second: bool) -> Result<Option<f64>> {
    let gx = g.dx();
    let rhs = if second {
        f.sobolev_norm(s + 1.0) * g.sobolev_norm(s - 1.0)
    } else {
        (f.sobolev_norm(s + 1.0) * g.linf_norm()).min(f.sobolev_norm(s) * gx.linf_norm())
    };
    let mut sum = 0.0;
    let mut lhs_max: f64 = 0.0;
    let exp = if second { s - 1.0 } else { s };
    for n in scales(f) {
        let lhs = n.powf(exp) * apply(&apply(f, n, Projection::High).mul(&gx), n, Projection::Block).l2_norm();
        lhs_max = lhs_max.max(lhs);
        if rhs > 0.0 {
            sum += (lhs / rhs).powi(2);
        }
    }
    let tol = 1e-12 * (1.0 + f.linf_norm()) * (1.0 + gx.l2_norm());
    let name = if second { "proN2" } else { "proN1" };
    match ratio(lhs_max, rhs, tol) {
        Ratio::Value(_) => Ok(Some(sum.sqrt())),
        Ratio::Skip => Ok(None),
        Ratio::Counter => Err(Error::Counterexample {
            estimate: name.into(),
            detail: format!("lhs = {lhs_max:e} with vanishing right side"),
        }),
    }
}

/// Both sides of the squared coercivity bound, LHS by quadrature on samples.
pub(crate) fn coercivity_terms(f: &SpectralField, s: f64, lambda: f64) -> Result<Option<(f64, f64)>> {
    let ls = f.bessel(s);
    let gl = ls.g_lambda(lambda)?;
    let dx = f.grid().dx();
    let lhs: f64 = dx * gl.samples().iter().zip(ls.samples()).map(|(a, b)| a * b).sum::<f64>();
    let rhs = f.dx().sobolev_norm(0.5 * lambda - 1.0 + s).powi(2);
    let scale = f.sobolev_norm(s + 0.5 * lambda).powi(2);
    if lhs <= 1e-14 * scale && rhs <= 1e-14 * scale {
        return Ok(None);
    }
    Ok(Some((lhs, rhs)))
}

pub(crate) fn cordoba_defect(phi: &SpectralField, lambda: f64, alpha: Convex) -> Result<f64> {
    let a_phi = phi.map_samples(|v| alpha.value(v));
    let left = a_phi.g_lambda(lambda)?;
    let gphi = phi.g_lambda(lambda)?;
    let right: Vec<f64> = phi
        .samples()
        .iter()
        .zip(gphi.samples())
        .map(|(&p, &g)| alpha.deriv(p) * g)
        .collect();
    let scale = left.linf_norm() + right.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let worst = left
        .samples()
        .iter()
        .zip(&right)
        .map(|(l, r)| l - r)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(worst / scale)
}

pub fn verify_cm1(trials: usize, seed: u64) -> Result<EstimateReport> {
    Verifier::new(DEFAULT_MODES, seed)?.cm1(trials)
}

pub fn verify_products(trials: usize, s: f64, seed: u64) -> Result<Vec<EstimateReport>> {
    Verifier::new(DEFAULT_MODES, seed)?.products(trials, s)
}

pub fn verify_coercivity(trials: usize, s: f64, lambda: f64, seed: u64) -> Result<EstimateReport> {
    Verifier::new(DEFAULT_MODES, seed)?.coercivity(trials, s, lambda)
}

pub fn verify_cordoba(trials: usize, lambda: f64, alpha: Convex, seed: u64) -> Result<EstimateReport> {
    Verifier::new(DEFAULT_MODES, seed)?.cordoba(trials, lambda, alpha)
}
