use rayon::prelude::*;

use super::{completion, data_of, decreasing, grids, run_snapshots, sup_distance, StudyKind, StudyReport};
use crate::dynamics::{ModelParams, State};
use crate::entropy::Verdict;
use crate::error::{Error, Result};
use crate::io::SolverConfig;
use crate::lp::sharp_truncation;
use crate::spectral::SpectralField;

/// Exponents `r` of the truncation bound check.
pub const TRUNCATION_ORDERS: [f64; 3] = [0.5, 1.0, 2.0];

/// Largest coefficient-wise excess of `<xi>^{2(s+r)} |c|^2` over
/// `<n>^{2r} <xi>^{2s} |c|^2` on the support of `S_n f`, relative to the
/// right-hand side.
fn coefficient_excess(f: &SpectralField, n: f64, s: f64, r: f64) -> f64 {
    let sn = sharp_truncation(f, n);
    let cap = (1.0 + n * n).powf(r);
    sn.coeffs()
        .iter()
        .zip(sn.grid().xi())
        .filter(|(c, _)| c.norm_sqr() > 0.0)
        .map(|(c, &xi)| {
            let w = 1.0 + xi * xi;
            let lhs = w.powf(s + r) * c.norm_sqr();
            let rhs = cap * w.powf(s) * c.norm_sqr();
            (lhs - rhs) / rhs
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Runs the Bona-Smith system from `(S_n zeta0, S_n u0)` with `mu = n^{-5}`
/// and tabulates consecutive differences in `H^{s-1} x H^s`.
pub fn bona_smith_study(c: &SolverConfig) -> Result<StudyReport> {
    let mut rep = StudyReport::new(
        StudyKind::BonaSmith,
        &["n_grid", "n1", "n2", "mu1", "mu2", "sup_diff", "ratio"],
    );
    let data = data_of(c, c.data);
    let n_list: Vec<f64> = c.n_list.iter().map(|&n| n as f64).collect();
    for grid in grids(c)? {
        let ng = grid.len();
        let label = format!("n={ng}");
        let top = *n_list.last().expect("validated nonempty");
        if top > grid.xi_max_dealiased() {
            return Err(Error::Config(format!(
                "truncation frequency {top} exceeds the dealiased band {:.3} of n = {ng}; raise n or L",
                grid.xi_max_dealiased()
            )));
        }
        let state0 = data.build(&grid)?;

        // |S_n f|_{H^{s+r}} <= n^r |f|_{H^s} on the data, and the
        // coefficient form with <n>^r
        let mut power_worst = f64::NEG_INFINITY;
        let mut coeff_worst = f64::NEG_INFINITY;
        for &n in &n_list {
            for &r in &TRUNCATION_ORDERS {
                for (f, s) in [(&state0.zeta, c.s), (&state0.u, c.s + 1.0)] {
                    let lhs = sharp_truncation(f, n).sobolev_norm(s + r);
                    let rhs = n.powf(r) * f.sobolev_norm(s);
                    if rhs > 0.0 {
                        power_worst = power_worst.max((lhs - rhs) / rhs);
                    }
                    coeff_worst = coeff_worst.max(coefficient_excess(f, n, s, r));
                }
            }
        }
        rep.verdicts.push(Verdict::check(
            &format!("truncation-bound@{label}"),
            power_worst,
            0.0,
            "max over n, r and both fields of (|S_n f|_{H^{s+r}} - n^r |f|_{H^s}) / (n^r |f|_{H^s})".into(),
        ));
        rep.verdicts.push(Verdict::check(
            &format!("truncation-coefficients@{label}"),
            coeff_worst,
            1e-12,
            "max relative excess of <xi>^{2(s+r)}|c|^2 over <n>^{2r}<xi>^{2s}|c|^2".into(),
        ));

        let runs: Vec<_> = n_list
            .par_iter()
            .map(|&n| {
                let s0 = State::new(sharp_truncation(&state0.zeta, n), sharp_truncation(&state0.u, n), 0.0)?;
                run_snapshots(c, &s0, ModelParams { eps: c.eps, lambda: c.lambda, mu: n.powi(-5) })
            })
            .collect::<Result<_>>()?;
        let done = completion(&runs.iter().collect::<Vec<_>>(), &label);
        let ok = done.pass;
        rep.verdicts.push(done);
        if !ok {
            break;
        }
        let mut diffs = Vec::new();
        for i in 0..runs.len() - 1 {
            let d = sup_distance(&runs[i], &runs[i + 1], c.s - 1.0, c.s)?;
            let ratio = diffs.last().map_or(f64::NAN, |p: &f64| d / p);
            diffs.push(d);
            let (a, b) = (n_list[i], n_list[i + 1]);
            rep.rows.push(vec![ng as f64, a, b, a.powi(-5), b.powi(-5), d, ratio]);
        }
        rep.verdicts.push(decreasing(&format!("decreasing@{label}"), &diffs));
    }
    rep.firewall();
    Ok(rep)
}
