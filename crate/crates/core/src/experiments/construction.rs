use rayon::prelude::*;

use super::{completion, data_of, grids, mollify, run_snapshots, DataKind, StudyKind, StudyReport};
use crate::dynamics::{ModelParams, State};
use crate::entropy::{entropy_total, orlicz_functional, Verdict};
use crate::error::Result;
use crate::io::SolverConfig;

/// Slack of the Jensen step `int sigma0(1 + rho_n * zeta0) <= int sigma0(1 + zeta0)`.
pub const JENSEN_TOL: f64 = 1e-8;
/// Slack of the uniform entropy bound.
pub const BOUND_TOL: f64 = 1e-6;

/// Classical system (`eps = mu = 0`) from `(rho_n * zeta0, rho_n * u0)`
/// with rough-orlicz `zeta0`, for every mollifier width `1/n`.
///
/// The bound checked is `E_n(t) <= |u0|^2_{H^1}/2 + int sigma0(1 + zeta0)`,
/// which implies the variant with `|u0|^2_{H^1}` on the right.
pub fn entropy_construction(c: &SolverConfig) -> Result<StudyReport> {
    let mut rep = StudyReport::new(
        StudyKind::EntropyConstruction,
        &["n_grid", "n", "orlicz0_n", "l2_zeta0_n", "min_w0_n", "entropy0_n", "sup_entropy_n", "entropy0"],
    );
    let data = data_of(c, DataKind::RoughOrlicz);
    let params = ModelParams { eps: 0.0, lambda: c.lambda, mu: 0.0 };
    let mut sup_all = f64::NEG_INFINITY;
    for grid in grids(c)? {
        let ng = grid.len();
        let label = format!("n={ng}");
        let state0 = data.build(&grid)?;
        let e0 = entropy_total(&state0);
        let orlicz0 = orlicz_functional(&state0.zeta);
        let mollified: Vec<State> = c
            .widths
            .iter()
            .map(|&n| State::new(mollify(&state0.zeta, n), mollify(&state0.u, n), 0.0))
            .collect::<Result<_>>()?;
        let runs: Vec<_> = mollified
            .par_iter()
            .map(|s0| run_snapshots(c, s0, params))
            .collect::<Result<_>>()?;
        rep.verdicts.push(completion(&runs.iter().collect::<Vec<_>>(), &label));

        let mut min_w = f64::INFINITY;
        let mut jensen = f64::NEG_INFINITY;
        let mut excess = f64::NEG_INFINITY;
        let mut l2_ok = true;
        for ((&n, s0), run) in c.widths.iter().zip(&mollified).zip(&runs) {
            let o = orlicz_functional(&s0.zeta);
            let l2 = s0.zeta.l2_norm();
            let w = s0.min_depth();
            let sup_e = run.column("entropy").expect("base column").into_iter().fold(f64::NEG_INFINITY, f64::max);
            min_w = min_w.min(w);
            jensen = jensen.max(o - orlicz0);
            excess = excess.max(sup_e - e0);
            l2_ok &= l2.is_finite();
            sup_all = sup_all.max(sup_e);
            rep.rows.push(vec![ng as f64, n as f64, o, l2, w, entropy_total(s0), sup_e, e0]);
        }
        rep.verdicts.push(Verdict {
            monitor: format!("non-cavitation@{label}"),
            pass: min_w > 0.0,
            value: min_w,
            tolerance: 0.0,
            detail: "min over n and nodes of 1 + rho_n * zeta0 (must be > 0)".into(),
            warning: None,
        });
        rep.verdicts.push(Verdict::check(
            &format!("jensen@{label}"),
            jensen,
            JENSEN_TOL,
            "max over n of int sigma0(1 + rho_n * zeta0) - int sigma0(1 + zeta0)".into(),
        ));
        rep.verdicts.push(Verdict::check(
            &format!("entropy-bound@{label}"),
            excess,
            BOUND_TOL,
            format!("max over n, t of E_n(t) - E(0); E(0) = {e0:.9e}"),
        ));
        rep.verdicts.push(Verdict {
            monitor: format!("l2-finite@{label}"),
            pass: l2_ok,
            value: if l2_ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            detail: "|rho_n * zeta0|_{L^2} finite for every n".into(),
            warning: None,
        });
        rep.info.insert(format!("entropy0@{label}"), e0);
        rep.info.insert(format!("reference_bound@{label}"), state0.u.sobolev_norm(1.0).powi(2) + orlicz0);
    }
    rep.info.insert("sup_entropy".into(), sup_all);
    rep.firewall();
    Ok(rep)
}
