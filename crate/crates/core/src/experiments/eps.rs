use rayon::prelude::*;

use super::{completion, data_of, decreasing, grids, orders, run_snapshots, sup_distance, StudyKind, StudyReport};
use crate::dynamics::ModelParams;
use crate::error::Result;
use crate::io::SolverConfig;

/// Informational target for the empirical order.
pub const ORDER_TARGET: f64 = 0.9;

/// `sup_t (|zeta^eps - zeta|_{H^s} + |u^eps - u|_{H^{s+1}})` against the
/// `eps = 0` run, for each `eps` in `eps_list`.
pub fn eps_convergence(c: &SolverConfig) -> Result<StudyReport> {
    let mut rep = StudyReport::new(StudyKind::EpsConvergence, &["n", "eps", "sup_diff", "order"]);
    let data = data_of(c, c.data);
    let mut worst_order = f64::INFINITY;
    for grid in grids(c)? {
        let n = grid.len();
        let state0 = data.build(&grid)?;
        let mut eps: Vec<f64> = vec![0.0];
        eps.extend(&c.eps_list);
        let runs: Vec<_> = eps
            .par_iter()
            .map(|&e| run_snapshots(c, &state0, ModelParams { eps: e, lambda: c.lambda, mu: 0.0 }))
            .collect::<Result<_>>()?;
        let label = format!("n={n}");
        let done = completion(&runs.iter().collect::<Vec<_>>(), &label);
        let ok = done.pass;
        rep.verdicts.push(done);
        if !ok {
            rep.firewall();
            return Ok(rep);
        }
        let diffs: Vec<f64> = runs[1..]
            .iter()
            .map(|r| sup_distance(r, &runs[0], c.s, c.s + 1.0))
            .collect::<Result<_>>()?;
        let ord = orders(&c.eps_list, &diffs);
        rep.rows.push(vec![n as f64, 0.0, 0.0, f64::NAN]);
        for (i, (&e, &d)) in c.eps_list.iter().zip(&diffs).enumerate() {
            let o = if i == 0 { f64::NAN } else { ord[i - 1] };
            rep.rows.push(vec![n as f64, e, d, o]);
        }
        rep.verdicts.push(decreasing(&format!("decreasing@{label}"), &diffs));
        let lo = ord.iter().cloned().fold(f64::INFINITY, f64::min);
        worst_order = worst_order.min(lo);
        rep.info.insert(format!("min_order@{label}"), lo);
        let ts = 1.0 / (1.0 + state0.u.sobolev_norm(c.s + 1.0) + state0.zeta.sobolev_norm(c.s));
        rep.info.insert("T_s".into(), ts);
    }
    if worst_order.is_finite() && worst_order < ORDER_TARGET {
        rep.warnings.push(format!(
            "empirical order {worst_order:.3} is below the informational target {ORDER_TARGET}"
        ));
    }
    rep.firewall();
    Ok(rep)
}
