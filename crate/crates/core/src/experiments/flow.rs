use rayon::prelude::*;

use super::data::windowed_random;
use super::{data_of, decreasing, grids, run_snapshots, sup_distance, DataKind, StudyKind, StudyReport};
use crate::dynamics::{evolve, EvolveOptions, Model, ModelParams, State};
use crate::entropy::{MonitorContext, MonitorSpec, Verdict};
use crate::error::Result;
use crate::io::SolverConfig;
use crate::rng::SeedStream;

/// Perturbation direction with `|phi_zeta|_{H^s} + |phi_u|_{H^{s+1}} = 1`.
fn direction(c: &SolverConfig, grid: &std::sync::Arc<crate::spectral::Grid>) -> Result<State> {
    let seeds = SeedStream::new(c.seed).child("flow-direction");
    let z = windowed_random(grid, &seeds, "zeta", c.s + 1.5, c.data_cutoff)?;
    let u = windowed_random(grid, &seeds, "u", c.s + 2.5, c.data_cutoff)?;
    let norm = z.sobolev_norm(c.s) + u.sobolev_norm(c.s + 1.0);
    State::new(z.scale(1.0 / norm), u.scale(1.0 / norm), 0.0)
}

fn perturb(base: &State, dir: &State, delta: f64) -> State {
    State {
        zeta: base.zeta.add(&dir.zeta.scale(delta)),
        u: base.u.add(&dir.u.scale(delta)),
        t: 0.0,
    }
}

/// Distance of solutions from data `delta` apart, maximised over the
/// `(eps, lambda)` grid, plus non-cavitation of perturbed near-cavitation data.
pub fn flow_continuity(c: &SolverConfig) -> Result<StudyReport> {
    let mut rep = StudyReport::new(
        StudyKind::FlowContinuity,
        &["n", "delta", "max_distance", "worst_eps", "worst_lambda", "ratio"],
    );
    let points: Vec<ModelParams> = c
        .eps_grid
        .iter()
        .flat_map(|&eps| c.lambda_grid.iter().map(move |&lambda| ModelParams { eps, lambda, mu: 0.0 }))
        .collect();
    for grid in grids(c)? {
        let ng = grid.len();
        let label = format!("n={ng}");
        let base = data_of(c, c.data).build(&grid)?;
        let cav = data_of(c, DataKind::NearCavitation).build(&grid)?;
        let dir = direction(c, &grid)?;

        // rows indexed by (point, delta); distance to the unperturbed run
        let table: Vec<Vec<f64>> = points
            .par_iter()
            .map(|p| {
                let b = run_snapshots(c, &base, *p)?;
                c.deltas
                    .iter()
                    .map(|&d| {
                        let r = run_snapshots(c, &perturb(&base, &dir, d), *p)?;
                        if !r.completed() || !b.completed() {
                            return Ok(f64::NAN);
                        }
                        sup_distance(&r, &b, c.s, c.s + 1.0)
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        rep.rows.push(vec![ng as f64, 0.0, 0.0, f64::NAN, f64::NAN, f64::NAN]);
        let mut maxes = Vec::new();
        for (j, &d) in c.deltas.iter().enumerate() {
            let (k, m) = table
                .iter()
                .enumerate()
                .map(|(k, row)| (k, row[j]))
                .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 || v.is_nan() { (k, v) } else { acc });
            let ratio = maxes.last().map_or(f64::NAN, |p: &f64| m / p);
            maxes.push(m);
            rep.rows.push(vec![ng as f64, d, m, points[k].eps, points[k].lambda, ratio]);
        }
        rep.verdicts.push(decreasing(&format!("decreasing@{label}"), &maxes));
        rep.info.insert(
            format!("max_lipschitz@{label}"),
            maxes.iter().zip(&c.deltas).map(|(m, d)| m / d).fold(0.0, f64::max),
        );

        // perturbed near-cavitation data
        let cav_runs: Vec<(f64, bool)> = points
            .par_iter()
            .flat_map_iter(|p| c.deltas.iter().map(move |&d| (*p, d)))
            .map(|(p, d)| {
                let ctx = MonitorContext { params: p, s: c.s };
                let mut mons = vec![MonitorSpec::MinPrinciple.build(&ctx)];
                let mut opts = EvolveOptions::new(c.t_final).scheme(c.scheme).sample_interval(c.sample_interval);
                if let Some(dt) = c.dt {
                    opts = opts.dt(dt);
                }
                let tr = evolve(&perturb(&cav, &dir, d), &Model::new(p), &opts, &mut mons)?;
                let lo = tr.column("min_w").expect("base column").into_iter().fold(f64::INFINITY, f64::min);
                let lo = if tr.completed() { lo } else { f64::NAN };
                Ok((lo, tr.verdicts.iter().all(|v| v.pass)))
            })
            .collect::<Result<_>>()?;
        let lo = cav_runs.iter().map(|r| r.0).fold(f64::INFINITY, |a, b| if b.is_nan() { b } else { a.min(b) });
        rep.verdicts.push(Verdict {
            monitor: format!("non-cavitation@{label}"),
            pass: lo > 0.0,
            value: lo,
            tolerance: 0.0,
            detail: "min over runs and samples of 1 + zeta for perturbed near-cavitation data (must be > 0)".into(),
            warning: None,
        });
        let fails = cav_runs.iter().filter(|r| !r.1).count();
        rep.verdicts.push(Verdict::check(
            &format!("min-principle@{label}"),
            fails as f64,
            0.0,
            format!("runs failing the minimum-principle monitor, of {}", cav_runs.len()),
        ));
    }
    rep.firewall();
    Ok(rep)
}
