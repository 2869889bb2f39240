//! Weak-form residuals against space-time test functions
//! `psi(t, x) = B((t - t_c)/tau) B((x - x_c)/h)` with the compactly
//! supported bump `B(s) = exp(a - a/(1 - s^2))`.
//!
//! For the Bona-Smith system with sources `(S_zeta, S_u)` the residuals are
//!
//! `R_1 = int int [zeta psi_t - mu zeta psi_txx + u psi_x + u zeta psi_x - eps zeta g_lambda psi + S_zeta psi]`
//! `R_2 = int int [(psi_t - psi_txx) u + zeta psi_x + u^2/2 psi_x + S_u psi]`
//!
//! with no initial terms since `psi` vanishes near `t = 0`.

use std::sync::Arc;

use rayon::prelude::*;

use super::{data_of, grids, orders, StudyKind, StudyReport};
use crate::dynamics::{evolve, EvolveOptions, Forcing, Model, ModelParams, State, Trajectory};
use crate::entropy::Verdict;
use crate::error::{Error, Result};
use crate::io::SolverConfig;
use crate::spectral::{Grid, MultiplierSpec, SpectralField};

/// Flatness of the bump.
const BUMP_A: f64 = 4.0;
/// Oversampling used for `g_lambda` of the spatial factor.
const OVERSAMPLE: usize = 8;
/// Manufactured-solution residual tolerance.
pub const MMS_TOL: f64 = 1e-6;
/// Required refinement order of the benchmark residual.
pub const ORDER_MIN: f64 = 2.0;

/// `(B, B', B'')` at `s`.
fn bump(s: f64) -> (f64, f64, f64) {
    if s.abs() >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let a = BUMP_A;
    let q = 1.0 - s * s;
    let b = (a - a / q).exp();
    let d1 = -2.0 * a * s / (q * q) * b;
    let d2 = b * (4.0 * a * a * s * s / q.powi(4) - 2.0 * a / (q * q) - 8.0 * a * s * s / q.powi(3));
    (b, d1, d2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub t_center: f64,
    pub t_half: f64,
    pub x_center: f64,
    pub x_half: f64,
}

impl TestFunction {
    /// Support must sit strictly inside `(0, T) x (-L, L)`.
    pub fn check_support(&self, t_final: f64, half_length: f64) -> Result<()> {
        self.check_window(0.0, t_final, half_length)
    }

    fn check_window(&self, t0: f64, t_final: f64, half_length: f64) -> Result<()> {
        let ok_t = self.t_half > 0.0 && self.t_center - self.t_half > t0 && self.t_center + self.t_half < t_final;
        let ok_x = self.x_half > 0.0 && self.x_center.abs() + self.x_half < half_length;
        if ok_t && ok_x {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "test function support [{}, {}] x [{}, {}] is not inside ({t0}, {t_final}) x (-{half_length}, {half_length})",
                self.t_center - self.t_half,
                self.t_center + self.t_half,
                self.x_center - self.x_half,
                self.x_center + self.x_half
            )))
        }
    }

    /// `(theta, theta')` of the time factor.
    fn time(&self, t: f64) -> (f64, f64) {
        let (b, d, _) = bump((t - self.t_center) / self.t_half);
        (b, d / self.t_half)
    }

    /// Samples of `X, X', X''` and `g_lambda X` of the space factor.
    fn space(&self, grid: &Arc<Grid>, lambda: f64) -> Result<[Vec<f64>; 4]> {
        let h = self.x_half;
        let mut x0 = Vec::with_capacity(grid.len());
        let mut x1 = Vec::with_capacity(grid.len());
        let mut x2 = Vec::with_capacity(grid.len());
        for &x in grid.nodes() {
            let (b, d1, d2) = bump((x - self.x_center) / h);
            x0.push(b);
            x1.push(d1 / h);
            x2.push(d2 / (h * h));
        }
        let fine = Grid::new(grid.half_length(), OVERSAMPLE * grid.len())?;
        let xf = SpectralField::from_fn(&fine, |x| bump((x - self.x_center) / h).0);
        let g = xf.g_lambda(lambda)?;
        let gx = g.samples().iter().step_by(OVERSAMPLE).copied().collect();
        Ok([x0, x1, x2, gx])
    }
}

/// Default family: one time window, three spatial windows.
pub fn default_test_functions(t_final: f64, half_length: f64) -> Vec<TestFunction> {
    let h = (0.25 * half_length).min(8.0);
    [-0.5 * h, 0.0, 0.5 * h]
        .into_iter()
        .map(|xc| TestFunction {
            t_center: 0.5 * t_final,
            t_half: 0.4 * t_final,
            x_center: xc,
            x_half: h,
        })
        .collect()
}

/// `(R_1, R_2)` per test function, by the trapezoid rule over the stored
/// snapshots (which must be uniformly spaced) and the grid.
pub fn weak_residual_of(
    traj: &Trajectory,
    params: &ModelParams,
    forcing: Option<&dyn Forcing>,
    tests: &[TestFunction],
) -> Result<Vec<(f64, f64)>> {
    let snaps = &traj.snapshots;
    if snaps.len() < 3 {
        return Err(Error::Config("weak residual needs at least 3 stored snapshots".into()));
    }
    let grid = snaps[0].grid().clone();
    let t0 = snaps[0].t;
    let t_end = snaps[snaps.len() - 1].t;
    let h = (t_end - t0) / (snaps.len() - 1) as f64;
    let dx = grid.dx();
    let (eps, mu) = (params.eps, params.mu);
    let sources: Vec<Option<(SpectralField, SpectralField)>> =
        snaps.iter().map(|s| forcing.map(|f| f.eval(s.t, &grid))).collect();
    tests
        .iter()
        .map(|tf| {
            tf.check_window(t0, t_end, grid.half_length())?;
            let [x0, x1, x2, gx] = tf.space(&grid, params.lambda)?;
            let mut r1 = 0.0;
            let mut r2 = 0.0;
            for (s, src) in snaps.iter().zip(&sources) {
                let (th, thd) = tf.time(s.t);
                if th == 0.0 && thd == 0.0 {
                    continue;
                }
                let z = s.zeta.samples();
                let u = s.u.samples();
                let mut i1 = 0.0;
                let mut i2 = 0.0;
                for j in 0..z.len() {
                    let psi = th * x0[j];
                    let psi_t = thd * x0[j];
                    let psi_x = th * x1[j];
                    let psi_txx = thd * x2[j];
                    let g = th * gx[j];
                    i1 += z[j] * psi_t - mu * z[j] * psi_txx + u[j] * psi_x + u[j] * z[j] * psi_x - eps * z[j] * g;
                    i2 += (psi_t - psi_txx) * u[j] + z[j] * psi_x + 0.5 * u[j] * u[j] * psi_x;
                    if let Some((sz, su)) = src {
                        i1 += sz.samples()[j] * psi;
                        i2 += su.samples()[j] * psi;
                    }
                }
                r1 += i1;
                r2 += i2;
            }
            Ok((r1 * h * dx, r2 * h * dx))
        })
        .collect()
}

/// Manufactured solution
/// `zeta* = 0.2 (1 + sin(t)/2) G(x - 0.3t)`, `u* = 0.1 cos(t) G(x + 0.2t)`,
/// `G(y) = exp(-(y/2)^2)`, with the sources that make it exact.
#[derive(Debug, Clone, Copy)]
pub struct Mms {
    pub params: ModelParams,
}

/// `(G, G', G'', G''')` at `y`.
fn g_derivs(y: f64) -> [f64; 4] {
    let g = (-(0.5 * y).powi(2)).exp();
    [g, -0.5 * y * g, (0.25 * y * y - 0.5) * g, (0.75 * y - 0.125 * y.powi(3)) * g]
}

impl Mms {
    fn amps(t: f64) -> (f64, f64, f64, f64) {
        (0.2 * (1.0 + 0.5 * t.sin()), 0.1 * t.cos(), 0.1 * t.cos(), -0.1 * t.sin())
    }

    pub fn exact(&self, t: f64, grid: &Arc<Grid>) -> State {
        let (a, _, b, _) = Self::amps(t);
        State {
            zeta: SpectralField::from_fn(grid, |x| a * g_derivs(x - 0.3 * t)[0]),
            u: SpectralField::from_fn(grid, |x| b * g_derivs(x + 0.2 * t)[0]),
            t,
        }
    }
}

impl Forcing for Mms {
    fn eval(&self, t: f64, grid: &Arc<Grid>) -> (SpectralField, SpectralField) {
        let (a, ad, b, bd) = Self::amps(t);
        let ModelParams { eps, lambda, mu } = self.params;
        let n = grid.len();
        let mut sz = Vec::with_capacity(n);
        let mut su = Vec::with_capacity(n);
        for &x in grid.nodes() {
            let gz = g_derivs(x - 0.3 * t);
            let gu = g_derivs(x + 0.2 * t);
            let z = a * gz[0];
            let zx = a * gz[1];
            let zt = ad * gz[0] - 0.3 * a * gz[1];
            let ztxx = ad * gz[2] - 0.3 * a * gz[3];
            let u = b * gu[0];
            let ux = b * gu[1];
            let ut = bd * gu[0] + 0.2 * b * gu[1];
            let utxx = bd * gu[2] + 0.2 * b * gu[3];
            sz.push(zt - mu * ztxx + ux + ux * z + u * zx);
            su.push(ut - utxx + zx + u * ux);
        }
        let mut fz = SpectralField::from_samples(grid, sz).expect("grid length");
        if eps > 0.0 {
            let z = self.exact(t, grid).zeta;
            let g = z
                .apply_multiplier(&MultiplierSpec::Fractal { lambda })
                .expect("finite symbol");
            fz = fz.add(&g.scale(eps));
        }
        (fz, SpectralField::from_samples(grid, su).expect("grid length"))
    }
}

fn evolve_every_step(state0: &State, model: &Model, t_final: f64, dt: f64) -> Result<Trajectory> {
    let opts = EvolveOptions::new(t_final).dt(dt).sample_interval(dt).keep_snapshots();
    evolve(state0, model, &opts, &mut [])
}

fn worst(res: &[(f64, f64)]) -> (f64, f64) {
    res.iter().fold((0.0, 0.0), |(a, b), (r1, r2)| (a.max(r1.abs()), b.max(r2.abs())))
}

/// Manufactured-solution residual at `n` and `2n`, and the refinement
/// order of the benchmark residual under simultaneous `dt, dx` halving.
pub fn weak_residual(c: &SolverConfig) -> Result<StudyReport> {
    let mut rep = StudyReport::new(StudyKind::WeakResidual, &["case", "n", "dt", "r_zeta", "r_u", "residual", "order"]);
    let params = c.params();
    let tests = default_test_functions(c.t_final, c.half_length);
    for tf in &tests {
        tf.check_support(c.t_final, c.half_length)?;
    }
    let levels = c.refinements;
    let dt_fine = c.weak_dt / (1 << (levels - 1)) as f64;

    // manufactured solution
    let mms = Mms { params };
    for grid in grids(c)? {
        let ng = grid.len();
        let model = Model::new(params).with_forcing(Arc::new(mms));
        let traj = evolve_every_step(&mms.exact(0.0, &grid), &model, c.t_final, dt_fine)?;
        let (r1, r2) = worst(&weak_residual_of(&traj, &params, Some(&mms), &tests)?);
        let err = traj.final_state.distance(&mms.exact(c.t_final, &grid), 0.0, 0.0)?;
        rep.rows.push(vec![0.0, ng as f64, dt_fine, r1, r2, r1 + r2, f64::NAN]);
        rep.info.insert(format!("mms_final_l2_error@n={ng}"), err);
        rep.verdicts.push(Verdict::check(
            &format!("mms@n={ng}"),
            r1 + r2,
            MMS_TOL,
            "max over test functions of |R_1| + |R_2| for the forced manufactured run".into(),
        ));
    }

    // benchmark refinement
    let data = data_of(c, c.data);
    let n0 = (c.n_modes >> (levels - 1)).max(64);
    let runs: Vec<(usize, f64, (f64, f64))> = (0..levels)
        .into_par_iter()
        .map(|i| {
            let n = n0 << i;
            let dt = c.weak_dt / (1 << i) as f64;
            let grid = Grid::new(c.half_length, n)?;
            let traj = evolve_every_step(&data.build(&grid)?, &Model::new(params), c.t_final, dt)?;
            if !traj.completed() {
                return Err(Error::BlowUp { t: traj.final_state.t, detail: "benchmark refinement run".into() });
            }
            Ok((n, dt, worst(&weak_residual_of(&traj, &params, None, &tests)?)))
        })
        .collect::<Result<_>>()?;
    let dts: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let res: Vec<f64> = runs.iter().map(|r| r.2 .0 + r.2 .1).collect();
    let ords = orders(&dts, &res);
    for (i, (n, dt, (r1, r2))) in runs.iter().enumerate() {
        let o = if i == 0 { f64::NAN } else { ords[i - 1] };
        rep.rows.push(vec![1.0, *n as f64, *dt, *r1, *r2, r1 + r2, o]);
    }
    let min_order = ords.iter().cloned().fold(f64::INFINITY, f64::min);
    rep.verdicts.push(Verdict {
        monitor: "refinement-order".into(),
        pass: min_order >= ORDER_MIN,
        value: min_order,
        tolerance: ORDER_MIN,
        detail: "smallest local order of the benchmark residual under dt, dx halving (must be >= tolerance)".into(),
        warning: None,
    });
    rep.firewall();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_derivatives() {
        for &s in &[-0.7, -0.2, 0.0, 0.3, 0.8] {
            let h = 1e-5;
            let (_, d1, d2) = bump(s);
            let fd1 = (bump(s + h).0 - bump(s - h).0) / (2.0 * h);
            let fd2 = (bump(s + h).1 - bump(s - h).1) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-7, "{s}");
            assert!((d2 - fd2).abs() < 1e-6, "{s}");
        }
    }

    #[test]
    fn gaussian_derivatives() {
        for &y in &[-3.0, -0.5, 1.2, 2.5] {
            let h = 1e-5;
            for k in 0..3 {
                let fd = (g_derivs(y + h)[k] - g_derivs(y - h)[k]) / (2.0 * h);
                assert!((g_derivs(y)[k + 1] - fd).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn support_violation_is_config_error() {
        let tf = TestFunction { t_center: 0.5, t_half: 0.6, x_center: 0.0, x_half: 1.0 };
        assert!(matches!(tf.check_support(2.0, 10.0), Err(Error::Config(_))));
    }
}
