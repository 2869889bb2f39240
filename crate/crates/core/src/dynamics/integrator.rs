use std::sync::Arc;

use num_complex::Complex64;

use super::rhs::{nonstiff, Symbols};
use super::{Model, Scheme, State};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

type C = Complex64;

/// Samples beyond this magnitude count as blow-up.
pub const BLOWUP_LIMIT: f64 = 1e8;

/// Largest stable `dt` estimate for `state`: `2.8 / rho` with
/// `rho = xi_max (|u|_inf + |zeta|_inf) + 1`, plus the damping rate for RK4.
pub fn stability_bound(state: &State, model: &Model, scheme: Scheme) -> f64 {
    let g = state.grid();
    let xm = g.xi_max_dealiased();
    let mut rho = xm * (state.u.linf_norm() + state.zeta.linf_norm()) + 1.0;
    if scheme == Scheme::Rk4 {
        let p = &model.params;
        let xf = g.xi_max();
        rho += p.eps * xf.powf(p.lambda) / (1.0 + p.mu * xf * xf);
    }
    2.8 / rho
}

/// `0.5 dx / max(1, |u|_inf + 1)`.
pub fn auto_dt(state: &State) -> f64 {
    0.5 * state.grid().dx() / (state.u.linf_norm() + 1.0).max(1.0)
}

/// Fixed-step integrator for one grid, model and `dt`.
pub struct Stepper {
    grid: Arc<Grid>,
    model: Model,
    scheme: Scheme,
    dt: f64,
    sym: Symbols,
    e_half: Vec<f64>,
    e_full: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: &Arc<Grid>, model: &Model, scheme: Scheme, dt: f64) -> Result<Self> {
        model.params.validate()?;
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::param("dt", dt, "finite and nonzero"));
        }
        let sym = Symbols::new(grid, model);
        let e_half = sym.rate.iter().map(|r| (-r * 0.5 * dt).exp()).collect();
        let e_full = sym.rate.iter().map(|r| (-r * dt).exp()).collect();
        Ok(Stepper {
            grid: grid.clone(),
            model: model.clone(),
            scheme,
            dt,
            sym,
            e_half,
            e_full,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn eval(&self, z: &[C], u: &[C], t: f64) -> (Vec<C>, Vec<C>) {
        let (mut fz, fu) = nonstiff(&self.grid, &self.model, &self.sym, z, u, t);
        if self.scheme == Scheme::Rk4 {
            for i in 0..fz.len() {
                fz[i] -= z[i] * self.sym.rate[i];
            }
        }
        (fz, fu)
    }

    /// One step of size `dt`. Fails with `BlowUp` on non-finite or huge values.
    pub fn step(&self, s: &State) -> Result<State> {
        let (z, u) = match self.scheme {
            Scheme::Ifrk4 => self.ifrk4(s.zeta.coeffs(), s.u.coeffs(), s.t),
            Scheme::Rk4 => self.rk4(s.zeta.coeffs(), s.u.coeffs(), s.t),
        };
        let t = s.t + self.dt;
        check_blowup(&z, t)?;
        check_blowup(&u, t)?;
        Ok(State {
            zeta: SpectralField::from_coeffs_unchecked(&self.grid, z),
            u: SpectralField::from_coeffs_unchecked(&self.grid, u),
            t,
        })
    }

    fn rk4(&self, z0: &[C], u0: &[C], t: f64) -> (Vec<C>, Vec<C>) {
        let h = self.dt;
        let axpy = |x: &[C], a: f64, y: &[C]| -> Vec<C> { x.iter().zip(y).map(|(p, q)| p + q * a).collect() };
        let (k1z, k1u) = self.eval(z0, u0, t);
        let (k2z, k2u) = self.eval(&axpy(z0, 0.5 * h, &k1z), &axpy(u0, 0.5 * h, &k1u), t + 0.5 * h);
        let (k3z, k3u) = self.eval(&axpy(z0, 0.5 * h, &k2z), &axpy(u0, 0.5 * h, &k2u), t + 0.5 * h);
        let (k4z, k4u) = self.eval(&axpy(z0, h, &k3z), &axpy(u0, h, &k3u), t + h);
        let comb = |x: &[C], k1: &[C], k2: &[C], k3: &[C], k4: &[C]| -> Vec<C> {
            (0..x.len())
                .map(|i| x[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0))
                .collect()
        };
        (comb(z0, &k1z, &k2z, &k3z, &k4z), comb(u0, &k1u, &k2u, &k3u, &k4u))
    }

    fn ifrk4(&self, z0: &[C], u0: &[C], t: f64) -> (Vec<C>, Vec<C>) {
        let h = self.dt;
        let n = z0.len();
        let (eh, ef) = (&self.e_half, &self.e_full);
        let (k1z, k1u) = self.eval(z0, u0, t);
        let za: Vec<C> = (0..n).map(|i| (z0[i] + k1z[i] * (0.5 * h)) * eh[i]).collect();
        let ua: Vec<C> = (0..n).map(|i| u0[i] + k1u[i] * (0.5 * h)).collect();
        let (k2z, k2u) = self.eval(&za, &ua, t + 0.5 * h);
        let zb: Vec<C> = (0..n).map(|i| z0[i] * eh[i] + k2z[i] * (0.5 * h)).collect();
        let ub: Vec<C> = (0..n).map(|i| u0[i] + k2u[i] * (0.5 * h)).collect();
        let (k3z, k3u) = self.eval(&zb, &ub, t + 0.5 * h);
        let zc: Vec<C> = (0..n).map(|i| z0[i] * ef[i] + k3z[i] * (h * eh[i])).collect();
        let uc: Vec<C> = (0..n).map(|i| u0[i] + k3u[i] * h).collect();
        let (k4z, k4u) = self.eval(&zc, &uc, t + h);
        let z1 = (0..n)
            .map(|i| z0[i] * ef[i] + (k1z[i] * ef[i] + (k2z[i] + k3z[i]) * (2.0 * eh[i]) + k4z[i]) * (h / 6.0))
            .collect();
        let u1 = (0..n)
            .map(|i| u0[i] + (k1u[i] + (k2u[i] + k3u[i]) * 2.0 + k4u[i]) * (h / 6.0))
            .collect();
        (z1, u1)
    }
}

fn check_blowup(c: &[C], t: f64) -> Result<()> {
    let mut bound = 0.0;
    for v in c {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::BlowUp {
                t,
                detail: "non-finite coefficient".into(),
            });
        }
        bound += v.norm();
    }
    // sum |c_k| bounds the sup norm of the samples.
    if bound > BLOWUP_LIMIT {
        return Err(Error::BlowUp {
            t,
            detail: format!("coefficient l1 norm {bound:e} exceeds {BLOWUP_LIMIT:e}"),
        });
    }
    Ok(())
}

/// Single step with a fresh stepper; rejects `dt` above the stability bound.
pub fn step(state: &State, model: &Model, dt: f64, scheme: Scheme) -> Result<State> {
    let bound = stability_bound(state, model, scheme);
    if dt.abs() > bound {
        return Err(Error::Config(format!("dt = {dt} exceeds the stability bound {bound:.6e}")));
    }
    Stepper::new(state.grid(), model, scheme, dt)?.step(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{ModelParams, Physics};
    use std::f64::consts::PI;

    #[test]
    fn zero_state_is_fixed() {
        let g = Grid::new(PI, 32).unwrap();
        let m = Model::new(ModelParams::new(0.1, 1.0, 0.0).unwrap());
        let s = step(&State::zeros(&g), &m, 0.01, Scheme::Ifrk4).unwrap();
        assert_eq!(s.zeta.linf_norm(), 0.0);
        assert!((s.t - 0.01).abs() < 1e-15);
    }

    #[test]
    fn integrating_factor_is_exact_for_pure_damping() {
        let g = Grid::new(PI, 32).unwrap();
        let m = Model::new(ModelParams::new(0.3, 1.5, 0.0).unwrap()).with_physics(Physics::diffusion_only());
        let k = 3.0f64;
        let z = SpectralField::from_fn(&g, |x| (k * x).cos());
        let s0 = State::new(z, SpectralField::zeros(&g), 0.0).unwrap();
        let dt = 0.1;
        let s1 = step(&s0, &m, dt, Scheme::Ifrk4).unwrap();
        let f = (-0.3 * k.powf(1.5) * dt).exp();
        for (x, v) in g.nodes().iter().zip(s1.zeta.samples()) {
            assert!((v - f * (k * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn oversized_dt_is_rejected() {
        let g = Grid::new(PI, 64).unwrap();
        let m = Model::new(ModelParams::classical());
        let s0 = State::new(
            SpectralField::from_fn(&g, |x| 0.5 * x.cos()),
            SpectralField::from_fn(&g, |x| 0.5 * x.sin()),
            0.0,
        )
        .unwrap();
        assert!(matches!(step(&s0, &m, 10.0, Scheme::Rk4), Err(Error::Config(_))));
    }
}
