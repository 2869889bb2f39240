use std::sync::Arc;

use num_complex::Complex64;

use super::{Model, State};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

type C = Complex64;

/// Precomputed symbols of the linear operators on one grid.
pub(crate) struct Symbols {
    /// `-i xi / (1 + mu xi^2)` (Nyquist zeroed).
    pub dz: Vec<C>,
    /// `-i xi / (1 + xi^2)` (Nyquist zeroed).
    pub du: Vec<C>,
    pub h_mu: Vec<f64>,
    pub h_one: Vec<f64>,
    /// Damping rate `eps |xi|^lambda / (1 + mu xi^2)`.
    pub rate: Vec<f64>,
}

impl Symbols {
    pub fn new(grid: &Grid, model: &Model) -> Self {
        let p = &model.params;
        let ny = grid.nyquist_slot();
        let mut s = Symbols {
            dz: Vec::with_capacity(grid.len()),
            du: Vec::with_capacity(grid.len()),
            h_mu: Vec::with_capacity(grid.len()),
            h_one: Vec::with_capacity(grid.len()),
            rate: Vec::with_capacity(grid.len()),
        };
        for (i, &xi) in grid.xi().iter().enumerate() {
            let hm = 1.0 / (1.0 + p.mu * xi * xi);
            let h1 = 1.0 / (1.0 + xi * xi);
            let d = if i == ny { 0.0 } else { xi };
            s.dz.push(C::new(0.0, -d * hm));
            s.du.push(C::new(0.0, -d * h1));
            s.h_mu.push(hm);
            s.h_one.push(h1);
            let g = if xi == 0.0 { 0.0 } else { xi.abs().powf(p.lambda) };
            s.rate.push(p.eps * g * hm);
        }
        s
    }
}

/// Evaluates everything except the `eps g_lambda` damping, in coefficients.
pub(crate) fn nonstiff(
    grid: &Arc<Grid>,
    model: &Model,
    sym: &Symbols,
    z: &[C],
    u: &[C],
    t: f64,
) -> (Vec<C>, Vec<C>) {
    let n = z.len();
    let ph = model.physics;
    let mut fz = vec![C::new(0.0, 0.0); n];
    let mut fu = vec![C::new(0.0, 0.0); n];
    if ph.coupling {
        fz.copy_from_slice(u);
        fu.copy_from_slice(z);
    }
    if ph.nonlinear {
        let zf = SpectralField::from_coeffs_unchecked(grid, z.to_vec());
        let uf = SpectralField::from_coeffs_unchecked(grid, u.to_vec());
        let us = uf.samples();
        let uz: Vec<f64> = us.iter().zip(zf.samples()).map(|(a, b)| a * b).collect();
        let uu: Vec<f64> = us.iter().map(|a| 0.5 * a * a).collect();
        let uz = SpectralField::from_samples_unchecked(grid, uz).dealias();
        let uu = SpectralField::from_samples_unchecked(grid, uu).dealias();
        for i in 0..n {
            fz[i] += uz.coeffs()[i];
            fu[i] += uu.coeffs()[i];
        }
    }
    for i in 0..n {
        fz[i] *= sym.dz[i];
        fu[i] *= sym.du[i];
    }
    if let Some(f) = &model.forcing {
        let (sz, su) = f.eval(t, grid);
        let (sz, su) = (sz.dealias(), su.dealias());
        for i in 0..n {
            fz[i] += sz.coeffs()[i] * sym.h_mu[i];
            fu[i] += su.coeffs()[i] * sym.h_one[i];
        }
    }
    (fz, fu)
}

/// `(d zeta/dt, du/dt)` of the full system, damping included.
pub fn rhs(state: &State, model: &Model) -> Result<(SpectralField, SpectralField)> {
    model.params.validate()?;
    if !(state.zeta.all_finite() && state.u.all_finite()) {
        return Err(Error::BlowUp {
            t: state.t,
            detail: "non-finite input state".into(),
        });
    }
    let grid = state.grid().clone();
    let sym = Symbols::new(&grid, model);
    let (mut fz, fu) = nonstiff(&grid, model, &sym, state.zeta.coeffs(), state.u.coeffs(), state.t);
    for (i, c) in state.zeta.coeffs().iter().enumerate() {
        fz[i] -= c * sym.rate[i];
    }
    let out_z = SpectralField::from_coeffs_unchecked(&grid, fz);
    let out_u = SpectralField::from_coeffs_unchecked(&grid, fu);
    if !(out_z.all_finite() && out_u.all_finite()) {
        return Err(Error::BlowUp {
            t: state.t,
            detail: "non-finite right-hand side".into(),
        });
    }
    Ok((out_z, out_u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ModelParams;
    use std::f64::consts::PI;

    #[test]
    fn zero_state_gives_zero() {
        let g = Grid::new(PI, 32).unwrap();
        let m = Model::new(ModelParams::new(0.1, 1.0, 0.01).unwrap());
        let (a, b) = rhs(&State::zeros(&g), &m).unwrap();
        assert_eq!(a.linf_norm(), 0.0);
        assert_eq!(b.linf_norm(), 0.0);
    }

    #[test]
    fn single_mode_expansion() {
        let g = Grid::new(PI, 64).unwrap();
        let a = 1e-3;
        let st = State::new(
            SpectralField::zeros(&g),
            SpectralField::from_fn(&g, |x| a * x.sin()),
            0.0,
        )
        .unwrap();
        let (dz, du) = rhs(&st, &Model::new(ModelParams::classical())).unwrap();
        for (x, v) in g.nodes().iter().zip(dz.samples()) {
            assert!((v + a * x.cos()).abs() < 1e-15);
        }
        // u u_x = (a^2/2) sin 2x, and (1 - d_xx)^{-1} divides mode 2 by 5.
        for (x, v) in g.nodes().iter().zip(du.samples()) {
            assert!((v + a * a * (2.0 * x).sin() / 10.0).abs() < 1e-17);
        }
    }
}
