use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::kernel::{hurwitz_zeta, kernel_eval, tail_series};
use super::{evolve, EvolveOptions, KernelSpec, Model, ModelParams, Physics, Scheme, State};
use crate::error::{Error, Result};
use crate::num_serde;
use crate::spectral::{Grid, MultiplierSpec, SpectralField};

/// Residuals of `zeta_t = -eps g_lambda zeta` evolved to `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemigroupResidual {
    /// Max-abs gap between the time stepper and `exp(-eps t |xi|^lambda) zeta0^`.
    #[serde(with = "num_serde::real")]
    pub spectral: f64,
    /// Max-abs gap between the time stepper and a direct periodic convolution
    /// with the real-line kernel.
    #[serde(with = "num_serde::real")]
    pub convolution: f64,
}

impl SemigroupResidual {
    pub fn max(&self) -> f64 {
        self.spectral.max(self.convolution)
    }
}

/// Evolves `zeta0` (with `u = 0`, coupling and nonlinearity off) to time
/// `t` and compares against the two closed routes. `mu` is ignored.
pub fn semigroup_consistency(zeta0: &SpectralField, p: &ModelParams, t: f64) -> Result<SemigroupResidual> {
    p.validate()?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::param("t", t, "a finite real >= 0"));
    }
    if t == 0.0 || p.eps == 0.0 {
        return Ok(SemigroupResidual { spectral: 0.0, convolution: 0.0 });
    }
    let grid = zeta0.grid();
    let params = ModelParams { mu: 0.0, ..*p };
    let model = Model::new(params).with_physics(Physics::diffusion_only());
    let state0 = State::new(zeta0.clone(), SpectralField::zeros(grid), 0.0)?;
    let opts = EvolveOptions::new(t).scheme(Scheme::Ifrk4).sample_interval(t);
    let traj = evolve(&state0, &model, &opts, &mut [])?;
    let evolved = traj.final_state.zeta.samples().to_vec();

    let z0 = zeta0.dealias();
    let exact = z0.apply_multiplier(&MultiplierSpec::Semigroup { a: p.eps * t, lambda: p.lambda })?;
    let spectral = max_gap(&evolved, exact.samples());

    let spec = KernelSpec::new(p.lambda, p.eps, t)?;
    let n = grid.len();
    let r = refinement(&spec, grid)?;
    let fine = Grid::new(grid.half_length(), n * r)?;
    let kper = periodised_kernel(&spec, &fine)?;
    let nf = fine.len();
    let dx = fine.dx();
    let zf = z0.resample(&fine)?;
    let f = zf.samples();
    let conv: Vec<f64> = (0..n)
        .map(|i| dx * (0..nf).map(|j| f[j] * kper[(i * r + nf - j) % nf]).sum::<f64>())
        .collect();
    let convolution = max_gap(&evolved, &conv);
    Ok(SemigroupResidual { spectral, convolution })
}

/// Oversampling factor for the convolution quadrature. The rule on spacing
/// `h` sees the symbol aliased by `2 pi / h`; the factor is chosen so that
/// the alias of the dealiased band is damped below `e^{-36}`.
fn refinement(spec: &KernelSpec, grid: &Grid) -> Result<usize> {
    let band = grid.xi_max_dealiased();
    let mut r = 1;
    loop {
        let shift = 2.0 * std::f64::consts::PI * r as f64 / grid.dx() - band;
        if spec.a() * shift.powf(spec.lambda) >= 36.0 {
            return Ok(r);
        }
        r *= 2;
        if 4 * grid.len() * r > 1 << 22 {
            return Err(Error::Domain(format!(
                "kernel too narrow for direct convolution on this grid (a = {}, lambda = {})",
                spec.a(),
                spec.lambda
            )));
        }
    }
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `sum_m K(d dx + 2mL)` for `d = 0..n`: the images `|m| <= 1` read from a
/// kernel sampled on `[-4L, 4L)`, the rest summed from the large-`|x|`
/// expansion.
fn periodised_kernel(spec: &KernelSpec, grid: &Arc<Grid>) -> Result<Vec<f64>> {
    let n = grid.len();
    let l = grid.half_length();
    let wide = Grid::new(4.0 * l, 4 * n)?;
    let k = kernel_eval(spec, &wide)?;
    // node y = -4L + j dx, so y = r has index (r + 4L)/dx = r/dx + 2n
    let at = |offset: i64| k[(offset + 2 * n as i64) as usize];
    let (b, _) = tail_series(spec, 3.0 * l);
    let two_l = 2.0 * l;
    let half = n as i64 / 2;
    Ok((0..n as i64)
        .map(|d| {
            let r = if d < half { d } else { d - n as i64 };
            let x = r as f64 * grid.dx();
            let near = at(r) + at(r + n as i64) + at(r - n as i64);
            let far: f64 = b
                .iter()
                .enumerate()
                .map(|(j, bj)| {
                    let p = spec.lambda * (j + 1) as f64 + 1.0;
                    bj * two_l.powf(-p) * (hurwitz_zeta(p, 2.0 + x / two_l) + hurwitz_zeta(p, 2.0 - x / two_l))
                })
                .sum();
            near + far
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_is_exact() {
        let g = Grid::new(8.0, 64).unwrap();
        let z = SpectralField::from_fn(&g, |x| (-x * x).exp());
        let r = semigroup_consistency(&z, &ModelParams::new(0.1, 1.0, 0.0).unwrap(), 0.0).unwrap();
        assert_eq!(r.max(), 0.0);
    }
}
