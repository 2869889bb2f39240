use std::f64::consts::PI;

use super::{Model, ModelParams, Physics, Scheme, State, Stepper};
use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// `omega(k) = k / sqrt(1 + k^2)`, the linear dispersion relation at `eps = mu = 0`.
pub fn linear_frequency(k: f64) -> f64 {
    k / (1.0 + k * k).sqrt()
}

/// Frequency of a right-going plane wave `cos(k x - omega t)` measured from
/// the phase of `zeta_k` after evolving the linearised system to `t_final`.
pub fn measured_frequency(k: u32, dt: f64, t_final: f64, scheme: Scheme) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("k", 0.0, "a positive integer"));
    }
    let kf = k as f64;
    let w = linear_frequency(kf);
    if !(t_final > 0.0 && w * t_final < PI) {
        return Err(Error::param("T", t_final, "in (0, pi / omega(k))"));
    }
    let n = (8 * k as usize).next_power_of_two().max(16);
    let grid = Grid::new(PI, n)?;
    let zeta = SpectralField::from_fn(&grid, |x| (kf * x).cos());
    let u = zeta.scale(w / kf);
    let model = Model::new(ModelParams::classical()).with_physics(Physics::linear());
    let steps = (t_final / dt).round().max(1.0) as usize;
    let stepper = Stepper::new(&grid, &model, scheme, t_final / steps as f64)?;
    let mut s = State::new(zeta, u, 0.0)?;
    for _ in 0..steps {
        s = stepper.step(&s)?;
    }
    let c = s.zeta.coeffs()[grid.slot(k as i64).expect("mode inside the grid")];
    Ok(-c.arg() / t_final)
}
