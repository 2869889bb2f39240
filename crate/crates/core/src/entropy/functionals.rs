use serde::{Deserialize, Serialize};

use crate::dynamics::State;
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// `sigma_0(w) = w ln w - w + 1`, with `sigma_0(0) = 1`.
pub fn sigma0(w: f64) -> Result<f64> {
    if w < 0.0 || w.is_nan() {
        return Err(Error::Domain(format!("sigma0 needs w >= 0, got {w}")));
    }
    Ok(sigma0_unchecked(w))
}

pub(crate) fn sigma0_unchecked(w: f64) -> f64 {
    if w == 0.0 {
        1.0
    } else {
        w * w.ln() - w + 1.0
    }
}

/// `sigma_0'(w) = ln w`.
pub fn sigma0_prime(w: f64) -> f64 {
    w.ln()
}

/// Flux of the hyperbolic part, `f(w, u) = (w u, w + u^2/2)`.
pub fn flux(w: f64, u: f64) -> (f64, f64) {
    (w * u, w + 0.5 * u * u)
}

/// Entropy `eta(w, u) = u^2/2 + sigma_0(w)`.
pub fn entropy_density(w: f64, u: f64) -> f64 {
    0.5 * u * u + sigma0_unchecked(w)
}

/// Entropy flux `q(w, u) = u w ln w + u^3/3`, normalised so `q(1, 0) = 0`.
pub fn entropy_flux(w: f64, u: f64) -> f64 {
    let wl = if w == 0.0 { 0.0 } else { w * w.ln() };
    u * wl + u * u * u / 3.0
}

/// `int sigma_0(1 + zeta) dx` by the trapezoidal rule; `+inf` on cavitation.
pub fn orlicz_functional(zeta: &SpectralField) -> f64 {
    let s = zeta.samples();
    if s.iter().any(|&z| !(1.0 + z > 0.0)) {
        return f64::INFINITY;
    }
    zeta.grid().dx() * s.iter().map(|&z| sigma0_unchecked(1.0 + z)).sum::<f64>()
}

/// `|u|^2_{H^1} / 2 + int sigma_0(1 + zeta) dx`.
pub fn entropy_total(state: &State) -> f64 {
    0.5 * state.u.sobolev_norm(1.0).powi(2) + orlicz_functional(&state.zeta)
}

/// `eps int ln(1 + zeta) g_lambda(zeta) dx`, the entropy dissipation rate.
pub fn dissipation(state: &State, eps: f64, lambda: f64) -> Result<f64> {
    if eps == 0.0 {
        return Ok(0.0);
    }
    let g = state.zeta.g_lambda(lambda)?;
    let dx = state.grid().dx();
    let s: f64 = state
        .zeta
        .samples()
        .iter()
        .zip(g.samples())
        .map(|(&z, &gz)| (1.0 + z).ln() * gz)
        .sum();
    Ok(eps * dx * s)
}

/// Constants of the Orlicz sandwich, measured on a dense sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrliczCalibration {
    pub m: f64,
    /// `min sigma_0(1+x)/x^2` over `(-1, M]`.
    pub c1: f64,
    /// `min sigma_0(1+x)/(x ln x)` over `[M, inf)`.
    pub c2: f64,
    /// `sup sigma_0(1+x)/x^2` over `(-1, inf)`: the constant in
    /// `int sigma_0(1+zeta) <= C |zeta|_2^2`.
    pub upper: f64,
}

impl OrliczCalibration {
    pub fn calibrate(m: f64) -> Result<Self> {
        if !(m > 1.0 && m.is_finite()) {
            return Err(Error::param("M", m, "a finite real > 1"));
        }
        let r1 = |x: f64| sigma0_unchecked(1.0 + x) / (x * x);
        let r2 = |x: f64| sigma0_unchecked(1.0 + x) / (x * x.ln());
        let mut c1 = f64::INFINITY;
        let mut upper: f64 = 0.0;
        let n = 200_000;
        for i in 1..=n {
            // dense in (-1, M], avoiding the removable point x = 0
            let x = -1.0 + (m + 1.0) * i as f64 / n as f64;
            if x.abs() < 1e-6 {
                c1 = c1.min(0.5);
                upper = upper.max(0.5);
                continue;
            }
            c1 = c1.min(r1(x));
            upper = upper.max(r1(x));
        }
        upper = upper.max(1.0); // limit at x -> -1
        let mut c2 = f64::INFINITY;
        for i in 0..=n {
            let x = m * (1e8f64).powf(i as f64 / n as f64);
            c2 = c2.min(r2(x));
            upper = upper.max(r1(x));
        }
        Ok(OrliczCalibration { m, c1, c2, upper })
    }
}
